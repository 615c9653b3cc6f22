#include "mlwb/linguistic.hpp"

#include <algorithm>
#include <array>

namespace mlwb {

namespace {

struct ScaleDef {
  std::vector<std::string> labels;
  std::vector<int> positions;
  std::string_view name;
};

const ScaleDef &def(Scale scale) {
  static const std::array<ScaleDef, 4> defs{{
      {{"Low", "Medium", "High", "Very High"}, {1, 2, 3, 4}, "canonical"},
      {{"None", "Low", "Medium", "High"}, {0, 1, 2, 3}, "none-to-high"},
      {{"Low", "Medium", "High"}, {1, 2, 3}, "low-to-high"},
      {{"None", "Partial", "High"}, {0, 2, 3}, "parallelism"},
  }};
  return defs[static_cast<std::size_t>(scale)];
}

} // namespace

LinguisticValue::LinguisticValue(Scale scale, std::string_view label)
    : scale_(scale), rank_(0) {
  const auto &labels = def(scale).labels;
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw LinguisticError("unknown label '" + std::string(label) +
                          "' on scale " + std::string(def(scale).name));
  }
  rank_ = static_cast<int>(it - labels.begin()) + 1;
}

LinguisticValue LinguisticValue::from_rank(Scale scale, int rank) {
  if (rank < 1 || rank > scale_size(scale)) {
    throw LinguisticError("rank " + std::to_string(rank) +
                          " out of range on scale " +
                          std::string(def(scale).name));
  }
  return LinguisticValue(scale, rank, 0);
}

std::optional<LinguisticValue> LinguisticValue::try_parse(Scale scale,
                                                          std::string_view label) {
  const auto &labels = def(scale).labels;
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end())
    return std::nullopt;
  return LinguisticValue(scale, static_cast<int>(it - labels.begin()) + 1, 0);
}

const std::string &LinguisticValue::label() const {
  return def(scale_).labels[static_cast<std::size_t>(rank_ - 1)];
}

int LinguisticValue::position() const {
  return def(scale_).positions[static_cast<std::size_t>(rank_ - 1)];
}

const std::vector<std::string> &scale_labels(Scale scale) {
  return def(scale).labels;
}

int scale_size(Scale scale) {
  return static_cast<int>(def(scale).labels.size());
}

std::string_view scale_name(Scale scale) { return def(scale).name; }

int rank(const LinguisticValue &v) { return v.rank(); }

double fuzzy_leq(const LinguisticValue &v1, const LinguisticValue &v2) {
  // (3 - d) / 3 keeps the worked values correctly rounded (2/3, 1/3).
  const int d = v1.position() - v2.position();
  if (d <= 0)
    return 1.0;
  if (d >= 3)
    return 0.0;
  return static_cast<double>(3 - d) / 3.0;
}

LinguisticValue complement(const LinguisticValue &v) {
  if (v.scale() != Scale::Canonical) {
    throw LinguisticError("complement is only defined on the canonical scale, got " +
                          std::string(scale_name(v.scale())));
  }
  return LinguisticValue::from_rank(Scale::Canonical, 5 - v.rank());
}

LinguisticValue to_canonical_by_rank(const LinguisticValue &v) {
  return LinguisticValue::from_rank(Scale::Canonical, v.rank());
}

double normalized(const LinguisticValue &v) {
  const int n = scale_size(v.scale());
  return static_cast<double>(v.rank() - 1) / static_cast<double>(n - 1);
}

} // namespace mlwb
