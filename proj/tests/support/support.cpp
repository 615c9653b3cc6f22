#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mlwb::testing {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path fixture_path(const std::string &name) { return fs::path(MLWB_FIXTURE_DIR) / name; }

std::string read_fixture(const std::string &name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  if (!in)
    throw std::runtime_error("missing fixture " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_fixture_json(const std::string &name) { return json::parse(read_fixture(name)); }

fs::path seed_catalog_path() { return fs::path(MLWB_DATA_DIR) / "catalog.json"; }

const Catalog &seed_catalog() {
  static const Catalog c = load_catalog_file(seed_catalog_path());
  return c;
}

std::optional<std::string> json_diff(const json &a, const json &b, double tol) {
  if (a.is_number() && b.is_number()) {
    double x = a.get<double>(), y = b.get<double>();
    if (std::fabs(x - y) <= tol)
      return std::nullopt;
    return ": " + a.dump() + " != " + b.dump();
  }
  if (a.type() != b.type())
    return ": type " + std::string(a.type_name()) + " != " + b.type_name();
  if (a.is_object()) {
    if (a.size() != b.size())
      return ": object sizes differ";
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key()))
        return "." + it.key() + ": missing";
      if (auto d = json_diff(it.value(), b.at(it.key()), tol))
        return "." + it.key() + *d;
    }
    return std::nullopt;
  }
  if (a.is_array()) {
    if (a.size() != b.size())
      return ": array sizes differ";
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (auto d = json_diff(a[i], b[i], tol))
        return "[" + std::to_string(i) + "]" + *d;
    }
    return std::nullopt;
  }
  if (a != b)
    return ": " + a.dump() + " != " + b.dump();
  return std::nullopt;
}

TempDir::TempDir(const std::string &tag) {
  static std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto p = fs::temp_directory_path() / ("mlwb-" + tag + "-" + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

namespace {

template <typename T>
const T &pick(Rng &rng, const std::vector<T> &v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool coin(Rng &rng, double p) { return std::bernoulli_distribution(p)(rng); }

Care random_care(Rng &rng) {
  return static_cast<Care>(std::uniform_int_distribution<int>(0, 3)(rng));
}

LinguisticValue random_level(Rng &rng, Scale s) {
  return LinguisticValue::from_rank(s, std::uniform_int_distribution<int>(1, scale_size(s))(rng));
}

} // namespace

AlgorithmFamilyProfile random_family(Rng &rng, const std::string &id) {
  AlgorithmFamilyProfile f;
  f.id = id;
  f.name = id;
  for (const auto &c : standard_criteria()) {
    std::vector<std::string> values = c.allowed_values;
    std::shuffle(values.begin(), values.end(), rng);
    std::size_t n = 1;
    if (coin(rng, 0.35))
      n = std::uniform_int_distribution<std::size_t>(2, values.size())(rng);
    values.resize(n);
    f.values[c.id] = values;
  }
  return f;
}

Catalog random_catalog(Rng &rng, int families) {
  Catalog c = make_empty_catalog();
  for (int i = 0; i < families; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "fam_%03d", i);
    c.families.push_back(random_family(rng, id));
  }
  return c;
}

MLProblem random_problem(Rng &rng) {
  MLProblem p;
  p.id = "p-random";
  const double present = 0.55;
  using RT = RequirementType;
  using PT = PropertyType;

  if (coin(rng, present)) {
    double acc = std::uniform_real_distribution<double>(0.5, 1.0)(rng);
    if (coin(rng, 0.3))
      acc = pick(rng, std::vector<double>{0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.0});
    p.domain_requirements.push_back({RT::Accuracy, acc, random_care(rng)});
  }
  for (auto t : {RT::Explainability, RT::Interpretability, RT::Adaptability}) {
    if (coin(rng, present))
      p.domain_requirements.push_back({t, coin(rng, 0.8), random_care(rng)});
  }
  for (auto t : {RT::CostCpu, RT::CostData}) {
    if (coin(rng, present))
      p.domain_requirements.push_back({t, random_level(rng, Scale::Canonical), random_care(rng)});
  }
  if (coin(rng, present)) {
    double ms = std::exp(std::uniform_real_distribution<double>(0.0, std::log(5000.0))(rng));
    p.domain_requirements.push_back(
        {RT::DecisionSpeed, DecisionSpeed{pick(rng, kSpeedMetrics), ms}, random_care(rng)});
  }

  if (coin(rng, present))
    p.data_properties.push_back(
        {PT::Labeling, static_cast<Labeling>(std::uniform_int_distribution<int>(0, 2)(rng))});
  if (coin(rng, present))
    p.data_properties.push_back({PT::Volume, random_level(rng, Scale::LowToHigh)});
  if (coin(rng, present))
    p.data_properties.push_back({PT::MissingValues, random_level(rng, Scale::NoneToHigh)});
  if (coin(rng, present)) {
    std::set<DataKind> kinds;
    for (auto k : {DataKind::Categorical, DataKind::Numerical, DataKind::Textual}) {
      if (coin(rng, 0.5))
        kinds.insert(k);
    }
    if (kinds.empty())
      kinds.insert(DataKind::Numerical);
    p.data_properties.push_back({PT::DataType, kinds});
  }
  if (coin(rng, present))
    p.data_properties.push_back({PT::Seasonality, coin(rng, 0.6)});
  if (coin(rng, present))
    p.data_properties.push_back({PT::Representativity, random_level(rng, Scale::LowToHigh)});
  if (coin(rng, present)) {
    auto tri = [&]() -> std::optional<bool> {
      int r = std::uniform_int_distribution<int>(0, 2)(rng);
      return r == 0 ? std::nullopt : std::optional<bool>(r == 1);
    };
    p.data_properties.push_back({PT::Homogeneity, Homogeneity{tri(), tri()}});
  }
  if (coin(rng, present))
    p.data_properties.push_back(
        {PT::Distribution, coin(rng, 0.5) ? Distribution::Normal : Distribution::Unknown});

  // Data properties always weigh in (seasonality only when true); make sure
  // at least one counts.
  bool counted = std::any_of(p.data_properties.begin(), p.data_properties.end(),
                             [](const DataPropertyValue &d) {
                               return d.type != PT::Seasonality || std::get<bool>(d.value);
                             });
  if (!counted)
    p.data_properties.push_back({PT::Labeling, Labeling::Labeled});
  return p;
}

} // namespace mlwb::testing
