#pragma once

// Ordered linguistic scales and the fuzzy comparisons defined over them.
//
// Four scales are registered:
//   Canonical   Low < Medium < High < Very High       ranks 1..4
//   NoneToHigh  None < Low < Medium < High            ranks 1..4
//   LowToHigh   Low < Medium < High                   ranks 1..3
//   Parallelism None < Partial < High                 ranks 1..3
//
// Values on different scales are compared by their position on a shared
// magnitude axis (None=0, Low=1, Medium=2, High=3, Very High=4; Partial sits
// at Medium). Within a single scale, position differences equal rank
// differences, so same-scale comparisons are exactly rank based.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mlwb {

enum class Scale { Canonical, NoneToHigh, LowToHigh, Parallelism };

class LinguisticError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class LinguisticValue {
public:
  // Throws LinguisticError when `label` is not on `scale`.
  LinguisticValue(Scale scale, std::string_view label);

  static LinguisticValue from_rank(Scale scale, int rank);
  static std::optional<LinguisticValue> try_parse(Scale scale,
                                                  std::string_view label);

  Scale scale() const { return scale_; }
  int rank() const { return rank_; }
  const std::string &label() const;

  // Position on the shared magnitude axis; see file comment.
  int position() const;

  friend bool operator==(const LinguisticValue &, const LinguisticValue &) = default;

private:
  LinguisticValue(Scale scale, int rank, int) : scale_(scale), rank_(rank) {}

  Scale scale_;
  int rank_;
};

const std::vector<std::string> &scale_labels(Scale scale);
int scale_size(Scale scale);
std::string_view scale_name(Scale scale);

int rank(const LinguisticValue &v);

// Extent to which v1 is at most v2: Min(1, 1 - (rank(v1) - rank(v2)) / 3),
// clamped below at 0.
double fuzzy_leq(const LinguisticValue &v1, const LinguisticValue &v2);

// Value with rank 5 - rank(v). Only defined on the canonical scale.
LinguisticValue complement(const LinguisticValue &v);

// Maps a value of any scale with at most four levels onto the canonical
// scale by rank (None -> Low, Partial -> Medium, ...).
LinguisticValue to_canonical_by_rank(const LinguisticValue &v);

// (rank - 1) / (size - 1), in [0, 1].
double normalized(const LinguisticValue &v);

} // namespace mlwb
