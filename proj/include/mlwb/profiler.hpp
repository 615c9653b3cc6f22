#pragma once

// Tabular data ingestion and the automatically checkable data properties:
// volume, missing values, attribute types, scale similarity, class balance,
// normality and strongly correlated attribute pairs.

#include "mlwb/linguistic.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlwb {

enum class DataKind { Categorical, Numerical, Textual };

std::string_view data_kind_label(DataKind k);
std::optional<DataKind> parse_data_kind(std::string_view label);

enum class Distribution { Normal, Unknown };

std::string_view distribution_label(Distribution d);
std::optional<Distribution> parse_distribution(std::string_view label);

class ProfileError : public std::runtime_error {
public:
  ProfileError(const std::string &what, std::optional<std::size_t> row = {},
               std::optional<std::size_t> column = {});

  // 1-based line in the source text, when known.
  std::optional<std::size_t> row() const { return row_; }
  // 1-based field index, when known.
  std::optional<std::size_t> column() const { return column_; }

private:
  std::optional<std::size_t> row_;
  std::optional<std::size_t> column_;
};

struct CsvOptions {
  char delimiter = ',';
  char quote = '"';
  bool header = true;
  // Cells equal to any of these (after trimming) are null.
  std::vector<std::string> null_tokens{""};
};

using Cell = std::optional<std::string>;

struct Column {
  std::string name;
  std::vector<Cell> cells;
};

struct RawTable {
  std::vector<Column> columns;
  std::size_t row_count = 0;
  std::size_t byte_size = 0;

  const Column *find(std::string_view name) const;
};

// Rectangular table from delimited text. Ragged rows and empty input are
// rejected with the offending location.
RawTable ingest(std::string_view text, const CsvOptions &options = {});
RawTable ingest(std::istream &source, const CsvOptions &options = {});

// Numerical when every non-null value parses as a finite number; otherwise
// Categorical when the distinct count is at most max(20, 5% of row_count);
// otherwise Textual. Throws ProfileError for an all-null column.
DataKind infer_type(std::span<const Cell> values, std::size_t row_count);

// Single-pass central moments (count, mean, M2..M4) with min and max.
class MomentAccumulator {
public:
  void push(double x);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double min() const { return min_; }
  double max() const { return max_; }
  // n - 1 denominator; 0 for fewer than two values.
  double sample_variance() const;
  double sample_standard_deviation() const;
  double skewness() const;  // biased, g1
  double kurtosis() const;  // biased, not excess

private:
  std::size_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0, m3_ = 0.0, m4_ = 0.0;
  double min_ = 0.0, max_ = 0.0;
};

struct ProfileThresholds {
  // Rows below -> Low; up to and including volume_high_above -> Medium.
  std::size_t volume_medium_min = 1000;
  std::size_t volume_high_above = 100000;
  // Max column null fraction: 0 -> None, < low -> Low, < medium -> Medium.
  double missing_low_below = 0.05;
  double missing_medium_below = 0.20;
  double normality_alpha = 0.05;
  std::size_t normality_min_samples = 20;
  double scale_ratio_max = 10.0;
  double class_ratio_max = 3.0;
  double correlation_min = 0.9;

  bool valid() const;
};

LinguisticValue volume_bucket(std::size_t rows, const ProfileThresholds &t = {});
LinguisticValue missing_level(double max_null_fraction,
                              const ProfileThresholds &t = {});

struct MissingStats {
  std::vector<double> null_fractions; // per column
  double max_null_fraction = 0.0;
  LinguisticValue level{Scale::NoneToHigh, "None"};
};

MissingStats missing_stats(const RawTable &table, const ProfileThresholds &t = {});

double jarque_bera_statistic(std::span<const double> values);
double jarque_bera_statistic(const MomentAccumulator &moments);

// Normal when n >= min samples and the Jarque-Bera statistic is below the
// chi-square(2) critical value at alpha.
Distribution normality(std::span<const double> values, const ProfileThresholds &t = {});

// True iff max/min over positive standard deviations <= ratio limit;
// vacuously true for fewer than two columns.
bool scale_homogeneity(std::span<const double> standard_deviations,
                       const ProfileThresholds &t = {});

struct NumericStats {
  double mean = 0.0;
  double standard_deviation = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ColumnProfile {
  std::string name;
  std::optional<DataKind> inferred_type; // absent for all-null columns
  std::size_t null_count = 0;
  double null_fraction = 0.0;
  std::size_t distinct_count = 0;
  std::optional<NumericStats> stats;
  std::optional<double> jarque_bera;
  Distribution normality = Distribution::Unknown;
};

struct CorrelatedPair {
  std::string first;
  std::string second;
  double pearson = 0.0;
};

struct ProfileReport {
  std::size_t row_count = 0;
  std::size_t byte_size = 0; // informational footprint
  std::vector<ColumnProfile> columns;
  LinguisticValue volume_bucket{Scale::LowToHigh, "Low"};
  LinguisticValue missing_level{Scale::NoneToHigh, "None"};
  std::set<DataKind> data_types;
  bool scales_similar = true;
  std::optional<std::string> label_column;
  std::optional<bool> class_balance_ok;
  Distribution distribution = Distribution::Unknown;
  bool correlated_attributes = false;
  std::vector<CorrelatedPair> correlated_pairs;
  std::vector<std::string> diagnostics;
};

// Feature-level properties (types, scales, normality, correlation) exclude
// the label column; missing values cover every column.
ProfileReport profile(const RawTable &table,
                      const std::optional<std::string> &label_column = {},
                      const ProfileThresholds &t = {});

nlohmann::json profile_to_json(const ProfileReport &r);
ProfileReport profile_from_json(const nlohmann::json &j);

} // namespace mlwb
