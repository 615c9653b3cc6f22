#include "mlwb/profiler.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <iterator>
#include <map>
#include <sstream>
#include <unordered_set>

namespace mlwb {

namespace {

using nlohmann::json;

constexpr std::string_view kDataKindLabels[] = {"Categorical", "Numerical", "Textual"};
constexpr std::string_view kDistributionLabels[] = {"Normal", "Unknown"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (s.empty())
    return std::nullopt;
  if (s.front() == '+')
    s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

struct ParsedField {
  std::string text;
  bool quoted = false;
};

// Splits delimited text into records. Each record carries the 1-based line
// on which it starts.
std::vector<std::pair<std::size_t, std::vector<ParsedField>>>
split_records(std::string_view text, const CsvOptions &opt) {
  std::vector<std::pair<std::size_t, std::vector<ParsedField>>> records;
  std::vector<ParsedField> fields;
  ParsedField field;
  std::size_t line = 1;
  std::size_t record_line = 1;
  bool in_quotes = false;
  bool record_has_content = false;

  auto end_field = [&] {
    fields.push_back(std::move(field));
    field = ParsedField{};
  };
  auto end_record = [&] {
    end_field();
    const bool blank = fields.size() == 1 && !fields[0].quoted && fields[0].text.empty();
    if (!blank)
      records.emplace_back(record_line, std::move(fields));
    fields.clear();
    record_has_content = false;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == opt.quote) {
        if (i + 1 < text.size() && text[i + 1] == opt.quote) {
          field.text += opt.quote;
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n')
          ++line;
        field.text += ch;
      }
      continue;
    }
    if (!record_has_content) {
      record_line = line;
      record_has_content = true;
    }
    if (ch == opt.quote && trim(field.text).empty()) {
      field.text.clear();
      field.quoted = true;
      in_quotes = true;
    } else if (ch == opt.delimiter) {
      end_field();
    } else if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled by the '\n'
    } else if (ch == '\n' || ch == '\r') {
      end_record();
      ++line;
    } else {
      field.text += ch;
    }
  }
  if (in_quotes)
    throw ProfileError("unterminated quoted field", record_line);
  if (record_has_content || !field.text.empty() || !fields.empty())
    end_record();
  return records;
}

bool is_null(const ParsedField &f, const CsvOptions &opt) {
  if (f.quoted)
    return false;
  const auto t = trim(f.text);
  return std::find(opt.null_tokens.begin(), opt.null_tokens.end(), t) !=
         opt.null_tokens.end();
}

// Pairwise co-moment accumulator for Pearson correlation.
struct CoMoment {
  std::size_t n = 0;
  double mean_x = 0.0, mean_y = 0.0, cxx = 0.0, cyy = 0.0, cxy = 0.0;

  void push(double x, double y) {
    ++n;
    const double dx = x - mean_x;
    mean_x += dx / static_cast<double>(n);
    const double dy = y - mean_y;
    mean_y += dy / static_cast<double>(n);
    cxx += dx * (x - mean_x);
    cyy += dy * (y - mean_y);
    cxy += dx * (y - mean_y);
  }

  std::optional<double> pearson() const {
    if (n < 3 || cxx <= 0.0 || cyy <= 0.0)
      return std::nullopt;
    return cxy / std::sqrt(cxx * cyy);
  }
};

} // namespace

std::string_view data_kind_label(DataKind k) {
  return kDataKindLabels[static_cast<std::size_t>(k)];
}

std::optional<DataKind> parse_data_kind(std::string_view label) {
  for (std::size_t i = 0; i < std::size(kDataKindLabels); ++i) {
    if (kDataKindLabels[i] == label)
      return static_cast<DataKind>(i);
  }
  return std::nullopt;
}

std::string_view distribution_label(Distribution d) {
  return kDistributionLabels[static_cast<std::size_t>(d)];
}

std::optional<Distribution> parse_distribution(std::string_view label) {
  if (label == "Normal")
    return Distribution::Normal;
  if (label == "Unknown")
    return Distribution::Unknown;
  return std::nullopt;
}

namespace {
std::string location_message(const std::string &what, std::optional<std::size_t> row,
                             std::optional<std::size_t> column) {
  std::string out;
  if (row)
    out += "line " + std::to_string(*row);
  if (column)
    out += (out.empty() ? "" : ", ") + std::string("field ") + std::to_string(*column);
  return out.empty() ? what : out + ": " + what;
}
} // namespace

ProfileError::ProfileError(const std::string &what, std::optional<std::size_t> row,
                           std::optional<std::size_t> column)
    : std::runtime_error(location_message(what, row, column)), row_(row),
      column_(column) {}

const Column *RawTable::find(std::string_view name) const {
  for (const auto &c : columns) {
    if (c.name == name)
      return &c;
  }
  return nullptr;
}

RawTable ingest(std::string_view text, const CsvOptions &options) {
  if (options.delimiter == options.quote)
    throw ProfileError("delimiter and quote character must differ");
  auto records = split_records(text, options);
  if (records.empty())
    throw ProfileError("empty input");

  RawTable table;
  table.byte_size = text.size();
  std::size_t first_data = 0;
  const std::size_t width = records.front().second.size();
  if (options.header) {
    for (const auto &f : records.front().second)
      table.columns.push_back(Column{std::string(trim(f.text)), {}});
    first_data = 1;
  } else {
    for (std::size_t c = 0; c < width; ++c)
      table.columns.push_back(Column{"column_" + std::to_string(c + 1), {}});
  }

  for (std::size_t r = first_data; r < records.size(); ++r) {
    const auto &[line, fields] = records[r];
    if (fields.size() != width) {
      throw ProfileError("expected " + std::to_string(width) + " fields, found " +
                             std::to_string(fields.size()),
                         line, std::min(fields.size(), width) + 1);
    }
    for (std::size_t c = 0; c < width; ++c) {
      if (is_null(fields[c], options))
        table.columns[c].cells.emplace_back(std::nullopt);
      else
        table.columns[c].cells.emplace_back(fields[c].text);
    }
    ++table.row_count;
  }
  return table;
}

RawTable ingest(std::istream &source, const CsvOptions &options) {
  std::string text{std::istreambuf_iterator<char>(source), std::istreambuf_iterator<char>()};
  return ingest(text, options);
}

DataKind infer_type(std::span<const Cell> values, std::size_t row_count) {
  bool all_numeric = true;
  bool any = false;
  std::unordered_set<std::string_view> distinct;
  for (const auto &cell : values) {
    if (!cell)
      continue;
    any = true;
    distinct.insert(*cell);
    if (all_numeric && !parse_number(*cell))
      all_numeric = false;
  }
  if (!any)
    throw ProfileError("cannot infer the type of an all-null column");
  if (all_numeric)
    return DataKind::Numerical;
  const double limit = std::max(20.0, 0.05 * static_cast<double>(row_count));
  return static_cast<double>(distinct.size()) <= limit ? DataKind::Categorical
                                                       : DataKind::Textual;
}

void MomentAccumulator::push(double x) {
  const double n1 = static_cast<double>(n_);
  ++n_;
  const double n = static_cast<double>(n_);
  const double delta = x - mean_;
  const double delta_n = delta / n;
  const double delta_n2 = delta_n * delta_n;
  const double term1 = delta * delta_n * n1;
  mean_ += delta_n;
  m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
         4.0 * delta_n * m3_;
  m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
  m2_ += term1;
  if (n_ == 1) {
    min_ = max_ = x;
  } else {
    min_ = std::min(min_, x);
    max_ = std::max(max_, x);
  }
}

double MomentAccumulator::sample_variance() const {
  return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double MomentAccumulator::sample_standard_deviation() const {
  return std::sqrt(sample_variance());
}

double MomentAccumulator::skewness() const {
  if (n_ < 2 || m2_ <= 0.0)
    return 0.0;
  return std::sqrt(static_cast<double>(n_)) * m3_ / std::pow(m2_, 1.5);
}

double MomentAccumulator::kurtosis() const {
  if (n_ < 2 || m2_ <= 0.0)
    return 0.0;
  return static_cast<double>(n_) * m4_ / (m2_ * m2_);
}

bool ProfileThresholds::valid() const {
  return volume_medium_min < volume_high_above && missing_low_below > 0.0 &&
         missing_low_below < missing_medium_below && missing_medium_below <= 1.0 &&
         normality_alpha > 0.0 && normality_alpha < 1.0 && scale_ratio_max >= 1.0 &&
         class_ratio_max >= 1.0 && correlation_min > 0.0 && correlation_min <= 1.0;
}

LinguisticValue volume_bucket(std::size_t rows, const ProfileThresholds &t) {
  if (rows < t.volume_medium_min)
    return {Scale::LowToHigh, "Low"};
  if (rows <= t.volume_high_above)
    return {Scale::LowToHigh, "Medium"};
  return {Scale::LowToHigh, "High"};
}

LinguisticValue missing_level(double max_null_fraction, const ProfileThresholds &t) {
  if (max_null_fraction <= 0.0)
    return {Scale::NoneToHigh, "None"};
  if (max_null_fraction < t.missing_low_below)
    return {Scale::NoneToHigh, "Low"};
  if (max_null_fraction < t.missing_medium_below)
    return {Scale::NoneToHigh, "Medium"};
  return {Scale::NoneToHigh, "High"};
}

MissingStats missing_stats(const RawTable &table, const ProfileThresholds &t) {
  MissingStats out;
  for (const auto &col : table.columns) {
    const auto nulls = static_cast<std::size_t>(
        std::count_if(col.cells.begin(), col.cells.end(), [](const Cell &c) { return !c; }));
    const double fraction =
        table.row_count == 0 ? 0.0
                             : static_cast<double>(nulls) / static_cast<double>(table.row_count);
    out.null_fractions.push_back(fraction);
    out.max_null_fraction = std::max(out.max_null_fraction, fraction);
  }
  out.level = missing_level(out.max_null_fraction, t);
  return out;
}

double jarque_bera_statistic(const MomentAccumulator &m) {
  const double n = static_cast<double>(m.count());
  const double s = m.skewness();
  const double k = m.kurtosis() - 3.0;
  return n / 6.0 * (s * s + k * k / 4.0);
}

double jarque_bera_statistic(std::span<const double> values) {
  MomentAccumulator m;
  for (double v : values)
    m.push(v);
  return jarque_bera_statistic(m);
}

namespace {
Distribution classify_normality(const MomentAccumulator &m, const ProfileThresholds &t) {
  if (m.count() < t.normality_min_samples || m.sample_variance() <= 0.0)
    return Distribution::Unknown;
  // chi-square with 2 degrees of freedom: P(X > x) = exp(-x / 2).
  const double critical = -2.0 * std::log(t.normality_alpha);
  return jarque_bera_statistic(m) < critical ? Distribution::Normal : Distribution::Unknown;
}
} // namespace

Distribution normality(std::span<const double> values, const ProfileThresholds &t) {
  MomentAccumulator m;
  for (double v : values)
    m.push(v);
  return classify_normality(m, t);
}

bool scale_homogeneity(std::span<const double> standard_deviations,
                       const ProfileThresholds &t) {
  double lo = 0.0, hi = 0.0;
  std::size_t positive = 0;
  for (double s : standard_deviations) {
    if (!(s > 0.0))
      continue;
    lo = positive == 0 ? s : std::min(lo, s);
    hi = positive == 0 ? s : std::max(hi, s);
    ++positive;
  }
  if (positive < 2)
    return true;
  return hi / lo <= t.scale_ratio_max;
}

ProfileReport profile(const RawTable &table, const std::optional<std::string> &label_column,
                      const ProfileThresholds &t) {
  if (!t.valid())
    throw ProfileError("invalid profiling thresholds");
  std::optional<std::size_t> label_index;
  if (label_column) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (table.columns[c].name == *label_column)
        label_index = c;
    }
    if (!label_index)
      throw ProfileError("unknown label column '" + *label_column + "'");
  }

  ProfileReport report;
  report.row_count = table.row_count;
  report.byte_size = table.byte_size;
  report.label_column = label_column;
  report.volume_bucket = volume_bucket(table.row_count, t);

  const MissingStats missing = missing_stats(table, t);
  report.missing_level = missing.level;

  std::vector<std::size_t> numeric_features;
  std::vector<double> feature_stds;
  bool all_features_normal = true;

  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    const Column &col = table.columns[c];
    ColumnProfile cp;
    cp.name = col.name;
    cp.null_fraction = missing.null_fractions[c];

    std::unordered_set<std::string_view> distinct;
    MomentAccumulator moments;
    bool numeric = true;
    for (const auto &cell : col.cells) {
      if (!cell) {
        ++cp.null_count;
        continue;
      }
      distinct.insert(*cell);
      if (numeric) {
        if (auto v = parse_number(*cell))
          moments.push(*v);
        else
          numeric = false;
      }
    }
    cp.distinct_count = distinct.size();

    if (cp.null_count == table.row_count) {
      report.diagnostics.push_back("column '" + col.name +
                                   "': all values are null, type unknown");
      report.columns.push_back(std::move(cp));
      continue;
    }
    cp.inferred_type = infer_type(col.cells, table.row_count);
    if (*cp.inferred_type == DataKind::Numerical) {
      cp.stats = NumericStats{moments.mean(), moments.sample_standard_deviation(),
                              moments.min(), moments.max()};
      if (moments.count() >= 2)
        cp.jarque_bera = jarque_bera_statistic(moments);
      cp.normality = classify_normality(moments, t);
    }

    const bool is_label = label_index && *label_index == c;
    if (!is_label) {
      report.data_types.insert(*cp.inferred_type);
      if (*cp.inferred_type == DataKind::Numerical) {
        numeric_features.push_back(c);
        feature_stds.push_back(cp.stats->standard_deviation);
        if (cp.normality != Distribution::Normal)
          all_features_normal = false;
      }
    }
    report.columns.push_back(std::move(cp));
  }

  report.scales_similar = scale_homogeneity(feature_stds, t);
  report.distribution = !numeric_features.empty() && all_features_normal
                            ? Distribution::Normal
                            : Distribution::Unknown;

  if (label_index) {
    std::map<std::string_view, std::size_t> counts;
    for (const auto &cell : table.columns[*label_index].cells) {
      if (cell)
        ++counts[*cell];
    }
    if (!counts.empty()) {
      std::size_t lo = counts.begin()->second, hi = lo;
      for (const auto &[_, n] : counts) {
        lo = std::min(lo, n);
        hi = std::max(hi, n);
      }
      report.class_balance_ok =
          static_cast<double>(hi) / static_cast<double>(lo) <= t.class_ratio_max;
    }
  }

  for (std::size_t a = 0; a < numeric_features.size(); ++a) {
    for (std::size_t b = a + 1; b < numeric_features.size(); ++b) {
      const Column &x = table.columns[numeric_features[a]];
      const Column &y = table.columns[numeric_features[b]];
      CoMoment cm;
      for (std::size_t r = 0; r < table.row_count; ++r) {
        if (x.cells[r] && y.cells[r])
          cm.push(*parse_number(*x.cells[r]), *parse_number(*y.cells[r]));
      }
      if (auto rho = cm.pearson(); rho && std::abs(*rho) >= t.correlation_min) {
        report.correlated_pairs.push_back({x.name, y.name, *rho});
      }
    }
  }
  report.correlated_attributes = !report.correlated_pairs.empty();
  return report;
}

json profile_to_json(const ProfileReport &r) {
  json columns = json::array();
  for (const auto &c : r.columns) {
    json col{{"name", c.name},
             {"inferredType", c.inferred_type ? json(data_kind_label(*c.inferred_type))
                                              : json(nullptr)},
             {"nullCount", c.null_count},
             {"nullFraction", c.null_fraction},
             {"distinctCount", c.distinct_count},
             {"normality", distribution_label(c.normality)}};
    if (c.stats) {
      col["stats"] = json{{"mean", c.stats->mean},
                          {"standardDeviation", c.stats->standard_deviation},
                          {"min", c.stats->min},
                          {"max", c.stats->max}};
    }
    if (c.jarque_bera)
      col["jarqueBera"] = *c.jarque_bera;
    columns.push_back(std::move(col));
  }
  json types = json::array();
  for (auto k : r.data_types)
    types.push_back(data_kind_label(k));
  json pairs = json::array();
  for (const auto &p : r.correlated_pairs)
    pairs.push_back(json{{"first", p.first}, {"second", p.second}, {"pearson", p.pearson}});

  return json{
      {"rowCount", r.row_count},
      {"byteSize", r.byte_size},
      {"columns", columns},
      {"volumeBucket", r.volume_bucket.label()},
      {"missingLevel", r.missing_level.label()},
      {"dataTypes", types},
      {"scalesSimilar", r.scales_similar},
      {"labelColumn", r.label_column ? json(*r.label_column) : json(nullptr)},
      {"classBalanceOk", r.class_balance_ok ? json(*r.class_balance_ok) : json(nullptr)},
      {"distribution", distribution_label(r.distribution)},
      {"correlatedAttributes", r.correlated_attributes},
      {"correlatedPairs", pairs},
      {"diagnostics", r.diagnostics},
  };
}

ProfileReport profile_from_json(const json &j) {
  auto fail = [](const std::string &what) -> ProfileError {
    return ProfileError("profile report: " + what);
  };
  try {
    ProfileReport r;
    r.row_count = j.at("rowCount").get<std::size_t>();
    r.byte_size = j.value("byteSize", std::size_t{0});
    for (const auto &cj : j.at("columns")) {
      ColumnProfile c;
      c.name = cj.at("name").get<std::string>();
      if (const auto &t = cj.at("inferredType"); !t.is_null()) {
        c.inferred_type = parse_data_kind(t.get<std::string>());
        if (!c.inferred_type)
          throw fail("unknown inferred type");
      }
      c.null_count = cj.at("nullCount").get<std::size_t>();
      c.null_fraction = cj.at("nullFraction").get<double>();
      c.distinct_count = cj.at("distinctCount").get<std::size_t>();
      auto norm = parse_distribution(cj.at("normality").get<std::string>());
      if (!norm)
        throw fail("unknown normality");
      c.normality = *norm;
      if (auto s = cj.find("stats"); s != cj.end()) {
        c.stats = NumericStats{s->at("mean").get<double>(),
                               s->at("standardDeviation").get<double>(),
                               s->at("min").get<double>(), s->at("max").get<double>()};
      }
      if (auto jb = cj.find("jarqueBera"); jb != cj.end())
        c.jarque_bera = jb->get<double>();
      r.columns.push_back(std::move(c));
    }
    r.volume_bucket = LinguisticValue(Scale::LowToHigh, j.at("volumeBucket").get<std::string>());
    r.missing_level = LinguisticValue(Scale::NoneToHigh, j.at("missingLevel").get<std::string>());
    for (const auto &t : j.at("dataTypes")) {
      auto k = parse_data_kind(t.get<std::string>());
      if (!k)
        throw fail("unknown data type");
      r.data_types.insert(*k);
    }
    r.scales_similar = j.at("scalesSimilar").get<bool>();
    if (const auto &l = j.at("labelColumn"); !l.is_null())
      r.label_column = l.get<std::string>();
    if (const auto &b = j.at("classBalanceOk"); !b.is_null())
      r.class_balance_ok = b.get<bool>();
    auto dist = parse_distribution(j.at("distribution").get<std::string>());
    if (!dist)
      throw fail("unknown distribution");
    r.distribution = *dist;
    r.correlated_attributes = j.at("correlatedAttributes").get<bool>();
    for (const auto &p : j.at("correlatedPairs")) {
      r.correlated_pairs.push_back({p.at("first").get<std::string>(),
                                    p.at("second").get<std::string>(),
                                    p.at("pearson").get<double>()});
    }
    r.diagnostics = j.value("diagnostics", std::vector<std::string>{});
    return r;
  } catch (const json::exception &e) {
    throw fail(e.what());
  } catch (const LinguisticError &e) {
    throw fail(e.what());
  }
}

} // namespace mlwb
