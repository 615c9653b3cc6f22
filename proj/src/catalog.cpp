#include "mlwb/catalog.hpp"

#include <algorithm>
#include <cerrno>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace mlwb {

namespace {

using nlohmann::json;

constexpr std::string_view kGradeLabels[] = {"A", "A-B", "B", "B-C", "C", "D"};
constexpr double kGradeWeights[] = {8.0, 6.0, 4.0, 3.0, 2.0, 1.0};

constexpr std::string_view kRangeKindLabels[] = {
    "ordered-linguistic", "boolean", "categorical-set", "accuracy-bucket"};

const std::vector<std::string> kNoneToHigh = {"None", "Low", "Medium", "High"};
const std::vector<std::string> kLowToHigh = {"Low", "Medium", "High"};
const std::vector<std::string> kYesNo = {"Yes", "No"};

SelectionCriterion make(std::string_view id, std::string name, Grade g,
                        RangeKind kind, std::vector<std::string> values) {
  return SelectionCriterion{std::string(id), std::move(name), g, kind,
                            std::move(values)};
}

std::vector<SelectionCriterion> build_standard() {
  using namespace criteria;
  using RK = RangeKind;
  return {
      make(kTrainingType, "Training type", Grade::A, RK::CategoricalSet,
           {"Supervised", "Unsupervised", "Reinforcement"}),
      make(kExplainability, "Explainability", Grade::A, RK::Boolean,
           {"Explainable", "Not explainable"}),
      make(kInterpretability, "Interpretability", Grade::AB, RK::Boolean,
           {"Interpretable", "Not interpretable"}),
      make(kInputOrderSensitivity, "Model building's sensitivity to input order",
           Grade::AB, RK::OrderedLinguistic, kNoneToHigh),
      make(kAccuracy, "Accuracy", Grade::B, RK::AccuracyBucket,
           {"<=80%", "[80%,90%]", ">=90%"}),
      make(kCorrelatedTolerance, "Tolerance to correlated attributes", Grade::B,
           RK::OrderedLinguistic, kNoneToHigh),
      make(kOverfittingResilience, "Resilience to overfitting", Grade::B,
           RK::OrderedLinguistic, kNoneToHigh),
      make(kImbalanceTolerance, "Tolerance to data imbalance", Grade::B,
           RK::OrderedLinguistic, kNoneToHigh),
      make(kHyperparameterEase, "Ease of hyper-parameter setting", Grade::B,
           RK::OrderedLinguistic, kLowToHigh),
      make(kTrainingComplexity, "Model training complexity", Grade::B,
           RK::OrderedLinguistic, kLowToHigh),
      make(kMultipleClasses, "Ability to handle multiple classes", Grade::B,
           RK::Boolean, kYesNo),
      make(kVolumeForConvergence, "Volume of data required for convergence",
           Grade::B, RK::OrderedLinguistic, kLowToHigh),
      make(kHighDimensionality, "Ability to handle highly dimensional data",
           Grade::BC, RK::Boolean, kYesNo),
      make(kMissingTolerance, "Ability to handle missing records or attributes",
           Grade::BC, RK::OrderedLinguistic, kNoneToHigh),
      make(kIncrementality, "Incrementality", Grade::C, RK::Boolean, kYesNo),
      make(kTransparency, "Transparency", Grade::C, RK::Boolean, kYesNo),
      make(kNoiseTolerance, "Tolerance to noise", Grade::C, RK::OrderedLinguistic,
           kLowToHigh),
      make(kDependencyReliance, "Reliance on dependencies between characteristics",
           Grade::C, RK::OrderedLinguistic, kNoneToHigh),
      make(kComplexData, "Ability to manage complex data", Grade::C,
           RK::OrderedLinguistic, kNoneToHigh),
      make(kBiasedDistributionTolerance, "Tolerance for biased data distributions",
           Grade::C, RK::OrderedLinguistic, kLowToHigh),
      make(kDecisionComplexity, "Decision computational complexity", Grade::C,
           RK::OrderedLinguistic, kLowToHigh),
      make(kMemoryRequirements, "Memory requirements", Grade::C,
           RK::OrderedLinguistic, kLowToHigh),
      make(kParallelism, "Potential for parallelism/distribution", Grade::C,
           RK::OrderedLinguistic, {"None", "Partial", "High"}),
      make(kFederatedLearning, "Support for federated learning", Grade::C,
           RK::OrderedLinguistic, kLowToHigh),
      make(kDecisionTimeBoundedness, "Decision time boundedness", Grade::C,
           RK::Boolean, kYesNo),
      make(kAttributeTypes, "Types of attributes", Grade::D, RK::CategoricalSet,
           {"Categorical", "Numerical", "Textual"}),
      make(kEvolutivity, "Evolutivity", Grade::D, RK::OrderedLinguistic, kLowToHigh),
  };
}

std::string require_string(const json &j, std::string_view key,
                           const std::string &loc) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    throw CatalogError(
        {{loc, "field '" + std::string(key) + "' must be a string"}});
  }
  return it->get<std::string>();
}

const json &require_array(const json &j, std::string_view key,
                          const std::string &loc) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw CatalogError(
        {{loc, "field '" + std::string(key) + "' must be an array"}});
  }
  return *it;
}

SelectionCriterion criterion_from_json(const json &j, const std::string &loc) {
  if (!j.is_object())
    throw CatalogError({{loc, "criterion must be an object"}});
  SelectionCriterion c;
  c.id = require_string(j, "id", loc);
  c.name = require_string(j, "name", loc);
  const auto grade_label = require_string(j, "grade", loc);
  auto grade = parse_grade(grade_label);
  if (!grade)
    throw CatalogError({{loc + ".grade", "unknown grade '" + grade_label + "'"}});
  c.grade = *grade;
  const auto kind_label = require_string(j, "rangeKind", loc);
  auto kind = parse_range_kind(kind_label);
  if (!kind) {
    throw CatalogError(
        {{loc + ".rangeKind", "unknown range kind '" + kind_label + "'"}});
  }
  c.range_kind = *kind;
  const auto &values = require_array(j, "allowedValues", loc);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i].is_string()) {
      throw CatalogError({{loc + ".allowedValues[" + std::to_string(i) + "]",
                           "value must be a string"}});
    }
    c.allowed_values.push_back(values[i].get<std::string>());
  }
  return c;
}

json criterion_to_json(const SelectionCriterion &c) {
  return json{{"id", c.id},
              {"name", c.name},
              {"grade", std::string(grade_label(c.grade))},
              {"rangeKind", std::string(range_kind_label(c.range_kind))},
              {"allowedValues", c.allowed_values}};
}

} // namespace

std::string_view grade_label(Grade g) {
  return kGradeLabels[static_cast<std::size_t>(g)];
}

std::optional<Grade> parse_grade(std::string_view label) {
  for (std::size_t i = 0; i < std::size(kGradeLabels); ++i) {
    if (kGradeLabels[i] == label)
      return static_cast<Grade>(i);
  }
  return std::nullopt;
}

double grade_weight(Grade g) { return kGradeWeights[static_cast<std::size_t>(g)]; }

std::string_view range_kind_label(RangeKind k) {
  return kRangeKindLabels[static_cast<std::size_t>(k)];
}

std::optional<RangeKind> parse_range_kind(std::string_view label) {
  for (std::size_t i = 0; i < std::size(kRangeKindLabels); ++i) {
    if (kRangeKindLabels[i] == label)
      return static_cast<RangeKind>(i);
  }
  return std::nullopt;
}

std::optional<Scale> SelectionCriterion::scale() const {
  if (range_kind != RangeKind::OrderedLinguistic)
    return std::nullopt;
  for (Scale s : {Scale::NoneToHigh, Scale::LowToHigh, Scale::Parallelism,
                  Scale::Canonical}) {
    if (scale_labels(s) == allowed_values)
      return s;
  }
  return std::nullopt;
}

const std::vector<SelectionCriterion> &standard_criteria() {
  static const std::vector<SelectionCriterion> all = build_standard();
  return all;
}

const SelectionCriterion *find_standard_criterion(std::string_view id) {
  for (const auto &c : standard_criteria()) {
    if (c.id == id)
      return &c;
  }
  return nullptr;
}

const std::vector<std::string_view> &required_family_criteria() {
  using namespace criteria;
  static const std::vector<std::string_view> ids = {
      kTrainingType,        kExplainability,       kInterpretability,
      kAccuracy,            kIncrementality,       kEvolutivity,
      kTrainingComplexity,  kMemoryRequirements,   kParallelism,
      kDecisionComplexity,  kVolumeForConvergence, kMissingTolerance,
      kAttributeTypes,      kImbalanceTolerance,   kNoiseTolerance,
      kBiasedDistributionTolerance,
  };
  return ids;
}

std::optional<double> accuracy_bucket_value(std::string_view label) {
  if (label == "<=80%")
    return 0.75;
  if (label == "[80%,90%]")
    return 0.85;
  if (label == ">=90%")
    return 0.95;
  return std::nullopt;
}

const CriterionValueSet *AlgorithmFamilyProfile::find(std::string_view criterion_id) const {
  auto it = values.find(criterion_id);
  return it == values.end() ? nullptr : &it->second;
}

const AlgorithmFamilyProfile *Catalog::find_family(std::string_view id) const {
  for (const auto &f : families) {
    if (f.id == id)
      return &f;
  }
  return nullptr;
}

const SelectionCriterion *Catalog::find_criterion(std::string_view id) const {
  for (const auto &c : criteria) {
    if (c.id == id)
      return &c;
  }
  return nullptr;
}

Catalog make_empty_catalog() {
  Catalog c;
  c.criteria = standard_criteria();
  return c;
}

std::string format_violation(const Violation &v) {
  return v.location.empty() ? v.message : v.location + ": " + v.message;
}

namespace {
std::string join_violations(const std::vector<Violation> &vs) {
  std::string out;
  for (const auto &v : vs) {
    if (!out.empty())
      out += "; ";
    out += format_violation(v);
  }
  return out;
}
} // namespace

CatalogError::CatalogError(std::vector<Violation> violations)
    : std::runtime_error(join_violations(violations)),
      violations_(std::move(violations)) {}

std::vector<Violation> validate_family(const Catalog &c,
                                       const AlgorithmFamilyProfile &family,
                                       const std::string &location) {
  std::vector<Violation> out;
  if (family.id.empty())
    out.push_back({location + ".id", "family id must not be empty"});
  for (const auto &[criterion_id, values] : family.values) {
    const std::string loc = location + ".values." + criterion_id;
    const SelectionCriterion *criterion = c.find_criterion(criterion_id);
    if (!criterion) {
      out.push_back({loc, "unknown criterion id '" + criterion_id + "'"});
      continue;
    }
    if (values.empty())
      out.push_back({loc, "value set must not be empty"});
    std::set<std::string_view> seen;
    for (const auto &v : values) {
      if (std::find(criterion->allowed_values.begin(),
                    criterion->allowed_values.end(),
                    v) == criterion->allowed_values.end()) {
        out.push_back({loc, "value outside range: '" + v + "'"});
      }
      if (!seen.insert(v).second)
        out.push_back({loc, "duplicate value '" + v + "'"});
    }
  }
  for (auto required : required_family_criteria()) {
    if (!family.find(required)) {
      out.push_back({location, "family '" + family.id +
                                   "' is missing a value for criterion '" +
                                   std::string(required) + "'"});
    }
  }
  return out;
}

std::vector<Violation> validate_catalog(const Catalog &c) {
  std::vector<Violation> out;
  if (c.schema_version != kCatalogSchemaVersion) {
    out.push_back({"schemaVersion", "unsupported schema version " +
                                        std::to_string(c.schema_version)});
  }

  std::set<std::string_view> criterion_ids;
  for (std::size_t i = 0; i < c.criteria.size(); ++i) {
    const auto &crit = c.criteria[i];
    const std::string loc = "criteria[" + std::to_string(i) + "]";
    if (!criterion_ids.insert(crit.id).second) {
      out.push_back({loc, "duplicate criterion id '" + crit.id + "'"});
      continue;
    }
    const SelectionCriterion *standard = find_standard_criterion(crit.id);
    if (!standard) {
      out.push_back({loc, "unknown criterion id '" + crit.id + "'"});
      continue;
    }
    if (crit.grade != standard->grade) {
      out.push_back({loc + ".grade", "grade of '" + crit.id + "' must be " +
                                         std::string(grade_label(standard->grade))});
    }
    if (crit.range_kind != standard->range_kind) {
      out.push_back({loc + ".rangeKind", "range kind of '" + crit.id + "' must be " +
                                             std::string(range_kind_label(
                                                 standard->range_kind))});
    }
    if (crit.allowed_values != standard->allowed_values) {
      out.push_back(
          {loc + ".allowedValues", "value range of '" + crit.id + "' differs from the standard range"});
    }
  }
  for (const auto &standard : standard_criteria()) {
    if (!criterion_ids.contains(standard.id))
      out.push_back({"criteria", "missing criterion '" + standard.id + "'"});
  }

  std::set<std::string_view> family_ids;
  for (std::size_t i = 0; i < c.families.size(); ++i) {
    const auto &f = c.families[i];
    const std::string loc = "families[" + std::to_string(i) + "]";
    if (!f.id.empty() && !family_ids.insert(f.id).second)
      out.push_back({loc + ".id", "duplicate family id '" + f.id + "'"});
    auto family_violations = validate_family(c, f, loc);
    out.insert(out.end(), family_violations.begin(), family_violations.end());
  }
  return out;
}

AlgorithmFamilyProfile family_from_json(const json &j, const std::string &loc) {
  if (!j.is_object())
    throw CatalogError({{loc, "family must be an object"}});
  AlgorithmFamilyProfile f;
  f.id = require_string(j, "id", loc);
  f.name = require_string(j, "name", loc);
  if (auto it = j.find("description"); it != j.end()) {
    if (!it->is_string())
      throw CatalogError({{loc + ".description", "must be a string"}});
    f.description = it->get<std::string>();
  }
  auto values = j.find("values");
  if (values == j.end() || !values->is_object())
    throw CatalogError({{loc, "field 'values' must be an object"}});
  for (const auto &[criterion_id, v] : values->items()) {
    const std::string vloc = loc + ".values." + criterion_id;
    CriterionValueSet set;
    if (v.is_string()) {
      set.push_back(v.get<std::string>());
    } else if (v.is_array()) {
      for (const auto &item : v) {
        if (!item.is_string())
          throw CatalogError({{vloc, "values must be strings"}});
        set.push_back(item.get<std::string>());
      }
    } else {
      throw CatalogError({{vloc, "value must be a string or an array of strings"}});
    }
    f.values.emplace(criterion_id, std::move(set));
  }
  return f;
}

json family_to_json(const AlgorithmFamilyProfile &f) {
  json values = json::object();
  for (const auto &[id, set] : f.values)
    values[id] = set;
  return json{{"id", f.id},
              {"name", f.name},
              {"description", f.description},
              {"values", values}};
}

json catalog_to_json(const Catalog &c) {
  json criteria_json = json::array();
  for (const auto &crit : c.criteria)
    criteria_json.push_back(criterion_to_json(crit));
  json families_json = json::array();
  for (const auto &f : c.families)
    families_json.push_back(family_to_json(f));
  return json{{"schemaVersion", c.schema_version},
              {"criteria", criteria_json},
              {"families", families_json}};
}

std::string serialize_catalog(const Catalog &c) {
  return catalog_to_json(c).dump(2) + "\n";
}

Catalog load_catalog(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw CatalogError({{"byte " + std::to_string(e.byte), "parse failure: " +
                                                               std::string(e.what())}});
  }
  if (!root.is_object())
    throw CatalogError({{std::string(), "catalog document must be an object"}});

  Catalog c;
  auto version = root.find("schemaVersion");
  if (version == root.end() || !version->is_number_integer())
    throw CatalogError({{std::string("schemaVersion"), "missing or not an integer"}});
  c.schema_version = version->get<int>();

  const auto &criteria_json = require_array(root, "criteria", "");
  for (std::size_t i = 0; i < criteria_json.size(); ++i) {
    c.criteria.push_back(
        criterion_from_json(criteria_json[i], "criteria[" + std::to_string(i) + "]"));
  }
  const auto &families_json = require_array(root, "families", "");
  for (std::size_t i = 0; i < families_json.size(); ++i) {
    c.families.push_back(
        family_from_json(families_json[i], "families[" + std::to_string(i) + "]"));
  }

  auto violations = validate_catalog(c);
  if (!violations.empty())
    throw CatalogError(std::move(violations));
  return c;
}

Catalog load_catalog(std::istream &source) {
  std::ostringstream buffer;
  buffer << source.rdbuf();
  return load_catalog(buffer.str());
}

Catalog load_catalog_file(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::system_error(errno, std::generic_category(),
                            "cannot open catalog " + path.string());
  return load_catalog(in);
}

} // namespace mlwb
