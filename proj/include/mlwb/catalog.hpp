#pragma once

// Selection-criteria vocabulary and the repository of algorithm-family
// profiles. A catalog is plain data: family values are kept as the labels
// found in the file, and every consumer resolves them against the criterion
// definitions.

#include "mlwb/linguistic.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlwb {

enum class Grade { A, AB, B, BC, C, D };

std::string_view grade_label(Grade g);
std::optional<Grade> parse_grade(std::string_view label);

// Default numeric weight of a grade: A=8, A-B=6, B=4, B-C=3, C=2, D=1.
double grade_weight(Grade g);

inline constexpr Grade kAllGrades[] = {Grade::A, Grade::AB, Grade::B,
                                       Grade::BC, Grade::C, Grade::D};

enum class RangeKind { OrderedLinguistic, Boolean, CategoricalSet, AccuracyBucket };

std::string_view range_kind_label(RangeKind k);
std::optional<RangeKind> parse_range_kind(std::string_view label);

namespace criteria {
inline constexpr std::string_view kTrainingType = "training_type";
inline constexpr std::string_view kExplainability = "explainability";
inline constexpr std::string_view kInterpretability = "interpretability";
inline constexpr std::string_view kInputOrderSensitivity = "input_order_sensitivity";
inline constexpr std::string_view kAccuracy = "accuracy";
inline constexpr std::string_view kCorrelatedTolerance = "correlated_attributes_tolerance";
inline constexpr std::string_view kOverfittingResilience = "overfitting_resilience";
inline constexpr std::string_view kImbalanceTolerance = "imbalance_tolerance";
inline constexpr std::string_view kHyperparameterEase = "hyperparameter_ease";
inline constexpr std::string_view kTrainingComplexity = "training_complexity";
inline constexpr std::string_view kMultipleClasses = "multiple_classes";
inline constexpr std::string_view kVolumeForConvergence = "volume_for_convergence";
inline constexpr std::string_view kHighDimensionality = "high_dimensionality";
inline constexpr std::string_view kMissingTolerance = "missing_values_tolerance";
inline constexpr std::string_view kIncrementality = "incrementality";
inline constexpr std::string_view kTransparency = "transparency";
inline constexpr std::string_view kNoiseTolerance = "noise_tolerance";
inline constexpr std::string_view kDependencyReliance = "dependency_reliance";
inline constexpr std::string_view kComplexData = "complex_data";
inline constexpr std::string_view kBiasedDistributionTolerance = "biased_distribution_tolerance";
inline constexpr std::string_view kDecisionComplexity = "decision_complexity";
inline constexpr std::string_view kMemoryRequirements = "memory_requirements";
inline constexpr std::string_view kParallelism = "parallelism";
inline constexpr std::string_view kFederatedLearning = "federated_learning";
inline constexpr std::string_view kDecisionTimeBoundedness = "decision_time_boundedness";
inline constexpr std::string_view kAttributeTypes = "attribute_types";
inline constexpr std::string_view kEvolutivity = "evolutivity";
} // namespace criteria

struct SelectionCriterion {
  std::string id;
  std::string name;
  Grade grade = Grade::D;
  RangeKind range_kind = RangeKind::OrderedLinguistic;
  std::vector<std::string> allowed_values;

  // Set for ordered-linguistic criteria.
  std::optional<Scale> scale() const;

  friend bool operator==(const SelectionCriterion &, const SelectionCriterion &) = default;
};

// The 27 standard criteria, in table order.
const std::vector<SelectionCriterion> &standard_criteria();
const SelectionCriterion *find_standard_criterion(std::string_view id);

// Criteria every family must carry a value for.
const std::vector<std::string_view> &required_family_criteria();

// Accuracy bucket label -> representative accuracy (0.75, 0.85, 0.95).
std::optional<double> accuracy_bucket_value(std::string_view label);

using CriterionValueSet = std::vector<std::string>;

struct AlgorithmFamilyProfile {
  std::string id;
  std::string name;
  std::string description;
  std::map<std::string, CriterionValueSet, std::less<>> values;

  const CriterionValueSet *find(std::string_view criterion_id) const;

  friend bool operator==(const AlgorithmFamilyProfile &,
                         const AlgorithmFamilyProfile &) = default;
};

inline constexpr int kCatalogSchemaVersion = 1;

struct Catalog {
  int schema_version = kCatalogSchemaVersion;
  std::vector<SelectionCriterion> criteria;
  std::vector<AlgorithmFamilyProfile> families;

  const AlgorithmFamilyProfile *find_family(std::string_view id) const;
  const SelectionCriterion *find_criterion(std::string_view id) const;

  friend bool operator==(const Catalog &, const Catalog &) = default;
};

// Catalog with the standard criteria and no families.
Catalog make_empty_catalog();

struct Violation {
  std::string location;
  std::string message;

  friend bool operator==(const Violation &, const Violation &) = default;
};

std::string format_violation(const Violation &v);

class CatalogError : public std::runtime_error {
public:
  explicit CatalogError(std::vector<Violation> violations);

  const std::vector<Violation> &violations() const { return violations_; }

private:
  std::vector<Violation> violations_;
};

std::vector<Violation> validate_catalog(const Catalog &c);

// Validation of a single family against `c`'s criteria; `location` prefixes
// every reported violation.
std::vector<Violation> validate_family(const Catalog &c,
                                       const AlgorithmFamilyProfile &family,
                                       const std::string &location);

// Parse and validate. Throws CatalogError on any parse, structure or
// validation problem.
Catalog load_catalog(std::istream &source);
Catalog load_catalog(std::string_view text);
Catalog load_catalog_file(const std::filesystem::path &path);

nlohmann::json catalog_to_json(const Catalog &c);
nlohmann::json family_to_json(const AlgorithmFamilyProfile &f);
// Structure only; no range validation. Throws CatalogError.
AlgorithmFamilyProfile family_from_json(const nlohmann::json &j,
                                        const std::string &location);

std::string serialize_catalog(const Catalog &c);

} // namespace mlwb
