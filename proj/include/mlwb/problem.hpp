#pragma once

// An ML project: free-form description, domain requirements qualified by
// how much the expert cares, and data properties (facts, either given by the
// expert or measured by the profiler).

#include "mlwb/catalog.hpp"
#include "mlwb/linguistic.hpp"
#include "mlwb/profiler.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlwb {

enum class Care { Not, Could, Should, Must };

std::string_view care_label(Care c);
std::optional<Care> parse_care(std::string_view label);
// Not=0, Could=1/3, Should=2/3, Must=1.
double care_numeric(Care c);

inline constexpr Care kAllCares[] = {Care::Not, Care::Could, Care::Should, Care::Must};

enum class RequirementType {
  Accuracy,
  Explainability,
  Interpretability,
  Adaptability,
  CostCpu,
  CostData,
  DecisionSpeed,
};

enum class PropertyType {
  Labeling,
  Volume,
  MissingValues,
  DataType,
  Seasonality,
  Representativity,
  Homogeneity,
  Distribution,
};

inline constexpr RequirementType kAllRequirementTypes[] = {
    RequirementType::Accuracy,     RequirementType::Explainability,
    RequirementType::Interpretability, RequirementType::Adaptability,
    RequirementType::CostCpu,      RequirementType::CostData,
    RequirementType::DecisionSpeed,
};

inline constexpr PropertyType kAllPropertyTypes[] = {
    PropertyType::Labeling,     PropertyType::Volume,
    PropertyType::MissingValues, PropertyType::DataType,
    PropertyType::Seasonality,  PropertyType::Representativity,
    PropertyType::Homogeneity,  PropertyType::Distribution,
};

std::string_view requirement_key(RequirementType t);
std::optional<RequirementType> parse_requirement_type(std::string_view key);
std::string_view property_key(PropertyType t);
std::optional<PropertyType> parse_property_type(std::string_view key);

// Maximum, average, or 95th-percentile response time.
struct DecisionSpeed {
  std::string metric;
  double milliseconds = 0.0;

  friend bool operator==(const DecisionSpeed &, const DecisionSpeed &) = default;
};

inline const std::vector<std::string> kSpeedMetrics = {"max", "avg", "p95"};

// Accuracy: double in (0, 1]. Flags: bool. Costs: canonical-scale value.
using RequirementValue = std::variant<double, bool, LinguisticValue, DecisionSpeed>;

struct DomainRequirementValue {
  RequirementType type;
  RequirementValue value;
  Care care = Care::Must;

  friend bool operator==(const DomainRequirementValue &,
                         const DomainRequirementValue &) = default;
};

enum class Labeling { Labeled, Unlabeled, ToBeLabeled };

std::string_view labeling_label(Labeling l);
std::optional<Labeling> parse_labeling(std::string_view label);

// Unknown parts are not counted as failed checks.
struct Homogeneity {
  std::optional<bool> classes_comparable;
  std::optional<bool> scales_similar;

  friend bool operator==(const Homogeneity &, const Homogeneity &) = default;
};

// Volume: LowToHigh bucket. Missing values: NoneToHigh level.
// Representativity: LowToHigh. Seasonality: bool.
using PropertyValue = std::variant<Labeling, LinguisticValue, std::set<DataKind>, bool,
                                   Homogeneity, Distribution>;

enum class Provenance { Expert, Profiled };

std::string_view provenance_label(Provenance p);

struct DataPropertyValue {
  PropertyType type;
  PropertyValue value;
  Provenance provenance = Provenance::Expert;

  friend bool operator==(const DataPropertyValue &, const DataPropertyValue &) = default;
};

// Out-of-range or mistyped requirement; `field` is a dotted path.
class RequirementError : public std::invalid_argument {
public:
  RequirementError(std::string field, const std::string &what);

  const std::string &field() const { return field_; }

private:
  std::string field_;
};

void check_requirement(const DomainRequirementValue &r);
void check_property(const DataPropertyValue &p);

struct MLProblem {
  std::string id;
  std::string description;
  std::vector<DomainRequirementValue> domain_requirements;
  std::vector<DataPropertyValue> data_properties;
  std::optional<std::string> dataset_ref;

  const DomainRequirementValue *find(RequirementType t) const;
  const DataPropertyValue *find(PropertyType t) const;

  friend bool operator==(const MLProblem &, const MLProblem &) = default;
};

std::string generate_project_id();

MLProblem new_project(std::string description);

// Replaces any prior value of the same type. Throws RequirementError.
MLProblem set_requirement(MLProblem p, DomainRequirementValue r);
MLProblem set_requirement(MLProblem p, DataPropertyValue r);

MLProblem remove_requirement(MLProblem p, RequirementType t);
MLProblem remove_requirement(MLProblem p, PropertyType t);

// Domain-level need ("auditability", "speed") -> computational requirement.
// nullopt means no mapping is known.
std::optional<RequirementType> derive_computational_requirement(std::string_view domain_term);

// Fills data properties that are absent or were profiled before; expert
// values are never overwritten.
MLProblem merge_profile(MLProblem p, const ProfileReport &report);

struct MappingTarget {
  std::string_view criterion;
  Grade grade;
};

struct MappingEntry {
  std::string_view requirement;
  std::vector<MappingTarget> targets;
};

// Problem requirement -> algorithm family criteria, with the grade each
// target carries in the mapping. Includes explainability -> Explainability (A).
const std::vector<MappingEntry> &requirement_mapping();
const MappingEntry *find_mapping(std::string_view requirement);

inline constexpr int kProjectSchemaVersion = 2;

class ProjectFormatError : public std::runtime_error {
public:
  ProjectFormatError(std::string location, const std::string &what);

  const std::string &location() const { return location_; }

private:
  std::string location_;
};

nlohmann::json requirement_to_json(const DomainRequirementValue &r);
nlohmann::json property_to_json(const DataPropertyValue &p);
// Throws ProjectFormatError (structure) or RequirementError (range).
DomainRequirementValue requirement_from_json(const nlohmann::json &j,
                                             const std::string &location);
DataPropertyValue property_from_json(const nlohmann::json &j, const std::string &location);

nlohmann::json project_to_json(const MLProblem &p);
MLProblem project_from_json(const nlohmann::json &j);

std::string serialize_project(const MLProblem &p);
MLProblem deserialize_project(std::string_view text);

// What-if override with a dotted key:
//   care.<requirement>   care label (Not, Could, Should, Must)
//   value.<requirement>  value in JSON notation; bare words are strings
//   value.<property>     same, for data properties
// A care override on an absent flag requirement creates it with value true;
// a value override on an absent requirement creates it with care Must.
class OverrideError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Throws OverrideError for an unusable key, RequirementError for a value out
// of range.
MLProblem apply_override(MLProblem p, std::string_view key, std::string_view value);

} // namespace mlwb
