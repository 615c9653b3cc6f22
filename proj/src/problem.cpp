#include "mlwb/problem.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>

namespace mlwb {

namespace {

using nlohmann::json;

constexpr std::string_view kCareLabels[] = {"Not", "Could", "Should", "Must"};
constexpr std::string_view kRequirementKeys[] = {
    "accuracy", "explainability", "interpretability", "adaptability",
    "cost_cpu", "cost_data",      "decision_speed"};
constexpr std::string_view kPropertyKeys[] = {
    "labeling",    "volume",           "missing_values", "data_type",
    "seasonality", "representativity", "homogeneity",    "distribution"};
constexpr std::string_view kLabelingLabels[] = {"Labeled", "Unlabeled", "To be labeled"};

std::string req_field(RequirementType t) {
  return "domainRequirements." + std::string(requirement_key(t)) + ".value";
}

std::string prop_field(PropertyType t) {
  return "dataProperties." + std::string(property_key(t)) + ".value";
}

void require_scale(const LinguisticValue &v, Scale s, const std::string &field) {
  if (v.scale() != s) {
    throw RequirementError(field, "value '" + v.label() + "' must be on the " +
                                      std::string(scale_name(s)) + " scale");
  }
}

} // namespace

std::string_view care_label(Care c) { return kCareLabels[static_cast<std::size_t>(c)]; }

std::optional<Care> parse_care(std::string_view label) {
  for (std::size_t i = 0; i < std::size(kCareLabels); ++i) {
    if (kCareLabels[i] == label)
      return static_cast<Care>(i);
  }
  return std::nullopt;
}

double care_numeric(Care c) {
  switch (c) {
  case Care::Not:
    return 0.0;
  case Care::Could:
    return 1.0 / 3.0;
  case Care::Should:
    return 2.0 / 3.0;
  case Care::Must:
    return 1.0;
  }
  return 0.0;
}

std::string_view requirement_key(RequirementType t) {
  return kRequirementKeys[static_cast<std::size_t>(t)];
}

std::optional<RequirementType> parse_requirement_type(std::string_view key) {
  for (std::size_t i = 0; i < std::size(kRequirementKeys); ++i) {
    if (kRequirementKeys[i] == key)
      return static_cast<RequirementType>(i);
  }
  return std::nullopt;
}

std::string_view property_key(PropertyType t) {
  return kPropertyKeys[static_cast<std::size_t>(t)];
}

std::optional<PropertyType> parse_property_type(std::string_view key) {
  for (std::size_t i = 0; i < std::size(kPropertyKeys); ++i) {
    if (kPropertyKeys[i] == key)
      return static_cast<PropertyType>(i);
  }
  return std::nullopt;
}

std::string_view labeling_label(Labeling l) {
  return kLabelingLabels[static_cast<std::size_t>(l)];
}

std::optional<Labeling> parse_labeling(std::string_view label) {
  for (std::size_t i = 0; i < std::size(kLabelingLabels); ++i) {
    if (kLabelingLabels[i] == label)
      return static_cast<Labeling>(i);
  }
  return std::nullopt;
}

std::string_view provenance_label(Provenance p) {
  return p == Provenance::Expert ? "expert" : "profiled";
}

RequirementError::RequirementError(std::string field, const std::string &what)
    : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

void check_requirement(const DomainRequirementValue &r) {
  const std::string field = req_field(r.type);
  switch (r.type) {
  case RequirementType::Accuracy: {
    const double *v = std::get_if<double>(&r.value);
    if (!v)
      throw RequirementError(field, "accuracy level must be a number");
    if (!(*v > 0.0 && *v <= 1.0))
      throw RequirementError(field, "accuracy level must lie in (0, 1]");
    break;
  }
  case RequirementType::Explainability:
  case RequirementType::Interpretability:
  case RequirementType::Adaptability:
    if (!std::holds_alternative<bool>(r.value))
      throw RequirementError(field, "value must be true or false");
    break;
  case RequirementType::CostCpu:
  case RequirementType::CostData: {
    const auto *v = std::get_if<LinguisticValue>(&r.value);
    if (!v)
      throw RequirementError(field, "value must be one of Low, Medium, High, Very High");
    require_scale(*v, Scale::Canonical, field);
    break;
  }
  case RequirementType::DecisionSpeed: {
    const auto *v = std::get_if<DecisionSpeed>(&r.value);
    if (!v)
      throw RequirementError(field, "value must be a (metric, milliseconds) pair");
    if (std::find(kSpeedMetrics.begin(), kSpeedMetrics.end(), v->metric) ==
        kSpeedMetrics.end()) {
      throw RequirementError(field + ".metric", "unknown metric '" + v->metric + "'");
    }
    if (!(v->milliseconds > 0.0) || !std::isfinite(v->milliseconds))
      throw RequirementError(field + ".milliseconds", "duration must be positive");
    break;
  }
  }
}

void check_property(const DataPropertyValue &p) {
  const std::string field = prop_field(p.type);
  switch (p.type) {
  case PropertyType::Labeling:
    if (!std::holds_alternative<Labeling>(p.value))
      throw RequirementError(field, "value must be Labeled, Unlabeled or To be labeled");
    break;
  case PropertyType::Volume:
  case PropertyType::Representativity:
  case PropertyType::MissingValues: {
    const auto *v = std::get_if<LinguisticValue>(&p.value);
    if (!v)
      throw RequirementError(field, "value must be a linguistic level");
    require_scale(*v,
                  p.type == PropertyType::MissingValues ? Scale::NoneToHigh
                                                        : Scale::LowToHigh,
                  field);
    break;
  }
  case PropertyType::DataType: {
    const auto *v = std::get_if<std::set<DataKind>>(&p.value);
    if (!v || v->empty())
      throw RequirementError(field, "value must be a non-empty set of data types");
    break;
  }
  case PropertyType::Seasonality:
    if (!std::holds_alternative<bool>(p.value))
      throw RequirementError(field, "value must be true or false");
    break;
  case PropertyType::Homogeneity:
    if (!std::holds_alternative<Homogeneity>(p.value))
      throw RequirementError(field, "value must be a homogeneity pair");
    break;
  case PropertyType::Distribution:
    if (!std::holds_alternative<Distribution>(p.value))
      throw RequirementError(field, "value must be Normal or Unknown");
    break;
  }
}

const DomainRequirementValue *MLProblem::find(RequirementType t) const {
  for (const auto &r : domain_requirements) {
    if (r.type == t)
      return &r;
  }
  return nullptr;
}

const DataPropertyValue *MLProblem::find(PropertyType t) const {
  for (const auto &p : data_properties) {
    if (p.type == t)
      return &p;
  }
  return nullptr;
}

std::string generate_project_id() {
  static std::mutex mutex;
  static std::mt19937_64 engine{std::random_device{}()};
  static std::atomic<std::uint64_t> counter{0};
  std::uint64_t bits;
  {
    std::lock_guard lock(mutex);
    bits = engine();
  }
  bits ^= counter.fetch_add(1) * 0x9E3779B97F4A7C15ull;
  char buf[20];
  std::snprintf(buf, sizeof buf, "p-%012llx",
                static_cast<unsigned long long>(bits & 0xFFFFFFFFFFFFull));
  return buf;
}

MLProblem new_project(std::string description) {
  MLProblem p;
  p.id = generate_project_id();
  p.description = std::move(description);
  return p;
}

MLProblem set_requirement(MLProblem p, DomainRequirementValue r) {
  check_requirement(r);
  auto it = std::find_if(p.domain_requirements.begin(), p.domain_requirements.end(),
                         [&](const auto &x) { return x.type == r.type; });
  if (it != p.domain_requirements.end())
    *it = std::move(r);
  else
    p.domain_requirements.push_back(std::move(r));
  return p;
}

MLProblem set_requirement(MLProblem p, DataPropertyValue r) {
  check_property(r);
  auto it = std::find_if(p.data_properties.begin(), p.data_properties.end(),
                         [&](const auto &x) { return x.type == r.type; });
  if (it != p.data_properties.end())
    *it = std::move(r);
  else
    p.data_properties.push_back(std::move(r));
  return p;
}

MLProblem remove_requirement(MLProblem p, RequirementType t) {
  std::erase_if(p.domain_requirements, [t](const auto &x) { return x.type == t; });
  return p;
}

MLProblem remove_requirement(MLProblem p, PropertyType t) {
  std::erase_if(p.data_properties, [t](const auto &x) { return x.type == t; });
  return p;
}

std::optional<RequirementType> derive_computational_requirement(std::string_view domain_term) {
  static const std::pair<std::string_view, RequirementType> synonyms[] = {
      {"auditability", RequirementType::Explainability},
      {"transparency", RequirementType::Explainability},
      {"explainability", RequirementType::Explainability},
      {"traceability", RequirementType::Explainability},
      {"accountability", RequirementType::Explainability},
      {"interpretability", RequirementType::Interpretability},
      {"understandability", RequirementType::Interpretability},
      {"accuracy", RequirementType::Accuracy},
      {"precision", RequirementType::Accuracy},
      {"correctness", RequirementType::Accuracy},
      {"reliability", RequirementType::Accuracy},
      {"speed", RequirementType::DecisionSpeed},
      {"latency", RequirementType::DecisionSpeed},
      {"response time", RequirementType::DecisionSpeed},
      {"responsiveness", RequirementType::DecisionSpeed},
      {"adaptability", RequirementType::Adaptability},
      {"incremental change", RequirementType::Adaptability},
      {"evolvability", RequirementType::Adaptability},
      {"computation cost", RequirementType::CostCpu},
      {"compute budget", RequirementType::CostCpu},
      {"cpu cost", RequirementType::CostCpu},
      {"data cost", RequirementType::CostData},
      {"data acquisition cost", RequirementType::CostData},
  };
  std::string term;
  for (char ch : domain_term)
    term += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  const auto first = term.find_first_not_of(" \t");
  if (first == std::string::npos)
    return std::nullopt;
  term = term.substr(first, term.find_last_not_of(" \t") - first + 1);
  for (const auto &[word, type] : synonyms) {
    if (word == term)
      return type;
  }
  return std::nullopt;
}

MLProblem merge_profile(MLProblem p, const ProfileReport &report) {
  auto fill = [&p](PropertyType type, PropertyValue value) {
    const DataPropertyValue *existing = p.find(type);
    if (existing && existing->provenance == Provenance::Expert)
      return;
    p = set_requirement(std::move(p),
                        DataPropertyValue{type, std::move(value), Provenance::Profiled});
  };
  fill(PropertyType::Volume, report.volume_bucket);
  fill(PropertyType::MissingValues, report.missing_level);
  if (!report.data_types.empty())
    fill(PropertyType::DataType, report.data_types);
  fill(PropertyType::Homogeneity, Homogeneity{report.class_balance_ok, report.scales_similar});
  fill(PropertyType::Distribution, report.distribution);
  return p;
}

const std::vector<MappingEntry> &requirement_mapping() {
  using namespace criteria;
  static const std::vector<MappingEntry> entries = {
      {"accuracy", {{kAccuracy, Grade::B}}},
      {"explainability", {{kExplainability, Grade::A}}},
      {"interpretability", {{kInterpretability, Grade::A}}},
      {"adaptability", {{kIncrementality, Grade::C}, {kEvolutivity, Grade::D}}},
      {"cost_cpu",
       {{kTrainingComplexity, Grade::B},
        {kMemoryRequirements, Grade::C},
        {kParallelism, Grade::C}}},
      {"cost_data", {{kMemoryRequirements, Grade::C}}},
      {"decision_speed", {{kDecisionComplexity, Grade::C}}},
      {"labeling", {{kTrainingType, Grade::A}}},
      {"volume", {{kVolumeForConvergence, Grade::B}}},
      {"missing_values", {{kMissingTolerance, Grade::BC}}},
      {"data_type", {{kAttributeTypes, Grade::D}}},
      {"seasonality", {{kEvolutivity, Grade::D}}},
      {"representativity", {{kImbalanceTolerance, Grade::B}}},
      {"homogeneity", {{kNoiseTolerance, Grade::C}}},
      {"distribution", {{kBiasedDistributionTolerance, Grade::C}}},
  };
  return entries;
}

const MappingEntry *find_mapping(std::string_view requirement) {
  for (const auto &e : requirement_mapping()) {
    if (e.requirement == requirement)
      return &e;
  }
  return nullptr;
}

ProjectFormatError::ProjectFormatError(std::string location, const std::string &what)
    : std::runtime_error(location.empty() ? what : location + ": " + what),
      location_(std::move(location)) {}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

json requirement_to_json(const DomainRequirementValue &r) {
  json value;
  std::visit(
      [&](const auto &v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, LinguisticValue>)
          value = v.label();
        else if constexpr (std::is_same_v<V, DecisionSpeed>)
          value = json{{"metric", v.metric}, {"milliseconds", v.milliseconds}};
        else
          value = v;
      },
      r.value);
  return json{{"type", requirement_key(r.type)},
              {"value", value},
              {"care", care_label(r.care)}};
}

json property_to_json(const DataPropertyValue &p) {
  json value;
  std::visit(
      [&](const auto &v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Labeling>) {
          value = labeling_label(v);
        } else if constexpr (std::is_same_v<V, LinguisticValue>) {
          value = v.label();
        } else if constexpr (std::is_same_v<V, std::set<DataKind>>) {
          value = json::array();
          for (auto k : v)
            value.push_back(data_kind_label(k));
        } else if constexpr (std::is_same_v<V, Homogeneity>) {
          value = json{{"classesComparable", v.classes_comparable ? json(*v.classes_comparable)
                                                                  : json(nullptr)},
                       {"scalesSimilar",
                        v.scales_similar ? json(*v.scales_similar) : json(nullptr)}};
        } else if constexpr (std::is_same_v<V, Distribution>) {
          value = distribution_label(v);
        } else {
          value = v;
        }
      },
      p.value);
  return json{{"type", property_key(p.type)},
              {"value", value},
              {"provenance", provenance_label(p.provenance)}};
}

namespace {

const json &field(const json &j, std::string_view key, const std::string &loc) {
  auto it = j.find(key);
  if (it == j.end())
    throw ProjectFormatError(loc, "missing field '" + std::string(key) + "'");
  return *it;
}

std::string string_field(const json &j, std::string_view key, const std::string &loc) {
  const json &v = field(j, key, loc);
  if (!v.is_string())
    throw ProjectFormatError(loc + "." + std::string(key), "must be a string");
  return v.get<std::string>();
}

LinguisticValue parse_level(const json &v, Scale s, const std::string &field_path) {
  if (!v.is_string())
    throw RequirementError(field_path, "value must be a string label");
  auto parsed = LinguisticValue::try_parse(s, v.get<std::string>());
  if (!parsed) {
    throw RequirementError(field_path, "value '" + v.get<std::string>() +
                                           "' is not on the " +
                                           std::string(scale_name(s)) + " scale");
  }
  return *parsed;
}

bool parse_bool(const json &v, const std::string &field_path) {
  if (!v.is_boolean())
    throw RequirementError(field_path, "value must be true or false");
  return v.get<bool>();
}

std::optional<bool> parse_optional_bool(const json &j, std::string_view key,
                                        const std::string &field_path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null())
    return std::nullopt;
  return parse_bool(*it, field_path + "." + std::string(key));
}

} // namespace

DomainRequirementValue requirement_from_json(const json &j, const std::string &loc) {
  if (!j.is_object())
    throw ProjectFormatError(loc, "requirement must be an object");
  const std::string type_key = string_field(j, "type", loc);
  auto type = parse_requirement_type(type_key);
  if (!type)
    throw ProjectFormatError(loc + ".type", "unknown requirement type '" + type_key + "'");
  const std::string care_text = string_field(j, "care", loc);
  auto care = parse_care(care_text);
  if (!care)
    throw RequirementError("domainRequirements." + type_key + ".care",
                           "unknown care level '" + care_text + "'");

  const json &v = field(j, "value", loc);
  const std::string fpath = req_field(*type);
  DomainRequirementValue r{*type, false, *care};
  switch (*type) {
  case RequirementType::Accuracy:
    if (!v.is_number())
      throw RequirementError(fpath, "accuracy level must be a number");
    r.value = v.get<double>();
    break;
  case RequirementType::Explainability:
  case RequirementType::Interpretability:
  case RequirementType::Adaptability:
    r.value = parse_bool(v, fpath);
    break;
  case RequirementType::CostCpu:
  case RequirementType::CostData:
    r.value = parse_level(v, Scale::Canonical, fpath);
    break;
  case RequirementType::DecisionSpeed: {
    if (!v.is_object())
      throw RequirementError(fpath, "value must be {metric, milliseconds}");
    auto metric = v.find("metric");
    auto ms = v.find("milliseconds");
    if (metric == v.end() || !metric->is_string())
      throw RequirementError(fpath + ".metric", "metric must be a string");
    if (ms == v.end() || !ms->is_number())
      throw RequirementError(fpath + ".milliseconds", "duration must be a number");
    r.value = DecisionSpeed{metric->get<std::string>(), ms->get<double>()};
    break;
  }
  }
  check_requirement(r);
  return r;
}

DataPropertyValue property_from_json(const json &j, const std::string &loc) {
  if (!j.is_object())
    throw ProjectFormatError(loc, "data property must be an object");
  const std::string type_key = string_field(j, "type", loc);
  auto type = parse_property_type(type_key);
  if (!type)
    throw ProjectFormatError(loc + ".type", "unknown data property type '" + type_key + "'");

  Provenance provenance = Provenance::Expert;
  if (auto it = j.find("provenance"); it != j.end()) {
    if (*it == "expert")
      provenance = Provenance::Expert;
    else if (*it == "profiled")
      provenance = Provenance::Profiled;
    else
      throw ProjectFormatError(loc + ".provenance", "must be 'expert' or 'profiled'");
  }

  const json &v = field(j, "value", loc);
  const std::string fpath = prop_field(*type);
  DataPropertyValue p{*type, false, provenance};
  switch (*type) {
  case PropertyType::Labeling: {
    auto l = v.is_string() ? parse_labeling(v.get<std::string>()) : std::nullopt;
    if (!l)
      throw RequirementError(fpath, "value must be Labeled, Unlabeled or To be labeled");
    p.value = *l;
    break;
  }
  case PropertyType::Volume:
  case PropertyType::Representativity:
    p.value = parse_level(v, Scale::LowToHigh, fpath);
    break;
  case PropertyType::MissingValues:
    p.value = parse_level(v, Scale::NoneToHigh, fpath);
    break;
  case PropertyType::DataType: {
    if (!v.is_array())
      throw RequirementError(fpath, "value must be an array of data types");
    std::set<DataKind> kinds;
    for (const auto &item : v) {
      auto k = item.is_string() ? parse_data_kind(item.get<std::string>()) : std::nullopt;
      if (!k)
        throw RequirementError(fpath, "unknown data type " + item.dump());
      kinds.insert(*k);
    }
    p.value = kinds;
    break;
  }
  case PropertyType::Seasonality:
    p.value = parse_bool(v, fpath);
    break;
  case PropertyType::Homogeneity:
    if (!v.is_object())
      throw RequirementError(fpath, "value must be {classesComparable, scalesSimilar}");
    p.value = Homogeneity{parse_optional_bool(v, "classesComparable", fpath),
                          parse_optional_bool(v, "scalesSimilar", fpath)};
    break;
  case PropertyType::Distribution: {
    auto d = v.is_string() ? parse_distribution(v.get<std::string>()) : std::nullopt;
    if (!d)
      throw RequirementError(fpath, "value must be Normal or Unknown");
    p.value = *d;
    break;
  }
  }
  check_property(p);
  return p;
}

json project_to_json(const MLProblem &p) {
  json reqs = json::array();
  for (const auto &r : p.domain_requirements)
    reqs.push_back(requirement_to_json(r));
  json props = json::array();
  for (const auto &d : p.data_properties)
    props.push_back(property_to_json(d));
  json out{{"schemaVersion", kProjectSchemaVersion},
           {"id", p.id},
           {"description", p.description},
           {"domainRequirements", reqs},
           {"dataProperties", props}};
  out["datasetRef"] = p.dataset_ref ? json(*p.dataset_ref) : json(nullptr);
  return out;
}

MLProblem project_from_json(const json &j) {
  if (!j.is_object())
    throw ProjectFormatError("", "project document must be an object");
  const json &version = field(j, "schemaVersion", "");
  if (!version.is_number_integer())
    throw ProjectFormatError("schemaVersion", "must be an integer");
  const int v = version.get<int>();
  if (v < 1 || v > kProjectSchemaVersion)
    throw ProjectFormatError("schemaVersion", "unsupported schema version " + std::to_string(v));

  MLProblem p;
  p.id = string_field(j, "id", "");
  if (p.id.empty())
    throw ProjectFormatError("id", "must not be empty");
  p.description = string_field(j, "description", "");
  if (auto it = j.find("datasetRef"); it != j.end() && !it->is_null()) {
    if (!it->is_string())
      throw ProjectFormatError("datasetRef", "must be a string");
    p.dataset_ref = it->get<std::string>();
  }

  auto reqs = j.find("domainRequirements");
  if (reqs != j.end()) {
    if (!reqs->is_array())
      throw ProjectFormatError("domainRequirements", "must be an array");
    for (std::size_t i = 0; i < reqs->size(); ++i) {
      auto r = requirement_from_json((*reqs)[i], "domainRequirements[" + std::to_string(i) + "]");
      if (p.find(r.type)) {
        throw ProjectFormatError("domainRequirements[" + std::to_string(i) + "]",
                                 "duplicate requirement type '" +
                                     std::string(requirement_key(r.type)) + "'");
      }
      p.domain_requirements.push_back(std::move(r));
    }
  }
  auto props = j.find("dataProperties");
  if (props != j.end()) {
    if (!props->is_array())
      throw ProjectFormatError("dataProperties", "must be an array");
    for (std::size_t i = 0; i < props->size(); ++i) {
      auto d = property_from_json((*props)[i], "dataProperties[" + std::to_string(i) + "]");
      if (p.find(d.type)) {
        throw ProjectFormatError("dataProperties[" + std::to_string(i) + "]",
                                 "duplicate data property type '" +
                                     std::string(property_key(d.type)) + "'");
      }
      p.data_properties.push_back(std::move(d));
    }
  }
  return p;
}

std::string serialize_project(const MLProblem &p) { return project_to_json(p).dump(2) + "\n"; }

MLProblem deserialize_project(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ProjectFormatError("byte " + std::to_string(e.byte),
                             "parse failure: " + std::string(e.what()));
  }
  return project_from_json(j);
}

namespace {

json override_value(std::string_view text) {
  json v = json::parse(text, nullptr, false);
  if (v.is_discarded())
    return json(std::string(text));
  return v;
}

} // namespace

MLProblem apply_override(MLProblem p, std::string_view key, std::string_view value) {
  auto dot = key.find('.');
  if (dot == std::string_view::npos)
    throw OverrideError("override key '" + std::string(key) + "' must be care.<name> or value.<name>");
  auto kind = key.substr(0, dot);
  auto name = key.substr(dot + 1);

  if (kind == "care") {
    auto type = parse_requirement_type(name);
    if (!type)
      throw OverrideError("no domain requirement named '" + std::string(name) + "'");
    auto care = parse_care(value);
    if (!care)
      throw RequirementError("care." + std::string(name), "unknown care level '" +
                                                               std::string(value) + "'");
    DomainRequirementValue r;
    if (const auto *existing = p.find(*type)) {
      r = *existing;
    } else if (*type == RequirementType::Explainability ||
               *type == RequirementType::Interpretability ||
               *type == RequirementType::Adaptability) {
      r = DomainRequirementValue{*type, true, Care::Must};
    } else {
      throw OverrideError("requirement '" + std::string(name) +
                          "' has no value; set value." + std::string(name) + " first");
    }
    r.care = *care;
    return set_requirement(std::move(p), r);
  }

  if (kind == "value") {
    json v = override_value(value);
    if (auto type = parse_requirement_type(name)) {
      if (*type == RequirementType::DecisionSpeed && v.is_number())
        v = json{{"metric", "max"}, {"milliseconds", v}};
      const auto *existing = p.find(*type);
      Care care = existing ? existing->care : Care::Must;
      json j{{"type", name}, {"value", v}, {"care", care_label(care)}};
      return set_requirement(std::move(p), requirement_from_json(j, "value." + std::string(name)));
    }
    if (auto type = parse_property_type(name)) {
      json j{{"type", name}, {"value", v}, {"provenance", "expert"}};
      return set_requirement(std::move(p), property_from_json(j, "value." + std::string(name)));
    }
    throw OverrideError("no requirement or data property named '" + std::string(name) + "'");
  }
  throw OverrideError("override key '" + std::string(key) + "' must start with care. or value.");
}

} // namespace mlwb
