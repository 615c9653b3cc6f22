#include "mlwb/pipeline.hpp"

#include <algorithm>
#include <array>

namespace mlwb {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 10> kKindLabels = {
    "data-retrieval", "cleaning",      "imputation",   "encoding",   "denoising",
    "dimensionality-reduction",        "normalization", "model-training",
    "evaluation",     "interpretation",
};

constexpr StepKind kTemplateOrder[] = {StepKind::DataRetrieval, StepKind::Cleaning,
                                       StepKind::ModelTraining, StepKind::Evaluation,
                                       StepKind::Interpretation};

constexpr StepKind kInjectionOrder[] = {StepKind::Imputation, StepKind::Encoding,
                                        StepKind::Denoising, StepKind::Normalization,
                                        StepKind::DimensionalityReduction};

int injection_rank(StepKind k) {
  for (int i = 0; i < 5; ++i) {
    if (kInjectionOrder[i] == k)
      return i;
  }
  return -1;
}

// Strongest (most accommodating) level the family declares for criterion.
std::optional<LinguisticValue> top_level(const AlgorithmFamilyProfile &af,
                                         std::string_view criterion) {
  const auto *vals = af.find(criterion);
  const auto *def = find_standard_criterion(criterion);
  if (vals == nullptr || def == nullptr || !def->scale())
    return std::nullopt;
  std::optional<LinguisticValue> best;
  for (const auto &label : *vals) {
    auto v = LinguisticValue::try_parse(*def->scale(), label);
    if (v && (!best || v->rank() > best->rank()))
      best = v;
  }
  return best;
}

std::string family_value(const AlgorithmFamilyProfile &af, std::string_view criterion) {
  const auto *vals = af.find(criterion);
  if (vals == nullptr || vals->empty())
    return "unknown";
  std::string out;
  for (const auto &v : *vals)
    out += (out.empty() ? "" : "/") + v;
  return out;
}

std::string prefix(std::string_view criterion) {
  const auto *def = find_standard_criterion(criterion);
  std::string name = def ? def->name : std::string(criterion);
  std::string grade = def ? std::string(grade_label(def->grade)) : "?";
  return name + " (" + std::string(criterion) + ", grade " + grade + "): ";
}

std::vector<CompensationRule> build_rules() {
  using namespace criteria;
  std::vector<CompensationRule> rules;

  rules.push_back({kMissingTolerance, StepKind::Imputation,
                   [](const AlgorithmFamilyProfile &af,
                      const DataConditions &d) -> std::optional<std::string> {
                     if (!d.missing_level || d.missing_level->rank() == 1)
                       return std::nullopt;
                     auto tol = top_level(af, kMissingTolerance);
                     if (tol && d.missing_level->position() <= tol->position())
                       return std::nullopt;
                     return prefix(kMissingTolerance) + "missing values at level " +
                            d.missing_level->label() + " exceed family tolerance " +
                            family_value(af, kMissingTolerance);
                   }});

  rules.push_back({kAttributeTypes, StepKind::Encoding,
                   [](const AlgorithmFamilyProfile &af,
                      const DataConditions &d) -> std::optional<std::string> {
                     if (!d.data_types)
                       return std::nullopt;
                     const auto *supported = af.find(kAttributeTypes);
                     std::string unsupported;
                     for (auto k : *d.data_types) {
                       auto label = std::string(data_kind_label(k));
                       if (supported == nullptr ||
                           std::find(supported->begin(), supported->end(), label) ==
                               supported->end())
                         unsupported += (unsupported.empty() ? "" : "/") + label;
                     }
                     if (unsupported.empty())
                       return std::nullopt;
                     return prefix(kAttributeTypes) + unsupported +
                            " attributes are not supported by the family (supports " +
                            family_value(af, kAttributeTypes) + ")";
                   }});

  rules.push_back({kNoiseTolerance, StepKind::Denoising,
                   [](const AlgorithmFamilyProfile &af,
                      const DataConditions &d) -> std::optional<std::string> {
                     bool classes_fail = d.classes_comparable == false;
                     bool scales_fail = d.scales_similar == false;
                     if (!classes_fail && !scales_fail)
                       return std::nullopt;
                     auto tol = top_level(af, kNoiseTolerance);
                     if (!tol || tol->label() != "Low")
                       return std::nullopt;
                     std::string what = classes_fail && scales_fail
                                            ? "class balance and scale checks failed"
                                        : classes_fail ? "class balance check failed"
                                                       : "scale check failed";
                     return prefix(kNoiseTolerance) + what + " and family noise tolerance is " +
                            family_value(af, kNoiseTolerance);
                   }});

  // Dissimilar scales are remedied whatever the family: the rule records the
  // noise-tolerance criterion because scale spread is scored as noise.
  rules.push_back({kNoiseTolerance, StepKind::Normalization,
                   [](const AlgorithmFamilyProfile &af,
                      const DataConditions &d) -> std::optional<std::string> {
                     if (d.scales_similar != false)
                       return std::nullopt;
                     return prefix(kNoiseTolerance) +
                            "attribute scales differ by more than the allowed ratio (family "
                            "noise tolerance " +
                            family_value(af, kNoiseTolerance) + ")";
                   }});

  rules.push_back({kCorrelatedTolerance, StepKind::DimensionalityReduction,
                   [](const AlgorithmFamilyProfile &af,
                      const DataConditions &d) -> std::optional<std::string> {
                     if (!d.correlated_attributes)
                       return std::nullopt;
                     auto tol = top_level(af, kCorrelatedTolerance);
                     if (tol && tol->rank() > 2)
                       return std::nullopt;
                     return prefix(kCorrelatedTolerance) +
                            "strongly correlated attributes present and family tolerance is " +
                            family_value(af, kCorrelatedTolerance);
                   }});
  return rules;
}

std::vector<std::string> default_tags(StepKind k) {
  switch (k) {
  case StepKind::DataRetrieval:
    return {"file-upload"};
  case StepKind::Cleaning:
    return {"deduplication", "outlier-filtering"};
  case StepKind::Imputation:
    return {"mean-imputation", "knn-imputation"};
  case StepKind::Encoding:
    return {"one-hot", "ordinal"};
  case StepKind::Denoising:
    return {"smoothing", "resampling"};
  case StepKind::DimensionalityReduction:
    return {"pca"};
  case StepKind::Normalization:
    return {"z-score", "min-max"};
  case StepKind::ModelTraining:
    return {};
  case StepKind::Evaluation:
    return {"cross-validation", "holdout"};
  case StepKind::Interpretation:
    return {"feature-importance"};
  }
  return {};
}

} // namespace

std::string_view step_kind_label(StepKind k) { return kKindLabels[static_cast<std::size_t>(k)]; }

std::optional<StepKind> parse_step_kind(std::string_view label) {
  for (std::size_t i = 0; i < kKindLabels.size(); ++i) {
    if (kKindLabels[i] == label)
      return static_cast<StepKind>(i);
  }
  return std::nullopt;
}

bool is_compensation(StepKind k) { return injection_rank(k) >= 0; }

void check_chain(const ProcessingChain &chain) {
  std::size_t next_template = 0;
  int last_injected = -1;
  bool seen_cleaning = false, seen_training = false;
  for (std::size_t i = 0; i < chain.steps.size(); ++i) {
    const auto &s = chain.steps[i];
    std::string where = "steps[" + std::to_string(i) + "]";
    if (s.bound_family_id && s.kind != StepKind::ModelTraining)
      throw ChainError(where + ": only model-training may be bound to a family");
    if (is_compensation(s.kind)) {
      if (!seen_cleaning || seen_training)
        throw ChainError(where + ": " + std::string(step_kind_label(s.kind)) +
                         " must sit between cleaning and model-training");
      int r = injection_rank(s.kind);
      if (r <= last_injected)
        throw ChainError(where + ": compensation steps out of order or repeated");
      last_injected = r;
      continue;
    }
    if (next_template >= std::size(kTemplateOrder) || kTemplateOrder[next_template] != s.kind)
      throw ChainError(where + ": unexpected " + std::string(step_kind_label(s.kind)));
    ++next_template;
    seen_cleaning = seen_cleaning || s.kind == StepKind::Cleaning;
    seen_training = seen_training || s.kind == StepKind::ModelTraining;
  }
  if (next_template != std::size(kTemplateOrder))
    throw ChainError("chain is missing template steps");
}

ProcessingChain base_template(std::string problem_id, std::string family_id) {
  ProcessingChain c;
  c.problem_id = std::move(problem_id);
  c.family_id = family_id;
  c.exit_criterion = "stop when evaluation meets the accuracy requirement or no longer improves";
  for (auto k : kTemplateOrder) {
    PipelineStep s;
    s.kind = k;
    s.candidate_tags = default_tags(k);
    switch (k) {
    case StepKind::DataRetrieval:
      s.rationale = "load the training data";
      break;
    case StepKind::Cleaning:
      s.rationale = "filter malformed and duplicate records";
      break;
    case StepKind::ModelTraining:
      s.rationale = "train a model of the selected family";
      if (!family_id.empty()) {
        s.bound_family_id = family_id;
        s.candidate_tags = {family_id};
      }
      break;
    case StepKind::Evaluation:
      s.rationale = "measure the model against the domain requirements";
      break;
    default:
      s.rationale = "explain the model's decisions to the domain expert";
      break;
    }
    c.steps.push_back(std::move(s));
  }
  return c;
}

DataConditions conditions_from(const MLProblem *problem, const ProfileReport *report) {
  DataConditions d;
  if (problem != nullptr) {
    if (const auto *p = problem->find(PropertyType::MissingValues))
      d.missing_level = std::get<LinguisticValue>(p->value);
    if (const auto *p = problem->find(PropertyType::DataType))
      d.data_types = std::get<std::set<DataKind>>(p->value);
    if (const auto *p = problem->find(PropertyType::Homogeneity)) {
      const auto &h = std::get<Homogeneity>(p->value);
      d.scales_similar = h.scales_similar;
      d.classes_comparable = h.classes_comparable;
    }
  }
  if (report != nullptr) {
    d.missing_level = report->missing_level;
    if (!report->data_types.empty())
      d.data_types = report->data_types;
    d.scales_similar = report->scales_similar;
    if (report->class_balance_ok)
      d.classes_comparable = report->class_balance_ok;
    d.correlated_attributes = report->correlated_attributes;
  }
  return d;
}

const std::vector<CompensationRule> &shipped_rules() {
  static const std::vector<CompensationRule> rules = build_rules();
  return rules;
}

ProcessingChain apply_compensations(ProcessingChain chain, const AlgorithmFamilyProfile &family,
                                    const DataConditions &data) {
  check_chain(chain);
  std::vector<PipelineStep> injected;
  for (const auto &s : chain.steps) {
    if (is_compensation(s.kind))
      injected.push_back(s);
  }
  for (const auto &rule : shipped_rules()) {
    bool present = std::any_of(injected.begin(), injected.end(),
                               [&](const PipelineStep &s) { return s.kind == rule.step; });
    if (present)
      continue;
    if (auto why = rule.trigger(family, data)) {
      PipelineStep s;
      s.kind = rule.step;
      s.rationale = std::move(*why);
      s.candidate_tags = default_tags(rule.step);
      injected.push_back(std::move(s));
    }
  }
  std::stable_sort(injected.begin(), injected.end(),
                   [](const PipelineStep &a, const PipelineStep &b) {
                     return injection_rank(a.kind) < injection_rank(b.kind);
                   });

  std::vector<PipelineStep> steps;
  for (auto &s : chain.steps) {
    if (is_compensation(s.kind))
      continue;
    if (s.kind == StepKind::ModelTraining)
      steps.insert(steps.end(), injected.begin(), injected.end());
    steps.push_back(std::move(s));
  }
  chain.steps = std::move(steps);
  if (chain.family_id.empty())
    chain.family_id = family.id;
  return chain;
}

json chain_to_json(const ProcessingChain &chain) {
  json steps = json::array();
  for (const auto &s : chain.steps) {
    json step = {{"kind", step_kind_label(s.kind)},
                 {"rationale", s.rationale},
                 {"candidateTags", s.candidate_tags}};
    if (s.bound_family_id)
      step["boundFamilyId"] = *s.bound_family_id;
    steps.push_back(std::move(step));
  }
  return json{{"schemaVersion", kChainSchemaVersion},
              {"problemId", chain.problem_id},
              {"familyId", chain.family_id},
              {"exitCriterion", chain.exit_criterion},
              {"steps", steps}};
}

ProcessingChain chain_from_json(const json &j) {
  try {
    if (j.at("schemaVersion").get<int>() != kChainSchemaVersion)
      throw ChainError("unsupported chain schema version");
    ProcessingChain c;
    c.problem_id = j.at("problemId").get<std::string>();
    c.family_id = j.at("familyId").get<std::string>();
    c.exit_criterion = j.value("exitCriterion", std::string());
    for (const auto &sj : j.at("steps")) {
      PipelineStep s;
      auto kind = sj.at("kind").get<std::string>();
      auto k = parse_step_kind(kind);
      if (!k)
        throw ChainError("unknown step kind '" + kind + "'");
      s.kind = *k;
      s.rationale = sj.at("rationale").get<std::string>();
      s.candidate_tags = sj.value("candidateTags", std::vector<std::string>{});
      if (sj.contains("boundFamilyId"))
        s.bound_family_id = sj.at("boundFamilyId").get<std::string>();
      c.steps.push_back(std::move(s));
    }
    check_chain(c);
    return c;
  } catch (const json::exception &e) {
    throw ChainError(std::string("malformed chain: ") + e.what());
  }
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += ch;
    }
  }
  return out;
}

} // namespace

std::string export_bpmn(const ProcessingChain &chain) {
  const std::size_t n = chain.steps.size();
  auto task_id = [](std::size_t i) { return "Task_" + std::to_string(i + 1); };
  auto flow_id = [](std::size_t i) { return "Flow_" + std::to_string(i + 1); };
  std::string name = chain.family_id.empty() ? "processing chain"
                                             : "processing chain for " + chain.family_id;

  std::string x;
  x += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  x += "<bpmn:definitions xmlns:bpmn=\"http://www.omg.org/spec/BPMN/20100524/MODEL\" "
       "id=\"Definitions_1\" targetNamespace=\"urn:mlwb:pipeline\">\n";
  x += "  <bpmn:process id=\"Process_1\" name=\"" + xml_escape(name) +
       "\" isExecutable=\"false\">\n";
  if (!chain.exit_criterion.empty()) {
    x += "    <bpmn:documentation>exit criterion: " + xml_escape(chain.exit_criterion) +
         "</bpmn:documentation>\n";
  }
  x += "    <bpmn:startEvent id=\"StartEvent_1\">\n";
  x += "      <bpmn:outgoing>" + flow_id(0) + "</bpmn:outgoing>\n";
  x += "    </bpmn:startEvent>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto &s = chain.steps[i];
    x += "    <bpmn:serviceTask id=\"" + task_id(i) + "\" name=\"" +
         std::string(step_kind_label(s.kind)) + "\">\n";
    x += "      <bpmn:documentation>" + xml_escape(s.rationale) + "</bpmn:documentation>\n";
    x += "      <bpmn:incoming>" + flow_id(i) + "</bpmn:incoming>\n";
    x += "      <bpmn:outgoing>" + flow_id(i + 1) + "</bpmn:outgoing>\n";
    x += "    </bpmn:serviceTask>\n";
  }
  x += "    <bpmn:endEvent id=\"EndEvent_1\">\n";
  x += "      <bpmn:incoming>" + flow_id(n) + "</bpmn:incoming>\n";
  x += "    </bpmn:endEvent>\n";
  for (std::size_t i = 0; i <= n; ++i) {
    std::string src = i == 0 ? "StartEvent_1" : task_id(i - 1);
    std::string dst = i == n ? "EndEvent_1" : task_id(i);
    x += "    <bpmn:sequenceFlow id=\"" + flow_id(i) + "\" sourceRef=\"" + src +
         "\" targetRef=\"" + dst + "\" />\n";
  }
  x += "  </bpmn:process>\n";
  x += "</bpmn:definitions>\n";
  return x;
}

std::optional<ChainFormat> parse_chain_format(std::string_view label) {
  if (label == "canonical" || label == "json")
    return ChainFormat::Canonical;
  if (label == "workflow-xml" || label == "bpmn")
    return ChainFormat::WorkflowXml;
  return std::nullopt;
}

std::string export_chain(const ProcessingChain &chain, ChainFormat format) {
  if (format == ChainFormat::WorkflowXml)
    return export_bpmn(chain);
  return chain_to_json(chain).dump(2) + "\n";
}

} // namespace mlwb
