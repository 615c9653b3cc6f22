#include "mlwb/matching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace mlwb {

using nlohmann::json;

namespace {

const CriterionValueSet &values_of(const AlgorithmFamilyProfile &af, std::string_view criterion) {
  const auto *v = af.find(criterion);
  if (v == nullptr || v->empty())
    throw MissingCriterionError(af.id, std::string(criterion));
  return *v;
}

Scale scale_of(std::string_view criterion) {
  const auto *c = find_standard_criterion(criterion);
  if (c == nullptr || !c->scale())
    throw std::logic_error("criterion '" + std::string(criterion) + "' is not ordered");
  return *c->scale();
}

std::vector<LinguisticValue> levels_of(const AlgorithmFamilyProfile &af,
                                       std::string_view criterion) {
  Scale s = scale_of(criterion);
  std::vector<LinguisticValue> out;
  for (const auto &label : values_of(af, criterion)) {
    auto v = LinguisticValue::try_parse(s, label);
    if (!v) {
      throw MatchingError("family '" + af.id + "': value '" + label + "' is not valid for '" +
                          std::string(criterion) + "'");
    }
    out.push_back(*v);
  }
  return out;
}

bool holds(const AlgorithmFamilyProfile &af, std::string_view criterion, std::string_view label) {
  const auto &vs = values_of(af, criterion);
  return std::find(vs.begin(), vs.end(), label) != vs.end();
}

// Best value of f over the family's member values.
template <typename F>
double best_of(const std::vector<LinguisticValue> &values, F f) {
  double best = 0.0;
  for (const auto &v : values)
    best = std::max(best, f(v));
  return best;
}

double round6(double x) { return std::round(x * 1e6) / 1e6; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

std::string join(const CriterionValueSet &vs) {
  std::string out;
  for (const auto &v : vs) {
    if (!out.empty())
      out += "/";
    out += v;
  }
  return out;
}

} // namespace

EngineConfig EngineConfig::scaled(double k) const {
  EngineConfig c = *this;
  for (auto &w : c.grade_weights)
    w *= k;
  return c;
}

void EngineConfig::validate() const {
  for (double w : grade_weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("grade weights must be positive and finite");
  }
  for (std::size_t i = 1; i < grade_weights.size(); ++i) {
    if (grade_weights[i] > grade_weights[i - 1])
      throw std::invalid_argument("grade weights must not increase from A to D");
  }
  if (care_numerics[0] != 0.0)
    throw std::invalid_argument("care 'Not' must map to 0");
  for (std::size_t i = 1; i < care_numerics.size(); ++i) {
    if (!(care_numerics[i] > care_numerics[i - 1]) || care_numerics[i] > 1.0)
      throw std::invalid_argument("care numerics must increase strictly within (0, 1]");
  }
  for (std::size_t i = 0; i < speed_thresholds_ms.size(); ++i) {
    if (!(speed_thresholds_ms[i] > 0.0) ||
        (i > 0 && !(speed_thresholds_ms[i] > speed_thresholds_ms[i - 1])))
      throw std::invalid_argument("speed thresholds must be positive and increasing");
  }
  if (!profile_thresholds.valid())
    throw std::invalid_argument("invalid profile thresholds");
  if (tie_break != "family-id")
    throw std::invalid_argument("unsupported tie-break '" + tie_break + "'");
}

MissingCriterionError::MissingCriterionError(std::string family, std::string criterion)
    : MatchingError("family '" + family + "' has no value for criterion '" + criterion + "'"),
      family_(std::move(family)), criterion_(std::move(criterion)) {}

double aggregate(const std::vector<SatisfactionEntry> &entries) {
  double num = 0.0, den = 0.0;
  for (const auto &e : entries) {
    if (e.weight > 0.0) {
      num += e.weight * e.satisfaction;
      den += e.weight;
    }
  }
  if (!(den > 0.0))
    throw UnscorableError("unscorable problem: no requirement carries a positive weight");
  return num / den;
}

LinguisticValue speed_bucket(double ms, const EngineConfig &cfg) {
  int r = 4;
  for (int i = 0; i < 3; ++i) {
    if (ms <= cfg.speed_thresholds_ms[static_cast<std::size_t>(i)]) {
      r = i + 1;
      break;
    }
  }
  return LinguisticValue::from_rank(Scale::Canonical, r);
}

double satisfies_accuracy(const AlgorithmFamilyProfile &af, double required) {
  if (!(required > 0.0 && required <= 1.0))
    throw std::invalid_argument("required accuracy must be in (0, 1]");
  double best = 0.0;
  for (const auto &label : values_of(af, criteria::kAccuracy)) {
    auto acc = accuracy_bucket_value(label);
    if (!acc)
      throw MatchingError("family '" + af.id + "': unknown accuracy bucket '" + label + "'");
    best = std::max(best, std::min(1.0, *acc / required));
  }
  return best;
}

double satisfies_flag(const AlgorithmFamilyProfile &af, std::string_view criterion) {
  if (criterion == criteria::kExplainability)
    return holds(af, criterion, "Explainable") ? 1.0 : 0.0;
  if (criterion == criteria::kInterpretability)
    return holds(af, criterion, "Interpretable") ? 1.0 : 0.0;
  throw std::invalid_argument("not a flag criterion: '" + std::string(criterion) + "'");
}

double satisfies_adaptability(const AlgorithmFamilyProfile &af, const EngineConfig &cfg) {
  double incr = holds(af, criteria::kIncrementality, "Yes") ? 1.0 : 0.0;
  double evol = best_of(levels_of(af, criteria::kEvolutivity),
                        [](const LinguisticValue &v) { return normalized(v); });
  double wc = cfg.weight(Grade::C), wd = cfg.weight(Grade::D);
  return (wc * incr + wd * evol) / (wc + wd);
}

double cost_cpu_satisfaction(const LinguisticValue &training, const LinguisticValue &memory,
                             const LinguisticValue &parallelism_complement,
                             const LinguisticValue &budget, const EngineConfig &cfg) {
  double wb = cfg.weight(Grade::B), wc = cfg.weight(Grade::C);
  return (wb * fuzzy_leq(training, budget) + wc * fuzzy_leq(memory, budget) +
          wc * fuzzy_leq(parallelism_complement, budget)) /
         (wb + 2.0 * wc);
}

double satisfies_cost_cpu(const AlgorithmFamilyProfile &af, const LinguisticValue &budget,
                          const EngineConfig &cfg) {
  auto at_most_budget = [&](const LinguisticValue &v) { return fuzzy_leq(v, budget); };
  double t = best_of(levels_of(af, criteria::kTrainingComplexity), at_most_budget);
  double m = best_of(levels_of(af, criteria::kMemoryRequirements), at_most_budget);
  double p = best_of(levels_of(af, criteria::kParallelism), [&](const LinguisticValue &v) {
    return fuzzy_leq(complement(to_canonical_by_rank(v)), budget);
  });
  double wb = cfg.weight(Grade::B), wc = cfg.weight(Grade::C);
  return (wb * t + wc * m + wc * p) / (wb + 2.0 * wc);
}

double satisfies_cost_memory(const AlgorithmFamilyProfile &af, const LinguisticValue &budget) {
  return best_of(levels_of(af, criteria::kMemoryRequirements),
                 [&](const LinguisticValue &v) { return fuzzy_leq(v, budget); });
}

double satisfies_cost(std::optional<double> cpu, std::optional<double> memory) {
  if (cpu && memory)
    return (*cpu + *memory) / 2.0;
  if (cpu)
    return *cpu;
  if (memory)
    return *memory;
  throw std::invalid_argument("cost needs a CPU or a memory budget");
}

double satisfies_labeling(const AlgorithmFamilyProfile &af, Labeling labeling) {
  bool supervised = holds(af, criteria::kTrainingType, "Supervised");
  bool unsupervised = holds(af, criteria::kTrainingType, "Unsupervised");
  switch (labeling) {
  case Labeling::Labeled:
  case Labeling::ToBeLabeled:
    return supervised ? 1.0 : 0.0;
  case Labeling::Unlabeled:
    return unsupervised ? 1.0 : 0.0;
  }
  return 0.0;
}

double satisfies_volume(const AlgorithmFamilyProfile &af, const LinguisticValue &available) {
  return best_of(levels_of(af, criteria::kVolumeForConvergence),
                 [&](const LinguisticValue &v) { return fuzzy_leq(v, available); });
}

double satisfies_missing(const AlgorithmFamilyProfile &af, const LinguisticValue &level) {
  return best_of(levels_of(af, criteria::kMissingTolerance),
                 [&](const LinguisticValue &v) { return fuzzy_leq(level, v); });
}

double satisfies_datatype(const AlgorithmFamilyProfile &af, const std::set<DataKind> &types) {
  if (types.empty())
    throw std::invalid_argument("data type set is empty");
  const auto &supported = values_of(af, criteria::kAttributeTypes);
  std::size_t hit = 0;
  for (auto k : types) {
    if (std::find(supported.begin(), supported.end(), data_kind_label(k)) != supported.end())
      ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(types.size());
}

double satisfies_seasonality(const AlgorithmFamilyProfile &af) {
  return best_of(levels_of(af, criteria::kEvolutivity),
                 [](const LinguisticValue &v) { return normalized(v); });
}

LinguisticValue representativity_demand(const LinguisticValue &rep) {
  if (rep.scale() != Scale::LowToHigh)
    throw LinguisticError("representativity must be on the low-to-high scale");
  static constexpr int kDemandRank[] = {0, 4, 3, 1}; // indexed by rep rank
  return LinguisticValue::from_rank(Scale::NoneToHigh, kDemandRank[rep.rank()]);
}

LinguisticValue homogeneity_demand(int failed) {
  if (failed < 0 || failed > 2)
    throw std::invalid_argument("failed homogeneity checks must be 0, 1 or 2");
  static constexpr int kDemandRank[] = {1, 3, 4};
  return LinguisticValue::from_rank(Scale::NoneToHigh, kDemandRank[failed]);
}

double satisfies_representativity(const AlgorithmFamilyProfile &af,
                                  const LinguisticValue &rep) {
  auto demand = representativity_demand(rep);
  return best_of(levels_of(af, criteria::kImbalanceTolerance),
                 [&](const LinguisticValue &v) { return fuzzy_leq(demand, v); });
}

double satisfies_homogeneity(const AlgorithmFamilyProfile &af, bool classes_ok,
                             bool scales_ok) {
  auto demand = homogeneity_demand((classes_ok ? 0 : 1) + (scales_ok ? 0 : 1));
  return best_of(levels_of(af, criteria::kNoiseTolerance),
                 [&](const LinguisticValue &v) { return fuzzy_leq(demand, v); });
}

double satisfies_homogeneity(const AlgorithmFamilyProfile &af, const Homogeneity &h) {
  return satisfies_homogeneity(af, h.classes_comparable.value_or(true),
                               h.scales_similar.value_or(true));
}

double satisfies_distribution(const AlgorithmFamilyProfile &af, Distribution d) {
  if (d == Distribution::Normal) {
    values_of(af, criteria::kBiasedDistributionTolerance);
    return 1.0;
  }
  return best_of(levels_of(af, criteria::kBiasedDistributionTolerance),
                 [](const LinguisticValue &v) { return normalized(v); });
}

double satisfies_decision_speed(const AlgorithmFamilyProfile &af, const DecisionSpeed &budget,
                                const EngineConfig &cfg) {
  auto bucket = speed_bucket(budget.milliseconds, cfg);
  return best_of(levels_of(af, criteria::kDecisionComplexity),
                 [&](const LinguisticValue &v) { return fuzzy_leq(v, bucket); });
}

namespace {

Grade outer_grade(std::initializer_list<std::string_view> requirements,
                  std::vector<std::string> &mapped) {
  Grade best = Grade::D;
  for (auto req : requirements) {
    const auto *m = find_mapping(req);
    if (m == nullptr)
      throw std::logic_error("no mapping for '" + std::string(req) + "'");
    for (const auto &t : m->targets) {
      if (t.grade < best)
        best = t.grade;
      std::string c(t.criterion);
      if (std::find(mapped.begin(), mapped.end(), c) == mapped.end())
        mapped.push_back(c);
    }
  }
  return best;
}

struct Builder {
  const AlgorithmFamilyProfile &af;
  const EngineConfig &cfg;
  std::vector<SatisfactionEntry> entries;

  void add(std::string requirement, std::initializer_list<std::string_view> mapping,
           double care, double satisfaction, std::string note,
           std::optional<Grade> grade = std::nullopt) {
    SatisfactionEntry e;
    e.requirement = std::move(requirement);
    Grade g = outer_grade(mapping, e.mapped_criteria);
    if (grade)
      g = *grade;
    e.weight = care * cfg.weight(g);
    e.satisfaction = satisfaction;
    e.note = std::move(note);
    entries.push_back(std::move(e));
  }

  std::string shown(std::string_view criterion) const {
    const auto *v = af.find(criterion);
    return v ? join(*v) : std::string("?");
  }
};

} // namespace

SatisfactionBreakdown solves(const AlgorithmFamilyProfile &af, const MLProblem &pb,
                             const Catalog &catalog, const EngineConfig &cfg) {
  if (catalog.find_family(af.id) == nullptr)
    throw MatchingError("family '" + af.id + "' is not in the catalog");

  Builder b{af, cfg, {}};
  using RT = RequirementType;
  using PT = PropertyType;

  if (const auto *r = pb.find(RT::Accuracy); r && r->care != Care::Not) {
    double req = std::get<double>(r->value);
    b.add("accuracy", {"accuracy"}, cfg.care(r->care), satisfies_accuracy(af, req),
          "needs " + fmt(req) + ", family bucket " + b.shown(criteria::kAccuracy));
  }
  for (auto [type, key] : {std::pair{RT::Explainability, criteria::kExplainability},
                           std::pair{RT::Interpretability, criteria::kInterpretability}}) {
    const auto *r = pb.find(type);
    if (r == nullptr || r->care == Care::Not || !std::get<bool>(r->value))
      continue;
    b.add(std::string(key), {key}, cfg.care(r->care), satisfies_flag(af, key),
          "family is " + b.shown(key));
  }
  if (const auto *r = pb.find(RT::Adaptability);
      r && r->care != Care::Not && std::get<bool>(r->value)) {
    b.add("adaptability", {"adaptability"}, cfg.care(r->care), satisfies_adaptability(af, cfg),
          "incremental " + b.shown(criteria::kIncrementality) + ", evolutivity " +
              b.shown(criteria::kEvolutivity));
  }

  {
    const auto *cpu = pb.find(RT::CostCpu);
    const auto *mem = pb.find(RT::CostData);
    if (cpu && cpu->care == Care::Not)
      cpu = nullptr;
    if (mem && mem->care == Care::Not)
      mem = nullptr;
    if (cpu || mem) {
      std::optional<double> s_cpu, s_mem;
      double care_sum = 0.0;
      std::string note;
      if (cpu) {
        const auto &budget = std::get<LinguisticValue>(cpu->value);
        s_cpu = satisfies_cost_cpu(af, budget, cfg);
        care_sum += cfg.care(cpu->care);
        note = "cpu budget " + budget.label() + " -> " + fmt(*s_cpu);
      }
      if (mem) {
        const auto &budget = std::get<LinguisticValue>(mem->value);
        s_mem = satisfies_cost_memory(af, budget);
        care_sum += cfg.care(mem->care);
        if (!note.empty())
          note += "; ";
        note += "memory budget " + budget.label() + " -> " + fmt(*s_mem);
      }
      // Cost weighs at its top grade (training complexity, B) even when
      // only the memory budget is given.
      double care = care_sum / ((cpu ? 1 : 0) + (mem ? 1 : 0));
      double s = satisfies_cost(s_cpu, s_mem);
      if (cpu && mem)
        b.add("cost", {"cost_cpu", "cost_data"}, care, s, note, Grade::B);
      else if (cpu)
        b.add("cost", {"cost_cpu"}, care, s, note, Grade::B);
      else
        b.add("cost", {"cost_data"}, care, s, note, Grade::B);
    }
  }

  if (const auto *r = pb.find(RT::DecisionSpeed); r && r->care != Care::Not) {
    const auto &speed = std::get<DecisionSpeed>(r->value);
    b.add("decision_speed", {"decision_speed"}, cfg.care(r->care),
          satisfies_decision_speed(af, speed, cfg),
          speed.metric + " " + fmt(speed.milliseconds) + " ms is bucket " +
              speed_bucket(speed.milliseconds, cfg).label() + ", decision complexity " +
              b.shown(criteria::kDecisionComplexity));
  }

  // Data properties are facts; each counts with full care.
  const double fact = 1.0;
  if (const auto *p = pb.find(PT::Labeling)) {
    auto l = std::get<Labeling>(p->value);
    b.add("labeling", {"labeling"}, fact, satisfies_labeling(af, l),
          std::string(labeling_label(l)) + " data, training " + b.shown(criteria::kTrainingType));
  }
  if (const auto *p = pb.find(PT::Volume)) {
    const auto &v = std::get<LinguisticValue>(p->value);
    b.add("volume", {"volume"}, fact, satisfies_volume(af, v),
          "available " + v.label() + ", needed " + b.shown(criteria::kVolumeForConvergence));
  }
  if (const auto *p = pb.find(PT::MissingValues)) {
    const auto &v = std::get<LinguisticValue>(p->value);
    b.add("missing_values", {"missing_values"}, fact, satisfies_missing(af, v),
          "missing " + v.label() + ", tolerance " + b.shown(criteria::kMissingTolerance));
  }
  if (const auto *p = pb.find(PT::DataType)) {
    const auto &types = std::get<std::set<DataKind>>(p->value);
    std::string shown;
    for (auto k : types)
      shown += (shown.empty() ? "" : "/") + std::string(data_kind_label(k));
    b.add("data_type", {"data_type"}, fact, satisfies_datatype(af, types),
          "data " + shown + ", supported " + b.shown(criteria::kAttributeTypes));
  }
  if (const auto *p = pb.find(PT::Seasonality); p && std::get<bool>(p->value)) {
    b.add("seasonality", {"seasonality"}, fact, satisfies_seasonality(af),
          "evolutivity " + b.shown(criteria::kEvolutivity));
  }
  if (const auto *p = pb.find(PT::Representativity)) {
    const auto &v = std::get<LinguisticValue>(p->value);
    b.add("representativity", {"representativity"}, fact, satisfies_representativity(af, v),
          "representativity " + v.label() + ", imbalance tolerance " +
              b.shown(criteria::kImbalanceTolerance));
  }
  if (const auto *p = pb.find(PT::Homogeneity)) {
    const auto &h = std::get<Homogeneity>(p->value);
    int failed = (h.classes_comparable.value_or(true) ? 0 : 1) +
                 (h.scales_similar.value_or(true) ? 0 : 1);
    b.add("homogeneity", {"homogeneity"}, fact, satisfies_homogeneity(af, h),
          std::to_string(failed) + " failed check(s), noise tolerance " +
              b.shown(criteria::kNoiseTolerance));
  }
  if (const auto *p = pb.find(PT::Distribution)) {
    auto d = std::get<Distribution>(p->value);
    b.add("distribution", {"distribution"}, fact, satisfies_distribution(af, d),
          std::string(distribution_label(d)) + " distribution, bias tolerance " +
              b.shown(criteria::kBiasedDistributionTolerance));
  }

  SatisfactionBreakdown out;
  out.family_id = af.id;
  out.solves = aggregate(b.entries);
  out.entries = std::move(b.entries);
  return out;
}

Ranking rank_families(const MLProblem &pb, const Catalog &catalog, const EngineConfig &cfg) {
  Ranking out;
  for (const auto &af : catalog.families) {
    try {
      out.ranked.push_back(solves(af, pb, catalog, cfg));
    } catch (const UnscorableError &) {
      throw;
    } catch (const std::exception &e) {
      out.diagnostics.push_back({af.id, e.what()});
    }
  }
  std::sort(out.ranked.begin(), out.ranked.end(),
            [](const SatisfactionBreakdown &a, const SatisfactionBreakdown &b) {
              if (a.solves != b.solves)
                return a.solves > b.solves;
              return a.family_id < b.family_id;
            });
  std::sort(out.diagnostics.begin(), out.diagnostics.end(),
            [](const FamilyDiagnostic &a, const FamilyDiagnostic &b) {
              return a.family_id < b.family_id;
            });
  return out;
}

json breakdown_to_json(const SatisfactionBreakdown &b) {
  json entries = json::array();
  for (const auto &e : b.entries) {
    entries.push_back({{"requirement", e.requirement},
                       {"satisfaction", round6(e.satisfaction)},
                       {"weight", round6(e.weight)},
                       {"mappedCriteria", e.mapped_criteria},
                       {"note", e.note}});
  }
  return json{{"familyId", b.family_id}, {"solves", round6(b.solves)}, {"entries", entries}};
}

json ranking_to_json(const Ranking &r, std::optional<std::size_t> top) {
  json ranked = json::array();
  std::size_t n = top ? std::min(*top, r.ranked.size()) : r.ranked.size();
  for (std::size_t i = 0; i < n; ++i) {
    json item = breakdown_to_json(r.ranked[i]);
    item["rank"] = i + 1;
    ranked.push_back(std::move(item));
  }
  json diags = json::array();
  for (const auto &d : r.diagnostics)
    diags.push_back({{"familyId", d.family_id}, {"message", d.message}});
  return json{{"ranking", ranked}, {"diagnostics", diags}};
}

} // namespace mlwb
