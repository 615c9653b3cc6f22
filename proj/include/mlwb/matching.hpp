#pragma once

// Requirement satisfaction functions and the normalized weighted Solves
// score of an algorithm family for a problem:
//
//   solves = sum(w_i * s_i) / sum(w_i),   w_i = care_i * W(grade_i)
//
// Each s_i lies in [0, 1]. A requirement the expert does not care about (or
// a flag requirement set to false) contributes no entry at all.
//
// Family criteria may hold several values (the family's members differ);
// every satisfaction function then uses the most favorable member value.

#include "mlwb/catalog.hpp"
#include "mlwb/linguistic.hpp"
#include "mlwb/problem.hpp"
#include "mlwb/profiler.hpp"

#include <array>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlwb {

struct EngineConfig {
  // Indexed by Grade.
  std::array<double, 6> grade_weights{8.0, 6.0, 4.0, 3.0, 2.0, 1.0};
  // Indexed by Care.
  std::array<double, 4> care_numerics{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  // Decision-speed budget buckets: <= [0] Low, <= [1] Medium, <= [2] High,
  // otherwise Very High.
  std::array<double, 3> speed_thresholds_ms{10.0, 100.0, 1000.0};
  ProfileThresholds profile_thresholds{};
  std::string tie_break = "family-id";

  double weight(Grade g) const { return grade_weights[static_cast<std::size_t>(g)]; }
  double care(Care c) const { return care_numerics[static_cast<std::size_t>(c)]; }

  // Copy with every grade weight multiplied by k.
  EngineConfig scaled(double k) const;

  // Throws std::invalid_argument when an invariant fails.
  void validate() const;
};

class MatchingError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// The family lacks a value the requirement needs.
class MissingCriterionError : public MatchingError {
public:
  MissingCriterionError(std::string family, std::string criterion);

  const std::string &family() const { return family_; }
  const std::string &criterion() const { return criterion_; }

private:
  std::string family_;
  std::string criterion_;
};

// No requirement carries a positive weight.
class UnscorableError : public MatchingError {
public:
  using MatchingError::MatchingError;
};

struct SatisfactionEntry {
  std::string requirement;
  double satisfaction = 0.0;
  double weight = 0.0;
  std::vector<std::string> mapped_criteria;
  std::string note;
};

struct SatisfactionBreakdown {
  std::string family_id;
  std::vector<SatisfactionEntry> entries;
  double solves = 0.0;
};

// sum(weight * satisfaction) / sum(weight) over entries with weight > 0.
// Throws UnscorableError when that weight sum is zero.
double aggregate(const std::vector<SatisfactionEntry> &entries);

LinguisticValue speed_bucket(double milliseconds, const EngineConfig &cfg = {});

// Individual satisfaction functions. All throw MissingCriterionError when
// the family lacks the criteria they read.
double satisfies_accuracy(const AlgorithmFamilyProfile &af, double required);
double satisfies_flag(const AlgorithmFamilyProfile &af, std::string_view criterion);
double satisfies_adaptability(const AlgorithmFamilyProfile &af, const EngineConfig &cfg = {});

// CPU cost on resolved values: the parallelism argument is already the
// complement of the family's parallelism potential.
double cost_cpu_satisfaction(const LinguisticValue &training_complexity,
                             const LinguisticValue &memory,
                             const LinguisticValue &parallelism_complement,
                             const LinguisticValue &budget, const EngineConfig &cfg = {});
double satisfies_cost_cpu(const AlgorithmFamilyProfile &af, const LinguisticValue &budget,
                          const EngineConfig &cfg = {});
double satisfies_cost_memory(const AlgorithmFamilyProfile &af, const LinguisticValue &budget);
// Mean of the subfunctions that are present; throws std::invalid_argument
// when neither is.
double satisfies_cost(std::optional<double> cpu, std::optional<double> memory);

double satisfies_labeling(const AlgorithmFamilyProfile &af, Labeling labeling);
double satisfies_volume(const AlgorithmFamilyProfile &af, const LinguisticValue &available);
double satisfies_missing(const AlgorithmFamilyProfile &af, const LinguisticValue &level);
double satisfies_datatype(const AlgorithmFamilyProfile &af, const std::set<DataKind> &types);
double satisfies_seasonality(const AlgorithmFamilyProfile &af);
double satisfies_representativity(const AlgorithmFamilyProfile &af,
                                  const LinguisticValue &representativity);
double satisfies_homogeneity(const AlgorithmFamilyProfile &af, bool classes_ok, bool scales_ok);
double satisfies_homogeneity(const AlgorithmFamilyProfile &af, const Homogeneity &h);
double satisfies_distribution(const AlgorithmFamilyProfile &af, Distribution d);
double satisfies_decision_speed(const AlgorithmFamilyProfile &af, const DecisionSpeed &budget,
                                const EngineConfig &cfg = {});

// Demand placed on a family's imbalance tolerance: High representativity
// demands nothing (None), Medium -> Medium, Low -> High.
LinguisticValue representativity_demand(const LinguisticValue &representativity);
// Demand on noise tolerance from the number of failed homogeneity checks:
// 0 -> None, 1 -> Medium, 2 -> High.
LinguisticValue homogeneity_demand(int failed_checks);

SatisfactionBreakdown solves(const AlgorithmFamilyProfile &af, const MLProblem &pb,
                             const Catalog &catalog, const EngineConfig &cfg = {});

struct FamilyDiagnostic {
  std::string family_id;
  std::string message;
};

struct Ranking {
  std::vector<SatisfactionBreakdown> ranked;
  std::vector<FamilyDiagnostic> diagnostics;
};

// Descending solves, ties by ascending family id. Per-family failures are
// reported as diagnostics; an unscorable problem throws UnscorableError.
Ranking rank_families(const MLProblem &pb, const Catalog &catalog,
                      const EngineConfig &cfg = {});

// Numbers are rounded to six decimal places.
nlohmann::json breakdown_to_json(const SatisfactionBreakdown &b);
nlohmann::json ranking_to_json(const Ranking &r, std::optional<std::size_t> top = {});

} // namespace mlwb
