#pragma once

// Agreement between engine rankings and expert rankings: Kendall tau-b
// (tie corrected) as the headline metric, Spearman rho alongside.

#include "mlwb/catalog.hpp"
#include "mlwb/matching.hpp"
#include "mlwb/problem.hpp"

#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlwb {

class ValidationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Scores over the same items; equal scores are ties. Lower score = better
// rank, but only the ordering matters. Throws ValidationError for fewer
// than two items, mismatched lengths, or a constant score vector.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
double spearman_rho(std::span<const double> x, std::span<const double> y);

// Orderings (best first) of the same item set.
double kendall_tau_b(const std::vector<std::string> &r1, const std::vector<std::string> &r2);
double spearman_rho(const std::vector<std::string> &r1, const std::vector<std::string> &r2);

inline constexpr std::size_t kMaxExpertListLength = 5;

struct ExpertRanking {
  std::string problem_id;
  std::string rater_id;
  std::vector<std::string> ranked_family_ids;

  friend bool operator==(const ExpertRanking &, const ExpertRanking &) = default;
};

// Throws ValidationError: empty or overlong list, duplicates, unknown ids.
void check_expert_ranking(const ExpertRanking &r, const Catalog &catalog);

struct ExpertComparison {
  std::string problem_id;
  std::string rater_id;
  // Families both lists contain, in expert order.
  std::vector<std::string> expert_order;
  // The same families in engine order.
  std::vector<std::string> engine_order;
  double tau_b = 0.0;
  double spearman = 0.0;
};

// Engine ranking intersected with the expert's families. Engine ties (equal
// solves) are kept as ties. Throws ValidationError when fewer than two of
// the expert's families are scored by the engine.
ExpertComparison compare_to_expert(const MLProblem &pb, const ExpertRanking &expert,
                                   const Catalog &catalog, const EngineConfig &cfg = {});

inline constexpr int kExpertFixtureSchemaVersion = 1;

struct ExpertFixture {
  std::vector<MLProblem> problems;
  std::vector<ExpertRanking> rankings;
};

nlohmann::json expert_fixture_to_json(const ExpertFixture &f);
// Throws ValidationError (structure) or ProjectFormatError (problems).
ExpertFixture expert_fixture_from_json(const nlohmann::json &j);

struct InterRater {
  std::string problem_id;
  std::vector<std::string> raters;
  // tau-b over the families both raters listed; nullopt with fewer than
  // two common families.
  std::vector<std::vector<std::optional<double>>> tau_b;
};

struct AgreementReport {
  std::vector<ExpertComparison> comparisons;
  std::map<std::string, double> mean_tau_b; // per problem
  std::vector<InterRater> inter_rater;
  std::vector<std::string> diagnostics;
};

AgreementReport agreement_report(const ExpertFixture &fixture, const Catalog &catalog,
                                 const EngineConfig &cfg = {});

nlohmann::json agreement_to_json(const AgreementReport &r);
std::string format_agreement_table(const AgreementReport &r);

} // namespace mlwb
