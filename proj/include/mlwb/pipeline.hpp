#pragma once

// Processing chains built around a chosen algorithm family. A generic
// template (retrieve, clean, train, evaluate, interpret) is extended with
// preprocessing steps that compensate for remediable shortfalls between the
// family and the data.

#include "mlwb/catalog.hpp"
#include "mlwb/linguistic.hpp"
#include "mlwb/problem.hpp"
#include "mlwb/profiler.hpp"

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace mlwb {

enum class StepKind {
  DataRetrieval,
  Cleaning,
  Imputation,
  Encoding,
  Denoising,
  DimensionalityReduction,
  Normalization,
  ModelTraining,
  Evaluation,
  Interpretation,
};

std::string_view step_kind_label(StepKind k);
std::optional<StepKind> parse_step_kind(std::string_view label);
bool is_compensation(StepKind k);

struct PipelineStep {
  StepKind kind = StepKind::DataRetrieval;
  std::string rationale;
  std::optional<std::string> bound_family_id; // model-training only
  std::vector<std::string> candidate_tags;

  friend bool operator==(const PipelineStep &, const PipelineStep &) = default;
};

struct ProcessingChain {
  std::string problem_id;
  std::string family_id;
  std::vector<PipelineStep> steps;
  // The train/evaluate loop is not executed; this records when to stop it.
  std::string exit_criterion;

  friend bool operator==(const ProcessingChain &, const ProcessingChain &) = default;
};

class ChainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Throws ChainError when the chain breaks a structural invariant: exactly
// one model-training step, a family bound only to it, template order kept,
// compensation steps before training.
void check_chain(const ProcessingChain &chain);

ProcessingChain base_template(std::string problem_id = {}, std::string family_id = {});

// Facts the rules look at. Absent fields never trigger a rule.
struct DataConditions {
  std::optional<LinguisticValue> missing_level;
  std::optional<std::set<DataKind>> data_types;
  std::optional<bool> scales_similar;
  std::optional<bool> classes_comparable;
  bool correlated_attributes = false;
};

// Profile values take precedence over the problem's data properties.
DataConditions conditions_from(const MLProblem *problem, const ProfileReport *report);

struct CompensationRule {
  std::string_view criterion;
  StepKind step;
  // Rationale when the rule fires for (family, data), nullopt otherwise.
  std::function<std::optional<std::string>(const AlgorithmFamilyProfile &,
                                            const DataConditions &)>
      trigger;
};

const std::vector<CompensationRule> &shipped_rules();

// Injects one step per firing rule between cleaning and model-training, in
// the order imputation, encoding, denoising, normalization, dimensionality
// reduction. Steps already present are kept, so re-applying adds nothing.
ProcessingChain apply_compensations(ProcessingChain chain, const AlgorithmFamilyProfile &family,
                                    const DataConditions &data);

inline constexpr int kChainSchemaVersion = 1;

nlohmann::json chain_to_json(const ProcessingChain &chain);
// Throws ChainError.
ProcessingChain chain_from_json(const nlohmann::json &j);

// BPMN 2.0 process: start event, one service task per step (name = step
// kind, documentation = rationale), end event, sequence flows between them.
std::string export_bpmn(const ProcessingChain &chain);

enum class ChainFormat { Canonical, WorkflowXml };

std::optional<ChainFormat> parse_chain_format(std::string_view label);
std::string export_chain(const ProcessingChain &chain, ChainFormat format);

} // namespace mlwb
