#pragma once

#include "bbc/config.hpp"
#include "bbc/evaluation.hpp"
#include "bbc/selection.hpp"

#include <filesystem>
#include <functional>
#include <memory>

namespace bbc {

// Batch evaluation boundary between the search loop and the objective.
// Implementations may return fewer records than requested only when the
// point source dried up (external evaluator shut down); the campaign then
// stops cleanly.
class Evaluator {
public:
    virtual ~Evaluator() = default;
    // Respects and charges `budget`; throws BudgetError when the batch does
    // not fit and EvaluationError when the objective fails.
    virtual std::vector<SampleRecord> evaluate(std::span<const Point> raw, BudgetState& budget,
                                               std::vector<long>& wall_ms) = 0;
};

class FnEvaluator : public Evaluator {
public:
    explicit FnEvaluator(ObjectiveFn fn) : fn_(std::move(fn)) {}
    std::vector<SampleRecord> evaluate(std::span<const Point> raw, BudgetState& budget,
                                       std::vector<long>& wall_ms) override;

private:
    ObjectiveFn fn_;
};

struct IterationInfo {
    int outer_iteration = 0;
    int selection_round = 0;
    const PartitionTree* tree = nullptr;
    const Dataset* dataset = nullptr;
    const std::vector<UcbScore>* scores = nullptr;
    const BeamSelection* beam = nullptr;
};

struct CampaignHooks {
    std::function<void(const IterationInfo&)> on_selection;
    std::function<void(const PartitionTree&, int outer_iteration)> on_tree;
};

struct RunResult {
    std::unique_ptr<Dataset> dataset;
    std::vector<long> wall_ms;         // per record
    std::vector<Checkpoint> checkpoints;
    bool truncated = false;
    std::string error;
};

// The search loop only; metric checkpoints are computed separately by the
// persistence layer (the metric is decoupled from the search).
RunResult run_search(const CampaignConfig& cfg, const SearchSpace& space, Evaluator& evaluator,
                     const CampaignHooks& hooks = {});

// Convenience entry for in-process objectives.
RunResult run_search(const CampaignConfig& cfg, const Objective& objective,
                     const CampaignHooks& hooks = {});

// Builds the validation set configured for the campaign (objective-based
// truth, or a ground-truth file when configured). Returns nullptr when the
// campaign has no usable truth source (external objective, no file).
std::unique_ptr<ValidationSet> make_validation(const CampaignConfig& cfg);

// Full run: search, then metric series, then artifacts under
// cfg.output_dir. Artifacts are flushed up to the failure point when the
// objective dies mid-run.
RunResult run_and_persist(const CampaignConfig& cfg, const std::filesystem::path& dir);

struct SuiteSummary {
    std::vector<std::filesystem::path> run_dirs;
    std::vector<long> budgets;           // checkpoint axis
    std::vector<double> mean_f2, min_f2, max_f2;
    std::vector<int> counts;             // completed runs contributing per budget
    int completed = 0;
    int failed = 0;
};

// Repetitions with derived seeds (base seed + index) and an aggregate table.
SuiteSummary run_suite(const CampaignConfig& cfg, const std::filesystem::path& dir);

} // namespace bbc
