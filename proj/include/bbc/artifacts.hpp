#pragma once

#include "bbc/campaign.hpp"
#include "bbc/config.hpp"
#include "bbc/evaluation.hpp"

#include <cstdio>
#include <filesystem>
#include <string>

namespace bbc {

// Incremental records file: index, raw coordinates, value, per-evaluation
// wall milliseconds. Doubles are printed round-trippable so reruns with the
// same seed produce byte-identical files.
class RecordsWriter {
public:
    RecordsWriter(const std::filesystem::path& path, int dim);
    ~RecordsWriter();
    RecordsWriter(const RecordsWriter&) = delete;
    RecordsWriter& operator=(const RecordsWriter&) = delete;

    void write(long index, const SampleRecord& rec, long wall_ms);
    void write_truncation_marker(const std::string& why);

private:
    std::FILE* f_ = nullptr;
};

// Wraps an evaluator so every record is flushed to disk as it is produced.
class TeeEvaluator : public Evaluator {
public:
    TeeEvaluator(Evaluator& inner, RecordsWriter& writer) : inner_(inner), writer_(writer) {}
    std::vector<SampleRecord> evaluate(std::span<const Point> raw, BudgetState& budget,
                                       std::vector<long>& wall_ms) override;

private:
    Evaluator& inner_;
    RecordsWriter& writer_;
    long next_index_ = 0;
};

void write_metrics_csv(const std::filesystem::path& path, std::span<const Checkpoint> checkpoints);
void write_manifest(const std::filesystem::path& path, const CampaignConfig& cfg,
                    long records, bool truncated, const std::string& error);

std::vector<SampleRecord> read_records_csv(const std::filesystem::path& path, int dim);

// Ground-truth grid file: a commented header (dimension, bounds, resolution,
// threshold) followed by one row per grid point with the objective value and
// its label.
void write_truth_file(const std::filesystem::path& path, const ValidationSet& truth,
                      const std::string& objective_id);
ValidationSet read_truth_file(const std::filesystem::path& path);

// Exhaustive grid evaluation persisted for later scoring.
ValidationSet generate_ground_truth(const Objective& objective, std::vector<int> resolution,
                                    double delta, const std::filesystem::path& out_path);

void write_aggregate_csv(const std::filesystem::path& path, const SuiteSummary& summary);

void dump_tree(const std::filesystem::path& path, const PartitionTree& tree);

} // namespace bbc
