#include "bbc/artifacts.hpp"
#include "bbc/ask_tell.hpp"
#include "bbc/campaign.hpp"
#include "bbc/reporting.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string objective;
    int dim = 0;
    double delta = 0.0;
    bool has_delta = false;
    std::string out;
};

void add_config_overrides(CLI::App* cmd, bbc::CampaignConfig& cfg, CommonFlags& common) {
    cmd->add_option("--config", common.config_path, "campaign config file (JSON)");
    cmd->add_option("--objective", common.objective,
                    "objective id: holder-table | ripples | car-following | external");
    cmd->add_option("--dim", common.dim, "objective dimension (ripples/external)");
    cmd->add_option("--delta", common.delta, "criticality threshold")
        ->each([&common](const std::string&) { common.has_delta = true; });
    cmd->add_option("--seed", cfg.seed, "campaign seed");
    cmd->add_option("--budget", cfg.budget, "evaluation budget");
    cmd->add_option_function<std::string>(
        "--algorithm",
        [&cfg](const std::string& s) { cfg.algorithm = bbc::parse_algorithm(s); },
        "lambda | lambda-predecessor-mode | random | sobol");
    cmd->add_option("--cp", cfg.cp, "exploration factor");
    cmd->add_option("--leafsize", cfg.leafsize, "partition stop: records per leaf");
    cmd->add_option("--depth", cfg.depth, "partition stop: maximum depth");
    cmd->add_option("--init", cfg.init_samples, "initial Sobol samples");
    cmd->add_option("--beam", cfg.beam_width, "beam width");
    cmd->add_option("--selections", cfg.selections_per_treeification,
                    "selection rounds per treeification");
    cmd->add_option("--samples-per-selection", cfg.samples_per_selection,
                    "points per selected leaf (reject sampler)");
    cmd->add_option_function<std::string>(
        "--local-sampler",
        [&cfg](const std::string& s) { cfg.local_sampler = bbc::parse_local_sampler(s); },
        "reject-sobol | trust-region");
    cmd->add_option("--density-k", cfg.density_k, "KDE neighbor count");
    cmd->add_option("--rebuild-interval", cfg.rebuild_interval, "KDE rebuild cadence");
    cmd->add_option("--cadence", cfg.eval_cadence, "metric checkpoint cadence (0 = off)");
    cmd->add_option("--resolution", cfg.validation_resolution, "validation grid per dimension");
    cmd->add_option("--truth-file", cfg.truth_file, "precomputed ground-truth grid");
    cmd->add_option("--repetitions", cfg.repetitions, "suite repetitions");
    cmd->add_option("--out", common.out, "output directory / file");
    cmd->add_flag("--dump-trees", cfg.dump_trees, "write partition-tree dumps");
    cmd->add_flag("--log-scores", cfg.log_scores, "write per-round score table");
}

bbc::CampaignConfig finalize_config(const CommonFlags& common, bbc::CampaignConfig& overrides,
                                    CLI::App* cmd) {
    bbc::CampaignConfig cfg;
    if (!common.config_path.empty()) cfg = bbc::CampaignConfig::load_file(common.config_path);
    // Flags beat config-file keys.
    auto touched = [cmd](const std::string& name) { return cmd->count(name) > 0; };
    if (!common.objective.empty()) cfg.objective.id = common.objective;
    if (common.dim > 0) cfg.objective.dim = common.dim;
    if (common.has_delta) cfg.delta = common.delta;
    if (touched("--seed")) cfg.seed = overrides.seed;
    if (touched("--budget")) cfg.budget = overrides.budget;
    if (touched("--algorithm")) cfg.algorithm = overrides.algorithm;
    if (touched("--cp")) cfg.cp = overrides.cp;
    if (touched("--leafsize")) cfg.leafsize = overrides.leafsize;
    if (touched("--depth")) cfg.depth = overrides.depth;
    if (touched("--init")) cfg.init_samples = overrides.init_samples;
    if (touched("--beam")) cfg.beam_width = overrides.beam_width;
    if (touched("--selections"))
        cfg.selections_per_treeification = overrides.selections_per_treeification;
    if (touched("--samples-per-selection"))
        cfg.samples_per_selection = overrides.samples_per_selection;
    if (touched("--local-sampler")) cfg.local_sampler = overrides.local_sampler;
    if (touched("--density-k")) cfg.density_k = overrides.density_k;
    if (touched("--rebuild-interval")) cfg.rebuild_interval = overrides.rebuild_interval;
    if (touched("--cadence")) cfg.eval_cadence = overrides.eval_cadence;
    if (touched("--resolution")) cfg.validation_resolution = overrides.validation_resolution;
    if (touched("--truth-file")) cfg.truth_file = overrides.truth_file;
    if (touched("--repetitions")) cfg.repetitions = overrides.repetitions;
    if (touched("--dump-trees")) cfg.dump_trees = overrides.dump_trees;
    if (touched("--log-scores")) cfg.log_scores = overrides.log_scores;
    if (!common.out.empty()) cfg.output_dir = common.out;
    return cfg;
}

int serve_external(const bbc::CampaignConfig& cfg) {
    bbc::AskTellSession session(cfg);
    const std::string campaign_id = cfg.objective.id + "-" + std::to_string(cfg.seed);
    constexpr int kBatchMax = 64;
    while (true) {
        auto points = session.ask(kBatchMax);
        if (points.empty()) break;
        json msg;
        msg["campaign"] = campaign_id;
        msg["seed"] = cfg.seed;
        msg["points"] = points;
        std::cout << msg.dump() << "\n" << std::flush;

        std::string line;
        if (!std::getline(std::cin, line)) {
            std::cerr << json{{"error", "evaluator closed the stream"}}.dump() << "\n";
            return 3;
        }
        json reply = json::parse(line);
        if (reply.value("campaign", "") != campaign_id ||
            reply.value("seed", std::uint64_t{0}) != cfg.seed)
            throw bbc::ProtocolError("reply does not echo the campaign id and seed");
        std::vector<bbc::SampleRecord> recs;
        for (const auto& r : reply.at("results")) {
            bbc::SampleRecord rec;
            rec.x = r.at("x").get<bbc::Point>();
            rec.y = r.at("y").get<double>();
            recs.push_back(std::move(rec));
        }
        session.tell(recs);
    }
    auto result = session.take_result();

    const fs::path dir = cfg.output_dir;
    fs::create_directories(dir);
    {
        bbc::RecordsWriter writer(dir / "records.csv", bbc::objective_space(cfg.objective).dim());
        for (std::size_t i = 0; i < result.dataset->size(); ++i)
            writer.write(static_cast<long>(i), result.dataset->record(i),
                         i < result.wall_ms.size() ? result.wall_ms[i] : 0);
        if (result.truncated) writer.write_truncation_marker(result.error);
    }
    if (cfg.eval_cadence > 0) {
        if (auto validation = bbc::make_validation(cfg)) {
            result.checkpoints =
                bbc::f2_checkpoints(*result.dataset, *validation, cfg.eval_cadence);
            bbc::write_metrics_csv(dir / "metrics.csv", result.checkpoints);
            }
    }
    bbc::write_manifest(dir / "manifest.json", cfg,
                        static_cast<long>(result.dataset->size()), result.truncated,
                        result.error);
    return result.truncated ? 4 : 0;
}

void print_final_metrics(const std::vector<bbc::Checkpoint>& checkpoints) {
    for (auto it = checkpoints.rbegin(); it != checkpoints.rend(); ++it) {
        if (it->skipped) continue;
        std::printf("final budget=%ld recall=%.4f precision=%.4f f2=%.4f\n", it->budget,
                    it->report.recall, it->report.precision, it->report.f2);
        return;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bbcov: coverage-oriented black-box search toolkit"};
    app.require_subcommand(1);

    bbc::CampaignConfig overrides;
    CommonFlags common;

    auto* cmd_run = app.add_subcommand("run", "run one campaign");
    add_config_overrides(cmd_run, overrides, common);

    auto* cmd_suite = app.add_subcommand("suite", "run repeated campaigns and aggregate");
    add_config_overrides(cmd_suite, overrides, common);

    auto* cmd_truth = app.add_subcommand("truth", "evaluate a full grid and persist it");
    add_config_overrides(cmd_truth, overrides, common);

    auto* cmd_eval = app.add_subcommand("eval", "re-score an existing records file");
    std::string records_path;
    long eval_cadence_flag = 0;
    add_config_overrides(cmd_eval, overrides, common);
    cmd_eval->add_option("--records", records_path, "records CSV to score")->required();

    auto* cmd_report = app.add_subcommand("report", "modality coverage of a records file");
    double report_radius = bbc::kNoRadiusLimit;
    add_config_overrides(cmd_report, overrides, common);
    cmd_report->add_option("--records", records_path, "records CSV to analyze")->required();
    cmd_report->add_option("--radius", report_radius, "count hits only within this distance");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            auto cfg = finalize_config(common, overrides, cmd_run);
            if (cfg.objective.id == "external") return serve_external(cfg);
            auto result = bbc::run_and_persist(cfg, cfg.output_dir);
            std::printf("records=%zu dir=%s\n", result.dataset->size(), cfg.output_dir.c_str());
            print_final_metrics(result.checkpoints);
            if (result.truncated) {
                std::cerr << json{{"error", result.error}}.dump() << "\n";
                return 4;
            }
            return 0;
        }
        if (cmd_suite->parsed()) {
            auto cfg = finalize_config(common, overrides, cmd_suite);
            auto summary = bbc::run_suite(cfg, cfg.output_dir);
            std::printf("suite: %d completed, %d failed, aggregate=%s/aggregate.csv\n",
                        summary.completed, summary.failed, cfg.output_dir.c_str());
            if (!summary.budgets.empty())
                std::printf("final mean f2=%.4f (min %.4f, max %.4f)\n", summary.mean_f2.back(),
                            summary.min_f2.back(), summary.max_f2.back());
            return summary.failed == 0 ? 0 : 4;
        }
        if (cmd_truth->parsed()) {
            auto cfg = finalize_config(common, overrides, cmd_truth);
            const auto objective = bbc::make_objective(cfg.objective);
            const double delta = cfg.delta ? *cfg.delta : objective.default_delta;
            auto resolution = cfg.validation_resolution.empty()
                                  ? bbc::default_validation_resolution(cfg.objective)
                                  : cfg.validation_resolution;
            const std::string out =
                common.out.empty() ? objective.id + "_truth.csv" : common.out;
            auto truth = bbc::generate_ground_truth(objective, resolution, delta, out);
            long positives = 0;
            for (auto t : truth.truth) positives += t;
            std::printf("truth: %ld points, %ld critical, file=%s\n", truth.size(), positives,
                        out.c_str());
            return 0;
        }
        if (cmd_eval->parsed()) {
            auto cfg = finalize_config(common, overrides, cmd_eval);
            (void)eval_cadence_flag;
            auto validation = bbc::make_validation(cfg);
            if (!validation)
                throw std::invalid_argument("eval needs an objective or a truth file");
            const auto space = bbc::objective_space(cfg.objective);
            bbc::Dataset ds(space);
            for (auto& rec : bbc::read_records_csv(records_path, space.dim()))
                ds.append(std::move(rec));
            const long cadence = cfg.eval_cadence > 0 ? cfg.eval_cadence : 10;
            auto checkpoints = bbc::f2_checkpoints(ds, *validation, cadence);
            const std::string out = common.out.empty() ? "metrics.csv" : common.out;
            bbc::write_metrics_csv(out, checkpoints);
            std::printf("scored %zu records -> %s\n", ds.size(), out.c_str());
            print_final_metrics(checkpoints);
            return 0;
        }
        if (cmd_report->parsed()) {
            auto cfg = finalize_config(common, overrides, cmd_report);
            const auto objective = bbc::make_objective(cfg.objective);
            if (objective.modality_centers.empty())
                throw std::invalid_argument("objective has no known modality centers");
            const double delta = cfg.delta ? *cfg.delta : objective.default_delta;
            auto records = bbc::read_records_csv(records_path, objective.space.dim());
            auto report = bbc::report_modality_coverage(records, objective.modality_centers,
                                                        report_radius, delta);
            std::printf("modality,first_hit,hits\n");
            for (std::size_t m = 0; m < report.modalities.size(); ++m)
                std::printf("%zu,%ld,%ld\n", m, report.modalities[m].first_hit,
                            report.modalities[m].hits);
            std::printf("covered %d of %zu modalities\n", report.covered(),
                        report.modalities.size());
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 2;
    }
    return 1;
}
