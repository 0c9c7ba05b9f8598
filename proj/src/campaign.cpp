#include "bbc/campaign.hpp"
#include "bbc/artifacts.hpp"
#include "bbc/trust_region.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

namespace bbc {

std::vector<SampleRecord> FnEvaluator::evaluate(std::span<const Point> raw, BudgetState& budget,
                                                std::vector<long>& wall_ms) {
    std::vector<SampleRecord> out;
    out.reserve(raw.size());
    if (budget.used + static_cast<long>(raw.size()) > budget.total)
        throw BudgetError(static_cast<long>(raw.size()), budget.remaining());
    for (const Point& x : raw) {
        const auto t0 = std::chrono::steady_clock::now();
        auto recs = evaluate_batch(fn_, std::span<const Point>(&x, 1), budget);
        const auto t1 = std::chrono::steady_clock::now();
        wall_ms.push_back(
            std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
        out.push_back(std::move(recs.front()));
    }
    return out;
}

namespace {

struct CampaignState {
    const CampaignConfig& cfg;
    const SearchSpace& space;
    Evaluator& evaluator;
    const CampaignHooks& hooks;

    Dataset dataset;
    BudgetState budget;
    std::vector<long> wall_ms;
    Rng rng;
    SobolSequence proposals;
    bool source_closed = false;

    CampaignState(const CampaignConfig& c, const SearchSpace& s, Evaluator& e,
                  const CampaignHooks& h)
        : cfg(c), space(s), evaluator(e), hooks(h), dataset(s),
          budget{c.budget, 0}, rng(c.seed), proposals(s.dim(), 1) {}

    // Evaluates up to the remaining budget; returns indices of appended
    // records.
    std::vector<std::uint32_t> evaluate_append(std::span<const Point> raw) {
        std::vector<Point> batch(raw.begin(), raw.end());
        const long room = budget.remaining();
        if (static_cast<long>(batch.size()) > room) batch.resize(room);
        if (batch.empty()) return {};
        auto recs = evaluator.evaluate(batch, budget, wall_ms);
        if (recs.size() < batch.size()) source_closed = true;
        std::vector<std::uint32_t> idx;
        idx.reserve(recs.size());
        for (auto& r : recs) {
            idx.push_back(static_cast<std::uint32_t>(dataset.size()));
            dataset.append(std::move(r));
        }
        return idx;
    }

    std::vector<Point> to_raw(std::span<const Point> unit) const {
        std::vector<Point> raw;
        raw.reserve(unit.size());
        for (const auto& u : unit) raw.push_back(space.denormalize(u));
        return raw;
    }
};

void run_baseline_loop(CampaignState& st) {
    const int dim = st.space.dim();
    const long chunk = 512;
    if (st.cfg.algorithm == Algorithm::sobol) {
        SobolSequence stream(dim, 1);
        while (st.budget.remaining() > 0 && !st.source_closed) {
            std::vector<Point> unit;
            for (long i = 0; i < std::min(chunk, st.budget.remaining()); ++i)
                unit.push_back(stream.next());
            st.evaluate_append(st.to_raw(unit));
        }
    } else {
        while (st.budget.remaining() > 0 && !st.source_closed) {
            std::vector<Point> raw;
            for (long i = 0; i < std::min(chunk, st.budget.remaining()); ++i) {
                Point p(dim);
                for (int d = 0; d < dim; ++d)
                    p[d] = st.space.lower[d] + st.rng.uniform() * st.space.extent(d);
                raw.push_back(std::move(p));
            }
            st.evaluate_append(raw);
        }
    }
}

void run_partition_loop(CampaignState& st) {
    const int dim = st.space.dim();
    const bool predecessor = st.cfg.algorithm == Algorithm::lambda_predecessor;
    const UcbMode mode = predecessor ? UcbMode::one : UcbMode::rho;
    const int beam_width = predecessor ? 1 : st.cfg.beam_width;
    const LocalSamplerKind sampler = st.cfg.resolved_local_sampler(dim);

    // Initial sampling: a digitally shifted Sobol stream so repeated
    // campaigns explore differently while keeping low discrepancy.
    SobolSequence init_stream(dim, 1);
    init_stream.apply_digital_shift(st.rng);
    st.proposals.apply_digital_shift(st.rng);
    {
        std::vector<Point> unit = init_stream.take(
            static_cast<int>(std::min<long>(st.cfg.init_samples, st.budget.total)));
        st.evaluate_append(st.to_raw(unit));
    }

    TreeifyParams tp;
    tp.leafsize = st.cfg.leafsize;
    tp.max_depth = st.cfg.depth;
    tp.weighting =
        predecessor ? PartitionWeighting::uniform : PartitionWeighting::inverse_density;

    std::shared_ptr<DensityModel> model;
    std::unique_ptr<DensityCache> cache;
    const int density_k = st.cfg.resolved_density_k(dim);
    auto rebuild_density = [&]() {
        std::vector<Point> unit;
        unit.reserve(st.dataset.size());
        for (std::size_t i = 0; i < st.dataset.size(); ++i) {
            auto u = st.dataset.unit(i);
            unit.emplace_back(u.begin(), u.end());
        }
        model = std::make_shared<DensityModel>(
            DensityModel::build(std::move(unit), std::min<int>(density_k,
                                std::max<int>(1, static_cast<int>(st.dataset.size()) - 1))));
        cache = std::make_unique<DensityCache>(model);
        cache->ensure(st.dataset);
    };

    int outer = 0;
    while (st.budget.remaining() > 0 && !st.source_closed) {
        if (!predecessor) {
            if (!model || should_rebuild(*model, st.cfg.rebuild_interval)) rebuild_density();
            cache->ensure(st.dataset);
        }
        PartitionTree tree = treeify(st.dataset, cache.get(), tp);
        if (st.hooks.on_tree) st.hooks.on_tree(tree, outer);

        const std::size_t size_at_period_start = st.dataset.size();
        for (int round = 0;
             round < st.cfg.selections_per_treeification && st.budget.remaining() > 0 &&
             !st.source_closed;
             ++round) {
            auto scores = score_leaves(tree, st.cfg.cp, mode);
            BeamSelection beam = select_beam(tree, st.cfg.cp, beam_width, mode);
            if (st.hooks.on_selection) {
                IterationInfo info;
                info.outer_iteration = outer;
                info.selection_round = round;
                info.tree = &tree;
                info.dataset = &st.dataset;
                info.scores = &scores;
                info.beam = &beam;
                st.hooks.on_selection(info);
            }

            for (int leaf : beam.leaf_ids) {
                if (st.budget.remaining() <= 0 || st.source_closed) break;
                if (sampler == LocalSamplerKind::reject_sobol) {
                    const int want = static_cast<int>(
                        std::min<long>(st.cfg.samples_per_selection, st.budget.remaining()));
                    auto src = sobol_source(st.proposals);
                    auto rs = reject_sample(tree, leaf, want, dim, src);
                    if (rs.starved) {
                        // Thin subspace: grow candidates out of the leaf's
                        // own records instead.
                        std::vector<Point> anchors;
                        const auto& members = tree.node(leaf).records;
                        for (std::size_t i = 0; i < members.size() && anchors.size() < 4; ++i) {
                            auto u = st.dataset.unit(members[i]);
                            anchors.emplace_back(u.begin(), u.end());
                        }
                        auto exp = expand_candidates_around(tree, leaf, anchors, want,
                                                            st.proposals);
                        for (auto& p : exp.points) {
                            if (static_cast<int>(rs.points.size()) >= want) break;
                            rs.points.push_back(std::move(p));
                        }
                    }
                    if (rs.points.empty()) continue;
                    auto idx = st.evaluate_append(st.to_raw(rs.points));
                    backpropagate(tree, st.dataset, cache.get(), idx);
                    if (model) model->note_appended(static_cast<int>(idx.size()));
                } else {
                    std::vector<Point> leaf_points;
                    std::vector<double> leaf_values;
                    for (auto ri : tree.node(leaf).records) {
                        auto u = st.dataset.unit(ri);
                        leaf_points.emplace_back(u.begin(), u.end());
                        leaf_values.push_back(st.dataset.y(ri));
                    }
                    TrustRegionConfig tc = st.cfg.trust_region;
                    tc.local_budget = std::min<long>(tc.local_budget, st.budget.remaining());
                    if (!tc.subspace_only) {
                        leaf_points.clear();
                        leaf_values.clear();
                        for (std::size_t i = 0; i < st.dataset.size(); ++i) {
                            auto u = st.dataset.unit(i);
                            leaf_points.emplace_back(u.begin(), u.end());
                            leaf_values.push_back(st.dataset.y(i));
                        }
                    }
                    BatchEval cb = [&](std::span<const Point> unit) {
                        auto idx = st.evaluate_append(st.to_raw(unit));
                        backpropagate(tree, st.dataset, cache.get(), idx);
                        if (model) model->note_appended(static_cast<int>(idx.size()));
                        std::vector<double> ys;
                        ys.reserve(idx.size());
                        for (auto i : idx) ys.push_back(st.dataset.y(i));
                        return ys;
                    };
                    trust_region_campaign(tree, leaf, leaf_points, leaf_values, cb,
                                          st.proposals, st.rng, tc);
                }
            }
        }

        if (st.dataset.size() == size_at_period_start && st.budget.remaining() > 0 &&
            !st.source_closed) {
            // Every leaf starved: spend one evaluation anywhere to keep the
            // budget accounting exact.
            Point u(dim);
            st.proposals.next(u);
            st.evaluate_append(st.to_raw(std::span<const Point>(&u, 1)));
            if (model) model->note_appended(1);
        }
        ++outer;
    }
}

} // namespace

RunResult run_search(const CampaignConfig& cfg, const SearchSpace& space, Evaluator& evaluator,
                     const CampaignHooks& hooks) {
    cfg.validate();
    CampaignState st(cfg, space, evaluator, hooks);
    RunResult result;
    try {
        if (cfg.algorithm == Algorithm::random_search || cfg.algorithm == Algorithm::sobol)
            run_baseline_loop(st);
        else
            run_partition_loop(st);
    } catch (const EvaluationError& e) {
        result.truncated = true;
        result.error = e.what();
    }
    result.dataset = std::make_unique<Dataset>(std::move(st.dataset));
    result.wall_ms = std::move(st.wall_ms);
    return result;
}

RunResult run_search(const CampaignConfig& cfg, const Objective& objective,
                     const CampaignHooks& hooks) {
    FnEvaluator ev(objective.fn);
    return run_search(cfg, objective.space, ev, hooks);
}

RunResult run_and_persist(const CampaignConfig& cfg, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    cfg.validate();
    if (cfg.objective.id == "external")
        throw std::invalid_argument("run_and_persist requires an in-process objective");
    fs::create_directories(dir);

    const Objective objective = make_objective(cfg.objective);
    RecordsWriter writer(dir / "records.csv", objective.space.dim());
    FnEvaluator base(objective.fn);
    TeeEvaluator tee(base, writer);

    CampaignHooks hooks;
    std::FILE* score_log = nullptr;
    if (cfg.log_scores) {
        score_log = std::fopen((dir / "scores.csv").string().c_str(), "w");
        if (score_log)
            std::fputs("outer,round,leaf,exploitation,exploration,total,selected\n", score_log);
        hooks.on_selection = [score_log](const IterationInfo& info) {
            if (!score_log) return;
            for (const auto& s : *info.scores) {
                const bool sel = std::find(info.beam->leaf_ids.begin(), info.beam->leaf_ids.end(),
                                           s.leaf_id) != info.beam->leaf_ids.end();
                std::fprintf(score_log, "%d,%d,%d,%.17g,%.17g,%.17g,%d\n", info.outer_iteration,
                             info.selection_round, s.leaf_id, s.exploitation, s.exploration,
                             s.total, sel ? 1 : 0);
            }
        };
    }
    if (cfg.dump_trees) {
        hooks.on_tree = [&dir](const PartitionTree& tree, int outer) {
            char name[32];
            std::snprintf(name, sizeof(name), "tree_%04d.txt", outer);
            dump_tree(dir / name, tree);
        };
    }

    RunResult result = run_search(cfg, objective.space, tee, hooks);
    if (score_log) std::fclose(score_log);
    if (result.truncated) writer.write_truncation_marker(result.error);

    if (cfg.eval_cadence > 0) {
        if (auto validation = make_validation(cfg)) {
            result.checkpoints = f2_checkpoints(*result.dataset, *validation, cfg.eval_cadence);
            write_metrics_csv(dir / "metrics.csv", result.checkpoints);
        }
    }
    write_manifest(dir / "manifest.json", cfg, static_cast<long>(result.dataset->size()),
                   result.truncated, result.error);
    return result;
}

SuiteSummary run_suite(const CampaignConfig& cfg, const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    SuiteSummary summary;
    std::map<long, std::vector<double>> by_budget;
    for (int rep = 0; rep < cfg.repetitions; ++rep) {
        CampaignConfig sub = cfg;
        sub.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        char name[32];
        std::snprintf(name, sizeof(name), "run_%03d", rep);
        const fs::path run_dir = dir / name;
        try {
            RunResult r = run_and_persist(sub, run_dir);
            summary.run_dirs.push_back(run_dir);
            if (r.truncated) {
                ++summary.failed;
            } else {
                ++summary.completed;
            }
            for (const auto& cp : r.checkpoints)
                if (!cp.skipped) by_budget[cp.budget].push_back(cp.report.f2);
        } catch (const std::exception&) {
            ++summary.failed;
        }
    }
    for (const auto& [budget, f2s] : by_budget) {
        summary.budgets.push_back(budget);
        double mean = 0.0, lo = f2s.front(), hi = f2s.front();
        for (double v : f2s) {
            mean += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        summary.mean_f2.push_back(mean / f2s.size());
        summary.min_f2.push_back(lo);
        summary.max_f2.push_back(hi);
        summary.counts.push_back(static_cast<int>(f2s.size()));
    }
    write_aggregate_csv(dir / "aggregate.csv", summary);
    return summary;
}

std::unique_ptr<ValidationSet> make_validation(const CampaignConfig& cfg) {
    const SearchSpace space = objective_space(cfg.objective);
    std::vector<int> resolution = cfg.validation_resolution.empty()
                                      ? default_validation_resolution(cfg.objective)
                                      : cfg.validation_resolution;
    double delta = 0.0;
    if (cfg.delta) {
        delta = *cfg.delta;
    } else if (cfg.objective.id != "external") {
        delta = make_objective(cfg.objective).default_delta;
    } else if (cfg.truth_file.empty()) {
        return nullptr;
    }
    if (!cfg.truth_file.empty()) {
        auto truth = read_truth_file(cfg.truth_file);
        if (cfg.delta) truth.delta = *cfg.delta;  // re-threshold stored values
        for (std::size_t i = 0; i < truth.values.size(); ++i)
            truth.truth[i] = truth.values[i] > truth.delta ? 1 : 0;
        return std::make_unique<ValidationSet>(std::move(truth));
    }
    if (cfg.objective.id == "external") return nullptr;
    const Objective obj = make_objective(cfg.objective);
    return std::make_unique<ValidationSet>(
        build_validation_set(obj.space, std::move(resolution), obj.fn, delta));
}

} // namespace bbc
