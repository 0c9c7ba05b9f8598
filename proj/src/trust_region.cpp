#include "bbc/trust_region.hpp"

#include <algorithm>
#include <cmath>

namespace bbc {

namespace {

Box intersect_box(const Box& a, const Box& b) {
    Box out = a;
    for (int d = 0; d < a.dim(); ++d) {
        out.lo[d] = std::max(a.lo[d], b.lo[d]);
        out.hi[d] = std::min(a.hi[d], b.hi[d]);
        if (out.hi[d] < out.lo[d]) out.hi[d] = out.lo[d];
    }
    return out;
}

std::vector<Point> tr_candidates(const PartitionTree& tree, int leaf_id, const Box& tr,
                                 std::span<const Point> anchors, SobolSequence& sobol,
                                 int want) {
    // Sobol proposals inside the TR filtered by leaf membership.
    const int dim = tr.dim();
    std::vector<Point> cands;
    Point buf(dim);
    const int tries = want * 8;
    for (int i = 0; i < tries && static_cast<int>(cands.size()) < want; ++i) {
        sobol.next(buf);
        Point p(dim);
        for (int d = 0; d < dim; ++d) p[d] = tr.lo[d] + buf[d] * tr.extent(d);
        if (tree.leaf_membership(leaf_id, p)) cands.push_back(std::move(p));
    }
    if (!cands.empty()) return cands;
    // Reject sampling starved: grow candidates out of the known members.
    auto expansion = expand_candidates_around(tree, leaf_id, anchors, 2 * dim, sobol);
    for (auto& p : expansion.points)
        if (tr.contains(p)) cands.push_back(std::move(p));
    return cands;
}

} // namespace

TrustRegionResult trust_region_campaign(const PartitionTree& tree, int leaf_id,
                                        std::span<const Point> leaf_points,
                                        std::span<const double> leaf_values,
                                        const BatchEval& evaluate, SobolSequence& sobol,
                                        Rng& rng, const TrustRegionConfig& config) {
    const int dim = leaf_points.empty() ? 0 : static_cast<int>(leaf_points.front().size());
    TrustRegionResult result;
    result.boundary = approximate_boundary(tree, leaf_id, leaf_points, sobol);

    std::vector<Point> xs(leaf_points.begin(), leaf_points.end());
    std::vector<double> ys(leaf_values.begin(), leaf_values.end());
    long evals = 0;

    auto run_batch = [&](std::span<const Point> pts) {
        auto values = evaluate(pts);
        for (std::size_t i = 0; i < values.size(); ++i) {
            result.records.push_back({pts[i], values[i]});
            xs.push_back(pts[i]);
            ys.push_back(values[i]);
        }
        evals += static_cast<long>(values.size());
        if (values.size() < pts.size()) result.budget_exhausted = true;
        return values;
    };

    // Initialization: Latin-hypercube points in the boundary, kept only when
    // they belong to the leaf.
    {
        std::vector<Point> init;
        for (int round = 0; round < 16 && static_cast<int>(init.size()) < config.init_points;
             ++round) {
            auto lhs = latin_hypercube(config.init_points, result.boundary, rng);
            for (auto& p : lhs) {
                if (static_cast<int>(init.size()) >= config.init_points) break;
                if (tree.leaf_membership(leaf_id, p)) init.push_back(std::move(p));
            }
        }
        if (static_cast<int>(init.size()) < config.init_points) {
            auto extra = expand_candidates_around(tree, leaf_id, leaf_points,
                                                  config.init_points, sobol);
            for (auto& p : extra.points) {
                if (static_cast<int>(init.size()) >= config.init_points) break;
                init.push_back(std::move(p));
            }
        }
        if (static_cast<long>(init.size()) > config.local_budget)
            init.resize(config.local_budget);
        if (!init.empty()) run_batch(init);
    }

    if (xs.empty()) return result;

    auto best_of = [&]() {
        std::size_t bi = 0;
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (ys[i] > ys[bi]) bi = i;
        return bi;
    };
    std::size_t best = best_of();
    result.incumbent = xs[best];
    result.incumbent_y = ys[best];

    const int failure_tolerance = std::max(config.failure_tolerance, dim);
    double scale = 1.0;
    const double min_scale = std::pow(0.5, config.shrink_limit);
    int successes = 0, failures = 0;

    while (!result.budget_exhausted && evals < config.local_budget && scale >= min_scale) {
        Box tr;
        tr.lo.resize(dim);
        tr.hi.resize(dim);
        for (int d = 0; d < dim; ++d) {
            const double half = 0.5 * scale * config.init_scale * result.boundary.extent(d);
            tr.lo[d] = result.incumbent[d] - half;
            tr.hi[d] = result.incumbent[d] + half;
        }
        tr = intersect_box(tr, result.boundary);

        std::vector<Point> train_x;
        std::vector<double> train_y;
        for (std::size_t i = 0; i < xs.size(); ++i)
            if (tr.contains(xs[i])) {
                train_x.push_back(xs[i]);
                train_y.push_back(ys[i]);
            }
        if (train_x.size() < 2) {
            train_x.assign(xs.begin(), xs.end());
            train_y.assign(ys.begin(), ys.end());
        }
        if (static_cast<int>(train_x.size()) > config.gp_max_points) {
            // Keep the most recent window.
            const std::size_t start = train_x.size() - config.gp_max_points;
            train_x.erase(train_x.begin(), train_x.begin() + start);
            train_y.erase(train_y.begin(), train_y.begin() + start);
        }

        auto candidates = tr_candidates(tree, leaf_id, tr, train_x, sobol,
                                        std::min(config.max_candidates, 50 * dim + 50));
        if (candidates.empty()) break;

        GpSurrogate gp;
        gp.fit(train_x, train_y, rng);
        const int nsel = static_cast<int>(
            std::min<long>(config.thompson_batch, config.local_budget - evals));
        auto picks = thompson_select(gp, candidates, nsel, /*maximize=*/true, rng);
        std::vector<Point> batch;
        for (int idx : picks) batch.push_back(candidates[idx]);
        auto values = run_batch(batch);
        if (values.empty()) break;

        bool improved = false;
        for (double y : values)
            if (y > result.incumbent_y + 1e-10 * std::max(1.0, std::fabs(result.incumbent_y)))
                improved = true;
        best = best_of();
        result.incumbent = xs[best];
        result.incumbent_y = ys[best];

        if (improved) {
            ++successes;
            failures = 0;
            if (successes >= config.success_tolerance) {
                scale = std::min(1.0, scale * 2.0);
                successes = 0;
            }
        } else {
            ++failures;
            successes = 0;
            if (failures >= failure_tolerance) {
                scale *= 0.5;
                failures = 0;
            }
        }
    }
    result.collapsed = scale < min_scale;
    return result;
}

} // namespace bbc
