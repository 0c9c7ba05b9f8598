#include "bbc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbc {

long GridSpec::size() const {
    long n = 1;
    for (int r : resolution) n *= r;
    return n;
}

std::vector<int> GridSpec::coords(long flat) const {
    std::vector<int> c(resolution.size());
    for (int d = static_cast<int>(resolution.size()) - 1; d >= 0; --d) {
        c[d] = static_cast<int>(flat % resolution[d]);
        flat /= resolution[d];
    }
    return c;
}

Point GridSpec::point(long flat) const {
    auto c = coords(flat);
    Point p(resolution.size());
    for (std::size_t d = 0; d < resolution.size(); ++d) {
        p[d] = resolution[d] == 1
                   ? space.lower[d]
                   : space.lower[d] + space.extent(static_cast<int>(d)) * c[d] /
                                          (resolution[d] - 1);
        if (c[d] == resolution[d] - 1) p[d] = space.upper[d];  // exact endpoint
    }
    return p;
}

int count_components(std::span<const std::uint8_t> labels, std::span<const int> resolution) {
    const int ndim = static_cast<int>(resolution.size());
    long total = 1;
    std::vector<long> stride(ndim);
    for (int d = ndim - 1; d >= 0; --d) {
        stride[d] = total;
        total *= resolution[d];
    }
    if (static_cast<long>(labels.size()) != total)
        throw std::invalid_argument("label count does not match grid resolution");

    std::vector<std::int32_t> comp(labels.size(), -1);
    std::vector<long> stack;
    int ncomp = 0;
    for (long s = 0; s < total; ++s) {
        if (!labels[s] || comp[s] >= 0) continue;
        stack.push_back(s);
        comp[s] = ncomp;
        while (!stack.empty()) {
            const long u = stack.back();
            stack.pop_back();
            long rem = u;
            for (int d = 0; d < ndim; ++d) {
                const long c = rem / stride[d];
                rem %= stride[d];
                if (c > 0) {
                    const long v = u - stride[d];
                    if (labels[v] && comp[v] < 0) {
                        comp[v] = ncomp;
                        stack.push_back(v);
                    }
                }
                if (c < resolution[d] - 1) {
                    const long v = u + stride[d];
                    if (labels[v] && comp[v] < 0) {
                        comp[v] = ncomp;
                        stack.push_back(v);
                    }
                }
            }
        }
        ++ncomp;
    }
    return ncomp;
}

namespace {
void check_resolution(const SearchSpace& space, const std::vector<int>& resolution) {
    if (resolution.size() != static_cast<std::size_t>(space.dim()))
        throw std::invalid_argument("validation grid resolution must match the space dimension");
    for (int r : resolution)
        if (r < 2) throw std::invalid_argument("validation grid needs resolution >= 2 per dimension");
}
} // namespace

ValidationSet build_validation_set(const SearchSpace& space, std::vector<int> resolution,
                                   const ObjectiveFn& objective, double delta) {
    check_resolution(space, resolution);
    ValidationSet vs;
    vs.grid = GridSpec{space, std::move(resolution)};
    vs.delta = delta;
    const long n = vs.grid.size();
    vs.values.reserve(n);
    vs.truth.reserve(n);
    for (long i = 0; i < n; ++i) {
        const double y = objective(vs.grid.point(i));
        vs.values.push_back(y);
        vs.truth.push_back(y > delta ? 1 : 0);
    }
    return vs;
}

ValidationSet build_validation_set(const SearchSpace& space, std::vector<int> resolution,
                                   std::vector<double> values, double delta) {
    check_resolution(space, resolution);
    ValidationSet vs;
    vs.grid = GridSpec{space, std::move(resolution)};
    vs.delta = delta;
    if (static_cast<long>(values.size()) != vs.grid.size())
        throw std::invalid_argument("ground-truth value count does not match the grid shape");
    vs.values = std::move(values);
    vs.truth.reserve(vs.values.size());
    for (double y : vs.values) vs.truth.push_back(y > delta ? 1 : 0);
    return vs;
}

ConfusionCounts count_confusion(std::span<const std::uint8_t> predictions,
                                std::span<const std::uint8_t> truth) {
    if (predictions.size() != truth.size())
        throw std::invalid_argument("prediction/truth length mismatch");
    ConfusionCounts c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (predictions[i] && truth[i]) c.tp++;
        else if (predictions[i] && !truth[i]) c.fp++;
        else if (!predictions[i] && truth[i]) c.fn++;
        else c.tn++;
    }
    return c;
}

CoverageReport metrics_from(const ConfusionCounts& c, long budget_used) {
    CoverageReport r;
    r.budget_used = budget_used;
    r.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fn);
    r.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / (c.tp + c.fp);
    const double denom = 4.0 * r.precision + r.recall;
    r.f2 = denom > 0.0 ? 5.0 * r.precision * r.recall / denom : 0.0;
    return r;
}

Regressor::Regressor(const Dataset& ds, std::size_t prefix) : space_(ds.space()) {
    const int dim = space_.dim();
    if (prefix > ds.size()) throw std::invalid_argument("prefix exceeds dataset size");
    if (prefix < static_cast<std::size_t>(dim) + 1)
        throw std::invalid_argument("regressor needs at least dim+1 records");
    std::vector<Point> unit;
    std::vector<double> values;
    unit.reserve(prefix);
    values.reserve(prefix);
    for (std::size_t i = 0; i < prefix; ++i) {
        auto u = ds.unit(i);
        unit.emplace_back(u.begin(), u.end());
        values.push_back(ds.y(i));
    }
    if (dim <= 3)
        simplicial_ = std::make_unique<SimplicialInterpolator>(std::move(unit), std::move(values));
    else
        knn_ = std::make_unique<KnnRegressor>(std::move(unit), std::move(values));
}

std::optional<double> Regressor::predict_unit(std::span<const double> u) const {
    if (simplicial_) return (*simplicial_)(u);
    return (*knn_)(u);
}

std::optional<double> Regressor::predict(std::span<const double> x_raw) const {
    return predict_unit(space_.normalize(x_raw));
}

bool Regressor::degenerate_fallback() const {
    return simplicial_ && simplicial_->degenerate();
}

std::vector<std::uint8_t> classify(const Regressor& model, double delta, const GridSpec& grid) {
    const long n = grid.size();
    std::vector<std::uint8_t> out;
    out.reserve(n);
    for (long i = 0; i < n; ++i) {
        const auto y = model.predict(grid.point(i));
        out.push_back(y.has_value() && *y > delta ? 1 : 0);
    }
    return out;
}

Checkpoint evaluate_prefix(const Dataset& ds, std::size_t prefix, const ValidationSet& validation) {
    Checkpoint cp;
    cp.budget = static_cast<long>(prefix);
    if (prefix < static_cast<std::size_t>(ds.space().dim()) + 1) {
        cp.skipped = true;
        return cp;
    }
    Regressor model(ds, prefix);
    auto preds = classify(model, validation.delta, validation.grid);
    cp.report = metrics_from(count_confusion(preds, validation.truth), cp.budget);
    return cp;
}

std::vector<Checkpoint> f2_checkpoints(const Dataset& ds, const ValidationSet& validation,
                                       long cadence) {
    if (cadence < 1) throw std::invalid_argument("checkpoint cadence must be >= 1");
    std::vector<Checkpoint> out;
    const long n = static_cast<long>(ds.size());
    for (long budget = cadence; budget < n; budget += cadence)
        out.push_back(evaluate_prefix(ds, budget, validation));
    if (n > 0) out.push_back(evaluate_prefix(ds, n, validation));
    return out;
}

} // namespace bbc
