#pragma once

#include "bbc/domain.hpp"
#include "bbc/interpolate.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace bbc {

// Full Cartesian grid over a box, endpoints included, last dimension fastest.
struct GridSpec {
    SearchSpace space;
    std::vector<int> resolution;

    long size() const;
    Point point(long flat) const;
    std::vector<int> coords(long flat) const;
};

// Connected components of the true cells of a grid labeling under face
// (orthogonal-neighbor) connectivity.
int count_components(std::span<const std::uint8_t> labels, std::span<const int> resolution);

struct ValidationSet {
    GridSpec grid;
    double delta = 0.0;
    std::vector<double> values;        // objective at each grid point
    std::vector<std::uint8_t> truth;   // value > delta, strictly

    long size() const { return grid.size(); }
};

ValidationSet build_validation_set(const SearchSpace& space, std::vector<int> resolution,
                                   const ObjectiveFn& objective, double delta);
// Truth from precomputed values (ground-truth files); throws on shape mismatch.
ValidationSet build_validation_set(const SearchSpace& space, std::vector<int> resolution,
                                   std::vector<double> values, double delta);

struct ConfusionCounts {
    long tp = 0, fp = 0, fn = 0, tn = 0;
};

struct CoverageReport {
    double recall = 0.0;
    double precision = 0.0;
    double f2 = 0.0;
    long budget_used = 0;
};

ConfusionCounts count_confusion(std::span<const std::uint8_t> predictions,
                                std::span<const std::uint8_t> truth);

// recall = tp/(tp+fn), precision = tp/(tp+fp); empty denominators count as
// perfect (1); F2 = 5 P R / (4 P + R), or 0 when both metrics are 0.
CoverageReport metrics_from(const ConfusionCounts& counts, long budget_used = 0);

// Regressor fitted from sample records: piecewise-linear simplicial
// interpolation up to 3 dimensions (undefined outside the convex hull),
// inverse-distance-weighted k-NN above that.
class Regressor {
public:
    Regressor(const Dataset& ds, std::size_t prefix);
    explicit Regressor(const Dataset& ds) : Regressor(ds, ds.size()) {}

    // Unit-coordinate query; nullopt = undefined (outside hull).
    std::optional<double> predict_unit(std::span<const double> u) const;
    std::optional<double> predict(std::span<const double> x_raw) const;
    bool degenerate_fallback() const;

private:
    const SearchSpace space_;
    std::unique_ptr<SimplicialInterpolator> simplicial_;
    std::unique_ptr<KnnRegressor> knn_;
};

// Strict-threshold classification; undefined predictions are non-critical.
std::vector<std::uint8_t> classify(const Regressor& model, double delta,
                                   const GridSpec& grid);

struct Checkpoint {
    long budget = 0;
    bool skipped = false;  // prefix too small to fit a regressor
    CoverageReport report;
};

// Metric series over dataset prefixes at multiples of `cadence`, always
// including the full dataset as the final entry. Consumes only the record
// stream, so it can score any algorithm's output.
std::vector<Checkpoint> f2_checkpoints(const Dataset& ds, const ValidationSet& validation,
                                       long cadence);

Checkpoint evaluate_prefix(const Dataset& ds, std::size_t prefix, const ValidationSet& validation);

} // namespace bbc
