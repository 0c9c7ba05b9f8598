#pragma once

#include "bbc/domain.hpp"
#include "bbc/kdtree.hpp"

#include <memory>
#include <span>
#include <vector>

namespace bbc {

// Adaptive Gaussian KDE over a snapshot of normalized sample points.
// The per-query bandwidth is the distance to the query's k-th nearest
// sample (the sample itself excluded when the query coincides with one).
// Immutable after build; the campaign swaps in a fresh model when stale.
class DensityModel {
public:
    static DensityModel build(std::vector<Point> unit_points, int k);

    int k() const { return k_; }
    int dim() const { return dim_; }
    std::size_t size() const { return n_; }

    double bandwidth_at(std::span<const double> query) const;
    double density_at(std::span<const double> query) const;

    int staleness() const { return staleness_; }
    void note_appended(int count) { staleness_ += count; }

    // Bandwidth floor against duplicate points collapsing h to zero.
    static constexpr double kMinBandwidth = 1e-9;
    // Bandwidth when the snapshot holds a single point and the query is that
    // point (no neighbor to measure): the normalized box edge.
    static constexpr double kFallbackBandwidth = 1.0;

private:
    DensityModel() = default;

    std::vector<double> flat_;
    std::size_t n_ = 0;
    int dim_ = 0;
    int k_ = 1;
    int staleness_ = 0;
    std::shared_ptr<const KdTree> index_;
};

// Rebuild cadence: true once `staleness` samples have accumulated since the
// last build.
inline bool should_rebuild(const DensityModel& model, int rebuild_interval) {
    return model.staleness() >= rebuild_interval;
}

inline int default_density_k(int dim) { return dim <= 3 ? 8 : 16; }

// Per-record density values under one model generation. Values are computed
// lazily so records appended after the snapshot can still be weighted.
class DensityCache {
public:
    explicit DensityCache(std::shared_ptr<const DensityModel> model)
        : model_(std::move(model)) {}

    const DensityModel& model() const { return *model_; }

    void ensure(const Dataset& ds);
    double rho(std::size_t i) const { return rho_[i]; }
    double inv_rho(std::size_t i) const { return 1.0 / rho_[i]; }
    std::size_t size() const { return rho_.size(); }

private:
    std::shared_ptr<const DensityModel> model_;
    std::vector<double> rho_;
};

} // namespace bbc
