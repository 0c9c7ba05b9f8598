#pragma once

#include "bbc/domain.hpp"
#include "bbc/kdtree.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

namespace bbc {

// Piecewise-linear interpolation over a simplicial decomposition (Delaunay
// via Bowyer-Watson) of scattered points in 1..3 dimensions, working in
// normalized coordinates. Queries outside the convex hull are undefined.
// Exact duplicates keep the first value; queries that hit a data point
// exactly return that point's value.
class SimplicialInterpolator {
public:
    SimplicialInterpolator(std::vector<Point> unit_points, std::vector<double> values);

    int dim() const { return dim_; }
    // True when the geometry degenerated (affinely dependent points) and the
    // interpolator fell back to nearest-neighbor prediction.
    bool degenerate() const { return degenerate_; }

    std::optional<double> operator()(std::span<const double> q) const;

    // Test hook: exhaustive point-in-simplex evaluation, bypassing the
    // walking locator.
    std::optional<double> brute_force(std::span<const double> q) const;

    std::size_t simplex_count() const { return kept_.size(); }

private:
    struct Simplex {
        int v[4];
        int nbr[4];
        bool alive = true;
    };

    int dim_ = 0;
    bool degenerate_ = false;
    std::vector<double> pts_;     // jittered unit coordinates, flattened
    std::vector<double> vals_;
    std::vector<Simplex> cells_;
    std::vector<int> kept_;       // alive, non-super simplices after finalize
    mutable int hint_ = -1;
    std::unordered_map<std::uint64_t, std::vector<int>> exact_;  // hash -> point ids
    std::vector<Point> originals_;
    std::vector<std::uint64_t> stamp_;  // conflict-walk visitation marks
    std::uint64_t epoch_ = 0;
    std::unordered_map<std::uint64_t, int> ridge_scratch_;
    std::unordered_map<std::uint64_t, std::pair<int, int>> link_scratch_;

    // 1-D path
    std::vector<std::pair<double, double>> line_;

    // nearest-neighbor fallback
    KdTree nn_;

    const double* pt(int i) const { return pts_.data() + static_cast<std::size_t>(i) * dim_; }
    bool insert_point(int id, double jitter_scale);
    void finalize();
    bool barycentric(int cell, std::span<const double> q, double* lambda) const;
    int locate(std::span<const double> q) const;  // -1 when outside
    std::optional<double> exact_lookup(std::span<const double> q) const;
    double value_in(int cell, const double* lambda) const;
};

// Inverse-distance-weighted k-nearest-neighbor regression, the regressor
// used above three dimensions where simplicial decompositions are
// impractical. Defined everywhere in the box.
class KnnRegressor {
public:
    KnnRegressor(std::vector<Point> unit_points, std::vector<double> values, int k = 8,
                 double power = 2.0);

    double operator()(std::span<const double> q) const;

private:
    std::vector<double> flat_;
    std::vector<double> vals_;
    int dim_ = 0;
    int k_;
    double power_;
    KdTree tree_;
};

} // namespace bbc
