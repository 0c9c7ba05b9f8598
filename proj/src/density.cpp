#include "bbc/density.hpp"

#include <cmath>
#include <stdexcept>

namespace bbc {

DensityModel DensityModel::build(std::vector<Point> unit_points, int k) {
    if (unit_points.empty())
        throw std::invalid_argument("density model needs at least one point");
    const int dim = static_cast<int>(unit_points.front().size());
    const std::size_t n = unit_points.size();
    if (n > 1 && (k < 1 || k > static_cast<int>(n) - 1))
        throw std::invalid_argument("density model requires 1 <= k <= n-1");

    DensityModel m;
    m.dim_ = dim;
    m.n_ = n;
    m.k_ = k;
    m.flat_.reserve(n * dim);
    for (const auto& p : unit_points) {
        if (static_cast<int>(p.size()) != dim)
            throw std::invalid_argument("density model points must share one dimension");
        m.flat_.insert(m.flat_.end(), p.begin(), p.end());
    }
    m.index_ = std::make_shared<KdTree>(m.flat_.data(), n, dim);
    return m;
}

double DensityModel::bandwidth_at(std::span<const double> query) const {
    auto nbrs = index_->knn(query, k_, /*exclude_one_exact=*/true);
    if (nbrs.empty()) return kFallbackBandwidth;
    double h = nbrs.back().dist;  // k-th, or farthest available when fewer
    return std::max(h, kMinBandwidth);
}

double DensityModel::density_at(std::span<const double> query) const {
    const double h = bandwidth_at(query);
    const double inv2h2 = 1.0 / (2.0 * h * h);
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        const double* p = flat_.data() + i * dim_;
        double d2 = 0.0;
        for (int d = 0; d < dim_; ++d) {
            double diff = query[d] - p[d];
            d2 += diff * diff;
        }
        sum += std::exp(-d2 * inv2h2);
    }
    const double norm = std::pow(2.0 * M_PI, dim_ / 2.0) * std::pow(h, dim_);
    return sum / (static_cast<double>(n_) * norm);
}

void DensityCache::ensure(const Dataset& ds) {
    while (rho_.size() < ds.size()) {
        rho_.push_back(model_->density_at(ds.unit(rho_.size())));
    }
}

} // namespace bbc
