#pragma once

#include "bbc/domain.hpp"
#include "bbc/rng.hpp"

#include <memory>
#include <span>
#include <vector>

namespace bbc {

// Gaussian-process surrogate with an isotropic squared-exponential kernel.
// The length-scale is fitted by seeded multi-start maximization of the
// concentrated log marginal likelihood (signal variance profiled out).
class GpSurrogate {
public:
    struct Config {
        double relative_noise = 1e-6;      // noise-to-signal jitter on the diagonal
        double max_relative_noise = 1e-4;  // escalation cap before failure
        int restarts = 3;
        int search_steps = 18;
    };

    GpSurrogate();
    ~GpSurrogate();
    GpSurrogate(GpSurrogate&&) noexcept;
    GpSurrogate& operator=(GpSurrogate&&) noexcept;

    // Requires at least two training points.
    void fit(std::vector<Point> X, std::vector<double> y, Rng& rng, Config cfg);
    void fit(std::vector<Point> X, std::vector<double> y, Rng& rng) {
        fit(std::move(X), std::move(y), rng, Config());
    }

    bool trained() const;
    std::size_t train_size() const;
    double lengthscale() const;
    double signal_variance() const;

    void predict(std::span<const Point> candidates, std::vector<double>& mean,
                 std::vector<double>& var) const;

    // One joint draw from the posterior over the candidate set.
    std::vector<double> sample_joint(std::span<const Point> candidates, Rng& rng) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Thompson-sampling acquisition: draws one joint posterior sample and
// returns the indices of the n_select best candidates under it.
std::vector<int> thompson_select(const GpSurrogate& model, std::span<const Point> candidates,
                                 int n_select, bool maximize, Rng& rng);

} // namespace bbc
