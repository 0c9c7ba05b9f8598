#include "bbc/surrogate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bbc {

struct GpSurrogate::Impl {
    std::vector<Point> X;
    Eigen::VectorXd y_centered;
    Eigen::LLT<Eigen::MatrixXd> llt;   // factor of R + eta I
    Eigen::VectorXd alpha;             // (R + eta I)^{-1} y_centered
    double y_mean = 0.0;
    double lengthscale = 0.3;
    double signal_var = 1.0;
    double eta = 1e-6;
    bool trained = false;

    double corr(const Point& a, const Point& b) const {
        double d2 = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double diff = a[i] - b[i];
            d2 += diff * diff;
        }
        return std::exp(-d2 / (2.0 * lengthscale * lengthscale));
    }

    Eigen::MatrixXd corr_matrix(double ell) const {
        const int n = static_cast<int>(X.size());
        Eigen::MatrixXd R(n, n);
        const double inv = 1.0 / (2.0 * ell * ell);
        for (int i = 0; i < n; ++i) {
            R(i, i) = 1.0;
            for (int j = i + 1; j < n; ++j) {
                double d2 = 0.0;
                for (std::size_t d = 0; d < X[i].size(); ++d) {
                    const double diff = X[i][d] - X[j][d];
                    d2 += diff * diff;
                }
                R(i, j) = R(j, i) = std::exp(-d2 * inv);
            }
        }
        return R;
    }
};

GpSurrogate::GpSurrogate() : impl_(std::make_unique<Impl>()) {}
GpSurrogate::~GpSurrogate() = default;
GpSurrogate::GpSurrogate(GpSurrogate&&) noexcept = default;
GpSurrogate& GpSurrogate::operator=(GpSurrogate&&) noexcept = default;

bool GpSurrogate::trained() const { return impl_->trained; }
std::size_t GpSurrogate::train_size() const { return impl_->X.size(); }
double GpSurrogate::lengthscale() const { return impl_->lengthscale; }
double GpSurrogate::signal_variance() const { return impl_->signal_var; }

void GpSurrogate::fit(std::vector<Point> X, std::vector<double> y, Rng& rng, Config cfg) {
    if (X.size() < 2 || X.size() != y.size())
        throw std::invalid_argument("gp surrogate needs >= 2 matching training points");
    auto& im = *impl_;
    im.X = std::move(X);
    const int n = static_cast<int>(im.X.size());
    im.y_mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
    im.y_centered.resize(n);
    for (int i = 0; i < n; ++i) im.y_centered(i) = y[i] - im.y_mean;

    // Concentrated log marginal likelihood for a candidate length-scale;
    // -inf when the factorization fails at the current jitter.
    auto lml = [&](double ell, double eta) {
        Eigen::MatrixXd R = im.corr_matrix(ell);
        R.diagonal().array() += eta;
        Eigen::LLT<Eigen::MatrixXd> llt(R);
        if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
        Eigen::VectorXd a = llt.solve(im.y_centered);
        double sig = im.y_centered.dot(a) / n;
        sig = std::max(sig, 1e-12);
        double logdet = 0.0;
        for (int i = 0; i < n; ++i) logdet += std::log(llt.matrixLLT()(i, i));
        return -0.5 * n * (std::log(sig) + 1.0) - logdet;
    };

    double eta = cfg.relative_noise;
    double best_ell = 0.0, best_val = -std::numeric_limits<double>::infinity();
    for (;;) {
        for (int r = 0; r < cfg.restarts; ++r) {
            // Pattern search in log length-scale.
            double loge = std::log(0.03) + rng.uniform() * (std::log(1.5) - std::log(0.03));
            double step = 0.5;
            double val = lml(std::exp(loge), eta);
            for (int it = 0; it < cfg.search_steps; ++it) {
                const double up = lml(std::exp(loge + step), eta);
                const double dn = lml(std::exp(loge - step), eta);
                if (up > val && up >= dn) {
                    loge += step;
                    val = up;
                } else if (dn > val) {
                    loge -= step;
                    val = dn;
                } else {
                    step *= 0.5;
                }
            }
            if (val > best_val) {
                best_val = val;
                best_ell = std::exp(loge);
            }
        }
        if (std::isfinite(best_val)) break;
        eta *= 10.0;
        if (eta > cfg.max_relative_noise)
            throw std::runtime_error("gp surrogate: covariance stays ill-conditioned after jitter escalation");
    }

    im.lengthscale = best_ell;
    im.eta = eta;
    Eigen::MatrixXd R = im.corr_matrix(best_ell);
    R.diagonal().array() += eta;
    im.llt.compute(R);
    while (im.llt.info() != Eigen::Success) {
        eta *= 10.0;
        if (eta > cfg.max_relative_noise)
            throw std::runtime_error("gp surrogate: covariance stays ill-conditioned after jitter escalation");
        R.diagonal().array() += eta;
        im.llt.compute(R);
        im.eta = eta;
    }
    im.alpha = im.llt.solve(im.y_centered);
    im.signal_var = std::max(im.y_centered.dot(im.alpha) / n, 1e-12);
    im.trained = true;
}

void GpSurrogate::predict(std::span<const Point> candidates, std::vector<double>& mean,
                          std::vector<double>& var) const {
    const auto& im = *impl_;
    if (!im.trained) throw std::logic_error("gp surrogate not trained");
    const int n = static_cast<int>(im.X.size());
    const int m = static_cast<int>(candidates.size());
    mean.resize(m);
    var.resize(m);
    Eigen::VectorXd r(n);
    for (int c = 0; c < m; ++c) {
        for (int i = 0; i < n; ++i) r(i) = im.corr(im.X[i], candidates[c]);
        mean[c] = im.y_mean + r.dot(im.alpha);
        Eigen::VectorXd v = im.llt.solve(r);
        var[c] = std::max(im.signal_var * (1.0 - r.dot(v)), 0.0);
    }
}

std::vector<double> GpSurrogate::sample_joint(std::span<const Point> candidates, Rng& rng) const {
    const auto& im = *impl_;
    if (!im.trained) throw std::logic_error("gp surrogate not trained");
    const int n = static_cast<int>(im.X.size());
    const int m = static_cast<int>(candidates.size());

    Eigen::MatrixXd Rc(n, m);
    for (int c = 0; c < m; ++c)
        for (int i = 0; i < n; ++i) Rc(i, c) = im.corr(im.X[i], candidates[c]);

    Eigen::MatrixXd Rcc(m, m);
    const double inv = 1.0 / (2.0 * im.lengthscale * im.lengthscale);
    for (int a = 0; a < m; ++a) {
        Rcc(a, a) = 1.0;
        for (int b = a + 1; b < m; ++b) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < candidates[a].size(); ++d) {
                const double diff = candidates[a][d] - candidates[b][d];
                d2 += diff * diff;
            }
            Rcc(a, b) = Rcc(b, a) = std::exp(-d2 * inv);
        }
    }

    Eigen::VectorXd mu = Rc.transpose() * im.alpha;
    Eigen::MatrixXd post = im.signal_var * (Rcc - Rc.transpose() * im.llt.solve(Rc));

    double jitter = std::max(im.signal_var, 1e-12) * 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt;
    for (;;) {
        Eigen::MatrixXd P = post;
        P.diagonal().array() += jitter;
        llt.compute(P);
        if (llt.info() == Eigen::Success) break;
        jitter *= 10.0;
        if (jitter > std::max(im.signal_var, 1e-12) * 1e-2)
            throw std::runtime_error("gp surrogate: posterior covariance not factorizable");
    }

    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z(i) = rng.normal();
    Eigen::VectorXd draw = mu + llt.matrixL() * z;
    std::vector<double> out(m);
    for (int i = 0; i < m; ++i) out[i] = im.y_mean + draw(i);
    return out;
}

std::vector<int> thompson_select(const GpSurrogate& model, std::span<const Point> candidates,
                                 int n_select, bool maximize, Rng& rng) {
    const auto draw = model.sample_joint(candidates, rng);
    std::vector<int> order(candidates.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double va = maximize ? -draw[a] : draw[a];
        const double vb = maximize ? -draw[b] : draw[b];
        return va < vb || (va == vb && a < b);
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(n_select)));
    return order;
}

} // namespace bbc
