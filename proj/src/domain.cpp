#include "bbc/domain.hpp"
#include "bbc/rng.hpp"

#include <cmath>
#include <cstdio>

namespace bbc {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

namespace {
std::string budget_message(long requested, long remaining) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "budget exhausted: requested %ld evaluations, %ld remaining",
                  requested, remaining);
    return buf;
}

std::string eval_message(const Point& x, const std::string& why) {
    std::string msg = "objective failed at point (";
    char buf[32];
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%s%.17g", i ? ", " : "", x[i]);
        msg += buf;
    }
    msg += "): " + why;
    return msg;
}
} // namespace

BudgetError::BudgetError(long req, long rem)
    : std::runtime_error(budget_message(req, rem)), requested(req), remaining(rem) {}

EvaluationError::EvaluationError(Point x, const std::string& why)
    : std::runtime_error(eval_message(x, why)), point(std::move(x)) {}

SearchSpace::SearchSpace(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.empty() || lower.size() != upper.size())
        throw std::invalid_argument("search space needs matching non-empty bounds");
    for (std::size_t i = 0; i < lower.size(); ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("search space requires lower < upper per dimension");
}

bool SearchSpace::contains(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim()) return false;
    for (int d = 0; d < dim(); ++d)
        if (x[d] < lower[d] || x[d] > upper[d]) return false;
    return true;
}

void SearchSpace::normalize_into(std::span<const double> x, std::span<double> out) const {
    if (!contains(x)) throw std::domain_error("point outside search space bounds");
    for (int d = 0; d < dim(); ++d)
        out[d] = (x[d] - lower[d]) / (upper[d] - lower[d]);
}

void SearchSpace::denormalize_into(std::span<const double> u, std::span<double> out) const {
    for (int d = 0; d < dim(); ++d)
        out[d] = lower[d] + u[d] * (upper[d] - lower[d]);
}

Point SearchSpace::normalize(std::span<const double> x) const {
    Point u(dim());
    normalize_into(x, u);
    return u;
}

Point SearchSpace::denormalize(std::span<const double> u) const {
    Point x(dim());
    denormalize_into(u, x);
    return x;
}

void Dataset::append(SampleRecord rec) {
    Point u = space_.normalize(rec.x);
    unit_.insert(unit_.end(), u.begin(), u.end());
    records_.push_back(std::move(rec));
}

void Dataset::append(std::span<const SampleRecord> recs) {
    for (const auto& r : recs) append(r);
}

std::vector<SampleRecord> evaluate_batch(const ObjectiveFn& objective,
                                         std::span<const Point> points,
                                         BudgetState& budget) {
    const long n = static_cast<long>(points.size());
    if (budget.used + n > budget.total)
        throw BudgetError(n, budget.remaining());
    std::vector<SampleRecord> out;
    out.reserve(points.size());
    for (const Point& x : points) {
        double y;
        try {
            y = objective(x);
        } catch (const std::exception& e) {
            throw EvaluationError(x, e.what());
        }
        if (!std::isfinite(y)) throw EvaluationError(x, "non-finite objective value");
        out.push_back(SampleRecord{x, y});
        budget.used += 1;
    }
    return out;
}

} // namespace bbc
