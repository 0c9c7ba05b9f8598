#include "bbc/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace bbc {

double holder_table(double x1, double x2) {
    const double r = std::sqrt(x1 * x1 + x2 * x2);
    return std::fabs(std::sin(x1) * std::cos(x2) * std::exp(std::fabs(1.0 - r / M_PI)));
}

void RipplesParams::validate() const {
    if (dim < 1) throw std::invalid_argument("ripples: dim must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("ripples: sigma must be positive");
    const double multiple = omega / M_SQRT2;
    if (std::fabs(multiple - std::round(multiple)) > 1e-9 || std::round(multiple) < 1.0)
        throw std::invalid_argument("ripples: omega must be a positive integer multiple of sqrt(2)");
}

double ripples(std::span<const double> x, const RipplesParams& params) {
    double sum = 0.0;
    for (int i = 0; i < params.dim; ++i) {
        double r2 = 0.0;
        for (int d = 0; d < params.dim; ++d) {
            const double v = x[d] + (d == i ? params.bias : 0.0);
            r2 += v * v;
        }
        const double r = std::sqrt(r2);
        sum += std::exp(-r2 / (2.0 * params.sigma * params.sigma)) +
               params.k * std::cos(params.omega * r) - params.k;
    }
    return sum;
}

double ttc(double gap, double v_follow, double v_lead) {
    if (gap < 0.0) return 0.0;
    if (v_follow <= v_lead) return std::numeric_limits<double>::infinity();
    return gap / (v_follow - v_lead);
}

Objective make_holder_table() {
    Objective o;
    o.id = "holder-table";
    o.space = SearchSpace({-10.0, -10.0}, {10.0, 10.0});
    o.default_delta = 18.0;
    o.fn = [](const Point& x) { return holder_table(x[0], x[1]); };
    o.modality_centers = {{8.05502, 9.66459},
                          {8.05502, -9.66459},
                          {-8.05502, 9.66459},
                          {-8.05502, -9.66459}};
    return o;
}

Objective make_ripples(const RipplesParams& params) {
    params.validate();
    Objective o;
    o.id = "ripples" + std::to_string(params.dim) + "d";
    o.space = SearchSpace(std::vector<double>(params.dim, -5.0),
                          std::vector<double>(params.dim, 5.0));
    o.default_delta = 0.7;
    o.fn = [params](const Point& x) { return ripples(x, params); };
    for (int i = 0; i < params.dim; ++i) {
        Point c(params.dim, 0.0);
        c[i] = -params.bias;
        o.modality_centers.push_back(std::move(c));
    }
    return o;
}

} // namespace bbc
