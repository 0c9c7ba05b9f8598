#pragma once

#include "bbc/domain.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace bbc {

// abs(sin(x1) cos(x2) exp(|1 - |x|/pi|)) on [-10,10]^2; four global maxima
// of 19.2085 at (+-8.05502, +-9.66459).
double holder_table(double x1, double x2);

struct RipplesParams {
    int dim = 2;
    double bias = 3.0;
    double sigma = 1.0;
    double k = 0.1;
    double omega = 2.0 * M_SQRT2;  // must be an integer multiple of sqrt(2)

    void validate() const;
};

// Sum over i of exp(-r_i^2 / (2 sigma^2)) + k cos(omega r_i) - k with
// r_i = ||x + bias * e_i||; one modality near -bias * e_i per dimension,
// domain [-5,5]^dim.
double ripples(std::span<const double> x, const RipplesParams& params);

// Time to collision of a follower closing on a leader: gap / closing speed
// when the gap is positive and the follower is faster; +inf when the leader
// is at least as fast (no closing); 0 when the gap is already negative.
double ttc(double gap, double v_follow, double v_lead);

// A named objective together with its domain, criticality threshold and
// (when known) the centers of its solution modalities.
struct Objective {
    std::string id;
    SearchSpace space;
    double default_delta = 0.0;
    ObjectiveFn fn;
    std::vector<Point> modality_centers;
};

Objective make_holder_table();
Objective make_ripples(const RipplesParams& params);

constexpr double kHolderTableMax = 19.2085;

} // namespace bbc
