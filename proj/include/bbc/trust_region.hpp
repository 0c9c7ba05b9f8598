#pragma once

#include "bbc/samplers.hpp"
#include "bbc/surrogate.hpp"

#include <functional>

namespace bbc {

struct TrustRegionConfig {
    int init_points = 30;         // Latin-hypercube starters inside the boundary
    int thompson_batch = 5;       // points per Thompson-sampling round
    long local_budget = 200;      // evaluation cap for one leaf campaign, init included
    int success_tolerance = 3;    // consecutive improvements before growing
    int failure_tolerance = 5;    // raised to max(5, dim) at runtime
    double init_scale = 0.8;      // initial TR length relative to the boundary
    int shrink_limit = 7;         // stop once the TR halved this many times below init
    int max_candidates = 256;
    int gp_max_points = 200;
    bool subspace_only = true;    // GP trains on leaf-local data only
};

struct LocalRecord {
    Point unit;
    double y;
};

// Evaluates unit-coordinate points against the campaign objective. The
// result may be shorter than the request when the global budget runs out;
// the local campaign then stops.
using BatchEval = std::function<std::vector<double>(std::span<const Point>)>;

struct TrustRegionResult {
    std::vector<LocalRecord> records;
    Box boundary;
    Point incumbent;
    double incumbent_y = 0.0;
    bool budget_exhausted = false;
    bool collapsed = false;  // TR shrank below the stop threshold
};

// Surrogate-guided local search inside one leaf: approximate the leaf
// boundary, seed with Latin-hypercube points, then loop GP fit -> Thompson
// batch -> evaluate, doubling or halving the trust region on success or
// failure streaks.
TrustRegionResult trust_region_campaign(const PartitionTree& tree, int leaf_id,
                                        std::span<const Point> leaf_points,
                                        std::span<const double> leaf_values,
                                        const BatchEval& evaluate, SobolSequence& sobol,
                                        Rng& rng, const TrustRegionConfig& config);

} // namespace bbc
