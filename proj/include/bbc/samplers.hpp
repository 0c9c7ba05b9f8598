#pragma once

#include "bbc/partition.hpp"
#include "bbc/rng.hpp"
#include "bbc/sobol.hpp"

#include <functional>
#include <span>
#include <vector>

namespace bbc {

// Stateful generator of proposal points in [0,1)^dim.
using PointSource = std::function<void(std::span<double>)>;

PointSource sobol_source(SobolSequence& seq);
PointSource uniform_source(Rng& rng);

struct RejectSample {
    std::vector<Point> points;  // unit coordinates, all members of the leaf
    bool starved = false;       // gave up before collecting n points
    long proposals = 0;
};

// Draws proposals over the whole box and keeps leaf members. Gives up with
// a partial batch once n * max_tries_per_point proposals were spent (thin
// subspace); callers fall back to expand_candidates_around.
RejectSample reject_sample(const PartitionTree& tree, int leaf_id, int n, int dim,
                           const PointSource& propose, long max_tries_per_point = 64);

struct CandidateExpansion {
    std::vector<Point> points;
    int skipped_anchors = 0;  // anchors that were not members of the leaf
};

// Fig-style hypercube expansion: around each anchor, Sobol batches fill a
// cube whose edge doubles until points fall outside the leaf; the insiders
// of that final batch are kept. Batch size is max(per_anchor, 2*dim).
CandidateExpansion expand_candidates_around(const PartitionTree& tree, int leaf_id,
                                            std::span<const Point> anchors, int per_anchor,
                                            SobolSequence& sobol);

struct Box {
    Point lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    double extent(int d) const { return hi[d] - lo[d]; }
    bool contains(std::span<const double> u) const;
};

Box bounding_box(std::span<const Point> points);

// Iteratively grown axis-aligned outer box of a leaf: probe around the
// outermost known members, keep leaf members, enlarge while new members land
// outside the box. Clipped to the unit box; sides never below 1e-3.
Box approximate_boundary(const PartitionTree& tree, int leaf_id,
                         std::span<const Point> members, SobolSequence& sobol);

// Seeded Latin hypercube sample of n points inside a box.
std::vector<Point> latin_hypercube(int n, const Box& box, Rng& rng);

} // namespace bbc
