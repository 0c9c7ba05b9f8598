#include "bbc/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

namespace bbc {

PointSource sobol_source(SobolSequence& seq) {
    return [&seq](std::span<double> out) { seq.next(out); };
}

PointSource uniform_source(Rng& rng) {
    return [&rng](std::span<double> out) {
        for (double& v : out) v = rng.uniform();
    };
}

RejectSample reject_sample(const PartitionTree& tree, int leaf_id, int n, int dim,
                           const PointSource& propose, long max_tries_per_point) {
    RejectSample out;
    const long cap = static_cast<long>(n) * max_tries_per_point;
    Point buf(dim);
    while (static_cast<int>(out.points.size()) < n && out.proposals < cap) {
        propose(buf);
        ++out.proposals;
        if (tree.leaf_membership(leaf_id, buf)) out.points.push_back(buf);
    }
    out.starved = static_cast<int>(out.points.size()) < n;
    return out;
}

namespace {

constexpr double kInitialCubeEdge = 1.0 / 64.0;
constexpr double kMaxCubeEdge = 4.0;

bool in_unit_box(std::span<const double> u) {
    for (double v : u)
        if (v < 0.0 || v > 1.0) return false;
    return true;
}

// One anchor's doubling-cube pass; the insiders of the first batch that
// produced an outsider (or hit the edge cap) are appended to `sink`.
void expand_one_anchor(const PartitionTree& tree, int leaf_id, const Point& anchor,
                       int batch, SobolSequence& sobol, std::vector<Point>& sink) {
    const int dim = static_cast<int>(anchor.size());
    Point buf(dim);
    double edge = kInitialCubeEdge;
    std::vector<Point> insiders;
    for (;;) {
        insiders.clear();
        bool outsider = false;
        for (int i = 0; i < batch; ++i) {
            sobol.next(buf);
            Point p(dim);
            for (int d = 0; d < dim; ++d) p[d] = anchor[d] + (buf[d] - 0.5) * edge;
            if (in_unit_box(p) && tree.leaf_membership(leaf_id, p))
                insiders.push_back(std::move(p));
            else
                outsider = true;
        }
        if (outsider || edge >= kMaxCubeEdge) break;
        edge *= 2.0;
    }
    sink.insert(sink.end(), insiders.begin(), insiders.end());
}

std::uint64_t point_hash(const Point& p) {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : p) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        h ^= bits;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

CandidateExpansion expand_candidates_around(const PartitionTree& tree, int leaf_id,
                                            std::span<const Point> anchors, int per_anchor,
                                            SobolSequence& sobol) {
    CandidateExpansion out;
    const int dim = anchors.empty() ? 0 : static_cast<int>(anchors.front().size());
    const int batch = std::max(per_anchor, 2 * dim);
    for (const Point& anchor : anchors) {
        if (!tree.leaf_membership(leaf_id, anchor)) {
            ++out.skipped_anchors;
            continue;
        }
        expand_one_anchor(tree, leaf_id, anchor, batch, sobol, out.points);
    }
    std::unordered_set<std::uint64_t> seen;
    std::vector<Point> dedup;
    dedup.reserve(out.points.size());
    for (auto& p : out.points)
        if (seen.insert(point_hash(p)).second) dedup.push_back(std::move(p));
    out.points = std::move(dedup);
    return out;
}

bool Box::contains(std::span<const double> u) const {
    for (int d = 0; d < dim(); ++d)
        if (u[d] < lo[d] || u[d] > hi[d]) return false;
    return true;
}

Box bounding_box(std::span<const Point> points) {
    Box b{points.front(), points.front()};
    for (const auto& p : points)
        for (std::size_t d = 0; d < p.size(); ++d) {
            b.lo[d] = std::min(b.lo[d], p[d]);
            b.hi[d] = std::max(b.hi[d], p[d]);
        }
    return b;
}

Box approximate_boundary(const PartitionTree& tree, int leaf_id,
                         std::span<const Point> members, SobolSequence& sobol) {
    const int dim = static_cast<int>(members.front().size());
    std::vector<Point> found(members.begin(), members.end());
    Box box = bounding_box(found);

    const int batch = std::max(8, 4 * dim);
    constexpr int kMaxRounds = 16;
    constexpr double kGrow = 1e-9;
    for (int round = 0; round < kMaxRounds; ++round) {
        // Outermost members: per-dimension extremes.
        std::vector<std::size_t> anchor_ids;
        for (int d = 0; d < dim; ++d) {
            std::size_t lo_i = 0, hi_i = 0;
            for (std::size_t i = 1; i < found.size(); ++i) {
                if (found[i][d] < found[lo_i][d]) lo_i = i;
                if (found[i][d] > found[hi_i][d]) hi_i = i;
            }
            anchor_ids.push_back(lo_i);
            anchor_ids.push_back(hi_i);
        }
        std::sort(anchor_ids.begin(), anchor_ids.end());
        anchor_ids.erase(std::unique(anchor_ids.begin(), anchor_ids.end()), anchor_ids.end());

        std::vector<Point> probes;
        for (std::size_t id : anchor_ids)
            expand_one_anchor(tree, leaf_id, found[id], batch, sobol, probes);

        bool enlarged = false;
        for (auto& p : probes) {
            for (int d = 0; d < dim; ++d) {
                if (p[d] < box.lo[d] - kGrow) {
                    box.lo[d] = p[d];
                    enlarged = true;
                }
                if (p[d] > box.hi[d] + kGrow) {
                    box.hi[d] = p[d];
                    enlarged = true;
                }
            }
            found.push_back(std::move(p));
        }
        if (!enlarged) break;
    }

    for (int d = 0; d < dim; ++d) {
        box.lo[d] = std::max(0.0, box.lo[d]);
        box.hi[d] = std::min(1.0, box.hi[d]);
        constexpr double kMinWidth = 1e-3;
        if (box.hi[d] - box.lo[d] < kMinWidth) {
            const double mid = 0.5 * (box.lo[d] + box.hi[d]);
            box.lo[d] = std::max(0.0, mid - kMinWidth / 2);
            box.hi[d] = std::min(1.0, box.lo[d] + kMinWidth);
            box.lo[d] = std::max(0.0, box.hi[d] - kMinWidth);
        }
    }
    return box;
}

std::vector<Point> latin_hypercube(int n, const Box& box, Rng& rng) {
    const int dim = box.dim();
    std::vector<Point> pts(n, Point(dim));
    std::vector<int> perm(n);
    for (int d = 0; d < dim; ++d) {
        for (int i = 0; i < n; ++i) perm[i] = i;
        for (int i = n - 1; i > 0; --i)
            std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
        for (int i = 0; i < n; ++i) {
            const double u = (perm[i] + rng.uniform()) / n;
            pts[i][d] = box.lo[d] + u * box.extent(d);
        }
    }
    return pts;
}

} // namespace bbc
