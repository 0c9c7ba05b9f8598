#include "bbc/interpolate.hpp"
#include "bbc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace bbc {

namespace {

constexpr double kSuper = 50.0;       // super-simplex scale
constexpr double kJitter = 2e-11;     // symbolic perturbation of stored coords
constexpr double kWalkEps = 1e-9;     // barycentric containment tolerance

std::uint64_t hash_coords(std::span<const double> x) {
    std::uint64_t h = 1469598103934665603ull;
    for (double v : x) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        h ^= bits;
        h *= 1099511628211ull;
    }
    return h;
}

// Determinant of a small matrix in long double, destructive.
long double det_inplace(long double* m, int n) {
    long double det = 1.0L;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::fabs((double)m[r * n + col]) > std::fabs((double)m[piv * n + col])) piv = r;
        if (m[piv * n + col] == 0.0L) return 0.0L;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(m[piv * n + c], m[col * n + c]);
            det = -det;
        }
        det *= m[col * n + col];
        for (int r = col + 1; r < n; ++r) {
            long double f = m[r * n + col] / m[col * n + col];
            for (int c = col; c < n; ++c) m[r * n + c] -= f * m[col * n + c];
        }
    }
    return det;
}

} // namespace

SimplicialInterpolator::SimplicialInterpolator(std::vector<Point> unit_points,
                                               std::vector<double> values) {
    if (unit_points.empty() || unit_points.size() != values.size())
        throw std::invalid_argument("interpolator needs matching non-empty points and values");
    dim_ = static_cast<int>(unit_points.front().size());
    if (dim_ < 1 || dim_ > 3)
        throw std::invalid_argument("simplicial interpolation supports 1..3 dimensions");

    // Deduplicate exactly repeated points, first value wins.
    std::vector<Point> uniq;
    std::vector<double> uvals;
    for (std::size_t i = 0; i < unit_points.size(); ++i) {
        const std::uint64_t h = hash_coords(unit_points[i]);
        auto& bucket = exact_[h];
        bool dup = false;
        for (int id : bucket)
            if (std::equal(originals_[id].begin(), originals_[id].end(), unit_points[i].begin(),
                           unit_points[i].end())) {
                dup = true;
                break;
            }
        if (dup) continue;
        bucket.push_back(static_cast<int>(originals_.size()));
        originals_.push_back(unit_points[i]);
        uniq.push_back(std::move(unit_points[i]));
        uvals.push_back(values[i]);
    }

    if (dim_ == 1) {
        for (std::size_t i = 0; i < uniq.size(); ++i) line_.push_back({uniq[i][0], uvals[i]});
        std::sort(line_.begin(), line_.end());
        vals_ = std::move(uvals);
        if (line_.size() < 2) degenerate_ = true;
        return;
    }

    const int nsuper = dim_ + 1;
    pts_.assign(static_cast<std::size_t>(nsuper) * dim_, -kSuper);
    for (int i = 1; i < nsuper; ++i) pts_[static_cast<std::size_t>(i) * dim_ + (i - 1)] = 3.0 * kSuper;
    vals_.assign(nsuper, 0.0);

    Rng jitter_rng(0x5eedf00dULL);
    std::vector<double> flat_originals;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        for (int d = 0; d < dim_; ++d)
            pts_.push_back(uniq[i][d] + (jitter_rng.uniform() - 0.5) * kJitter);
        vals_.push_back(uvals[i]);
        flat_originals.insert(flat_originals.end(), uniq[i].begin(), uniq[i].end());
    }

    Simplex root;
    for (int i = 0; i <= dim_; ++i) {
        root.v[i] = i;
        root.nbr[i] = -1;
    }
    cells_.push_back(root);
    hint_ = 0;

    for (std::size_t i = 0; i < uniq.size(); ++i) {
        const int id = nsuper + static_cast<int>(i);
        if (!insert_point(id, kJitter)) {
            // Re-jitter once with a coarser perturbation, then give up on the
            // point; its exact value remains served by the lookup table.
            for (int d = 0; d < dim_; ++d)
                pts_[static_cast<std::size_t>(id) * dim_ + d] =
                    uniq[i][d] + (jitter_rng.uniform() - 0.5) * kJitter * 64.0;
            insert_point(id, kJitter * 64.0);
        }
    }
    finalize();

    if (kept_.empty()) {
        degenerate_ = true;
        nn_ = KdTree(flat_originals.data(), uniq.size(), dim_);
    }
}

bool SimplicialInterpolator::barycentric(int cell, std::span<const double> q,
                                         double* lambda) const {
    const Simplex& s = cells_[cell];
    const double* v0 = pt(s.v[0]);
    double m[9], rhs[3];
    for (int d = 0; d < dim_; ++d) {
        for (int j = 0; j < dim_; ++j) m[d * dim_ + j] = pt(s.v[j + 1])[d] - v0[d];
        rhs[d] = q[d] - v0[d];
    }
    // Gaussian elimination with partial pivoting on a d x d system.
    int perm[3] = {0, 1, 2};
    for (int col = 0; col < dim_; ++col) {
        int piv = col;
        for (int r = col + 1; r < dim_; ++r)
            if (std::fabs(m[r * dim_ + col]) > std::fabs(m[piv * dim_ + col])) piv = r;
        if (m[piv * dim_ + col] == 0.0) return false;
        if (piv != col) {
            for (int c = 0; c < dim_; ++c) std::swap(m[piv * dim_ + c], m[col * dim_ + c]);
            std::swap(rhs[piv], rhs[col]);
            std::swap(perm[piv], perm[col]);
        }
        for (int r = col + 1; r < dim_; ++r) {
            const double f = m[r * dim_ + col] / m[col * dim_ + col];
            for (int c = col; c < dim_; ++c) m[r * dim_ + c] -= f * m[col * dim_ + c];
            rhs[r] -= f * rhs[col];
        }
    }
    (void)perm;
    for (int r = dim_ - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < dim_; ++c) acc -= m[r * dim_ + c] * lambda[c + 1];
        lambda[r + 1] = acc / m[r * dim_ + r];
    }
    double sum = 0.0;
    for (int j = 1; j <= dim_; ++j) sum += lambda[j];
    lambda[0] = 1.0 - sum;
    return true;
}

bool SimplicialInterpolator::insert_point(int id, double) {
    const double* p = pt(id);
    std::span<const double> q(p, dim_);

    // Locate a containing cell by walking; fall back to scanning.
    int cur = hint_;
    double lambda[4];
    int located = -1;
    for (int step = 0; step < 4096 && cur >= 0; ++step) {
        if (!cells_[cur].alive) break;
        if (!barycentric(cur, q, lambda)) break;
        int worst = -1;
        double worst_l = -kWalkEps;
        for (int j = 0; j <= dim_; ++j)
            if (lambda[j] < worst_l) {
                worst_l = lambda[j];
                worst = j;
            }
        if (worst < 0) {
            located = cur;
            break;
        }
        cur = cells_[cur].nbr[worst];
    }
    if (located < 0) {
        for (int c = 0; c < static_cast<int>(cells_.size()) && located < 0; ++c) {
            if (!cells_[c].alive) continue;
            if (barycentric(c, q, lambda)) {
                bool in = true;
                for (int j = 0; j <= dim_; ++j) in = in && lambda[j] >= -kWalkEps;
                if (in) located = c;
            }
        }
    }
    if (located < 0) return false;

    auto in_sphere = [&](int cell) {
        const Simplex& s = cells_[cell];
        long double mat[16], omat[9];
        for (int i = 0; i <= dim_; ++i) {
            long double norm2 = 0.0L;
            for (int d = 0; d < dim_; ++d) {
                const long double diff =
                    (long double)pt(s.v[i])[d] - (long double)p[d];
                mat[i * (dim_ + 1) + d] = diff;
                norm2 += diff * diff;
            }
            mat[i * (dim_ + 1) + dim_] = norm2;
        }
        for (int i = 1; i <= dim_; ++i)
            for (int d = 0; d < dim_; ++d)
                omat[(i - 1) * dim_ + d] =
                    (long double)pt(s.v[i])[d] - (long double)pt(s.v[0])[d];
        const long double ins = det_inplace(mat, dim_ + 1);
        const long double ori = det_inplace(omat, dim_);
        const long double signed_ins = (dim_ % 2 == 0 ? ins : -ins);
        return ori > 0 ? signed_ins > 0.0L : signed_ins < 0.0L;
    };

    // Conflict region: BFS over cells whose circumsphere strictly contains p.
    // Visitation is tracked with an epoch stamp per cell.
    stamp_.resize(cells_.size(), 0);
    ++epoch_;
    const std::uint64_t in_mark = epoch_ * 2 + 1, out_mark = epoch_ * 2;
    std::vector<int> stack{located}, region;
    stamp_[located] = in_mark;
    region.push_back(located);
    while (!stack.empty()) {
        const int c = stack.back();
        stack.pop_back();
        for (int j = 0; j <= dim_; ++j) {
            const int nb = cells_[c].nbr[j];
            if (nb < 0 || stamp_[nb] >= out_mark) continue;
            if (in_sphere(nb)) {
                stamp_[nb] = in_mark;
                stack.push_back(nb);
                region.push_back(nb);
            } else {
                stamp_[nb] = out_mark;
            }
        }
    }

    struct Facet {
        int cell, slot, outer;
        int verts[3];
    };
    std::vector<Facet> boundary;
    for (int c : region) {
        for (int j = 0; j <= dim_; ++j) {
            const int nb = cells_[c].nbr[j];
            if (nb >= 0 && stamp_[nb] == in_mark) continue;
            Facet f;
            f.cell = c;
            f.slot = j;
            f.outer = nb;
            int k = 0;
            for (int t = 0; t <= dim_; ++t)
                if (t != j) f.verts[k++] = cells_[c].v[t];
            boundary.push_back(f);
        }
    }
    if (boundary.empty()) return false;

    // Validate cavity closure before mutating anything: every ridge of the
    // boundary fan must be shared by exactly two facets.
    auto ridge_key = [&](const Facet& f, int drop) {
        if (dim_ == 2) {
            return static_cast<std::uint64_t>(f.verts[drop == 0 ? 1 : 0]);
        }
        int a = f.verts[drop == 0 ? 1 : 0];
        int b = f.verts[drop == 2 ? 1 : 2];
        if (a > b) std::swap(a, b);
        return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
    };
    ridge_scratch_.clear();
    for (const Facet& f : boundary)
        for (int drop = 0; drop < dim_; ++drop) ridge_scratch_[ridge_key(f, drop)] += 1;
    for (const auto& [ridge, count] : ridge_scratch_)
        if (count != 2) return false;

    // Carve the cavity and fan new cells around p.
    for (int c : region) cells_[c].alive = false;
    link_scratch_.clear();  // ridge -> (cell, slot) awaiting its twin
    int first_new = -1;
    for (const Facet& f : boundary) {
        Simplex s;
        s.v[0] = id;
        for (int t = 0; t < dim_; ++t) s.v[t + 1] = f.verts[t];
        for (int t = 0; t <= dim_; ++t) s.nbr[t] = -1;
        s.nbr[0] = f.outer;
        const int self = static_cast<int>(cells_.size());
        if (f.outer >= 0) {
            for (int t = 0; t <= dim_; ++t)
                if (cells_[f.outer].nbr[t] == f.cell) cells_[f.outer].nbr[t] = self;
        }
        // Link internal facets (those containing p) through their ridge.
        for (int j = 1; j <= dim_; ++j) {
            const std::uint64_t key = ridge_key(f, j - 1);
            auto it = link_scratch_.find(key);
            if (it == link_scratch_.end()) {
                link_scratch_.emplace(key, std::make_pair(self, j));
            } else {
                s.nbr[j] = it->second.first;
                cells_[it->second.first].nbr[it->second.second] = self;
                link_scratch_.erase(it);
            }
        }
        cells_.push_back(s);
        if (first_new < 0) first_new = self;
    }
    stamp_.resize(cells_.size(), 0);
    hint_ = first_new;
    return link_scratch_.empty();
}

void SimplicialInterpolator::finalize() {
    std::vector<char> keep(cells_.size(), 0);
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        if (!cells_[c].alive) continue;
        bool super = false;
        for (int j = 0; j <= dim_; ++j) super = super || cells_[c].v[j] <= dim_;
        if (!super) {
            keep[c] = 1;
            kept_.push_back(static_cast<int>(c));
        }
    }
    for (int c : kept_)
        for (int j = 0; j <= dim_; ++j)
            if (cells_[c].nbr[j] >= 0 && !keep[cells_[c].nbr[j]]) cells_[c].nbr[j] = -1;
    for (auto& cell : cells_) cell.alive = false;
    for (int c : kept_) cells_[c].alive = true;
    hint_ = kept_.empty() ? -1 : kept_.front();
}

std::optional<double> SimplicialInterpolator::exact_lookup(std::span<const double> q) const {
    auto it = exact_.find(hash_coords(q));
    if (it == exact_.end()) return std::nullopt;
    for (int id : it->second)
        if (std::equal(originals_[id].begin(), originals_[id].end(), q.begin(), q.end()))
            return dim_ == 1 ? vals_[id] : vals_[dim_ + 1 + id];
    return std::nullopt;
}

double SimplicialInterpolator::value_in(int cell, const double* lambda) const {
    const Simplex& s = cells_[cell];
    double v = 0.0;
    for (int j = 0; j <= dim_; ++j) v += lambda[j] * vals_[s.v[j]];
    return v;
}

int SimplicialInterpolator::locate(std::span<const double> q) const {
    if (kept_.empty()) return -1;
    double lambda[4];
    int cur = hint_ >= 0 ? hint_ : kept_.front();
    const int cap = 64 + 2 * static_cast<int>(std::sqrt((double)kept_.size()));
    for (int step = 0; step < cap; ++step) {
        if (!barycentric(cur, q, lambda)) break;
        int worst = -1;
        double worst_l = -kWalkEps;
        for (int j = 0; j <= dim_; ++j)
            if (lambda[j] < worst_l) {
                worst_l = lambda[j];
                worst = j;
            }
        if (worst < 0) {
            hint_ = cur;
            return cur;
        }
        const int nb = cells_[cur].nbr[worst];
        if (nb < 0) {
            hint_ = cur;
            return -1;  // walked out through a hull facet
        }
        cur = nb;
    }
    // Walk did not settle (can happen on near-degenerate geometry): scan.
    for (int c : kept_) {
        if (!barycentric(c, q, lambda)) continue;
        bool in = true;
        for (int j = 0; j <= dim_; ++j) in = in && lambda[j] >= -kWalkEps;
        if (in) {
            hint_ = c;
            return c;
        }
    }
    return -1;
}

std::optional<double> SimplicialInterpolator::operator()(std::span<const double> q) const {
    if (auto v = exact_lookup(q)) return v;
    if (dim_ == 1) {
        if (degenerate_ || q[0] < line_.front().first || q[0] > line_.back().first)
            return std::nullopt;
        auto it = std::lower_bound(line_.begin(), line_.end(), std::make_pair(q[0], -1e300));
        if (it->first == q[0]) return it->second;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double t = (q[0] - lo.first) / (hi.first - lo.first);
        return lo.second + t * (hi.second - lo.second);
    }
    if (degenerate_) {
        auto nb = nn_.knn(q, 1);
        if (nb.empty()) return std::nullopt;
        return vals_[dim_ + 1 + nb.front().index];
    }
    const int cell = locate(q);
    if (cell < 0) return std::nullopt;
    double lambda[4];
    if (!barycentric(cell, q, lambda)) return std::nullopt;
    return value_in(cell, lambda);
}

std::optional<double> SimplicialInterpolator::brute_force(std::span<const double> q) const {
    if (auto v = exact_lookup(q)) return v;
    if (dim_ == 1 || degenerate_) return (*this)(q);
    double lambda[4];
    for (int c : kept_) {
        if (!barycentric(c, q, lambda)) continue;
        bool in = true;
        for (int j = 0; j <= dim_; ++j) in = in && lambda[j] >= -kWalkEps;
        if (in) return value_in(c, lambda);
    }
    return std::nullopt;
}

KnnRegressor::KnnRegressor(std::vector<Point> unit_points, std::vector<double> values, int k,
                           double power)
    : vals_(std::move(values)), k_(k), power_(power) {
    if (unit_points.empty() || unit_points.size() != vals_.size())
        throw std::invalid_argument("knn regressor needs matching non-empty inputs");
    dim_ = static_cast<int>(unit_points.front().size());
    flat_.reserve(unit_points.size() * dim_);
    for (const auto& p : unit_points) flat_.insert(flat_.end(), p.begin(), p.end());
    tree_ = KdTree(flat_.data(), unit_points.size(), dim_);
}

double KnnRegressor::operator()(std::span<const double> q) const {
    auto nbrs = tree_.knn(q, k_);
    double wsum = 0.0, acc = 0.0;
    for (const auto& nb : nbrs) {
        if (nb.dist < 1e-12) return vals_[nb.index];  // exact hit
        const double w = 1.0 / std::pow(nb.dist, power_);
        wsum += w;
        acc += w * vals_[nb.index];
    }
    return acc / wsum;
}

} // namespace bbc
