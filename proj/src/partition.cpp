#include "bbc/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bbc {

std::vector<double> inverse_density_weights(std::span<const double> rho) {
    std::vector<double> w(rho.size());
    double total = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) {
        w[i] = 1.0 / rho[i];
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

namespace {

struct NodeView {
    const Dataset* ds;
    std::span<const std::uint32_t> indices;
    std::span<const double> weights;  // normalized within the node
};

// Weighted 2-means over the feature vector [unit x ; min-max scaled y].
// Returns pseudo labels (true = member of the higher-value cluster), or
// nothing when clustering degenerates to an empty cluster.
std::optional<std::vector<bool>> cluster_good_labels(const NodeView& v, int iters) {
    const int dim = v.ds->space().dim();
    const int fdim = dim + 1;
    const std::size_t n = v.indices.size();

    double ymin = v.ds->y(v.indices[0]), ymax = ymin;
    for (auto idx : v.indices) {
        ymin = std::min(ymin, v.ds->y(idx));
        ymax = std::max(ymax, v.ds->y(idx));
    }
    const double yspan = ymax - ymin;

    std::vector<double> feats(n * fdim);
    std::size_t lo_seed = 0, hi_seed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto u = v.ds->unit(v.indices[i]);
        std::copy(u.begin(), u.end(), feats.begin() + i * fdim);
        feats[i * fdim + dim] = (v.ds->y(v.indices[i]) - ymin) / yspan;
        if (v.ds->y(v.indices[i]) < v.ds->y(v.indices[lo_seed])) lo_seed = i;
        if (v.ds->y(v.indices[i]) > v.ds->y(v.indices[hi_seed])) hi_seed = i;
    }

    std::vector<double> centers(2 * fdim);
    std::copy_n(feats.begin() + lo_seed * fdim, fdim, centers.begin());
    std::copy_n(feats.begin() + hi_seed * fdim, fdim, centers.begin() + fdim);

    std::vector<std::uint8_t> assign(n, 0);
    for (int it = 0; it < iters; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            double d0 = 0.0, d1 = 0.0;
            for (int f = 0; f < fdim; ++f) {
                double a = feats[i * fdim + f] - centers[f];
                double b = feats[i * fdim + f] - centers[fdim + f];
                d0 += a * a;
                d1 += b * b;
            }
            std::uint8_t c = d1 < d0 ? 1 : 0;
            if (c != assign[i]) {
                assign[i] = c;
                changed = true;
            }
        }
        double wsum[2] = {0.0, 0.0};
        std::vector<double> acc(2 * fdim, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            wsum[assign[i]] += v.weights[i];
            for (int f = 0; f < fdim; ++f)
                acc[assign[i] * fdim + f] += v.weights[i] * feats[i * fdim + f];
        }
        if (wsum[0] <= 0.0 || wsum[1] <= 0.0) return std::nullopt;
        for (int c = 0; c < 2; ++c)
            for (int f = 0; f < fdim; ++f) centers[c * fdim + f] = acc[c * fdim + f] / wsum[c];
        if (!changed && it > 0) break;
    }

    // Good cluster: higher weighted mean objective value.
    double wy[2] = {0.0, 0.0}, wsum[2] = {0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        wy[assign[i]] += v.weights[i] * v.ds->y(v.indices[i]);
        wsum[assign[i]] += v.weights[i];
    }
    if (wsum[0] <= 0.0 || wsum[1] <= 0.0) return std::nullopt;
    const int good = wy[1] / wsum[1] >= wy[0] / wsum[0] ? 1 : 0;
    std::vector<bool> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = assign[i] == good;
    return labels;
}

// Fallback pseudo labels: split on the weighted median objective value.
std::optional<std::vector<bool>> median_split_labels(const NodeView& v) {
    const std::size_t n = v.indices.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double ya = v.ds->y(v.indices[a]), yb = v.ds->y(v.indices[b]);
        return ya < yb || (ya == yb && a < b);
    });
    double cum = 0.0;
    double median = v.ds->y(v.indices[order.back()]);
    for (std::size_t i = 0; i < n; ++i) {
        cum += v.weights[order[i]];
        if (cum >= 0.5) {
            median = v.ds->y(v.indices[order[i]]);
            break;
        }
    }
    std::vector<bool> labels(n);
    std::size_t good_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        labels[i] = v.ds->y(v.indices[i]) > median;
        good_count += labels[i];
    }
    if (good_count == 0) {
        // Everything at or below the median: promote the maximal record.
        labels[order.back()] = true;
        good_count = 1;
    }
    if (good_count == n) return std::nullopt;
    return labels;
}

// Weighted soft-margin linear classifier: hinge loss with per-sample cost
// C * n * weight, solved by deterministic dual coordinate descent with the
// bias folded in as a constant feature.
Hyperplane train_linear_classifier(const NodeView& v, const std::vector<bool>& labels,
                                   const TreeifyParams& params) {
    const int dim = v.ds->space().dim();
    const std::size_t n = v.indices.size();
    const int fdim = dim + 1;  // trailing constant-1 bias feature

    std::vector<double> w(fdim, 0.0);
    std::vector<double> alpha(n, 0.0), qdiag(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto x = v.ds->unit(v.indices[i]);
        double q = 1.0;
        for (int d = 0; d < dim; ++d) q += x[d] * x[d];
        qdiag[i] = q;
        upper[i] = params.svm_cost * static_cast<double>(n) * v.weights[i];
    }

    const int sweeps = std::max(1, params.svm_iters / 10);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto x = v.ds->unit(v.indices[i]);
            const double label = labels[i] ? 1.0 : -1.0;
            double margin = w[dim];
            for (int d = 0; d < dim; ++d) margin += w[d] * x[d];
            const double grad = label * margin - 1.0;
            if ((alpha[i] <= 0.0 && grad >= 0.0) || (alpha[i] >= upper[i] && grad <= 0.0))
                continue;
            const double next = std::clamp(alpha[i] - grad / qdiag[i], 0.0, upper[i]);
            const double delta = next - alpha[i];
            if (delta == 0.0) continue;
            alpha[i] = next;
            for (int d = 0; d < dim; ++d) w[d] += delta * label * x[d];
            w[dim] += delta * label;
            max_change = std::max(max_change, std::fabs(delta));
        }
        if (max_change < 1e-8) break;
    }

    const double b = w[dim];
    w.resize(dim);
    return Hyperplane{std::move(w), b};
}

struct SplitOutcome {
    Hyperplane plane;
    std::vector<std::uint32_t> good, bad;
};

std::optional<SplitOutcome> split_node(const NodeView& v, const TreeifyParams& params) {
    double ymin = v.ds->y(v.indices[0]), ymax = ymin;
    for (auto idx : v.indices) {
        ymin = std::min(ymin, v.ds->y(idx));
        ymax = std::max(ymax, v.ds->y(idx));
    }
    if (!(ymax > ymin)) return std::nullopt;  // constant values: unsplittable

    auto labels = cluster_good_labels(v, params.kmeans_iters);
    if (!labels) labels = median_split_labels(v);
    if (!labels) return std::nullopt;

    Hyperplane plane = train_linear_classifier(v, *labels, params);

    SplitOutcome out;
    out.plane = std::move(plane);
    auto partition = [&](const Hyperplane& hp, std::vector<std::uint32_t>& good,
                         std::vector<std::uint32_t>& bad) {
        good.clear();
        bad.clear();
        for (auto idx : v.indices)
            (hp.good_side(v.ds->unit(idx)) ? good : bad).push_back(idx);
    };
    partition(out.plane, out.good, out.bad);
    if (out.good.empty() || out.bad.empty()) return std::nullopt;

    // The positive side must be the higher-value one; flip when the
    // classifier came out inverted.
    double wy_good = 0.0, w_good = 0.0, wy_bad = 0.0, w_bad = 0.0;
    for (std::size_t i = 0; i < v.indices.size(); ++i) {
        const bool side = out.plane.good_side(v.ds->unit(v.indices[i]));
        (side ? wy_good : wy_bad) += v.weights[i] * v.ds->y(v.indices[i]);
        (side ? w_good : w_bad) += v.weights[i];
    }
    if (wy_good / w_good < wy_bad / w_bad) {
        for (double& c : out.plane.w) c = -c;
        out.plane.b = -out.plane.b;
        partition(out.plane, out.good, out.bad);
        if (out.good.empty() || out.bad.empty()) return std::nullopt;
    }
    return out;
}

NodeStats compute_stats(const Dataset& ds, const DensityCache* density,
                        std::span<const std::uint32_t> indices) {
    NodeStats s;
    s.n = static_cast<long>(indices.size());
    for (auto idx : indices) {
        const double y = ds.y(idx);
        const double inv = density ? density->inv_rho(idx) : 1.0;
        s.sum_y += y;
        s.sum_inv_rho += inv;
        s.sum_y_inv_rho += y * inv;
    }
    return s;
}

std::vector<double> node_weights(const Dataset& ds, const DensityCache* density,
                                 std::span<const std::uint32_t> indices,
                                 PartitionWeighting weighting) {
    if (weighting == PartitionWeighting::uniform || density == nullptr) {
        return std::vector<double>(indices.size(), 1.0 / static_cast<double>(indices.size()));
    }
    std::vector<double> rho(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) rho[i] = density->rho(indices[i]);
    (void)ds;
    return inverse_density_weights(rho);
}

} // namespace

std::optional<Hyperplane> learn_latent_action(const Dataset& ds,
                                              std::span<const std::uint32_t> indices,
                                              std::span<const double> weights,
                                              const TreeifyParams& params) {
    if (indices.size() < 2) return std::nullopt;
    NodeView v{&ds, indices, weights};
    auto out = split_node(v, params);
    if (!out) return std::nullopt;
    return std::move(out->plane);
}

PartitionTree::PartitionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {
    refresh_leaves();
}

void PartitionTree::refresh_leaves() {
    leaves_.clear();
    for (const auto& n : nodes_)
        if (n.is_leaf()) leaves_.push_back(n.id);
}

int PartitionTree::route(std::span<const double> unit_x) const {
    int cur = root();
    while (!nodes_[cur].is_leaf()) {
        const TreeNode& n = nodes_[cur];
        cur = n.separator->good_side(unit_x) ? n.good_child : n.bad_child;
    }
    return cur;
}

bool PartitionTree::leaf_membership(int leaf_id, std::span<const double> unit_x) const {
    return route(unit_x) == leaf_id;
}

PartitionTree treeify(const Dataset& ds, const DensityCache* density,
                      const TreeifyParams& params) {
    if (ds.empty()) throw std::invalid_argument("treeify requires a non-empty dataset");

    PartitionTree tree;
    auto& nodes = tree.nodes_;

    TreeNode root;
    root.id = 0;
    root.records.resize(ds.size());
    std::iota(root.records.begin(), root.records.end(), 0);
    root.stats = compute_stats(ds, density, root.records);
    nodes.push_back(std::move(root));

    std::vector<int> work{0};
    while (!work.empty()) {
        const int id = work.back();
        work.pop_back();

        bool splittable = nodes[id].stats.n >= params.leafsize &&
                          nodes[id].depth < params.max_depth;
        if (!splittable) continue;

        auto weights = node_weights(ds, density, nodes[id].records, params.weighting);
        NodeView v{&ds, nodes[id].records, weights};
        auto out = split_node(v, params);
        if (!out) continue;  // unsplittable nodes stay leaves

        const int good_id = static_cast<int>(nodes.size());
        const int bad_id = good_id + 1;

        TreeNode good, bad;
        good.id = good_id;
        bad.id = bad_id;
        good.parent = bad.parent = id;
        good.depth = bad.depth = nodes[id].depth + 1;
        good.records = std::move(out->good);
        bad.records = std::move(out->bad);
        good.stats = compute_stats(ds, density, good.records);
        bad.stats = compute_stats(ds, density, bad.records);

        nodes[id].separator = std::move(out->plane);
        nodes[id].good_child = good_id;
        nodes[id].bad_child = bad_id;
        nodes.push_back(std::move(good));
        nodes.push_back(std::move(bad));
        work.push_back(good_id);
        work.push_back(bad_id);
    }

    tree.refresh_leaves();
    return tree;
}

void backpropagate(PartitionTree& tree, const Dataset& ds, const DensityCache* density,
                   std::span<const std::uint32_t> new_indices) {
    for (auto idx : new_indices) {
        const double y = ds.y(idx);
        const double inv = density ? density->inv_rho(idx) : 1.0;
        auto u = ds.unit(idx);
        int cur = tree.root();
        for (;;) {
            TreeNode& n = tree.node_mut(cur);
            n.records.push_back(idx);
            n.stats.n += 1;
            n.stats.sum_y += y;
            n.stats.sum_inv_rho += inv;
            n.stats.sum_y_inv_rho += y * inv;
            if (n.is_leaf()) break;
            cur = n.separator->good_side(u) ? n.good_child : n.bad_child;
        }
    }
}

} // namespace bbc
