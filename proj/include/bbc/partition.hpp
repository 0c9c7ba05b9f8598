#pragma once

#include "bbc/density.hpp"
#include "bbc/domain.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bbc {

// Linear separator; side_value(x) >= 0 is the "good" side. Points exactly on
// the plane belong to the good side.
struct Hyperplane {
    std::vector<double> w;
    double b = 0.0;

    double side_value(std::span<const double> x) const {
        double s = b;
        for (std::size_t d = 0; d < w.size(); ++d) s += w[d] * x[d];
        return s;
    }
    bool good_side(std::span<const double> x) const { return side_value(x) >= 0.0; }
};

// Cached accumulators; derived quantities follow the density-weighted
// formulation (weights proportional to inverse density, normalized per node).
struct NodeStats {
    long n = 0;
    double sum_y = 0.0;
    double sum_inv_rho = 0.0;
    double sum_y_inv_rho = 0.0;

    double mean_y() const { return sum_y / static_cast<double>(n); }
    // Density-weighted mean objective value (the UCB_rho exploitation term).
    double weighted_value() const { return sum_y_inv_rho / sum_inv_rho; }
    // Weighted mean sampling density of the node's records.
    double mean_density() const { return static_cast<double>(n) / sum_inv_rho; }
};

struct TreeNode {
    int id = 0;
    int parent = -1;
    int depth = 0;
    int good_child = -1;
    int bad_child = -1;
    std::optional<Hyperplane> separator;
    std::vector<std::uint32_t> records;
    NodeStats stats;

    bool is_leaf() const { return !separator.has_value(); }
};

enum class PartitionWeighting { inverse_density, uniform };

struct TreeifyParams {
    int leafsize = 10;
    int max_depth = 8;
    PartitionWeighting weighting = PartitionWeighting::inverse_density;
    int kmeans_iters = 50;
    int svm_iters = 400;
    double svm_cost = 1.0;
};

class PartitionTree {
public:
    PartitionTree() = default;
    explicit PartitionTree(std::vector<TreeNode> nodes);

    int root() const { return 0; }
    int size() const { return static_cast<int>(nodes_.size()); }
    const TreeNode& node(int id) const { return nodes_[id]; }
    TreeNode& node_mut(int id) { return nodes_[id]; }
    const std::vector<int>& leaves() const { return leaves_; }

    // Descends by separator side; every point lands in exactly one leaf.
    int route(std::span<const double> unit_x) const;
    bool leaf_membership(int leaf_id, std::span<const double> unit_x) const;

    void refresh_leaves();

private:
    friend PartitionTree treeify(const Dataset&, const DensityCache*, const TreeifyParams&);
    std::vector<TreeNode> nodes_;
    std::vector<int> leaves_;
};

// Normalized inverse-density weights over a node (sum to one, all positive).
std::vector<double> inverse_density_weights(std::span<const double> rho);

// Learns one latent action: weighted 2-means on [x ; scaled y] for pseudo
// labels, then a weighted soft-margin linear classifier on x. Returns
// nothing when the node cannot be split (all records on one side).
std::optional<Hyperplane> learn_latent_action(const Dataset& ds,
                                              std::span<const std::uint32_t> indices,
                                              std::span<const double> weights,
                                              const TreeifyParams& params);

PartitionTree treeify(const Dataset& ds, const DensityCache* density,
                      const TreeifyParams& params);

// Routes freshly evaluated records into the existing tree, updating counts
// and cached stats along each root-to-leaf path. Separators are untouched.
void backpropagate(PartitionTree& tree, const Dataset& ds, const DensityCache* density,
                   std::span<const std::uint32_t> new_indices);

} // namespace bbc
