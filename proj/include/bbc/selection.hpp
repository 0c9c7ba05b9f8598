#pragma once

#include "bbc/partition.hpp"

#include <span>
#include <vector>

namespace bbc {

struct UcbScore {
    int leaf_id = -1;
    double exploitation = 0.0;
    double exploration = 0.0;
    double total = 0.0;
};

// Ordered leaf ids, best score first; ties break toward the smaller id.
struct BeamSelection {
    std::vector<int> leaf_ids;
};

enum class UcbMode { rho, one };

// Density-adaptive score. Exploitation is the node's density-weighted mean
// value; exploration is c_p * log_adapt(rho_parent / rho_child) where the
// logarithm base is max(rho over scored children) / rho_parent. Positive
// when the child is sparser than the parent, zero when equally dense,
// negative when denser.
UcbScore ucb_rho(const NodeStats& parent, const NodeStats& child, int leaf_id, double cp,
                 double max_child_mean_density);

// Count-based score (predecessor behavior): mean value plus
// 2 c_p sqrt(2 ln n_parent / n_child).
UcbScore ucb_one(const NodeStats& parent, const NodeStats& child, int leaf_id, double cp);

// Weighted mean density given per-record densities and normalized weights.
double weighted_mean_density(std::span<const double> rho, std::span<const double> weights);

// Scores every leaf against the root (flattened view).
std::vector<UcbScore> score_leaves(const PartitionTree& tree, double cp, UcbMode mode);

BeamSelection select_beam(const PartitionTree& tree, double cp, int beam_width, UcbMode mode);

} // namespace bbc
