#include "bbc/selection.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace bbc {

double weighted_mean_density(std::span<const double> rho, std::span<const double> weights) {
    double s = 0.0;
    for (std::size_t i = 0; i < rho.size(); ++i) s += weights[i] * rho[i];
    return s;
}

UcbScore ucb_rho(const NodeStats& parent, const NodeStats& child, int leaf_id, double cp,
                 double max_child_mean_density) {
    UcbScore s;
    s.leaf_id = leaf_id;
    s.exploitation = child.weighted_value();

    const double rho_parent = parent.mean_density();
    const double rho_child = child.mean_density();
    double adapt = max_child_mean_density / rho_parent;
    if (adapt < 1.0) adapt = 1.0 + 1e-9;  // cannot occur analytically; numeric guard
    if (adapt == 1.0 || rho_parent == rho_child) {
        s.exploration = 0.0;  // limit convention when all children are equally dense
    } else {
        s.exploration = cp * std::log(rho_parent / rho_child) / std::log(adapt);
    }
    s.total = s.exploitation + s.exploration;
    return s;
}

UcbScore ucb_one(const NodeStats& parent, const NodeStats& child, int leaf_id, double cp) {
    UcbScore s;
    s.leaf_id = leaf_id;
    if (child.n == 0) {
        s.exploitation = 0.0;
        s.exploration = std::numeric_limits<double>::infinity();
        s.total = s.exploration;
        return s;
    }
    s.exploitation = child.mean_y();
    s.exploration = 2.0 * cp *
                    std::sqrt(2.0 * std::log(static_cast<double>(parent.n)) /
                              static_cast<double>(child.n));
    s.total = s.exploitation + s.exploration;
    return s;
}

std::vector<UcbScore> score_leaves(const PartitionTree& tree, double cp, UcbMode mode) {
    const NodeStats& root = tree.node(tree.root()).stats;
    std::vector<UcbScore> scores;
    scores.reserve(tree.leaves().size());
    if (mode == UcbMode::rho) {
        double max_rho = 0.0;
        for (int id : tree.leaves()) {
            assert(tree.node(id).stats.n > 0);
            max_rho = std::max(max_rho, tree.node(id).stats.mean_density());
        }
        for (int id : tree.leaves())
            scores.push_back(ucb_rho(root, tree.node(id).stats, id, cp, max_rho));
    } else {
        for (int id : tree.leaves())
            scores.push_back(ucb_one(root, tree.node(id).stats, id, cp));
    }
    return scores;
}

BeamSelection select_beam(const PartitionTree& tree, double cp, int beam_width, UcbMode mode) {
    auto scores = score_leaves(tree, cp, mode);
    std::sort(scores.begin(), scores.end(), [](const UcbScore& a, const UcbScore& b) {
        if (a.total != b.total) return a.total > b.total;
        return a.leaf_id < b.leaf_id;
    });
    BeamSelection sel;
    const int take = std::min<int>(beam_width, static_cast<int>(scores.size()));
    for (int i = 0; i < take; ++i) sel.leaf_ids.push_back(scores[i].leaf_id);
    return sel;
}

} // namespace bbc
