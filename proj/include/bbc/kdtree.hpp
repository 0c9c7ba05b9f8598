#pragma once

#include <span>
#include <vector>

namespace bbc {

// Exact k-nearest-neighbor search over a fixed point set.
class KdTree {
public:
    struct Neighbor {
        int index;
        double dist;  // Euclidean
    };

    KdTree() = default;
    KdTree(const double* data, std::size_t count, int dim);

    std::size_t size() const { return count_; }
    int dim() const { return dim_; }

    // The k nearest points to q, sorted by (distance, index). When
    // exclude_one_exact is set, a single zero-distance match (the query
    // itself when it is one of the stored points) is dropped before
    // truncation; further duplicates still count as neighbors.
    std::vector<Neighbor> knn(std::span<const double> q, int k,
                              bool exclude_one_exact = false) const;

private:
    struct Node {
        int left = -1, right = -1;
        int begin = 0, end = 0;  // leaf range into order_
        int axis = -1;
        double split = 0.0;
    };

    const double* pt(int i) const { return data_.data() + static_cast<std::size_t>(i) * dim_; }
    int build(int begin, int end, std::vector<double>& lo, std::vector<double>& hi);
    void search(int node, std::span<const double> q, int k, bool exclude,
                std::vector<Neighbor>& heap, bool& excluded) const;

    std::vector<double> data_;
    std::size_t count_ = 0;
    int dim_ = 0;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace bbc
