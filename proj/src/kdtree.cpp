#include "bbc/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace bbc {

namespace {
constexpr int kLeafSize = 16;

double sq_dist(const double* a, const double* b, int dim) {
    double s = 0.0;
    for (int d = 0; d < dim; ++d) {
        double diff = a[d] - b[d];
        s += diff * diff;
    }
    return s;
}
} // namespace

KdTree::KdTree(const double* data, std::size_t count, int dim)
    : data_(data, data + count * dim), count_(count), dim_(dim) {
    if (count_ == 0) return;
    order_.resize(count_);
    std::iota(order_.begin(), order_.end(), 0);
    std::vector<double> lo(dim_), hi(dim_);
    for (int d = 0; d < dim_; ++d) {
        lo[d] = hi[d] = data_[d];
    }
    for (std::size_t i = 1; i < count_; ++i)
        for (int d = 0; d < dim_; ++d) {
            lo[d] = std::min(lo[d], pt(static_cast<int>(i))[d]);
            hi[d] = std::max(hi[d], pt(static_cast<int>(i))[d]);
        }
    root_ = build(0, static_cast<int>(count_), lo, hi);
}

int KdTree::build(int begin, int end, std::vector<double>& lo, std::vector<double>& hi) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin <= kLeafSize) {
        nodes_.push_back(node);
        return static_cast<int>(nodes_.size()) - 1;
    }
    int axis = 0;
    for (int d = 1; d < dim_; ++d)
        if (hi[d] - lo[d] > hi[axis] - lo[axis]) axis = d;
    int mid = (begin + end) / 2;
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                     [&](int a, int b) {
                         double va = pt(a)[axis], vb = pt(b)[axis];
                         return va < vb || (va == vb && a < b);
                     });
    node.axis = axis;
    node.split = pt(order_[mid])[axis];
    int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);

    double saved_hi = hi[axis];
    hi[axis] = node.split;
    int left = build(begin, mid, lo, hi);
    hi[axis] = saved_hi;

    double saved_lo = lo[axis];
    lo[axis] = node.split;
    int right = build(mid, end, lo, hi);
    lo[axis] = saved_lo;

    nodes_[self].left = left;
    nodes_[self].right = right;
    return self;
}

void KdTree::search(int ni, std::span<const double> q, int k, bool exclude,
                    std::vector<Neighbor>& heap, bool& excluded) const {
    const Node& node = nodes_[ni];
    auto worst = [&]() {
        return heap.size() < static_cast<std::size_t>(k)
                   ? std::numeric_limits<double>::infinity()
                   : heap.front().dist;
    };
    if (node.axis < 0) {
        for (int i = node.begin; i < node.end; ++i) {
            int idx = order_[i];
            double d2 = sq_dist(pt(idx), q.data(), dim_);
            if (exclude && !excluded && d2 == 0.0) {
                excluded = true;
                continue;
            }
            if (d2 < worst() ||
                (heap.size() < static_cast<std::size_t>(k))) {
                heap.push_back({idx, d2});
                std::push_heap(heap.begin(), heap.end(),
                               [](const Neighbor& a, const Neighbor& b) { return a.dist < b.dist; });
                if (heap.size() > static_cast<std::size_t>(k)) {
                    std::pop_heap(heap.begin(), heap.end(),
                                  [](const Neighbor& a, const Neighbor& b) { return a.dist < b.dist; });
                    heap.pop_back();
                }
            }
        }
        return;
    }
    double delta = q[node.axis] - node.split;
    int near = delta <= 0.0 ? node.left : node.right;
    int far = delta <= 0.0 ? node.right : node.left;
    search(near, q, k, exclude, heap, excluded);
    if (delta * delta <= worst())
        search(far, q, k, exclude, heap, excluded);
}

std::vector<KdTree::Neighbor> KdTree::knn(std::span<const double> q, int k,
                                          bool exclude_one_exact) const {
    std::vector<Neighbor> heap;
    if (count_ == 0 || k <= 0) return heap;
    k = std::min<int>(k, static_cast<int>(count_));
    heap.reserve(k + 1);
    bool excluded = false;
    search(root_, q, k, exclude_one_exact, heap, excluded);
    for (auto& n : heap) n.dist = std::sqrt(n.dist);
    std::sort(heap.begin(), heap.end(), [](const Neighbor& a, const Neighbor& b) {
        return a.dist < b.dist || (a.dist == b.dist && a.index < b.index);
    });
    return heap;
}

} // namespace bbc
