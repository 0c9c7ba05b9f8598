#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bbc {

using Point = std::vector<double>;

// Thrown when an evaluation batch would exceed the remaining budget.
class BudgetError : public std::runtime_error {
public:
    BudgetError(long requested, long remaining);
    long requested;
    long remaining;
};

// Thrown when the objective fails on a point; carries the offending input.
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(Point x, const std::string& why);
    Point point;
};

// Axis-aligned box domain with per-dimension bounds.
struct SearchSpace {
    std::vector<double> lower;
    std::vector<double> upper;

    SearchSpace() = default;
    SearchSpace(std::vector<double> lo, std::vector<double> hi);

    int dim() const { return static_cast<int>(lower.size()); }
    double extent(int d) const { return upper[d] - lower[d]; }

    // Bounds are inclusive: points exactly on the boundary are in.
    bool contains(std::span<const double> x) const;

    // Affine map into [0,1]^dim. Throws std::domain_error when x is out of
    // bounds.
    Point normalize(std::span<const double> x) const;
    Point denormalize(std::span<const double> u) const;
    void normalize_into(std::span<const double> x, std::span<double> out) const;
    void denormalize_into(std::span<const double> u, std::span<double> out) const;
};

struct SampleRecord {
    Point x;  // raw coordinates
    double y = 0.0;
};

// Ordered evaluation history. Append-only during a campaign; insertion order
// is evaluation order. Normalized coordinates are cached since every piece
// of internal geometry consumes them.
class Dataset {
public:
    explicit Dataset(SearchSpace space) : space_(std::move(space)) {}

    const SearchSpace& space() const { return space_; }

    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    void append(SampleRecord rec);
    void append(std::span<const SampleRecord> recs);

    const SampleRecord& record(std::size_t i) const { return records_[i]; }
    double y(std::size_t i) const { return records_[i].y; }
    std::span<const double> unit(std::size_t i) const {
        return {unit_.data() + i * space_.dim(), static_cast<std::size_t>(space_.dim())};
    }
    std::span<const SampleRecord> records() const { return records_; }

private:
    SearchSpace space_;
    std::vector<SampleRecord> records_;
    std::vector<double> unit_;  // flattened normalized coordinates
};

// Criticality criterion: x is critical iff objective(x) > delta, strictly.
struct BlackBoxInequality {
    std::function<double(const Point&)> objective;
    double delta = 0.0;

    bool critical(double y) const { return y > delta; }
};

struct BudgetState {
    long total = 0;
    long used = 0;

    long remaining() const { return total - used; }
    bool exhausted() const { return used >= total; }
};

using ObjectiveFn = std::function<double(const Point&)>;

// Evaluates one record per point, order preserved, charging the budget.
// Refuses (BudgetError) when the batch does not fit in the remaining
// allowance; objective failures surface as EvaluationError carrying the
// offending point.
std::vector<SampleRecord> evaluate_batch(const ObjectiveFn& objective,
                                         std::span<const Point> points,
                                         BudgetState& budget);

} // namespace bbc
