#pragma once

#include "bbc/domain.hpp"
#include "bbc/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace bbc {

// Deterministic low-discrepancy stream in [0,1)^dim. Gray-code Sobol
// construction; a stream is fully determined by (dim, skip) and, when
// randomized, its digital shift. Index 0 is the origin, so campaigns
// normally start at skip = 1.
class SobolSequence {
public:
    explicit SobolSequence(int dim, std::uint64_t skip = 0);

    static int max_dim();

    int dim() const { return dim_; }
    std::uint64_t index() const { return index_; }

    // Owen-style digital shift: XORs every emitted point with a fixed random
    // word per dimension. Keeps dyadic equidistribution while decorrelating
    // repeated campaigns.
    void apply_digital_shift(Rng& rng);

    void next(std::span<double> out);
    Point next();
    std::vector<Point> take(int n);

private:
    int dim_;
    std::uint64_t index_;                // index of the next point to emit
    std::vector<std::uint64_t> state_;   // integer state per dimension
    std::vector<std::uint64_t> dirs_;    // direction numbers, dim-major
    std::vector<std::uint64_t> shift_;   // digital shift, empty = none
};

} // namespace bbc
