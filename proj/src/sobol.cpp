#include "bbc/sobol.hpp"

#include <bit>
#include <stdexcept>

namespace bbc {

namespace {

constexpr int kBits = 52;  // fits a double mantissa exactly
constexpr double kScale = 0x1.0p-52;

struct DimSpec {
    int degree;
    unsigned poly;          // interior coefficients a_1..a_{s-1}, a_1 most significant
    unsigned seeds[8];      // m_1..m_s
};

// Primitive-polynomial parameters for dimensions 2..10 (dimension 1 is the
// van der Corput sequence). Values checked against the reference Sobol
// implementation in SciPy; see tests.
constexpr DimSpec kDims[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
};

constexpr int kMaxDim = 1 + static_cast<int>(sizeof(kDims) / sizeof(kDims[0]));

std::vector<std::uint64_t> build_directions(int dim) {
    std::vector<std::uint64_t> v(static_cast<std::size_t>(dim) * kBits);
    // First dimension: van der Corput, V_j = 2^(kBits-1-j).
    for (int j = 0; j < kBits; ++j)
        v[j] = std::uint64_t{1} << (kBits - 1 - j);
    for (int d = 1; d < dim; ++d) {
        const DimSpec& spec = kDims[d - 1];
        const int s = spec.degree;
        std::uint64_t* vd = v.data() + static_cast<std::size_t>(d) * kBits;
        for (int j = 0; j < s; ++j)
            vd[j] = std::uint64_t{spec.seeds[j]} << (kBits - 1 - j);
        for (int j = s; j < kBits; ++j) {
            std::uint64_t x = vd[j - s] ^ (vd[j - s] >> s);
            for (int l = 1; l < s; ++l)
                if (spec.poly >> (s - 1 - l) & 1u) x ^= vd[j - l];
            vd[j] = x;
        }
    }
    return v;
}

} // namespace

int SobolSequence::max_dim() { return kMaxDim; }

SobolSequence::SobolSequence(int dim, std::uint64_t skip) : dim_(dim), index_(skip) {
    if (dim < 1 || dim > kMaxDim)
        throw std::invalid_argument("sobol: dimension outside the direction-number table (1.." +
                                    std::to_string(kMaxDim) + ")");
    dirs_ = build_directions(dim);
    state_.assign(dim, 0);
    // State for an arbitrary start index: XOR direction numbers selected by
    // the Gray code of the index.
    std::uint64_t gray = skip ^ (skip >> 1);
    for (int b = 0; b < 63 && (gray >> b); ++b) {
        if (gray >> b & 1u) {
            if (b >= kBits) throw std::invalid_argument("sobol: skip too large");
            for (int d = 0; d < dim_; ++d)
                state_[d] ^= dirs_[static_cast<std::size_t>(d) * kBits + b];
        }
    }
}

void SobolSequence::apply_digital_shift(Rng& rng) {
    shift_.resize(dim_);
    for (int d = 0; d < dim_; ++d)
        shift_[d] = rng.raw() & ((std::uint64_t{1} << kBits) - 1);
}

void SobolSequence::next(std::span<double> out) {
    for (int d = 0; d < dim_; ++d) {
        const std::uint64_t word =
            shift_.empty() ? state_[d] : state_[d] ^ shift_[d];
        out[d] = static_cast<double>(word) * kScale;
    }
    // Advance: the Gray codes of index and index+1 differ at the lowest zero
    // bit of index.
    const int c = std::countr_one(index_);
    for (int d = 0; d < dim_; ++d)
        state_[d] ^= dirs_[static_cast<std::size_t>(d) * kBits + c];
    ++index_;
}

Point SobolSequence::next() {
    Point p(dim_);
    next(std::span<double>(p));
    return p;
}

std::vector<Point> SobolSequence::take(int n) {
    std::vector<Point> pts;
    pts.reserve(n);
    for (int i = 0; i < n; ++i) pts.push_back(next());
    return pts;
}

} // namespace bbc
