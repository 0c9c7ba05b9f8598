#pragma once

#include "bbc/domain.hpp"

#include <limits>
#include <span>
#include <vector>

namespace bbc {

struct ModalityHits {
    Point center;
    long hits = 0;
    long first_hit = -1;  // 1-based record index of the first counting hit
};

struct ModalityReport {
    std::vector<ModalityHits> modalities;

    int covered() const {
        int n = 0;
        for (const auto& m : modalities) n += m.hits > 0;
        return n;
    }
};

// A record counts toward the modality whose center is nearest, provided its
// value exceeds delta and it lies within `radius` of that center.
ModalityReport report_modality_coverage(std::span<const SampleRecord> records,
                                        std::span<const Point> centers, double radius,
                                        double delta);

inline constexpr double kNoRadiusLimit = std::numeric_limits<double>::infinity();

} // namespace bbc
