#include "bbc/reporting.hpp"

#include <cmath>

namespace bbc {

ModalityReport report_modality_coverage(std::span<const SampleRecord> records,
                                        std::span<const Point> centers, double radius,
                                        double delta) {
    ModalityReport report;
    for (const auto& c : centers) report.modalities.push_back({c, 0, -1});
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!(records[i].y > delta)) continue;
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (std::size_t m = 0; m < centers.size(); ++m) {
            double d2 = 0.0;
            for (std::size_t d = 0; d < centers[m].size(); ++d) {
                const double diff = records[i].x[d] - centers[m][d];
                d2 += diff * diff;
            }
            if (d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(m);
            }
        }
        if (best < 0 || std::sqrt(best_d2) > radius) continue;
        auto& slot = report.modalities[best];
        slot.hits += 1;
        if (slot.first_hit < 0) slot.first_hit = static_cast<long>(i) + 1;
    }
    return report;
}

} // namespace bbc
