#include "bbc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bbc {

double simulate_car_following(double s1, double v2, const ScenarioParams& p,
                              const ScenarioConfig& c) {
    if (s1 < p.s1_min || s1 > p.s1_max || v2 < p.v2_min || v2 > p.v2_max)
        throw std::domain_error("scenario parameters outside the configured ranges");

    enum class Phase { follow, changing_lane, braking };

    double x_ego = 0.0, v_ego = p.v0;
    double x_bv1 = s1, v_bv1 = p.v1;
    double x_bv2 = -p.s2;

    Phase phase = Phase::follow;
    double alarm_t = -1.0;
    double min_ttc = c.ttc_cap;

    const int steps = static_cast<int>(std::lround(c.horizon / c.dt));
    for (int i = 0; i <= steps; ++i) {
        const double t = i * c.dt;

        const double front_ttc = ttc(x_bv1 - x_ego, v_ego, v_bv1);
        const double rear_ttc = ttc(x_ego - x_bv2, v2, v_ego);

        // Trigger and act.
        if (phase == Phase::follow) {
            if (alarm_t < 0.0 && front_ttc <= c.emergency_ttc) alarm_t = t;
            if (alarm_t >= 0.0 && t >= alarm_t + c.reaction_delay) {
                const double projected_gap =
                    (x_ego - x_bv2) + (v_ego - v2) * c.change_duration;
                phase = projected_gap > c.min_merge_gap ? Phase::changing_lane
                                                        : Phase::braking;
            }
        }

        const double active_ttc =
            phase == Phase::changing_lane ? rear_ttc : front_ttc;
        min_ttc = std::min(min_ttc, std::min(active_ttc, c.ttc_cap));

        // Ego longitudinal control.
        double a_ego = 0.0;
        switch (phase) {
            case Phase::follow:
                if (front_ttc <= c.comfort_ttc) a_ego = -c.comfort_decel;
                break;
            case Phase::braking:
                a_ego = -c.ego_brake_decel;
                break;
            case Phase::changing_lane:
                a_ego = 0.0;  // holds speed through and after the change
                break;
        }

        const double a_bv1 = t >= p.t_brake && v_bv1 > 0.0 ? -c.bv1_decel : 0.0;

        v_ego = std::max(0.0, v_ego + a_ego * c.dt);
        v_bv1 = std::max(0.0, v_bv1 + a_bv1 * c.dt);
        x_ego += v_ego * c.dt;
        x_bv1 += v_bv1 * c.dt;
        x_bv2 += v2 * c.dt;
    }
    return min_ttc;
}

Objective make_car_following(const ScenarioParams& params, const ScenarioConfig& config) {
    Objective o;
    o.id = "car-following";
    o.space = SearchSpace({params.s1_min, params.v2_min}, {params.s1_max, params.v2_max});
    o.default_delta = -0.5;
    o.fn = [params, config](const Point& x) {
        return -simulate_car_following(x[0], x[1], params, config);
    };
    return o;
}

} // namespace bbc
