#pragma once

#include "bbc/objectives.hpp"

namespace bbc {

// Fixed parameters of the two-lane car-following scenario. The ego follows
// BV1; BV2 approaches from behind in the adjacent lane. s1 and v2 are the
// searched coordinates, everything else stays at its default.
struct ScenarioParams {
    double v0 = 30.0;      // ego initial speed, m/s
    double v1 = 20.0;      // BV1 speed until braking, m/s
    double s2 = 50.0;      // initial gap BV2 -> ego, m
    double t_brake = 4.0;  // BV1 brake onset, s
    double s1_min = 10.0, s1_max = 110.0;
    double v2_min = 10.0, v2_max = 30.0;
};

// Toy ego model and integration constants. These stand in for a full
// driving stack; every value is configurable.
struct ScenarioConfig {
    double dt = 0.02;             // s
    double horizon = 15.0;        // s
    double comfort_ttc = 8.0;     // start easing off below this front TTC, s
    double comfort_decel = 2.5;   // m/s^2
    double emergency_ttc = 3.0;   // evasive-action trigger, s
    double reaction_delay = 1.2;  // s between trigger and action
    double change_duration = 2.0; // lane-change time, s
    double min_merge_gap = 5.0;   // projected rear gap needed to change lane, m
    double ego_brake_decel = 6.0; // m/s^2
    double bv1_decel = 8.0;       // m/s^2
    double ttc_cap = 100.0;       // keeps the objective bounded, s
};

// Minimum active-conflict TTC over the episode: the front conflict (BV1)
// until an evasive lane change begins, the rear conflict (BV2) from then on.
// Deterministic fixed-step integration.
double simulate_car_following(double s1, double v2, const ScenarioParams& params = {},
                              const ScenarioConfig& config = {});

// Maximization form: criticality = -min TTC, so critical <=> value > -0.5.
Objective make_car_following(const ScenarioParams& params = {},
                             const ScenarioConfig& config = {});

} // namespace bbc
