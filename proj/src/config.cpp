#include "bbc/config.hpp"

#include <fstream>
#include <stdexcept>

namespace bbc {

using nlohmann::json;

std::string to_string(Algorithm a) {
    switch (a) {
        case Algorithm::lambda: return "lambda";
        case Algorithm::lambda_predecessor: return "lambda-predecessor-mode";
        case Algorithm::random_search: return "random";
        case Algorithm::sobol: return "sobol";
    }
    return "?";
}

std::string to_string(LocalSamplerKind k) {
    return k == LocalSamplerKind::reject_sobol ? "reject-sobol" : "trust-region";
}

Algorithm parse_algorithm(const std::string& s) {
    if (s == "lambda") return Algorithm::lambda;
    if (s == "lambda-predecessor-mode" || s == "lambda-predecessor")
        return Algorithm::lambda_predecessor;
    if (s == "random") return Algorithm::random_search;
    if (s == "sobol") return Algorithm::sobol;
    throw std::invalid_argument("unknown algorithm: " + s);
}

LocalSamplerKind parse_local_sampler(const std::string& s) {
    if (s == "reject-sobol") return LocalSamplerKind::reject_sobol;
    if (s == "trust-region") return LocalSamplerKind::trust_region;
    throw std::invalid_argument("unknown local sampler: " + s);
}

void CampaignConfig::validate() const {
    if (budget < 1) throw std::invalid_argument("budget must be positive");
    if (init_samples < 1) throw std::invalid_argument("init_samples must be positive");
    if (budget < init_samples)
        throw std::invalid_argument("budget must be at least init_samples");
    if (beam_width < 1) throw std::invalid_argument("beam_width must be >= 1");
    if (leafsize < 2) throw std::invalid_argument("leafsize must be >= 2");
    if (depth < 0) throw std::invalid_argument("depth must be >= 0");
    if (selections_per_treeification < 1)
        throw std::invalid_argument("selections_per_treeification must be >= 1");
    if (samples_per_selection < 1)
        throw std::invalid_argument("samples_per_selection must be >= 1");
    if (rebuild_interval < 1) throw std::invalid_argument("rebuild_interval must be >= 1");
    if (eval_cadence < 0) throw std::invalid_argument("eval_cadence must be >= 0");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (objective.id == "external" &&
        (objective.lower.empty() || objective.lower.size() != objective.upper.size()))
        throw std::invalid_argument("external objective needs matching lower/upper bounds");
}

namespace {

template <typename T>
void get_to_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) j.at(key).get_to(out);
}

} // namespace

CampaignConfig CampaignConfig::from_json(const json& j) {
    CampaignConfig c;
    if (j.contains("objective")) {
        const json& o = j.at("objective");
        get_to_if(o, "id", c.objective.id);
        get_to_if(o, "dim", c.objective.dim);
        get_to_if(o, "lower", c.objective.lower);
        get_to_if(o, "upper", c.objective.upper);
        if (o.contains("ripples")) {
            const json& r = o.at("ripples");
            get_to_if(r, "bias", c.objective.ripples.bias);
            get_to_if(r, "sigma", c.objective.ripples.sigma);
            get_to_if(r, "k", c.objective.ripples.k);
            get_to_if(r, "omega", c.objective.ripples.omega);
        }
        if (o.contains("scenario")) {
            const json& s = o.at("scenario");
            get_to_if(s, "v0", c.objective.scenario.v0);
            get_to_if(s, "v1", c.objective.scenario.v1);
            get_to_if(s, "s2", c.objective.scenario.s2);
            get_to_if(s, "t_brake", c.objective.scenario.t_brake);
        }
        if (o.contains("scenario_model")) {
            const json& m = o.at("scenario_model");
            auto& sm = c.objective.scenario_model;
            get_to_if(m, "dt", sm.dt);
            get_to_if(m, "horizon", sm.horizon);
            get_to_if(m, "comfort_ttc", sm.comfort_ttc);
            get_to_if(m, "comfort_decel", sm.comfort_decel);
            get_to_if(m, "emergency_ttc", sm.emergency_ttc);
            get_to_if(m, "reaction_delay", sm.reaction_delay);
            get_to_if(m, "change_duration", sm.change_duration);
            get_to_if(m, "min_merge_gap", sm.min_merge_gap);
            get_to_if(m, "ego_brake_decel", sm.ego_brake_decel);
            get_to_if(m, "bv1_decel", sm.bv1_decel);
        }
    }
    if (j.contains("delta")) c.delta = j.at("delta").get<double>();
    get_to_if(j, "budget", c.budget);
    get_to_if(j, "seed", c.seed);
    if (j.contains("algorithm")) c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    get_to_if(j, "cp", c.cp);
    get_to_if(j, "leafsize", c.leafsize);
    get_to_if(j, "depth", c.depth);
    get_to_if(j, "init_samples", c.init_samples);
    get_to_if(j, "beam_width", c.beam_width);
    get_to_if(j, "selections_per_treeification", c.selections_per_treeification);
    get_to_if(j, "samples_per_selection", c.samples_per_selection);
    if (j.contains("local_sampler"))
        c.local_sampler = parse_local_sampler(j.at("local_sampler").get<std::string>());
    if (j.contains("density")) {
        const json& d = j.at("density");
        get_to_if(d, "k", c.density_k);
        get_to_if(d, "rebuild_interval", c.rebuild_interval);
    }
    if (j.contains("evaluation")) {
        const json& e = j.at("evaluation");
        get_to_if(e, "cadence", c.eval_cadence);
        get_to_if(e, "resolution", c.validation_resolution);
        get_to_if(e, "truth_file", c.truth_file);
    }
    get_to_if(j, "repetitions", c.repetitions);
    get_to_if(j, "output_dir", c.output_dir);
    if (j.contains("trust_region")) {
        const json& t = j.at("trust_region");
        auto& tr = c.trust_region;
        get_to_if(t, "init_points", tr.init_points);
        get_to_if(t, "thompson_batch", tr.thompson_batch);
        get_to_if(t, "local_budget", tr.local_budget);
        get_to_if(t, "success_tolerance", tr.success_tolerance);
        get_to_if(t, "failure_tolerance", tr.failure_tolerance);
        get_to_if(t, "init_scale", tr.init_scale);
        get_to_if(t, "shrink_limit", tr.shrink_limit);
        get_to_if(t, "max_candidates", tr.max_candidates);
        get_to_if(t, "gp_max_points", tr.gp_max_points);
        get_to_if(t, "subspace_only", tr.subspace_only);
    }
    get_to_if(j, "dump_trees", c.dump_trees);
    get_to_if(j, "log_scores", c.log_scores);
    return c;
}

json CampaignConfig::to_json() const {
    json o;
    o["id"] = objective.id;
    o["dim"] = objective.dim;
    if (objective.id == "ripples")
        o["ripples"] = {{"bias", objective.ripples.bias},
                        {"sigma", objective.ripples.sigma},
                        {"k", objective.ripples.k},
                        {"omega", objective.ripples.omega}};
    if (objective.id == "car-following") {
        o["scenario"] = {{"v0", objective.scenario.v0},
                         {"v1", objective.scenario.v1},
                         {"s2", objective.scenario.s2},
                         {"t_brake", objective.scenario.t_brake}};
        const auto& sm = objective.scenario_model;
        o["scenario_model"] = {{"dt", sm.dt},
                               {"horizon", sm.horizon},
                               {"comfort_ttc", sm.comfort_ttc},
                               {"comfort_decel", sm.comfort_decel},
                               {"emergency_ttc", sm.emergency_ttc},
                               {"reaction_delay", sm.reaction_delay},
                               {"change_duration", sm.change_duration},
                               {"min_merge_gap", sm.min_merge_gap},
                               {"ego_brake_decel", sm.ego_brake_decel},
                               {"bv1_decel", sm.bv1_decel}};
    }
    if (objective.id == "external") {
        o["lower"] = objective.lower;
        o["upper"] = objective.upper;
    }

    json j;
    j["objective"] = o;
    if (delta) j["delta"] = *delta;
    j["budget"] = budget;
    j["seed"] = seed;
    j["algorithm"] = to_string(algorithm);
    j["cp"] = cp;
    j["leafsize"] = leafsize;
    j["depth"] = depth;
    j["init_samples"] = init_samples;
    j["beam_width"] = beam_width;
    j["selections_per_treeification"] = selections_per_treeification;
    j["samples_per_selection"] = samples_per_selection;
    if (local_sampler) j["local_sampler"] = to_string(*local_sampler);
    j["density"] = {{"k", density_k}, {"rebuild_interval", rebuild_interval}};
    json e = {{"cadence", eval_cadence}};
    if (!validation_resolution.empty()) e["resolution"] = validation_resolution;
    if (!truth_file.empty()) e["truth_file"] = truth_file;
    j["evaluation"] = e;
    j["repetitions"] = repetitions;
    j["output_dir"] = output_dir;
    j["trust_region"] = {{"init_points", trust_region.init_points},
                         {"thompson_batch", trust_region.thompson_batch},
                         {"local_budget", trust_region.local_budget},
                         {"success_tolerance", trust_region.success_tolerance},
                         {"failure_tolerance", trust_region.failure_tolerance},
                         {"init_scale", trust_region.init_scale},
                         {"shrink_limit", trust_region.shrink_limit},
                         {"max_candidates", trust_region.max_candidates},
                         {"gp_max_points", trust_region.gp_max_points},
                         {"subspace_only", trust_region.subspace_only}};
    j["dump_trees"] = dump_trees;
    j["log_scores"] = log_scores;
    return j;
}

CampaignConfig CampaignConfig::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j = json::parse(in);
    return from_json(j);
}

Objective make_objective(const ObjectiveConfig& oc) {
    if (oc.id == "holder-table") return make_holder_table();
    if (oc.id == "ripples") {
        RipplesParams rp = oc.ripples;
        rp.dim = oc.dim;
        return make_ripples(rp);
    }
    if (oc.id == "car-following") return make_car_following(oc.scenario, oc.scenario_model);
    if (oc.id == "external")
        throw std::invalid_argument("external objective has no in-process function");
    throw std::invalid_argument("unknown objective id: " + oc.id);
}

SearchSpace objective_space(const ObjectiveConfig& oc) {
    if (oc.id == "external") return SearchSpace(oc.lower, oc.upper);
    return make_objective(oc).space;
}

std::vector<int> default_validation_resolution(const ObjectiveConfig& oc) {
    const int dim = objective_space(oc).dim();
    int per_dim = 100;
    if (dim == 3) per_dim = 25;
    if (dim >= 4) per_dim = 12;
    return std::vector<int>(dim, per_dim);
}

} // namespace bbc
