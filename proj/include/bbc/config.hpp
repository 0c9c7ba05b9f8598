#pragma once

#include "bbc/objectives.hpp"
#include "bbc/scenario.hpp"
#include "bbc/trust_region.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace bbc {

enum class Algorithm { lambda, lambda_predecessor, random_search, sobol };
enum class LocalSamplerKind { reject_sobol, trust_region };

std::string to_string(Algorithm a);
std::string to_string(LocalSamplerKind k);
Algorithm parse_algorithm(const std::string& s);
LocalSamplerKind parse_local_sampler(const std::string& s);

struct ObjectiveConfig {
    std::string id = "holder-table";  // holder-table | ripples | car-following | external
    int dim = 2;                      // ripples / external dimension
    RipplesParams ripples{};
    ScenarioParams scenario{};
    ScenarioConfig scenario_model{};
    std::vector<double> lower, upper;  // external evaluator domain
};

struct CampaignConfig {
    ObjectiveConfig objective;
    std::optional<double> delta;  // unset: the objective's default threshold
    long budget = 5000;
    std::uint64_t seed = 1;
    Algorithm algorithm = Algorithm::lambda;
    double cp = 1.0;
    int leafsize = 10;
    int depth = 8;
    long init_samples = 256;
    int beam_width = 2;
    int selections_per_treeification = 50;
    int samples_per_selection = 1;
    std::optional<LocalSamplerKind> local_sampler;  // unset: by dimension (<=3 reject)
    int density_k = 0;                              // 0: default by dimension
    int rebuild_interval = 50;
    long eval_cadence = 10;                 // 0 disables the metric series
    std::vector<int> validation_resolution; // empty: default per objective
    std::string truth_file;                 // optional ground-truth labels
    int repetitions = 10;
    std::string output_dir = "out";
    TrustRegionConfig trust_region{};
    bool dump_trees = false;
    bool log_scores = false;

    LocalSamplerKind resolved_local_sampler(int dim) const {
        if (local_sampler) return *local_sampler;
        return dim <= 3 ? LocalSamplerKind::reject_sobol : LocalSamplerKind::trust_region;
    }
    int resolved_density_k(int dim) const {
        return density_k > 0 ? density_k : default_density_k(dim);
    }

    void validate() const;
    static CampaignConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    static CampaignConfig load_file(const std::string& path);
};

// Instantiates the built-in objective named by the config ("external" is not
// in-process and is rejected here).
Objective make_objective(const ObjectiveConfig& oc);

// Domain of any objective id, including "external".
SearchSpace objective_space(const ObjectiveConfig& oc);

std::vector<int> default_validation_resolution(const ObjectiveConfig& oc);

} // namespace bbc
