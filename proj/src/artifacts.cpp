#include "bbc/artifacts.hpp"

#include <cinttypes>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bbc {

namespace fs = std::filesystem;

namespace {
void print_double(std::FILE* f, double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::fputs(buf, f);
}
} // namespace

RecordsWriter::RecordsWriter(const fs::path& path, int dim) {
    f_ = std::fopen(path.string().c_str(), "w");
    if (!f_) throw std::runtime_error("cannot open records file: " + path.string());
    std::fputs("index", f_);
    for (int d = 1; d <= dim; ++d) std::fprintf(f_, ",x%d", d);
    std::fputs(",y,wall_ms\n", f_);
}

RecordsWriter::~RecordsWriter() {
    if (f_) std::fclose(f_);
}

void RecordsWriter::write(long index, const SampleRecord& rec, long wall_ms) {
    std::fprintf(f_, "%ld", index);
    for (double v : rec.x) {
        std::fputc(',', f_);
        print_double(f_, v);
    }
    std::fputc(',', f_);
    print_double(f_, rec.y);
    std::fprintf(f_, ",%ld\n", wall_ms);
    std::fflush(f_);
}

void RecordsWriter::write_truncation_marker(const std::string& why) {
    std::fprintf(f_, "# truncated: %s\n", why.c_str());
    std::fflush(f_);
}

std::vector<SampleRecord> TeeEvaluator::evaluate(std::span<const Point> raw, BudgetState& budget,
                                                 std::vector<long>& wall_ms) {
    const std::size_t ms_before = wall_ms.size();
    auto recs = inner_.evaluate(raw, budget, wall_ms);
    for (std::size_t i = 0; i < recs.size(); ++i)
        writer_.write(next_index_++, recs[i], wall_ms[ms_before + i]);
    return recs;
}

void write_metrics_csv(const fs::path& path, std::span<const Checkpoint> checkpoints) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open metrics file: " + path.string());
    std::fputs("budget,recall,precision,f2\n", f);
    for (const auto& cp : checkpoints) {
        if (cp.skipped) {
            std::fprintf(f, "# skipped budget=%ld (insufficient records)\n", cp.budget);
            continue;
        }
        std::fprintf(f, "%ld,", cp.budget);
        print_double(f, cp.report.recall);
        std::fputc(',', f);
        print_double(f, cp.report.precision);
        std::fputc(',', f);
        print_double(f, cp.report.f2);
        std::fputc('\n', f);
    }
    std::fclose(f);
}

void write_manifest(const fs::path& path, const CampaignConfig& cfg, long records,
                    bool truncated, const std::string& error) {
    nlohmann::json j;
    j["tool"] = "bbcov";
    j["format"] = 1;
    j["config"] = cfg.to_json();
    j["seed"] = cfg.seed;
    j["records"] = records;
    j["truncated"] = truncated;
    if (!error.empty()) j["error"] = error;
    std::ofstream out(path);
    out << j.dump(2) << "\n";
}

std::vector<SampleRecord> read_records_csv(const fs::path& path, int dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open records file: " + path.string());
    std::vector<SampleRecord> out;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ',');  // index
        SampleRecord rec;
        rec.x.resize(dim);
        for (int d = 0; d < dim; ++d) {
            std::getline(ss, cell, ',');
            rec.x[d] = std::stod(cell);
        }
        std::getline(ss, cell, ',');
        rec.y = std::stod(cell);
        out.push_back(std::move(rec));
    }
    return out;
}

void write_truth_file(const fs::path& path, const ValidationSet& truth,
                      const std::string& objective_id) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open truth file: " + path.string());
    const int dim = truth.grid.space.dim();
    std::fputs("# bbcov-truth v1\n", f);
    std::fprintf(f, "# objective=%s\n", objective_id.c_str());
    std::fprintf(f, "# dim=%d\n", dim);
    auto print_list = [&](const char* key, auto&& values) {
        std::fprintf(f, "# %s=", key);
        bool first = true;
        for (auto v : values) {
            if (!first) std::fputc(',', f);
            first = false;
            if constexpr (std::is_same_v<std::decay_t<decltype(v)>, double>)
                print_double(f, v);
            else
                std::fprintf(f, "%d", static_cast<int>(v));
        }
        std::fputc('\n', f);
    };
    print_list("lower", truth.grid.space.lower);
    print_list("upper", truth.grid.space.upper);
    print_list("resolution", truth.grid.resolution);
    std::fputs("# delta=", f);
    print_double(f, truth.delta);
    std::fputc('\n', f);
    for (int d = 1; d <= dim; ++d) std::fprintf(f, "x%d,", d);
    std::fputs("y,critical\n", f);
    for (long i = 0; i < truth.size(); ++i) {
        const Point p = truth.grid.point(i);
        for (double v : p) {
            print_double(f, v);
            std::fputc(',', f);
        }
        print_double(f, truth.values[i]);
        std::fprintf(f, ",%d\n", truth.truth[i] ? 1 : 0);
    }
    std::fclose(f);
}

ValidationSet read_truth_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open truth file: " + path.string());
    std::string line;
    int dim = -1;
    std::vector<double> lower, upper;
    std::vector<int> resolution;
    double delta = 0.0;
    std::vector<double> values;

    auto parse_doubles = [](const std::string& s) {
        std::vector<double> out;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
        return out;
    };

    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2);
            const std::string val = line.substr(eq + 1);
            if (key == "dim") dim = std::stoi(val);
            else if (key == "lower") lower = parse_doubles(val);
            else if (key == "upper") upper = parse_doubles(val);
            else if (key == "resolution") {
                for (double v : parse_doubles(val)) resolution.push_back(static_cast<int>(v));
            } else if (key == "delta") delta = std::stod(val);
            continue;
        }
        if (line.empty() || line[0] == '#') continue;
        if (line.rfind("x1,", 0) == 0) continue;  // column header
        std::stringstream ss(line);
        std::string cell;
        for (int d = 0; d < dim; ++d) std::getline(ss, cell, ',');
        std::getline(ss, cell, ',');
        values.push_back(std::stod(cell));
        // trailing label column recomputed from delta
    }
    if (dim < 1 || lower.empty() || resolution.empty())
        throw std::runtime_error("malformed truth file header: " + path.string());
    return build_validation_set(SearchSpace(lower, upper), resolution, std::move(values), delta);
}

ValidationSet generate_ground_truth(const Objective& objective, std::vector<int> resolution,
                                    double delta, const fs::path& out_path) {
    ValidationSet vs = build_validation_set(objective.space, std::move(resolution),
                                            objective.fn, delta);
    write_truth_file(out_path, vs, objective.id);
    return vs;
}

void write_aggregate_csv(const fs::path& path, const SuiteSummary& summary) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open aggregate file: " + path.string());
    std::fputs("budget,mean_f2,min_f2,max_f2,count\n", f);
    for (std::size_t i = 0; i < summary.budgets.size(); ++i) {
        std::fprintf(f, "%ld,", summary.budgets[i]);
        print_double(f, summary.mean_f2[i]);
        std::fputc(',', f);
        print_double(f, summary.min_f2[i]);
        std::fputc(',', f);
        print_double(f, summary.max_f2[i]);
        std::fprintf(f, ",%d\n", summary.counts[i]);
    }
    std::fclose(f);
}

void dump_tree(const fs::path& path, const PartitionTree& tree) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw std::runtime_error("cannot open tree dump: " + path.string());
    std::fprintf(f, "# nodes=%d leaves=%zu\n", tree.size(), tree.leaves().size());
    for (int i = 0; i < tree.size(); ++i) {
        const TreeNode& n = tree.node(i);
        std::fprintf(f, "node id=%d depth=%d parent=%d n=%ld mean_y=", n.id, n.depth, n.parent,
                     n.stats.n);
        print_double(f, n.stats.mean_y());
        std::fputs(" value=", f);
        print_double(f, n.stats.weighted_value());
        std::fputs(" density=", f);
        print_double(f, n.stats.mean_density());
        if (!n.is_leaf()) {
            std::fprintf(f, " children=(%d,%d) w=(", n.good_child, n.bad_child);
            for (std::size_t d = 0; d < n.separator->w.size(); ++d) {
                if (d) std::fputc(',', f);
                print_double(f, n.separator->w[d]);
            }
            std::fputs(") b=", f);
            print_double(f, n.separator->b);
        }
        std::fputc('\n', f);
    }
    std::fclose(f);
}

} // namespace bbc
