#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "direx/copulas.hpp"
#include "direx/detector.hpp"
#include "direx/directions.hpp"
#include "direx/errors.hpp"
#include "direx/floodcase.hpp"
#include "direx/io.hpp"

namespace {

using direx::DetectionMode;
using nlohmann::json;

DetectionMode parse_mode(const std::string& mode) {
    if (mode == "survival") return DetectionMode::Survival;
    if (mode == "distribution") return DetectionMode::Distribution;
    throw direx::ConfigInvalidError("mode must be 'survival' or 'distribution', got '" + mode + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw direx::IoError("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        throw direx::IoError("write to '" + path + "' failed");
    }
}

// Emits a JSON document with a stable byte layout (sorted keys, fixed indent,
// trailing newline) so reruns with the same seed compare byte-identical.
std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

json direction_to_json(const direx::DirectionVector& u) {
    json arr = json::array();
    for (int i = 0; i < u.dim(); ++i) {
        arr.push_back(u[i]);
    }
    return arr;
}

struct DetectArgs {
    std::string input;
    std::string output;
    std::string summary_path;
    std::string direction = "e";
    std::string mode = "survival";
    double alpha = 0.05;
    std::optional<double> slack;
    bool correlation = false;
};

int run_detect(const DetectArgs& a) {
    direx::Sample sample = direx::load_csv(a.input);
    direx::DirectionVector u = direx::resolve_direction(a.direction, sample, a.correlation);
    direx::DetectionConfig config{a.alpha, u, a.slack, parse_mode(a.mode)};
    direx::DetectionResult result = direx::detect(sample, config);

    std::ofstream out(a.output);
    if (!out) {
        throw direx::IoError("cannot open '" + a.output + "' for writing");
    }
    const auto& names = sample.column_names();
    for (const auto& name : names) {
        out << name << ',';
    }
    out << "orthant_probability,label\n";
    for (int i = 0; i < sample.size(); ++i) {
        for (int j = 0; j < sample.dim(); ++j) {
            out << direx::format_double(sample(i, j)) << ',';
        }
        out << direx::format_double(result.counts.probability(i)) << ','
            << to_string(result.labels[static_cast<size_t>(i)]) << '\n';
    }
    if (!out) {
        throw direx::IoError("write to '" + a.output + "' failed");
    }

    json summary;
    summary["alpha"] = result.alpha;
    summary["slack"] = result.slack;
    summary["mode"] = a.mode;
    summary["direction_spec"] = a.direction;
    summary["direction"] = direction_to_json(u);
    summary["sample_size"] = sample.size();
    summary["counts"] = {{"upper", result.count_of(direx::PointLabel::Upper)},
                         {"quantile", result.count_of(direx::PointLabel::Quantile)},
                         {"lower", result.count_of(direx::PointLabel::Lower)}};
    const std::string text = dump_json(summary);
    if (a.summary_path.empty()) {
        std::cout << text;
    } else {
        write_text(a.summary_path, text);
    }
    return 0;
}

struct SimulateArgs {
    std::string config_path;
    std::string output;
    int count = 1000;
    std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
    direx::JointModel model = direx::default_flood_model();
    if (!a.config_path.empty()) {
        direx::RunConfig cfg = direx::load_run_config(a.config_path);
        if (!cfg.model) {
            throw direx::ConfigInvalidError("'" + a.config_path + "' has no \"model\" section");
        }
        model = *cfg.model;
    }
    direx::Sample sample = direx::sample_joint(model, a.count, a.seed);
    direx::write_csv(a.output, sample);
    return 0;
}

struct PcaArgs {
    std::string input;
    std::string output;
    bool correlation = false;
};

int run_pca(const PcaArgs& a) {
    direx::Sample sample = direx::load_csv(a.input);
    direx::DirectionVector u = direx::first_pca_direction(sample, a.correlation);
    json doc;
    doc["direction"] = direction_to_json(u);
    doc["dim"] = u.dim();
    doc["correlation"] = a.correlation;
    const std::string text = dump_json(doc);
    if (a.output.empty()) {
        std::cout << text;
    } else {
        write_text(a.output, text);
    }
    return 0;
}

struct LevelsetsArgs {
    std::string family = "gumbel";
    std::string orientation = "plain";
    std::string output;
    double alpha = 0.05;
    int grid = 101;
    std::optional<double> rho;
    std::optional<double> theta;
};

int run_levelsets(const LevelsetsArgs& a) {
    direx::CopulaOrientation orient = direx::CopulaOrientation::Plain;
    if (a.orientation == "survival") orient = direx::CopulaOrientation::Survival;
    else if (a.orientation == "rot90") orient = direx::CopulaOrientation::Rot90;
    else if (a.orientation == "rot270") orient = direx::CopulaOrientation::Rot270;
    else if (a.orientation != "plain") {
        throw direx::ConfigInvalidError("orientation must be plain, survival, rot90, or rot270");
    }

    std::optional<direx::CopulaModel> copula;
    if (a.family == "independence") {
        copula = direx::CopulaModel::independence(orient);
    } else if (a.family == "gaussian") {
        if (!a.rho) throw direx::ConfigInvalidError("gaussian copula needs --rho");
        copula = direx::CopulaModel::gaussian(*a.rho, orient);
    } else if (a.family == "frank") {
        if (!a.theta) throw direx::ConfigInvalidError("frank copula needs --theta");
        copula = direx::CopulaModel::frank(*a.theta, orient);
    } else if (a.family == "gumbel") {
        if (!a.theta) throw direx::ConfigInvalidError("gumbel copula needs --theta");
        copula = direx::CopulaModel::gumbel(*a.theta, orient);
    } else {
        throw direx::ConfigInvalidError("family must be independence, gaussian, frank, or gumbel");
    }

    direx::CopulaLevelSets sets = direx::copula_level_sets(*copula, a.alpha, a.grid);
    std::ofstream out(a.output);
    if (!out) {
        throw direx::IoError("cannot open '" + a.output + "' for writing");
    }
    out << "v1,v2,value,region\n";
    auto emit = [&](const std::vector<direx::LevelSetPoint>& pts, const char* region) {
        for (const auto& p : pts) {
            out << direx::format_double(p.v1) << ',' << direx::format_double(p.v2) << ','
                << direx::format_double(p.value) << ',' << region << '\n';
        }
    };
    emit(sets.quantile_band, "band");
    emit(sets.upper, "upper");
    emit(sets.lower, "lower");
    if (!out) {
        throw direx::IoError("write to '" + a.output + "' failed");
    }
    return 0;
}

struct FloodArgs {
    std::string config_path;
    std::string output_dir;
    std::string mode = "survival";
    int replicas = 20;
    int years = 1000;
    double alpha = 0.01;
    std::optional<double> slack;
    std::uint64_t seed = 1;
};

json report_to_json(const direx::EvaluationReport& r) {
    json doc;
    doc["detected"] = r.detected_count;
    doc["critical"] = r.critical_count;
    doc["detected_critical"] = r.detected_critical_count;
    doc["detection_ratio"] = r.detection_ratio;
    doc["true_extremes_ratio"] = r.true_extremes_ratio;
    doc["false_positive_ratio"] = r.false_positive_ratio ? json(*r.false_positive_ratio) : json();
    doc["true_positive_ratio"] = r.true_positive_ratio ? json(*r.true_positive_ratio) : json();
    return doc;
}

int run_flood(const FloodArgs& a) {
    direx::JointModel model = direx::default_flood_model();
    direx::DamSpec dam = direx::default_dam_spec();
    if (!a.config_path.empty()) {
        direx::RunConfig cfg = direx::load_run_config(a.config_path);
        if (cfg.model) model = *cfg.model;
        if (cfg.dam) dam = *cfg.dam;
    }
    direx::ExperimentConfig config;
    config.replicas = a.replicas;
    config.years = a.years;
    config.alpha = a.alpha;
    config.mode = parse_mode(a.mode);
    config.seed = a.seed;
    config.slack_h = a.slack;

    direx::ExperimentSummary summary = direx::run_experiment(model, dam, config);

    std::filesystem::create_directories(a.output_dir);
    for (const auto& rep : summary.replicas) {
        char name[32];
        std::snprintf(name, sizeof name, "replica_%02d.csv", rep.index);
        std::ofstream out(std::filesystem::path(a.output_dir) / name);
        if (!out) {
            throw direx::IoError("cannot open replica CSV in '" + a.output_dir + "' for writing");
        }
        out << "Q,V,L,P_e,P_pca,label_e,label_pca,max_level,class\n";
        for (int i = 0; i < rep.events.size(); ++i) {
            const auto idx = static_cast<size_t>(i);
            out << direx::format_double(rep.events(i, 0)) << ','
                << direx::format_double(rep.events(i, 1)) << ','
                << direx::format_double(rep.events(i, 2)) << ','
                << direx::format_double(rep.detection_classical.counts.probability(i)) << ','
                << direx::format_double(rep.detection_pca.counts.probability(i)) << ','
                << to_string(rep.detection_classical.labels[idx]) << ','
                << to_string(rep.detection_pca.labels[idx]) << ','
                << direx::format_double(rep.outcomes[idx].max_level) << ','
                << to_string(rep.outcomes[idx].category) << '\n';
        }
        if (!out) {
            throw direx::IoError("write of replica CSV in '" + a.output_dir + "' failed");
        }
    }

    json doc;
    doc["config"] = {{"replicas", config.replicas}, {"years", config.years},
                     {"alpha", config.alpha},       {"mode", a.mode},
                     {"seed", config.seed}};
    json reps = json::array();
    for (const auto& rep : summary.replicas) {
        json r;
        r["index"] = rep.index;
        r["pca_direction"] = direction_to_json(rep.pca_direction);
        r["classical"] = report_to_json(rep.report_classical);
        r["pca"] = report_to_json(rep.report_pca);
        reps.push_back(std::move(r));
    }
    doc["replicas"] = std::move(reps);
    auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(); };
    doc["means"] = {{"detection_ratio_classical", summary.mean_detection_ratio_classical},
                    {"detection_ratio_pca", summary.mean_detection_ratio_pca},
                    {"true_extremes_ratio", summary.mean_true_extremes_ratio},
                    {"false_positive_ratio_classical", opt(summary.mean_fpr_classical)},
                    {"false_positive_ratio_pca", opt(summary.mean_fpr_pca)},
                    {"true_positive_ratio_classical", opt(summary.mean_tpr_classical)},
                    {"true_positive_ratio_pca", opt(summary.mean_tpr_pca)}};
    doc["comparison"] = {
        {"fpr_defined_in_both", summary.fpr_defined_in_both},
        {"fpr_pca_below_classical", summary.fpr_pca_below_classical},
        {"detection_ratio_classical_above_pca", summary.detection_ratio_classical_above_pca}};
    write_text((std::filesystem::path(a.output_dir) / "summary.json").string(), dump_json(doc));
    return 0;
}

int fail_with(const std::string& code, const std::string& message) {
    json err;
    err["error"] = {{"code", code}, {"message", message}};
    std::cerr << dump_json(err);
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Directional multivariate extreme detection toolkit"};
    app.require_subcommand(1);

    DetectArgs det;
    CLI::App* detect_cmd = app.add_subcommand("detect", "Label a CSV sample by orthant probability");
    detect_cmd->add_option("--input", det.input, "Input CSV with header")->required();
    detect_cmd->add_option("--output", det.output, "Labeled output CSV")->required();
    detect_cmd->add_option("--summary", det.summary_path, "Summary JSON path (stdout if omitted)");
    detect_cmd->add_option("--alpha", det.alpha, "Quantile level in (0,1)");
    detect_cmd->add_option("--direction", det.direction,
                           "Direction: 'e', '-e', a sign pattern like '+-', 'pca', or comma-separated components");
    detect_cmd->add_option("--mode", det.mode, "survival or distribution");
    detect_cmd->add_option("--slack", det.slack, "Half-width of the quantile band (default 1/(2m))");
    detect_cmd->add_flag("--correlation", det.correlation,
                         "Use the correlation matrix when --direction pca");

    SimulateArgs sim;
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Draw a sample from a joint model");
    simulate_cmd->add_option("--config", sim.config_path,
                             "JSON config with a \"model\" section (default: the reservoir study model)");
    simulate_cmd->add_option("--count", sim.count, "Number of rows to draw");
    simulate_cmd->add_option("--seed", sim.seed, "RNG seed");
    simulate_cmd->add_option("--output", sim.output, "Output CSV path")->required();

    PcaArgs pca;
    CLI::App* pca_cmd = app.add_subcommand("pca", "First principal direction of a CSV sample");
    pca_cmd->add_option("--input", pca.input, "Input CSV with header")->required();
    pca_cmd->add_option("--output", pca.output, "Output JSON path (stdout if omitted)");
    pca_cmd->add_flag("--correlation", pca.correlation, "Use the correlation matrix");

    LevelsetsArgs lvl;
    CLI::App* level_cmd = app.add_subcommand("levelsets", "Classify a unit-square lattice by copula value");
    level_cmd->add_option("--family", lvl.family, "independence, gaussian, frank, or gumbel");
    level_cmd->add_option("--rho", lvl.rho, "Gaussian copula correlation");
    level_cmd->add_option("--theta", lvl.theta, "Frank or Gumbel copula parameter");
    level_cmd->add_option("--orientation", lvl.orientation, "plain, survival, rot90, or rot270");
    level_cmd->add_option("--alpha", lvl.alpha, "Level of the traced quantile curve");
    level_cmd->add_option("--grid", lvl.grid, "Lattice points per axis (>= 100)");
    level_cmd->add_option("--output", lvl.output, "Output CSV path")->required();

    FloodArgs flood;
    CLI::App* flood_cmd = app.add_subcommand("flood", "Reservoir stress experiment over seeded replicas");
    flood_cmd->add_option("--config", flood.config_path, "JSON config with model/dam overrides");
    flood_cmd->add_option("--replicas", flood.replicas, "Replica count");
    flood_cmd->add_option("--years", flood.years, "Events per replica");
    flood_cmd->add_option("--alpha", flood.alpha, "Detection level");
    flood_cmd->add_option("--mode", flood.mode, "survival or distribution");
    flood_cmd->add_option("--slack", flood.slack, "Half-width of the quantile band");
    flood_cmd->add_option("--seed", flood.seed, "Base seed; replica seeds derive from it");
    flood_cmd->add_option("--output-dir", flood.output_dir, "Directory for replica CSVs and summary.json")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            return app.exit(e);  // --help and friends
        }
        return fail_with("CLI_PARSE", e.what());
    }

    try {
        if (detect_cmd->parsed()) return run_detect(det);
        if (simulate_cmd->parsed()) return run_simulate(sim);
        if (pca_cmd->parsed()) return run_pca(pca);
        if (level_cmd->parsed()) return run_levelsets(lvl);
        if (flood_cmd->parsed()) return run_flood(flood);
    } catch (const direx::Error& e) {
        return fail_with(e.code(), e.what());
    } catch (const std::exception& e) {
        return fail_with("INTERNAL", e.what());
    }
    return fail_with("CLI_PARSE", "no subcommand given");
}
