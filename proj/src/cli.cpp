#include "l1tree/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "l1tree/report.hpp"
#include "l1tree/synth.hpp"

namespace l1tree {

namespace {

using nlohmann::json;

struct RunConfig {
    std::string command;
    std::string data_path;
    std::string schema_path;
    std::vector<std::string> methods;
    std::string threshold = "proportion";
    std::uint64_t seed = 0;
    int folds = 0;
    int jobs = 1;
    std::string out_dir;
    int min_display_count = 10;
    double null_p = 0.5;
    int n_lambda = 100;
    double lambda_eps = 1e-3;
    double tol = 1e-7;
    int max_sweeps = 10000;
    int min_leaf = 10;
    int min_split = 20;
    int max_depth = 30;
};

DecisionConfig resolve_threshold(const RunConfig& cfg, const Dataset& ds) {
    if (cfg.threshold == "proportion") return proportion_threshold(ds);
    if (cfg.threshold.rfind("fixed:", 0) == 0) {
        double v = 0.0;
        try {
            v = std::stod(cfg.threshold.substr(6));
        } catch (const std::exception&) {
            throw ConfigError("bad --threshold value: " + cfg.threshold);
        }
        if (!(v > 0.0 && v < 1.0)) throw ConfigError("--threshold fixed value must be in (0,1)");
        return {v, ThresholdSource::Fixed};
    }
    throw ConfigError("--threshold expects 'proportion' or 'fixed:<value>', got " + cfg.threshold);
}

std::vector<MethodSpec> resolve_methods(const RunConfig& cfg) {
    if (cfg.methods.empty()) throw ConfigError("at least one --method is required");
    std::vector<MethodSpec> specs;
    for (const auto& name : cfg.methods) {
        MethodSpec spec;
        spec.kind = parse_method(name);
        spec.seed = cfg.seed;
        spec.n_lambda = cfg.n_lambda;
        spec.lambda_eps = cfg.lambda_eps;
        spec.fit_options = {cfg.tol, cfg.max_sweeps};
        spec.grow_params = {cfg.min_leaf, cfg.min_split, cfg.max_depth};
        spec.folds = cfg.folds;
        specs.push_back(spec);
    }
    return specs;
}

// Resolved configuration embedded in every report. Execution-only knobs
// (--jobs, --out) are omitted: they cannot change results.
json config_json(const RunConfig& cfg, const std::vector<MethodSpec>& specs) {
    json methods = json::array();
    for (const auto& spec : specs) methods.push_back(spec_to_json(spec));
    return json{{"command", cfg.command},
                {"data", cfg.data_path},
                {"schema", cfg.schema_path},
                {"threshold", cfg.threshold},
                {"seed", cfg.seed},
                {"folds", cfg.folds == 0 ? "auto" : json(cfg.folds)},
                {"min_display_count", cfg.min_display_count},
                {"null_p", cfg.null_p},
                {"methods", methods}};
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << content;
}

void add_common_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--data", cfg.data_path, "cohort CSV")->required();
    cmd->add_option("--schema", cfg.schema_path, "schema file")->required();
    cmd->add_option("--method", cfg.methods,
                    "method (repeatable): l1lr_min, l1lr_1se, tree, prune, l1lr_tree");
    cmd->add_option("--threshold", cfg.threshold, "decision threshold: proportion | fixed:<v>");
    cmd->add_option("--seed", cfg.seed, "random seed (mandatory)")->required();
    cmd->add_option("--folds", cfg.folds, "CV fold count (default: floor(n/10))");
    cmd->add_option("--jobs", cfg.jobs, "concurrent replicates");
    cmd->add_option("--out", cfg.out_dir, "output directory")->required();
    cmd->add_option("--min-display-count", cfg.min_display_count,
                    "stability display filter (markdown only)");
    cmd->add_option("--null-p", cfg.null_p, "binomial test null probability");
    cmd->add_option("--n-lambda", cfg.n_lambda, "lambda grid size");
    cmd->add_option("--lambda-eps", cfg.lambda_eps, "lambda grid ratio");
    cmd->add_option("--tol", cfg.tol, "fit KKT tolerance");
    cmd->add_option("--max-sweeps", cfg.max_sweeps, "fit sweep budget");
    cmd->add_option("--min-leaf", cfg.min_leaf, "minimum leaf size");
    cmd->add_option("--min-split", cfg.min_split, "minimum node size to split");
    cmd->add_option("--max-depth", cfg.max_depth, "maximum tree depth");
}

int cmd_fit(const RunConfig& cfg) {
    Dataset ds = load_csv(cfg.data_path, Schema::parse_file(cfg.schema_path));
    auto specs = resolve_methods(cfg);
    DecisionConfig decision = resolve_threshold(cfg, ds);

    FitReport report;
    report.fingerprint = ds.fingerprint();
    report.n = ds.n;
    report.positives = ds.positives();
    report.decision = decision;
    for (const auto& spec : specs) report.fits.push_back({spec, fit_method(ds, spec)});

    std::filesystem::create_directories(cfg.out_dir);
    std::filesystem::path dir(cfg.out_dir);
    write_file(dir / "fit_report.json", fit_to_json(report, config_json(cfg, specs)).dump(2) + "\n");
    write_file(dir / "fit_report.md", fit_to_markdown(report));
    std::cout << "wrote " << (dir / "fit_report.json").string() << "\n";
    return 0;
}

int cmd_loo_or_compare(const RunConfig& cfg, const std::string& stem) {
    Dataset ds = load_csv(cfg.data_path, Schema::parse_file(cfg.schema_path));
    auto specs = resolve_methods(cfg);
    DecisionConfig decision = resolve_threshold(cfg, ds);

    ComparisonReport report = compare_methods(ds, specs, decision, cfg.jobs, cfg.null_p);

    std::filesystem::create_directories(cfg.out_dir);
    std::filesystem::path dir(cfg.out_dir);
    write_file(dir / (stem + ".json"),
               comparison_to_json(report, config_json(cfg, specs)).dump(2) + "\n");
    write_file(dir / (stem + ".md"), comparison_to_markdown(report, cfg.min_display_count));
    std::cout << "wrote " << (dir / (stem + ".json")).string() << "\n";
    return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir, const std::string& name) {
    SynthSpec spec = load_synth_spec(spec_path);
    Dataset ds = synth_generate(spec);
    RuleSet truth = ground_truth_rules(spec);

    std::filesystem::create_directories(out_dir);
    std::filesystem::path dir(out_dir);
    write_file(dir / (name + ".csv"), ds.canonical_csv());
    write_file(dir / (name + ".schema"), synth_schema(spec).to_text());

    std::string rules_md = "# Ground-truth rules\n\nSeed " + std::to_string(spec.seed) +
                           ", n = " + std::to_string(spec.n) + ", label noise " +
                           format_double(spec.noise) + ".\n\n" + render(truth);
    write_file(dir / (name + "_rules.md"), rules_md);

    json rules_json = json::array();
    for (const auto& rule : truth.rules) {
        json conditions = json::array();
        for (const auto& c : rule.conditions) conditions.push_back(c.describe());
        rules_json.push_back(json{{"class", rule.predicted_class}, {"conditions", conditions}});
    }
    write_file(dir / (name + "_rules.json"),
               json{{"tool", json{{"name", kToolName}, {"version", kToolVersion}}},
                    {"seed", spec.seed},
                    {"n", spec.n},
                    {"noise", spec.noise},
                    {"fingerprint", ds.fingerprint()},
                    {"rules", rules_json}}
                       .dump(2) +
                   "\n");
    std::cout << "wrote " << (dir / (name + ".csv")).string() << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"L1-penalized logistic regression, recursive-partitioning trees and the "
                 "combined l1lr_tree pipeline with leave-one-out evaluation"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);
    app.set_config("--config");
    app.require_subcommand(1);

    RunConfig fit_cfg, loo_cfg, cmp_cfg;
    fit_cfg.command = "fit";
    loo_cfg.command = "loo";
    cmp_cfg.command = "compare";

    CLI::App* fit = app.add_subcommand("fit", "fit methods on the full cohort");
    add_common_options(fit, fit_cfg);
    CLI::App* loo = app.add_subcommand("loo", "leave-one-out evaluation");
    add_common_options(loo, loo_cfg);
    CLI::App* cmp = app.add_subcommand("compare", "side-by-side method comparison");
    add_common_options(cmp, cmp_cfg);

    std::string synth_spec_path, synth_out, synth_name = "cohort";
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic cohort");
    synth->add_option("--spec", synth_spec_path, "synthetic cohort spec file")->required();
    synth->add_option("--out", synth_out, "output directory")->required();
    synth->add_option("--name", synth_name, "output file stem");

    // CLI11 wants argv-style reversed input.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fit->parsed()) return cmd_fit(fit_cfg);
        if (loo->parsed()) return cmd_loo_or_compare(loo_cfg, "loo_report");
        if (cmp->parsed()) return cmd_loo_or_compare(cmp_cfg, "compare_report");
        if (synth->parsed()) return cmd_synth(synth_spec_path, synth_out, synth_name);
        std::cerr << "no subcommand given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}

}  // namespace l1tree
