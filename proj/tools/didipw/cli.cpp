#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "didipw/atet.hpp"
#include "didipw/config.hpp"
#include "didipw/dgp.hpp"
#include "didipw/inference.hpp"
#include "didipw/ingest.hpp"
#include "didipw/propensity.hpp"
#include "didipw/table.hpp"
#include "didipw/version.hpp"

namespace didipw::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Errors carry the pipeline stage so the exit message names where the run
// died.
struct StageError : std::runtime_error {
    StageError(std::string stage_name, const std::string& message)
        : std::runtime_error(message), stage(std::move(stage_name)) {}
    std::string stage;
};

template <typename Fn>
auto run_stage(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string digest_string(const std::string& bytes) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "fnv1a:%016llx",
                  static_cast<unsigned long long>(fnv1a(bytes)));
    return buf;
}

std::string digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return digest_string(buffer.str());
}

void write_output(const fs::path& out_dir, const std::string& name, const std::string& content) {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw ValidationError("cannot write output file: " + (out_dir / name).string());
    out << content;
}

// Flags that override the config file when given on the command line.
struct EstimatorFlags {
    std::optional<double> trim;
    std::optional<int> bootstrap;
    std::optional<std::string> cluster;
    std::optional<std::int64_t> seed;
    std::optional<int> threads;
    bool percentile_ci = false;
    bool hajek = false;
    bool refit_after_trim = false;

    void apply(DesignConfig& config) const {
        if (trim) config.trim_threshold = *trim;
        if (bootstrap) config.bootstrap_reps = *bootstrap;
        if (cluster) config.cluster_by = *cluster;
        if (seed) config.seed = *seed;
        if (threads) config.max_threads = *threads;
        if (percentile_ci) config.percentile_ci = true;
        if (hajek) config.hajek_normalization = true;
        if (refit_after_trim) config.refit_after_trim = true;
        config.validate();
    }

    static void attach(CLI::App* cmd, EstimatorFlags& flags) {
        cmd->add_option("--trim", flags.trim,
                        "Trimming threshold for extreme propensity scores (default 0.05)")
            ->check(CLI::Range(0.0, 0.4999999999));
        cmd->add_option("--bootstrap", flags.bootstrap,
                        "Bootstrap replications for standard errors (default 1999)")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--cluster", flags.cluster,
                        "Cluster field for the bootstrap (supported: school_year)");
        cmd->add_option("--seed", flags.seed, "RNG seed (default from config, else 0)");
        cmd->add_option("--threads", flags.threads, "Worker threads for bootstrap replicates");
        cmd->add_flag("--percentile-ci", flags.percentile_ci,
                      "Report percentile confidence intervals instead of normal-approximation");
        cmd->add_flag("--hajek", flags.hajek, "Normalize weights within cells (Hajek variant)");
        cmd->add_flag("--refit-after-trim", flags.refit_after_trim,
                      "Refit propensity models on the trimmed sample");
    }
};

void check_cluster_supported(const DesignConfig& config, const VariableMapping& mapping) {
    if (!config.cluster_by) return;
    if (*config.cluster_by != "school_year") {
        throw StageError("args", "unsupported cluster field '" + *config.cluster_by +
                                     "' (supported: school_year)");
    }
    if (mapping.school.empty()) {
        throw StageError("args",
                         "clustering by school_year needs a 'school' column in the mapping");
    }
}

std::string manifest_reference(const std::string& manifest_text) {
    return "# manifest " + digest_string(manifest_text) + "\n";
}

std::string render_overlap(const std::string& outcome, const OverlapDiagnostics& diag) {
    std::ostringstream out;
    out << "overlap diagnostics, outcome " << outcome << " (threshold "
        << format_fixed(diag.threshold, 2) << ")\n";
    out << "cell    min     q05     q25     median  q75     q95     max     trimmed\n";
    for (std::size_t c = 0; c < 4; ++c) {
        const CellProbSummary& s = diag.rho_summary[c];
        out << cell_name(c) << "   ";
        for (double v : {s.min, s.q05, s.q25, s.median, s.q75, s.q95, s.max}) {
            out << format_fixed(v, 4) << "  ";
        }
        out << format_fixed(diag.trimmed_share_by_cell[c], 4) << "\n";
    }
    out << "sum of cell probabilities across rows: [" << format_fixed(diag.rho_sum_min, 4)
        << ", " << format_fixed(diag.rho_sum_max, 4) << "]\n";
    out << "support warning: " << (diag.support_warning ? "yes" : "no") << "\n";
    return out.str();
}

std::string render_exclusions(const std::string& outcome, const ExclusionReport& report) {
    std::ostringstream out;
    out << "sample restrictions, outcome " << outcome << "\n";
    out << "rows in design (countries x years)  " << report.rows_in_design << "\n";
    out << "dropped: missing outcome            " << report.missing_outcome << "\n";
    out << "dropped: missing age/sex/tv/bedroom " << report.missing_child_fields << "\n";
    out << "dropped: missing household fields   " << report.missing_household_fields << "\n";
    out << "retained                            " << report.retained << "\n";
    return out.str();
}

struct EstimateArgs {
    std::string input;
    std::string config_path;
    std::vector<std::string> outcomes;
    std::string out_dir = "out";
    std::optional<std::string> delimiter;
    EstimatorFlags flags;
    // placebo only
    std::optional<int> pre_year;
    std::optional<int> fake_post_year;
};

char resolve_delimiter(const std::string& flag, char fallback) {
    if (flag == "tab") return '\t';
    return flag.empty() ? fallback : flag[0];
}

int run_estimation_command(const std::string& command, const EstimateArgs& args) {
    RunConfig cfg = run_stage("config", [&] { return load_run_config(args.config_path); });
    args.flags.apply(cfg.estimator);
    if (args.delimiter) {
        cfg.delimiter = resolve_delimiter(*args.delimiter, cfg.delimiter);
    }
    check_cluster_supported(cfg.estimator, cfg.mapping);

    if (command == "placebo") {
        const int policy_year = cfg.design.policy_year.value_or(cfg.design.post_year);
        if (*args.fake_post_year >= policy_year) {
            throw StageError("args", "fake post year " + std::to_string(*args.fake_post_year) +
                                         " must precede the policy year " +
                                         std::to_string(policy_year));
        }
        if (*args.pre_year >= *args.fake_post_year) {
            throw StageError("args", "--pre-year must precede --fake-post-year");
        }
        cfg.design.pre_year = *args.pre_year;
        cfg.design.post_year = *args.fake_post_year;
    }

    std::vector<std::string> outcomes = args.outcomes.empty() ? cfg.outcomes : args.outcomes;

    const auto records =
        run_stage("ingest", [&] { return load_table(args.input, cfg.mapping, cfg.delimiter); });

    std::vector<ResultsPanel> panels(1);
    std::string overlap_text;
    std::string exclusions_text;
    for (const std::string& outcome : outcomes) {
        DesignResult design = run_stage("ingest", [&] {
            return apply_design(records, cfg.design, cfg.mapping, outcome);
        });
        exclusions_text += render_exclusions(outcome, design.exclusions) + "\n";

        DesignConfig dc = cfg.estimator;
        dc.outcome_name = outcome;
        dc.covariate_names = design.dataset.covariate_names;

        const PropensityFit fit = run_stage("estimate", [&] {
            return estimate_cell_probabilities(design.dataset);
        });
        overlap_text +=
            render_overlap(outcome, overlap_diagnostics(fit, dc.trim_threshold, dc.trim_rule)) +
            "\n";

        const InferenceResult inference =
            run_stage("inference", [&] { return bootstrap_inference(design.dataset, dc); });
        if (!inference.warning.empty()) {
            std::cerr << "[didipw] warning (" << outcome << "): " << inference.warning << "\n";
        }
        panels[0].rows.push_back({outcome, inference});
    }

    TableFormat fmt;
    fmt.clustered = cfg.estimator.cluster_by.has_value();

    json manifest;
    manifest["command"] = command;
    manifest["version"] = kVersion;
    manifest["input"] = {{"path", args.input}, {"digest", digest_file(args.input)}};
    manifest["config"] = json::parse(run_config_to_json(cfg));
    manifest["outcomes"] = outcomes;
    if (command == "placebo") {
        manifest["placebo"] = {{"pre_year", *args.pre_year},
                               {"fake_post_year", *args.fake_post_year}};
    }
    manifest["outputs"] = {"results.txt", "results.csv", "overlap.txt", "exclusions.txt"};
    const std::string manifest_text = manifest.dump(2) + "\n";
    const std::string ref = manifest_reference(manifest_text);

    const fs::path out_dir(args.out_dir);
    write_output(out_dir, "manifest.json", manifest_text);
    write_output(out_dir, "results.txt", ref + results_table_text(panels, fmt));
    write_output(out_dir, "results.csv", ref + results_table_delimited(panels, ',', fmt));
    write_output(out_dir, "overlap.txt", ref + overlap_text);
    write_output(out_dir, "exclusions.txt", ref + exclusions_text);

    std::cerr << "[didipw] " << command << ": wrote results for " << outcomes.size()
              << " outcome(s) to " << out_dir.string() << "\n";
    return 0;
}

struct DescribeArgs {
    std::string input;
    std::string config_path;
    std::vector<std::string> outcomes;
    std::string out_dir = "out";
    std::optional<std::string> delimiter;
};

int run_describe(const DescribeArgs& args) {
    RunConfig cfg = run_stage("config", [&] { return load_run_config(args.config_path); });
    if (args.delimiter) {
        cfg.delimiter = resolve_delimiter(*args.delimiter, cfg.delimiter);
    }
    const std::vector<std::string> outcomes =
        args.outcomes.empty() ? cfg.outcomes : args.outcomes;

    const auto records =
        run_stage("ingest", [&] { return load_table(args.input, cfg.mapping, cfg.delimiter); });

    json manifest;
    manifest["command"] = "describe";
    manifest["version"] = kVersion;
    manifest["input"] = {{"path", args.input}, {"digest", digest_file(args.input)}};
    manifest["config"] = json::parse(run_config_to_json(cfg));
    manifest["outcomes"] = outcomes;
    json output_names = json::array();
    for (const std::string& outcome : outcomes) {
        output_names.push_back("descriptives_" + outcome + ".txt");
        output_names.push_back("descriptives_" + outcome + ".csv");
    }
    manifest["outputs"] = output_names;
    const std::string manifest_text = manifest.dump(2) + "\n";
    const std::string ref = manifest_reference(manifest_text);

    const fs::path out_dir(args.out_dir);
    write_output(out_dir, "manifest.json", manifest_text);

    for (const std::string& outcome : outcomes) {
        DesignResult design = run_stage("ingest", [&] {
            return apply_design(records, cfg.design, cfg.mapping, outcome);
        });
        const Descriptives d =
            run_stage("describe", [&] { return descriptives(design.dataset, outcome); });
        write_output(out_dir, "descriptives_" + outcome + ".txt",
                     ref + descriptives_table_text(d));
        write_output(out_dir, "descriptives_" + outcome + ".csv",
                     ref + descriptives_table_delimited(d));
    }
    std::cerr << "[didipw] describe: wrote descriptives for " << outcomes.size()
              << " outcome(s) to " << out_dir.string() << "\n";
    return 0;
}

struct SimulateArgs {
    SimConfig sim;
    int reps = 0;
    std::string link = "probit";
    bool cluster = false;
    EstimatorFlags flags;
    std::string out_dir = "out";
};

int run_simulate(const SimulateArgs& args) {
    SimConfig sim = args.sim;
    sim.link = args.link == "logit" ? MembershipLink::logit : MembershipLink::probit;

    DesignConfig estimation;
    args.flags.apply(estimation);
    if (args.cluster) {
        if (sim.school_count <= 0) {
            throw StageError("args", "--cluster needs --schools > 0");
        }
        estimation.cluster_by = "school_year";
    }

    const MonteCarloSummary summary =
        run_stage("simulate", [&] { return monte_carlo(sim, args.reps, estimation); });

    json manifest;
    manifest["command"] = "simulate";
    manifest["version"] = kVersion;
    manifest["sim"] = {
        {"n", sim.n},
        {"tau", sim.true_atet},
        {"group_effect", sim.group_effect},
        {"time_effect", sim.time_effect},
        {"covariates", sim.covariate_count},
        {"selection_strength", sim.selection_strength},
        {"noise_sd", sim.noise_sd},
        {"trend_violation", sim.trend_violation},
        {"anticipation", sim.anticipation},
        {"seed", sim.seed},
        {"link", args.link},
        {"schools", sim.school_count},
        {"replications", args.reps},
    };
    manifest["estimator"] = {
        {"trim", estimation.trim_threshold},
        {"bootstrap", estimation.bootstrap_reps},
        {"cluster", estimation.cluster_by ? json(*estimation.cluster_by) : json(nullptr)},
    };
    manifest["outputs"] = {"simulation.txt", "simulation.csv"};
    const std::string manifest_text = manifest.dump(2) + "\n";
    const std::string ref = manifest_reference(manifest_text);

    const fs::path out_dir(args.out_dir);
    write_output(out_dir, "manifest.json", manifest_text);
    write_output(out_dir, "simulation.txt", ref + simulation_table_text(summary));
    write_output(out_dir, "simulation.csv", ref + simulation_table_delimited(summary));

    std::cerr << "[didipw] simulate: " << args.reps << " replications done, outputs in "
              << out_dir.string() << "\n";
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Semi-parametric difference-in-differences with inverse probability weighting"};
    app.require_subcommand(1);

    EstimateArgs est;
    auto* estimate = app.add_subcommand(
        "estimate", "Estimate the treatment effect with bootstrap standard errors");
    estimate->add_option("--input", est.input, "Delimiter-separated survey extract")
        ->required();
    estimate->add_option("--config", est.config_path, "JSON run configuration")->required();
    estimate->add_option("--outcome", est.outcomes, "Outcome to estimate (repeatable)");
    estimate->add_option("--out-dir", est.out_dir, "Output directory (default ./out)");
    estimate->add_option("--delimiter", est.delimiter, "Field delimiter: ',' or 'tab'");
    EstimatorFlags::attach(estimate, est.flags);

    EstimateArgs pla;
    auto* placebo = app.add_subcommand(
        "placebo", "Re-run the estimation with a fake treatment across two pre-policy years");
    placebo->add_option("--input", pla.input, "Delimiter-separated survey extract")->required();
    placebo->add_option("--config", pla.config_path, "JSON run configuration")->required();
    placebo->add_option("--outcome", pla.outcomes, "Outcome to estimate (repeatable)");
    placebo->add_option("--pre-year", pla.pre_year, "Placebo pre-treatment year")->required();
    placebo->add_option("--fake-post-year", pla.fake_post_year,
                        "Year relabeled as post; must precede the policy year")
        ->required();
    placebo->add_option("--out-dir", pla.out_dir, "Output directory (default ./out)");
    placebo->add_option("--delimiter", pla.delimiter, "Field delimiter: ',' or 'tab'");
    EstimatorFlags::attach(placebo, pla.flags);

    DescribeArgs des;
    auto* describe =
        app.add_subcommand("describe", "Two-group descriptive statistics by treatment status");
    describe->add_option("--input", des.input, "Delimiter-separated survey extract")->required();
    describe->add_option("--config", des.config_path, "JSON run configuration")->required();
    describe->add_option("--outcome", des.outcomes, "Outcome to describe (repeatable)");
    describe->add_option("--out-dir", des.out_dir, "Output directory (default ./out)");
    describe->add_option("--delimiter", des.delimiter, "Field delimiter: ',' or 'tab'");

    SimulateArgs simargs;
    auto* simulate = app.add_subcommand(
        "simulate", "Monte Carlo study on synthetic data with a known treatment effect");
    simulate->add_option("--n", simargs.sim.n, "Observations per replication (default 4000)");
    simulate->add_option("--tau", simargs.sim.true_atet, "True treatment effect (default 1.0)");
    simulate->add_option("--reps", simargs.reps, "Monte Carlo replications (>= 50)")->required();
    simulate->add_option("--seed", simargs.sim.seed, "RNG seed (default 0)");
    simulate->add_option("--covariates", simargs.sim.covariate_count,
                         "Covariate count (default 3)");
    simulate->add_option("--selection", simargs.sim.selection_strength,
                         "Covariate-driven selection strength (default 0.5)");
    simulate->add_option("--noise-sd", simargs.sim.noise_sd, "Outcome noise SD (default 1.0)");
    simulate->add_option("--trend-violation", simargs.sim.trend_violation,
                         "Differential trend added to treated-post outcomes (default 0)");
    simulate->add_option("--anticipation", simargs.sim.anticipation,
                         "Anticipatory shift of treated pre-period outcomes (default 0)");
    simulate->add_option("--group-effect", simargs.sim.group_effect,
                         "Treated-group level shift (default 1.0)");
    simulate->add_option("--time-effect", simargs.sim.time_effect,
                         "Post-period level shift (default 0.5)");
    simulate->add_option("--link", simargs.link, "Membership link: probit or logit")
        ->check(CLI::IsMember({"probit", "logit"}));
    simulate->add_option("--schools", simargs.sim.school_count,
                         "Spread rows over this many schools (0 = singleton clusters)");
    simulate->add_flag("--cluster", simargs.cluster,
                       "Cluster the bootstrap on the school-year cell");
    simulate->add_option("--out-dir", simargs.out_dir, "Output directory (default ./out)");
    simulate->add_option("--trim", simargs.flags.trim, "Trimming threshold (default 0.05)")
        ->check(CLI::Range(0.0, 0.4999999999));
    simulate->add_option("--bootstrap", simargs.flags.bootstrap,
                         "Bootstrap replications (default 1999)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--threads", simargs.flags.threads, "Worker threads");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (app.got_subcommand(estimate)) return run_estimation_command("estimate", est);
        if (app.got_subcommand(placebo)) return run_estimation_command("placebo", pla);
        if (app.got_subcommand(describe)) return run_describe(des);
        if (app.got_subcommand(simulate)) return run_simulate(simargs);
    } catch (const StageError& e) {
        std::cerr << "error [" << e.stage << "]: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

} // namespace didipw::cli
