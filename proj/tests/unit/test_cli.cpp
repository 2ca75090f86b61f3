#include <doctest.h>

#include <filesystem>
#include <string>
#include <vector>

#include "didipw/cli.hpp"
#include "didipw/dgp.hpp"
#include "testutil.hpp"

namespace fs = std::filesystem;
using didipw::cli::run;

namespace {

struct Workspace {
    fs::path dir;
    fs::path input;
    fs::path config;

    explicit Workspace(const std::string& tag, int n = 1200, double tau = 1.0,
                       const std::string& extra_estimator = "") {
        dir = testutil::temp_dir(tag);
        didipw::SimConfig cfg;
        cfg.n = n;
        cfg.true_atet = tau;
        cfg.covariate_count = 9;
        cfg.seed = 99;
        const didipw::Generated g = didipw::generate(cfg);
        input = dir / "survey.csv";
        testutil::write_survey_csv(g.dataset, input);
        config = dir / "config.json";
        testutil::write_file(config, testutil::survey_config_json(extra_estimator));
    }

    std::string out(const std::string& name) const {
        return testutil::read_file(dir / "out" / name);
    }
};

int run_cmd(std::vector<std::string> args) {
    return run(args);
}

} // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("estimate recovers the synthetic effect end to end") {
    Workspace ws("cli_estimate");
    const int rc = run_cmd({"estimate", "--input", ws.input.string(), "--config",
                            ws.config.string(), "--bootstrap", "59", "--out-dir",
                            (ws.dir / "out").string()});
    REQUIRE(rc == 0);

    const std::string csv = ws.out("results.csv");
    CHECK(csv.find("soda") != std::string::npos);
    const auto pos = csv.find("soda,");
    const double effect = std::stod(csv.substr(pos + 5));
    CHECK(effect > 0.5);
    CHECK(effect < 1.5);

    CHECK(ws.out("results.txt").find("Standard errors are estimated by bootstrap.") !=
          std::string::npos);
    CHECK(ws.out("manifest.json").find("\"command\": \"estimate\"") != std::string::npos);
    CHECK(ws.out("overlap.txt").find("support warning") != std::string::npos);
    CHECK(ws.out("exclusions.txt").find("retained") != std::string::npos);
}

TEST_CASE("out-of-range trim is an argument error") {
    Workspace ws("cli_badtrim");
    const int rc = run_cmd({"estimate", "--input", ws.input.string(), "--config",
                            ws.config.string(), "--trim", "0.6"});
    CHECK(rc != 0);
}

TEST_CASE("clustered runs flip the footnote") {
    Workspace ws("cli_cluster");
    const int rc = run_cmd({"estimate", "--input", ws.input.string(), "--config",
                            ws.config.string(), "--bootstrap", "59", "--cluster", "school_year",
                            "--out-dir", (ws.dir / "out").string()});
    REQUIRE(rc == 0);
    CHECK(ws.out("results.txt").find("Bootstrapped and clustered standard errors.") !=
          std::string::npos);
}

TEST_CASE("missing input exits nonzero") {
    Workspace ws("cli_noinput");
    const int rc = run_cmd({"estimate", "--input", (ws.dir / "absent.csv").string(), "--config",
                            ws.config.string()});
    CHECK(rc != 0);
}

TEST_CASE("placebo relabels a pre-policy year and keeps the estimate layout") {
    // Two pre-policy waves (2006, 2010) with no effect between them.
    Workspace ws("cli_placebo");
    didipw::SimConfig cfg;
    cfg.n = 1200;
    cfg.true_atet = 0.0;
    cfg.covariate_count = 9;
    cfg.seed = 7;
    const didipw::Generated g = didipw::generate(cfg);
    testutil::write_survey_csv(g.dataset, ws.input, 12, 2006, 2010);

    const int rc = run_cmd({"placebo", "--input", ws.input.string(), "--config",
                            ws.config.string(), "--pre-year", "2006", "--fake-post-year",
                            "2010", "--bootstrap", "59", "--out-dir",
                            (ws.dir / "out").string()});
    REQUIRE(rc == 0);
    const std::string txt = ws.out("results.txt");
    CHECK(txt.find("Effect") != std::string::npos);
    CHECK(txt.find("Number of observations") != std::string::npos);
    CHECK(ws.out("manifest.json").find("\"fake_post_year\": 2010") != std::string::npos);
}

TEST_CASE("placebo refuses years at or after the policy") {
    Workspace ws("cli_placebo_guard");
    const int rc = run_cmd({"placebo", "--input", ws.input.string(), "--config",
                            ws.config.string(), "--pre-year", "2010", "--fake-post-year",
                            "2014"});
    CHECK(rc != 0); // policy_year is 2011 in the test config
}

TEST_CASE("describe writes one row per mapped variable plus sample sizes") {
    Workspace ws("cli_describe");
    const int rc = run_cmd({"describe", "--input", ws.input.string(), "--config",
                            ws.config.string(), "--out-dir", (ws.dir / "out").string()});
    REQUIRE(rc == 0);
    const std::string txt = ws.out("descriptives_soda.txt");
    for (const char* var : {"age", "sex", "tv", "mother_home", "father_home", "cars",
                            "computers", "well_off", "bedroom", "soda"}) {
        CHECK(txt.find(var) != std::string::npos);
    }
    CHECK(txt.find("Number of observations") != std::string::npos);
}

TEST_CASE("describe reports unit p-values for identical groups") {
    const auto dir = testutil::temp_dir("cli_describe_ident");
    // Mirror rows across countries so the groups match exactly.
    std::string csv = "country,year,soda_freq,bmi,age,female,tv_weekday,mother_home,"
                      "father_home,cars,computers,well_off,own_bedroom,weight_kg,height_m,"
                      "school\n";
    for (int i = 0; i < 40; ++i) {
        for (const char* country : {"TRT", "CTL"}) {
            csv += std::string(country) + "," + (i % 2 ? "2014" : "2010") + "," +
                   std::to_string(3 + i % 3) + ",20,13,1,2,1,1,1,2,3,1,60,1.5,sch1\n";
        }
    }
    testutil::write_file(dir / "survey.csv", csv);
    testutil::write_file(dir / "config.json", testutil::survey_config_json());
    const int rc = run_cmd({"describe", "--input", (dir / "survey.csv").string(), "--config",
                            (dir / "config.json").string(), "--out-dir",
                            (dir / "out").string()});
    REQUIRE(rc == 0);
    const std::string txt = testutil::read_file(dir / "out" / "descriptives_soda.txt");
    CHECK(txt.find("1.0000") != std::string::npos);
    CHECK(txt.find("0.00") != std::string::npos); // zero mean differences
}

TEST_CASE("simulate rejects too few replications") {
    const auto dir = testutil::temp_dir("cli_sim_guard");
    const int rc = run_cmd({"simulate", "--reps", "10", "--n", "400", "--out-dir",
                            (dir / "out").string()});
    CHECK(rc != 0);
}

TEST_CASE("simulate writes the summary tables") {
    const auto dir = testutil::temp_dir("cli_sim");
    const int rc = run_cmd({"simulate", "--reps", "50", "--n", "400", "--tau", "1.0",
                            "--bootstrap", "29", "--seed", "3", "--out-dir",
                            (dir / "out").string()});
    REQUIRE(rc == 0);
    const std::string txt = testutil::read_file(dir / "out" / "simulation.txt");
    CHECK(txt.find("mean_bias") != std::string::npos);
    CHECK(txt.find("coverage_95ci") != std::string::npos);
    CHECK(testutil::read_file(dir / "out" / "manifest.json")
              .find("\"command\": \"simulate\"") != std::string::npos);
}

TEST_CASE("same seed twice produces byte-identical outputs") {
    const auto dir = testutil::temp_dir("cli_sim_det");
    const std::vector<std::string> base = {"simulate", "--reps", "50",       "--n",
                                           "400",      "--tau",  "1.0",      "--bootstrap",
                                           "29",       "--seed", "12345"};
    auto with_out = [&](const std::string& out) {
        auto args = base;
        args.push_back("--out-dir");
        args.push_back(out);
        return args;
    };
    REQUIRE(run_cmd(with_out((dir / "a").string())) == 0);
    REQUIRE(run_cmd(with_out((dir / "b").string())) == 0);
    for (const char* name : {"simulation.txt", "simulation.csv", "manifest.json"}) {
        CHECK(testutil::read_file(dir / "a" / name) == testutil::read_file(dir / "b" / name));
    }
}

TEST_SUITE_END();
