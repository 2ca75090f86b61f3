#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "didipw/config.hpp"
#include "didipw/normal.hpp"
#include "didipw/dgp.hpp"
#include "didipw/ingest.hpp"
#include "didipw/rng.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace didipw;

namespace {

VariableMapping small_mapping() {
    VariableMapping m;
    m.country = "country";
    m.year = "year";
    m.outcomes["soda"] = {"soda", false};
    m.age = "age";
    m.sex = "sex";
    m.tv = "tv";
    m.mother_home = "mother";
    m.father_home = "father";
    m.cars = "cars";
    m.computers = "computers";
    m.well_off = "welloff";
    m.bedroom = "bedroom";
    m.school = "school";
    return m;
}

const char* kHeader = "country,year,soda,age,sex,tv,mother,father,cars,computers,welloff,"
                      "bedroom,school";

std::string survey_row(const std::string& country, int year, const std::string& soda,
                       const std::string& age = "13", const std::string& tv = "2") {
    return country + "," + std::to_string(year) + "," + soda + "," + age + ",1," + tv +
           ",1,1,1,2,3,1,sch1";
}

StudyDesign small_design() {
    StudyDesign d;
    d.treatment_country = "HU";
    d.control_country = "HR";
    d.pre_year = 2010;
    d.post_year = 2014;
    return d;
}

std::vector<SurveyRecord> parse_rows(const std::vector<std::string>& lines,
                                     const VariableMapping& m) {
    std::string text = kHeader;
    text += "\n";
    for (const auto& line : lines) {
        text += line;
        text += "\n";
    }
    return load_records(parse_delimited(text), m);
}

} // namespace

TEST_SUITE_BEGIN("ingest");

TEST_CASE("a three-row file loads three records") {
    const auto records = parse_rows({survey_row("HU", 2010, "4"), survey_row("HR", 2010, "3"),
                                     survey_row("HU", 2014, "5")},
                                    small_mapping());
    CHECK(records.size() == 3);
    CHECK(records[0].country == "HU");
    CHECK(*records[0].year == 2010);
    CHECK(*records[0].outcomes.at("soda") == 4.0);
}

TEST_CASE("a missing mapped column is named in the error") {
    VariableMapping m = small_mapping();
    m.country = "country_code"; // not in the header
    CHECK_THROWS_WITH_AS(parse_rows({survey_row("HU", 2010, "4")}, m),
                         doctest::Contains("country_code"), ValidationError);
}

TEST_CASE("sentinels mark values missing; junk is a hard error") {
    const auto records =
        parse_rows({survey_row("HU", 2010, "4", "NA"), survey_row("HU", 2010, "4", "-99"),
                    survey_row("HU", 2010, "", "12")},
                   small_mapping());
    CHECK_FALSE(records[0].covariates.at("age").has_value());
    CHECK_FALSE(records[1].covariates.at("age").has_value());
    CHECK_FALSE(records[2].outcomes.at("soda").has_value());

    CHECK_THROWS_WITH_AS(parse_rows({survey_row("HU", 2010, "4", "twelve")}, small_mapping()),
                         doctest::Contains("age"), ValidationError);
}

TEST_CASE("tab-delimited input and quoted fields parse correctly") {
    const RawTable tab = parse_delimited("a\tb\n1\t2\n", '\t');
    CHECK(tab.header == std::vector<std::string>{"a", "b"});
    CHECK(tab.rows[0] == std::vector<std::string>{"1", "2"});

    const RawTable quoted = parse_delimited("name,value\n\"x, y\",\"he said \"\"hi\"\"\"\n");
    CHECK(quoted.rows[0][0] == "x, y");
    CHECK(quoted.rows[0][1] == "he said \"hi\"");

    CHECK_THROWS_WITH_AS(parse_delimited("a,b\n1\n"), doctest::Contains("line 2"),
                         ValidationError);
    CHECK(csv_escape("plain") == "plain");
    CHECK(csv_escape("a,b") == "\"a,b\"");
}

TEST_CASE("bmi derivation") {
    CHECK(*derive_bmi(60.0, 1.5) == doctest::Approx(26.6666666667));
    CHECK(*derive_bmi(45.0, 1.5) == doctest::Approx(20.0));
    CHECK_FALSE(derive_bmi(60.0, 0.0).has_value());
    CHECK_FALSE(derive_bmi(-1.0, 1.5).has_value());
}

TEST_CASE("bmi scales inversely with squared height") {
    Rng rng(64);
    for (int i = 0; i < 50; ++i) {
        const double w = 30.0 + 60.0 * rng.next_unit();
        const double h = 1.2 + 0.8 * rng.next_unit();
        const double c = 0.5 + rng.next_unit();
        CHECK(*derive_bmi(w, c * h) == doctest::Approx(*derive_bmi(w, h) / (c * c)));
    }
}

TEST_CASE("rows from other countries or years are filtered, not counted as drops") {
    const auto records = parse_rows(
        {survey_row("HU", 2010, "4"), survey_row("HU", 2014, "5"), survey_row("HR", 2010, "3"),
         survey_row("HR", 2014, "2"), survey_row("AT", 2010, "9"), survey_row("HU", 2012, "9")},
        small_mapping());
    const DesignResult result =
        apply_design(records, small_design(), small_mapping(), "soda");
    CHECK(result.exclusions.rows_in_design == 4);
    CHECK(result.exclusions.retained == 4);
    CHECK(result.dataset.size() == 4);
}

TEST_CASE("missing fields drop rows into the documented buckets") {
    std::vector<std::string> lines;
    for (const char* country : {"HU", "HR"}) {
        for (int year : {2010, 2014}) {
            lines.push_back(survey_row(country, year, "4"));
            lines.push_back(survey_row(country, year, "5"));
        }
    }
    lines.push_back(survey_row("HU", 2014, ""));           // missing outcome
    lines.push_back(survey_row("HU", 2014, "4", "NA"));    // missing age (child bucket)
    lines.push_back(survey_row("HU", 2014, "4", "13", "NA")); // missing TV (child bucket)
    lines.push_back("HU,2014,4,13,1,2,1,1,NA,2,3,1,sch1"); // missing cars (household bucket)

    const auto records = parse_rows(lines, small_mapping());
    const DesignResult result =
        apply_design(records, small_design(), small_mapping(), "soda");
    CHECK(result.exclusions.rows_in_design == 12);
    CHECK(result.exclusions.missing_outcome == 1);
    CHECK(result.exclusions.missing_child_fields == 2);
    CHECK(result.exclusions.missing_household_fields == 1);
    CHECK(result.exclusions.retained == 8);
    CHECK(result.exclusions.missing_outcome + result.exclusions.missing_child_fields +
              result.exclusions.missing_household_fields + result.exclusions.retained ==
          result.exclusions.rows_in_design);

    // Re-running ingestion reproduces the counts exactly.
    const DesignResult again =
        apply_design(records, small_design(), small_mapping(), "soda");
    CHECK(again.exclusions.retained == result.exclusions.retained);
    CHECK(again.exclusions.missing_child_fields == result.exclusions.missing_child_fields);
}

TEST_CASE("design assignment sets D and T and builds school-year clusters") {
    const auto records = parse_rows({survey_row("HU", 2014, "4"), survey_row("HR", 2010, "3"),
                                     survey_row("HU", 2010, "5"), survey_row("HR", 2014, "2")},
                                    small_mapping());
    const DesignResult result =
        apply_design(records, small_design(), small_mapping(), "soda");
    const auto& obs = result.dataset.observations;
    CHECK(obs[0].treated == 1);
    CHECK(obs[0].post == 1);
    CHECK(obs[1].treated == 0);
    CHECK(obs[1].post == 0);
    CHECK(obs[0].cluster_id == "sch1_2014");
    CHECK(obs[1].cluster_id == "sch1_2010");
    CHECK(result.dataset.covariate_names == canonical_covariate_keys());
}

TEST_CASE("an empty design cell is a design error") {
    const auto records = parse_rows({survey_row("HU", 2014, "4"), survey_row("HR", 2010, "3"),
                                     survey_row("HR", 2014, "2")},
                                    small_mapping());
    CHECK_THROWS_AS(apply_design(records, small_design(), small_mapping(), "soda"),
                    DesignError);
}

TEST_CASE("synthetic extract round-trips through ingestion") {
    SimConfig cfg;
    cfg.n = 2000;
    cfg.covariate_count = 9;
    cfg.seed = 2024;
    const Generated g = generate(cfg);
    const auto dir = testutil::temp_dir("roundtrip");
    testutil::write_survey_csv(g.dataset, dir / "survey.csv");

    const RunConfig rc = parse_run_config(testutil::survey_config_json());
    const auto records = load_table((dir / "survey.csv").string(), rc.mapping);
    const DesignResult result = apply_design(records, rc.design, rc.mapping, "soda");

    REQUIRE(result.dataset.size() == g.dataset.size());
    CHECK(result.exclusions.retained == g.dataset.size());
    CHECK(result.dataset.cell_counts == g.dataset.cell_counts);
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(result.dataset.observations[i].outcome ==
              doctest::Approx(g.dataset.observations[i].outcome).epsilon(1e-9));
        for (std::size_t j = 0; j < 9; ++j) {
            CHECK(result.dataset.observations[i].covariates[j] ==
                  doctest::Approx(g.dataset.observations[i].covariates[j]).epsilon(1e-9));
        }
    }
}

TEST_CASE("bmi outcome falls back to body measures when the column is empty") {
    VariableMapping m = small_mapping();
    m.outcomes["bmi"] = {"bmi", true};
    m.weight = "weight";
    m.height = "height";
    std::string text = std::string(kHeader) + ",bmi,weight,height\n";
    text += survey_row("HU", 2010, "4") + ",21.5,60,1.5\n"; // bmi present
    text += survey_row("HU", 2014, "4") + ",,60,1.5\n";     // derived: 26.67
    text += survey_row("HR", 2010, "4") + ",,45,1.5\n";     // derived: 20.0
    text += survey_row("HR", 2014, "4") + ",,60,\n";        // missing entirely
    text += survey_row("HR", 2014, "4") + ",,60,1.6\n";
    const auto records = load_records(parse_delimited(text), m);
    const DesignResult result = apply_design(records, small_design(), m, "bmi");
    CHECK(result.exclusions.missing_outcome == 1);
    CHECK(result.dataset.observations[0].outcome == doctest::Approx(21.5));
    CHECK(result.dataset.observations[1].outcome == doctest::Approx(26.6666666667));
    CHECK(result.dataset.observations[2].outcome == doctest::Approx(20.0));
}

TEST_CASE("categorical expansion emits one dummy per non-base level") {
    VariableMapping m = small_mapping();
    m.expand_categorical = {"tv"};
    const auto records = parse_rows(
        {survey_row("HU", 2010, "4", "13", "0"), survey_row("HU", 2014, "4", "13", "1"),
         survey_row("HR", 2010, "4", "13", "2"), survey_row("HR", 2014, "4", "13", "1")},
        m);
    const DesignResult result = apply_design(records, small_design(), m, "soda");
    // tv levels {0,1,2}: base 0, dummies tv=1 and tv=2 in place of tv.
    const auto& names = result.dataset.covariate_names;
    CHECK(names.size() == canonical_covariate_keys().size() + 1);
    CHECK(std::find(names.begin(), names.end(), "tv=1") != names.end());
    CHECK(std::find(names.begin(), names.end(), "tv=2") != names.end());
    CHECK(std::find(names.begin(), names.end(), "tv") == names.end());
}

TEST_CASE("descriptives: identical groups show zero differences and unit p-values") {
    // Mirrored rows: the treated and control groups hold identical values.
    std::vector<Record> rows;
    for (int i = 0; i < 20; ++i) {
        for (int d = 0; d < 2; ++d) {
            Record r;
            r.treated = static_cast<double>(d);
            r.post = (i % 2) ? 1.0 : 0.0;
            r.outcome = static_cast<double>(i % 5);
            r.covariates = {static_cast<double>(i % 3)};
            rows.push_back(std::move(r));
        }
    }
    DesignConfig cfg;
    cfg.covariate_names = {"z"};
    const Dataset ds = build_dataset(rows, cfg);
    const Descriptives d = descriptives(ds, "outcome");
    for (const auto& row : d.rows) {
        CHECK(row.mean_difference == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(row.p_value == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("descriptives reproduce a fixed group contrast") {
    // Treated mean 2.28 vs control mean 2.93 (the well-off style contrast).
    std::vector<Record> rows;
    for (int i = 0; i < 200; ++i) {
        Record r;
        const bool treated = i < 100;
        r.treated = treated ? 1.0 : 0.0;
        r.post = (i % 2) ? 1.0 : 0.0;
        r.outcome = 0.0;
        r.covariates = {treated ? 2.28 + ((i % 2) ? 0.5 : -0.5)
                                : 2.93 + ((i % 2) ? 0.25 : -0.25)};
        rows.push_back(std::move(r));
    }
    DesignConfig cfg;
    cfg.covariate_names = {"welloff"};
    const Descriptives d = descriptives(build_dataset(rows, cfg), "y");
    CHECK(d.rows[0].mean_treated == doctest::Approx(2.28).epsilon(1e-12));
    CHECK(d.rows[0].mean_control == doctest::Approx(2.93).epsilon(1e-12));
    CHECK(d.rows[0].mean_difference == doctest::Approx(-0.65).epsilon(1e-9));
}

TEST_CASE("descriptive moments and p-values match brute-force oracles") {
    Rng rng(808);
    const Dataset ds = testutil::random_dataset(rng, 300, 2);
    const Descriptives d = descriptives(ds, "y");

    std::vector<double> treated, control;
    for (const Observation& o : ds.observations) {
        (o.treated ? treated : control).push_back(o.covariates[0]);
    }
    const auto mt = oracles::mean_var(treated);
    const auto mc = oracles::mean_var(control);
    CHECK(d.rows[0].mean_treated == doctest::Approx(mt.mean).epsilon(1e-10));
    CHECK(d.rows[0].sd_treated == doctest::Approx(std::sqrt(mt.var)).epsilon(1e-10));
    CHECK(d.rows[0].mean_control == doctest::Approx(mc.mean).epsilon(1e-10));

    // Welch statistic recomputed directly.
    const double se = mt.var / treated.size() + mc.var / control.size();
    const double t = (mt.mean - mc.mean) / std::sqrt(se);
    const double df = se * se / (std::pow(mt.var / treated.size(), 2) / (treated.size() - 1) +
                                 std::pow(mc.var / control.size(), 2) / (control.size() - 1));
    const double p = 2.0 * (1.0 - student_t_cdf(std::fabs(t), df));
    CHECK(d.rows[0].p_value == doctest::Approx(p).epsilon(1e-12));
    CHECK(d.n_treated == treated.size());
    CHECK(d.n_control == control.size());
}

TEST_SUITE_END();
