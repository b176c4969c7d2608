#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mmp/bench.hpp"

using namespace mmp;
using namespace mmp::bench;

namespace {

namespace fs = std::filesystem;

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / ("mmp_test_" + name);
    std::ofstream(p) << content;
    return p;
}

Errc load_error(const std::string& content) {
    const auto p = temp_file("bad.json", content);
    try {
        load_instance(p.string());
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return Errc::InvalidConfig;
}

std::string load_message(const std::string& content) {
    const auto p = temp_file("bad.json", content);
    try {
        load_instance(p.string());
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

ResultRow sample_row(std::size_t id, double objective) {
    ResultRow r;
    r.instance_id = id;
    r.algorithm = "brb";
    r.representation = "mmp";
    r.selection = "best";
    r.reduction = "off";
    r.status = "eta-optimal";
    r.objective = objective;
    r.iterations = 123;
    r.peak_regions = 45;
    r.wall_time_s = 0.125;
    r.seed = 987654321;
    return r;
}

void expect_same_rows(const std::vector<ResultRow>& a, const std::vector<ResultRow>& b) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].instance_id, b[i].instance_id);
        EXPECT_EQ(a[i].algorithm, b[i].algorithm);
        EXPECT_EQ(a[i].representation, b[i].representation);
        EXPECT_EQ(a[i].selection, b[i].selection);
        EXPECT_EQ(a[i].reduction, b[i].reduction);
        EXPECT_EQ(a[i].status, b[i].status);
        if (std::isnan(a[i].objective)) EXPECT_TRUE(std::isnan(b[i].objective));
        else EXPECT_EQ(a[i].objective, b[i].objective);
        EXPECT_EQ(a[i].iterations, b[i].iterations);
        EXPECT_EQ(a[i].peak_regions, b[i].peak_regions);
        EXPECT_EQ(a[i].seed, b[i].seed);
    }
}

} // namespace

TEST(LoadInstance, MinimalSingleUser) {
    const auto p = temp_file("k1.json", R"({"schema": "mmp-bench/1", "type": "wsr", "K": 1, "alpha": [1]})");
    const auto inst = load_instance(p.string());
    EXPECT_EQ(inst.initial_box, make_box({0}, {1}));
    EXPECT_NEAR(inst.objective.diagonal(Vec{1.0}), std::log2(101.0), 1e-12);
}

TEST(LoadInstance, BetaShapeNamed) {
    const std::string doc = R"({"schema": "mmp-bench/1", "type": "wsr", "K": 2, "alpha": [1, 1], "beta": [[0, 1]]})";
    EXPECT_EQ(load_error(doc), Errc::ParseError);
    EXPECT_NE(load_message(doc).find("beta"), std::string::npos);
}

TEST(LoadInstance, UnknownType) {
    EXPECT_EQ(load_error(R"({"schema": "mmp-bench/1", "type": "scheduling", "K": 1})"), Errc::ParseError);
}

TEST(LoadInstance, SchemaVersion) {
    EXPECT_EQ(load_error(R"({"schema": "mmp-bench/2", "type": "wsr", "K": 1, "alpha": [1]})"), Errc::SchemaVersionError);
    EXPECT_EQ(load_error(R"({"type": "wsr", "K": 1, "alpha": [1]})"), Errc::ParseError);
}

TEST(LoadInstance, MalformedJsonAndMissingFile) {
    EXPECT_EQ(load_error("{\"schema\": "), Errc::ParseError);
    try {
        load_instance("/nonexistent/instance.json");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IoError);
    }
}

TEST(LoadInstance, OtherProblemTypes) {
    const auto gee = temp_file("gee.json", R"({"schema": "mmp-bench/1", "type": "gee", "K": 1, "alpha": [1],
                                              "phi": [5], "Pc": 1, "B": 1})");
    EXPECT_NEAR(load_instance(gee.string()).objective.diagonal(Vec{1.0}), std::log2(101.0) / 6.0, 1e-12);
    const auto wsee = temp_file("wsee.json", R"({"schema": "mmp-bench/1", "type": "wsee", "K": 2, "alpha": [1, 1],
                                                "phi": [1, 1], "Pc": [1, 2]})");
    EXPECT_EQ(load_instance(wsee.string()).dimension(), 2u);
    const auto aloha = temp_file("aloha.json", R"({"schema": "mmp-bench/1", "type": "aloha", "K": 2, "c": [1, 1]})");
    const auto a = load_instance(aloha.string());
    EXPECT_EQ(a.feasibility_mode, FeasibilityMode::mm_sufficient_only);
    EXPECT_NEAR(a.objective.diagonal(Vec{0.5, 0.5}), 2 * std::log(0.25), 1e-12);
}

TEST(RunBench, ZeroRealizationsRejected) {
    BenchSpec spec;
    spec.realizations = 0;
    try {
        run_bench(spec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::SpecError);
    }
}

TEST(RunBench, SingleSolveFromFile) {
    const auto p = temp_file("single.json", R"({"schema": "mmp-bench/1", "type": "wsr", "K": 1, "alpha": [1],
                                               "sigma2": 0.01, "P": [1]})");
    BenchSpec spec;
    spec.experiment = Experiment::single_solve;
    spec.instance_path = p.string();
    const auto rows = run_bench(spec);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].status, "eta-optimal");
    EXPECT_NEAR(rows[0].objective, std::log2(101.0), 0.01);
}

TEST(RunBench, RowCountsAndOrder) {
    BenchSpec spec;
    spec.K = 2;
    spec.realizations = 3;
    spec.representations = {RateRepresentation::mmp, RateRepresentation::dm};
    spec.selections = {SelectionRule::best_first, SelectionRule::oldest_first};
    const auto rows = run_bench(spec);
    ASSERT_EQ(rows.size(), 12u);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i].instance_id, i / 4);
        EXPECT_EQ(rows[i].status, "eta-optimal");
    }
    EXPECT_EQ(rows[0].representation, "mmp");
    EXPECT_EQ(rows[2].representation, "dm");
    EXPECT_EQ(rows[1].selection, "oldest");
}

TEST(RunBench, ObjectiveNeverExceedsRootBound) {
    BenchSpec spec;
    spec.K = 3;
    spec.realizations = 4;
    spec.seed = 5;
    for (const auto& row : run_bench(spec)) {
        const auto net = problems::generate_channels(3, row.seed);
        const auto p = problems::wsr_problem(net, RateRepresentation::mmp);
        EXPECT_LE(row.objective, bound(p.objective, p.initial_box));
    }
}

TEST(RunBench, ErrorsBecomeRows) {
    const auto p = temp_file("zero_phi_gee.json", R"({"schema": "mmp-bench/1", "type": "gee", "K": 1, "alpha": [1],
                                                     "phi": [0], "Pc": 1})");
    BenchSpec spec;
    spec.experiment = Experiment::single_solve;
    spec.instance_path = p.string();
    spec.eta = 0.01;
    EXPECT_EQ(run_bench(spec).front().status, "eta-optimal");

    const auto bad = temp_file("bad_type.json", R"({"schema": "mmp-bench/1", "type": "nope", "K": 1})");
    spec.instance_path = bad.string();
    const auto rows = run_bench(spec);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].status, "error");
}

TEST(RunBench, GeeCompareAndAloha) {
    BenchSpec spec;
    spec.experiment = Experiment::gee_compare;
    spec.K = 2;
    spec.realizations = 2;
    spec.representations = {RateRepresentation::mmp, RateRepresentation::dm};
    const auto rows = run_bench(spec);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0].algorithm, "brb");
    EXPECT_EQ(rows[1].algorithm, "dinkelbach");
    for (std::size_t i = 0; i < 4; i += 2) EXPECT_LE(std::abs(rows[i].objective - rows[i + 1].objective), 0.02);

    spec.experiment = Experiment::aloha;
    spec.K = 2;
    spec.representations = {RateRepresentation::mmp};
    spec.max_iterations = 100000;
    for (const auto& row : run_bench(spec)) EXPECT_NE(row.status, "error");
}

TEST(WriteCsv, HeaderOnlyForNoRows) {
    std::ostringstream out;
    write_csv({}, out);
    EXPECT_EQ(out.str(), std::string(csv_header) + "\n");
}

TEST(WriteCsv, TwoRowsThreeLines) {
    std::ostringstream out;
    write_csv({sample_row(0, 1.5), sample_row(1, 2.25)}, out);
    const std::string s = out.str();
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
    EXPECT_NE(s.find("0,brb,mmp,best,off,eta-optimal,1.5,123,45,0.125,987654321"), std::string::npos);
}

TEST(WriteCsv, TwelveSignificantDigits) {
    std::ostringstream out;
    write_csv({sample_row(0, 1.0 / 3.0)}, out);
    EXPECT_NE(out.str().find(",0.333333333333,"), std::string::npos);
}

TEST(ResultSerialization, RoundTrip) {
    auto nonfinite = sample_row(2, -std::numeric_limits<double>::infinity());
    nonfinite.status = "infeasible";
    auto err = sample_row(3, std::numeric_limits<double>::quiet_NaN());
    err.status = "error";
    const std::vector<ResultRow> rows{sample_row(0, 6.65821148275), sample_row(1, -0.5), nonfinite, err};

    std::ostringstream csv;
    write_csv(rows, csv);
    std::istringstream csv_in(csv.str());
    expect_same_rows(rows, read_csv(csv_in));

    std::ostringstream js;
    write_json(rows, js);
    expect_same_rows(rows, read_json(json::parse(js.str())));
    const auto doc = json::parse(js.str());
    ASSERT_TRUE(doc.is_array());
    EXPECT_EQ(doc.size(), 4u);
    EXPECT_TRUE(doc[0].contains("peak_regions"));
    EXPECT_TRUE(doc[0].contains("wall_time_s"));
}

TEST(ResultSerialization, IoErrors) {
    try {
        write_csv({}, std::string("/nonexistent/dir/out.csv"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Errc::IoError);
    }
}

TEST(InstanceSeed, DistinctAndStable) {
    EXPECT_EQ(instance_seed(1, 0), instance_seed(1, 0));
    EXPECT_NE(instance_seed(1, 0), instance_seed(1, 1));
    EXPECT_NE(instance_seed(1, 0), instance_seed(2, 0));
}
