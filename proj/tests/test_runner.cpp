#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "zetaladder/config.hpp"
#include "zetaladder/errors.hpp"
#include "zetaladder/eval_cache.hpp"
#include "zetaladder/runner.hpp"

namespace {

using namespace zl;
namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("zladder-test-" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

double first_column(const std::string& line) { return std::stod(line.substr(0, line.find(','))); }

ExperimentConfig small(int k = 1) {
    ExperimentConfig c;
    c.t_base = 1e4;
    c.k = k;
    return c;
}

RunRecord fake_record(double t, int k) {
    RunRecord r;
    r.config.t_base = t;
    r.config.k = k;
    MetamorphosisReport m;
    m.lhs = 1.0 + k;
    m.rhs = 2.0;
    m.ratio = m.lhs / m.rhs;
    m.d_point.location = t + 1.0 / 3.0;
    m.e_point.location = t + 2.0 / 3.0;
    m.chain.gaps = std::vector<double>(static_cast<std::size_t>(k), t / 10);
    m.diagnostics["gap_mean"] = t / 10;
    m.diagnostics["gap_law_ratio"] = 1.0;
    LocalErrorAudit a;
    a.x_r = t;
    a.h = std::pow(t, 0.25);
    m.local_audits.push_back(a);
    r.report = m;
    return r;
}

TEST(ParseConfig, EmptyDocumentGivesDefaults) {
    const auto c = parse_config("");
    EXPECT_EQ(c.t_base, 1e5);
    EXPECT_EQ(c.theta, 1.0);
    EXPECT_EQ(c.k, 2);
    EXPECT_EQ(c.sigma, 1.5);
    EXPECT_EQ(c.epsilon, 0.1);
    EXPECT_EQ(parse_config("# only a comment\n\n"), ExperimentConfig{});
}

TEST(ParseConfig, ThetaAboveOneIsABoundViolation) {
    try {
        parse_config("k = 1\ntheta = 1.5\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
    }
}

TEST(ParseConfig, RejectsMalformedInput) {
    auto line_of = [](const std::string& text) {
        try {
            parse_config(text);
        } catch (const ParseError& e) {
            return e.line();
        }
        return -1;
    };
    EXPECT_EQ(line_of("k = 2\nwidth = 3\n"), 2);
    EXPECT_EQ(line_of("k = two\n"), 1);
    EXPECT_EQ(line_of("\nk = 2\nk = 3\n"), 3);
    EXPECT_EQ(line_of("sigma\n"), 1);
    EXPECT_EQ(line_of("t_base = 1e4, 1e5\n"), 1);
    EXPECT_EQ(line_of("epsilon = 0.6\nsigma = 1.5\n"), 2);
    EXPECT_EQ(line_of("root_tol = 1e-10\nquad_tol = 1e-8\n"), 2);
    EXPECT_EQ(line_of("t_base = 100\n"), 1);
    EXPECT_EQ(line_of("k = 0\n"), 1);
}

TEST(ParseConfig, SerializationRoundTrips) {
    const std::string source = "  k=3 # three iterates\nsigma = 2\ncache_path = /tmp/some cache\nseed = 7\n";
    const auto once = serialize(parse_config(source));
    EXPECT_EQ(serialize(parse_config(once)), once);
    ExperimentConfig c;
    c.t_base = 123456.789;
    c.theta = 0.3;
    c.quad_tol = 3e-9;
    c.sieve_limit = 12345;
    EXPECT_EQ(parse_config(serialize(c)), c);
    EXPECT_EQ(parse_config(source).cache_path, "/tmp/some cache");
}

TEST(ParseSweep, ExpandsListsInOrder) {
    const auto configs = parse_sweep("t_base = 1e6, 1e4, 1e5\nk = 2, 1\nsigma = 2\n");
    ASSERT_EQ(configs.size(), 6u);
    for (std::size_t i = 1; i < configs.size(); ++i) {
        const auto& a = configs[i - 1];
        const auto& b = configs[i];
        EXPECT_TRUE(a.t_base < b.t_base || (a.t_base == b.t_base && a.k < b.k));
    }
    for (const auto& c : configs) EXPECT_EQ(c.sigma, 2.0);
    EXPECT_THROW(parse_sweep("theta = 0.5, 1.5\n"), ParseError);
}

TEST(Summary, HeaderIsExact) {
    EXPECT_EQ(summary_csv_header(), "T,theta,k,sigma,lhs,rhs,ratio,d,e,gap_mean,gap_law_ratio");
}

TEST(Summary, SweepRowsAreOrderedByHeight) {
    // 4 heights x 3 iterate counts, supplied out of order, one failure
    std::vector<RunRecord> records;
    for (int k : {3, 1, 2})
        for (double t : {1e7, 1e4, 1e6, 1e5}) records.push_back(fake_record(t, k));
    RunRecord failed;
    failed.failed_stage = "ladder";
    records.push_back(failed);
    const auto rows = lines_of(summary_csv(records));
    ASSERT_EQ(rows.size(), 13u);
    EXPECT_EQ(rows[0], summary_csv_header());
    for (std::size_t i = 2; i < rows.size(); ++i) EXPECT_LE(first_column(rows[i - 1]), first_column(rows[i]));
    // twelve significant digits
    EXPECT_NE(rows[1].find("10000.3333333"), std::string::npos);
    EXPECT_EQ(rows[1].find("10000.33333333"), std::string::npos);
}

TEST(RunSuite, CapturesFailuresAndContinues) {
    auto bad = small();
    bad.theta = 3.0;
    const auto records = run_suite({small(1), bad, small(2)}, 1);
    ASSERT_EQ(records.size(), 3u);
    EXPECT_TRUE(records[0].passed());
    EXPECT_FALSE(records[1].succeeded());
    EXPECT_EQ(records[1].failed_stage, "config");
    EXPECT_TRUE(records[2].passed());
    EXPECT_EQ(records[2].config.k, 2);
    EXPECT_GT(records[2].total_seconds, 0.0);
    EXPECT_EQ(records[0].code_version, kCodeVersion);
}

TEST(RunSuite, ParallelMatchesSequential) {
    const std::vector<ExperimentConfig> configs{small(1), small(2)};
    const auto seq = run_suite(configs, 1);
    const auto par = run_suite(configs, 2);
    EXPECT_EQ(summary_csv(seq), summary_csv(par));
}

TEST(Json, RecordRoundTrips) {
    const auto records = run_suite({small(2)}, 1);
    const auto j = to_json(records[0]);
    const auto back = record_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.config, records[0].config);
    ASSERT_TRUE(back.report);
    EXPECT_EQ(back.report->ratio, records[0].report->ratio);
    EXPECT_EQ(back.report->sequences.alphas, records[0].report->sequences.alphas);
    EXPECT_EQ(back.report->chain.segment(2).lo, records[0].report->chain.segment(2).lo);
    EXPECT_THROW(record_from_json(nlohmann::json::parse("{\"format_version\": 1}")), ParseError);
}

TEST(EmitOutputs, WritesSortedPlotData) {
    std::vector<RunRecord> records;
    for (double t : {1e6, 1e4, 1e5}) records.push_back(fake_record(t, 2));
    RunRecord failed;
    failed.failed_stage = "d_point";
    failed.error = "no sign change, \"quoted\"";
    records.push_back(failed);
    const auto dir = scratch_dir("emit");
    const auto files = emit_outputs(records, dir);
    EXPECT_EQ(files.size(), 1u + 4u + 1u + 3u);
    for (const char* name : {"ratio_vs_T.csv", "gaps_vs_T.csv", "local_error_vs_x.csv"}) {
        const auto rows = lines_of(slurp(dir / name));
        ASSERT_GE(rows.size(), 4u) << name;
        for (std::size_t i = 2; i < rows.size(); ++i)
            EXPECT_LE(first_column(rows[i - 1]), first_column(rows[i])) << name;
    }
    EXPECT_TRUE(fs::exists(dir / "runs" / "run-003.json"));
    EXPECT_NE(slurp(dir / "failures.csv").find("d_point"), std::string::npos);
    const auto j = nlohmann::json::parse(slurp(dir / "runs" / "run-000.json"));
    EXPECT_EQ(record_from_json(j).config.t_base, 1e6);
}

TEST(EmitOutputs, UnwritablePathRaises) {
    const auto file = scratch_dir("blocker");
    std::ofstream(file) << "x";
    EXPECT_THROW(emit_outputs({fake_record(1e4, 1)}, file / "sub"), Error);
    EXPECT_THROW(emit_outputs({}, scratch_dir("none")), DomainError);
}

TEST(EvalCache, RoundsArgumentsAndPersists) {
    const auto dir = scratch_dir("cache");
    {
        EvalCache cache(dir);
        cache.store("f", 10000.123456789, 1e-8, 0.1);
        EXPECT_EQ(cache.find("f", 10000.123456789 + 3e-10, 1e-8), 0.1);
        EXPECT_FALSE(cache.find("f", 10000.123456789 + 3e-9, 1e-8));
        EXPECT_FALSE(cache.find("f", 10000.123456789, 1e-9));
        EXPECT_FALSE(cache.find("g", 10000.123456789, 1e-8));
        cache.store("g", 5.0, 1e-8, 1.0 / 3.0);
        cache.save();
    }
    EvalCache reloaded(dir);
    EXPECT_EQ(reloaded.size(), 2u);
    EXPECT_EQ(reloaded.find("g", 5.0, 1e-8), 1.0 / 3.0);
    std::ofstream(dir / "evals.tsv", std::ios::app) << "broken line\n";
    EXPECT_THROW(EvalCache{dir}, ParseError);
}

TEST(EvalCache, ConcurrentReadersAndWriters) {
    EvalCache cache;
    std::vector<std::jthread> pool;
    for (int w = 0; w < 4; ++w)
        pool.emplace_back([&, w] {
            for (int i = 0; i < 2000; ++i) {
                cache.store("f", i, 0.0, i * 2.0);
                const auto hit = cache.find("f", (i * 7 + w) % 2000, 0.0);
                if (hit) EXPECT_EQ(*hit, ((i * 7 + w) % 2000) * 2.0);
            }
        });
    pool.clear();
    EXPECT_EQ(cache.size(), 2000u);
}

TEST(EvalCache, CachedRunsMatchAndAreFaster) {
    ExperimentConfig c;  // T = 1e5, k = 2
    const auto dir = scratch_dir("rerun");
    const auto plain = run_one(c);
    auto timed = [&] {
        EvalCache cache(dir);
        const auto t0 = std::chrono::steady_clock::now();
        auto rec = run_suite({c}, 1, &cache);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return std::pair{rec, s};
    };
    const auto [first, cold] = timed();
    const auto [second, warm] = timed();
    EXPECT_EQ(summary_csv(first), summary_csv(second));
    EXPECT_LE(2.0 * warm, cold);

    const auto& a = *plain.report;
    const auto& b = *second[0].report;
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(x)); };
    EXPECT_TRUE(close(a.lhs, b.lhs));
    EXPECT_TRUE(close(a.rhs, b.rhs));
    EXPECT_TRUE(close(a.ratio, b.ratio));
    EXPECT_TRUE(close(a.d_point.location, b.d_point.location));
    EXPECT_TRUE(close(a.e_point.location, b.e_point.location));
    for (std::size_t i = 0; i < a.sequences.alphas.size(); ++i)
        EXPECT_TRUE(close(a.sequences.alphas[i], b.sequences.alphas[i]));
    for (const auto& [key, v] : a.diagnostics) EXPECT_TRUE(close(v, b.diagnostics.at(key))) << key;
}

TEST(OracleAudit, SeededAndWithinBounds) {
    const auto a = rs_oracle_audit(20, 11);
    const auto b = rs_oracle_audit(20, 11);
    ASSERT_EQ(a.size(), 20u);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].t, b[i].t);
        EXPECT_GE(a[i].t, 1e3);
        EXPECT_LE(a[i].t, 1e7);
        EXPECT_TRUE(a[i].passed()) << a[i].t;
    }
    EXPECT_EQ(oracle_csv_header().substr(0, 9), "t,em_abs,");
}

}  // namespace
