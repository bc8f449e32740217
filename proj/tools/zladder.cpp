// zladder: command-line front end of the zetaladder library.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include "zetaladder/config.hpp"
#include "zetaladder/errors.hpp"
#include "zetaladder/eval_cache.hpp"
#include "zetaladder/jacobs_ladder.hpp"
#include "zetaladder/runner.hpp"
#include "zetaladder/spectral_local.hpp"

namespace {

using namespace zl;

struct Options {
    std::string config;
    std::string out = "zladder-out";
    std::string cache;
    int parallel = 1;
    double tol = 0.0;
    std::string inspect;
};

std::string read_text(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void apply_overrides(ExperimentConfig& c, const Options& o) {
    if (o.tol > 0.0) {
        c.quad_tol = o.tol;
        c.root_tol = o.tol;
    }
    if (!o.cache.empty()) c.cache_path = o.cache;
    validate(c);
}

std::unique_ptr<EvalCache> open_cache(const std::string& path) {
    if (path.empty()) return nullptr;
    return std::make_unique<EvalCache>(path);
}

void print_record(const RunRecord& r) {
    const auto& c = r.config;
    std::printf("T=%g theta=%g k=%d sigma=%g: ", c.t_base, c.theta, c.k, c.sigma);
    if (!r.succeeded()) {
        std::printf("FAILED in %s: %s\n", r.failed_stage.c_str(), r.error.c_str());
        return;
    }
    const auto& m = *r.report;
    std::printf("lhs=%.12g rhs=%.12g ratio=%.12g (%.1fs)\n", m.lhs, m.rhs, m.ratio, r.total_seconds);
    for (const auto& check : m.checks)
        if (!check.passed) std::printf("  check %s failed: %s\n", check.name.c_str(), check.detail.c_str());
}

int finish(const std::vector<RunRecord>& records, const Options& o, const EvalCache* cache) {
    for (const auto& r : records) print_record(r);
    const auto files = emit_outputs(records, o.out);
    std::printf("wrote %zu files to %s\n", files.size(), o.out.c_str());
    if (cache) std::printf("cache: %zu entries, %zu hits, %zu misses\n", cache->size(), cache->hits(), cache->misses());
    for (const auto& r : records)
        if (!r.passed()) return 1;
    return 0;
}

int cmd_run(const Options& o) {
    auto config = parse_config(read_text(o.config));
    apply_overrides(config, o);
    auto cache = open_cache(config.cache_path);
    const auto records = run_suite({config}, 1, cache.get());
    return finish(records, o, cache.get());
}

int cmd_sweep(const Options& o) {
    std::string text = read_text(o.config);
    if (text.empty()) text = "t_base = 1e4, 1e5, 1e6\nk = 1, 2\n";
    auto configs = parse_sweep(text);
    for (auto& c : configs) apply_overrides(c, o);
    auto cache = open_cache(configs.front().cache_path);
    const auto records = run_suite(configs, o.parallel, cache.get());
    return finish(records, o, cache.get());
}

int cmd_audit(const Options& o) {
    auto config = parse_config(read_text(o.config));
    apply_overrides(config, o);
    std::filesystem::create_directories(o.out);
    bool ok = true;

    const auto samples = rs_oracle_audit(200, config.seed);
    std::ofstream oracle(std::filesystem::path(o.out) / "rs_vs_em.csv");
    if (!oracle) throw Error("cannot write to " + o.out);
    oracle << oracle_csv_header() << '\n';
    int failed = 0;
    for (const auto& s : samples) {
        oracle << to_csv_row(s) << '\n';
        failed += s.passed() ? 0 : 1;
    }
    std::printf("riemann-siegel vs euler-maclaurin: %zu samples, %d outside bounds\n", samples.size(), failed);
    ok = ok && failed == 0;

    std::ofstream local(std::filesystem::path(o.out) / "local_audit.csv");
    local << local_audit_csv_header() << '\n';
    for (double x : {1e4, 1e5, 1e6}) {
        const auto audit = audit_local_window(x, std::pow(x, 0.25));
        local << to_csv_row(audit) << '\n';
        std::printf("local window x=%g: max error %.3g, bound %.3g %s\n", x, audit.max_abs_error,
                    audit.bound, audit.passed() ? "ok" : "FAILED");
        ok = ok && audit.passed();
    }
    return ok ? 0 : 1;
}

void describe(const LadderTable& t) {
    std::printf("span [%.12g, %.12g], phi [%.12g, %.12g]\n", t.t_low(), t.t_high(), t.phi_low(), t.phi_high());
    std::printf("nodes %zu, panel width %.6g, panels per node %d, panel limit %.12g\n", t.t_grid().size(),
                t.panel_width(), t.panels_per_node(), t.panel_limit());
    std::printf("tol %.3g, worst audited interval error %.3g, table error estimate %.3g\n",
                t.quadrature_tol(), t.worst_interval_error(), t.error_estimate());
}

int cmd_ladder(const Options& o) {
    if (!o.inspect.empty()) {
        std::ifstream in(o.inspect);
        if (!in) throw Error("cannot read " + o.inspect);
        describe(LadderTable::load(in));
        return 0;
    }
    auto config = parse_config(read_text(o.config));
    apply_overrides(config, o);
    const double u = u_of_t_theta(config.t_base, config.theta);
    const auto table = build_ladder(config.t_base, ladder_span_estimate(config.t_base, u, config.k),
                                    10.0 * config.quad_tol);
    describe(table);
    const auto chain = reverse_iterates(table, config.t_base, u, config.k);
    for (int r = 0; r <= chain.k(); ++r) {
        const auto& s = chain.segment(r);
        std::printf("segment %d: [%.12g, %.12g] length %.6g", r, s.lo, s.hi, s.length());
        if (r > 0) std::printf(" gap/law %.6g", chain.gaps[r - 1] / gap_law_scale(config.t_base));
        std::printf("\n");
    }
    std::filesystem::create_directories(o.out);
    const auto path = std::filesystem::path(o.out) / "ladder.txt";
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    table.save(out);
    std::printf("table saved to %s\n", path.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Jacob's ladder experiments on the Riemann zeta function"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "key = value configuration file");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--tol", o.tol, "sets both quad_tol and root_tol");
    };
    auto* run = app.add_subcommand("run", "one configuration");
    add_common(run);
    run->add_option("--cache", o.cache, "evaluation cache directory");
    auto* sweep = app.add_subcommand("sweep", "grid of configurations");
    add_common(sweep);
    sweep->add_option("--cache", o.cache, "evaluation cache directory");
    sweep->add_option("--parallel", o.parallel, "concurrent runs")->check(CLI::PositiveNumber);
    auto* audit = app.add_subcommand("audit", "Riemann-Siegel and local-window validation");
    add_common(audit);
    auto* ladder = app.add_subcommand("ladder", "build or inspect a ladder table");
    add_common(ladder);
    ladder->add_option("--inspect", o.inspect, "describe a saved table instead of building one");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*run) return cmd_run(o);
        if (*sweep) return cmd_sweep(o);
        if (*audit) return cmd_audit(o);
        return cmd_ladder(o);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "zladder: %s\n", e.what());
        return 2;
    }
}
