#include "zetaladder/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "zetaladder/errors.hpp"
#include "zetaladder/eval_cache.hpp"
#include "zetaladder/zeta_core.hpp"

namespace zl {

using nlohmann::json;

namespace {

std::string g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

bool config_less(const ExperimentConfig& a, const ExperimentConfig& b) {
    return std::tie(a.t_base, a.theta, a.k, a.sigma) < std::tie(b.t_base, b.theta, b.k, b.sigma);
}

std::vector<const RunRecord*> sorted_successes(const std::vector<RunRecord>& records) {
    std::vector<const RunRecord*> out;
    for (const auto& r : records)
        if (r.succeeded()) out.push_back(&r);
    std::stable_sort(out.begin(), out.end(),
                     [](const RunRecord* a, const RunRecord* b) { return config_less(a->config, b->config); });
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("cannot write " + path.string());
    written.push_back(path);
}

json interval_json(const Interval& i) { return json::array({i.lo, i.hi}); }
Interval interval_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json point_json(const MeanValuePoint& p) {
    return {{"location", p.location},
            {"kind", to_string(p.kind)},
            {"residual", p.residual},
            {"iterate_images", p.iterate_images},
            {"scan_min", p.scan_min},
            {"scan_max", p.scan_max},
            {"scan_points", p.scan_points},
            {"boundary_warning", p.boundary_warning}};
}

MeanValuePoint point_from(const json& j) {
    MeanValuePoint p;
    p.location = j.at("location").get<double>();
    const auto kind = j.at("kind").get<std::string>();
    if (kind == to_string(PointKind::d_point)) p.kind = PointKind::d_point;
    else if (kind == to_string(PointKind::e_point)) p.kind = PointKind::e_point;
    else throw ParseError("unknown point kind '" + kind + "'", 0);
    p.residual = j.at("residual").get<double>();
    p.iterate_images = j.at("iterate_images").get<std::vector<double>>();
    p.scan_min = j.at("scan_min").get<double>();
    p.scan_max = j.at("scan_max").get<double>();
    p.scan_points = j.at("scan_points").get<int>();
    p.boundary_warning = j.at("boundary_warning").get<bool>();
    return p;
}

json config_json(const ExperimentConfig& c) {
    return {{"t_base", c.t_base},         {"theta", c.theta},     {"k", c.k},
            {"sigma", c.sigma},           {"epsilon", c.epsilon}, {"quad_tol", c.quad_tol},
            {"root_tol", c.root_tol},     {"zero_guard", c.zero_guard},
            {"sieve_limit", c.sieve_limit}, {"cache_path", c.cache_path}, {"seed", c.seed}};
}

ExperimentConfig config_from(const json& j) {
    ExperimentConfig c;
    c.t_base = j.at("t_base").get<double>();
    c.theta = j.at("theta").get<double>();
    c.k = j.at("k").get<int>();
    c.sigma = j.at("sigma").get<double>();
    c.epsilon = j.at("epsilon").get<double>();
    c.quad_tol = j.at("quad_tol").get<double>();
    c.root_tol = j.at("root_tol").get<double>();
    c.zero_guard = j.at("zero_guard").get<double>();
    c.sieve_limit = j.at("sieve_limit").get<std::int64_t>();
    c.cache_path = j.at("cache_path").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

json report_json(const MetamorphosisReport& r) {
    const auto& s = r.sequences;
    json chain = {{"base", interval_json(r.chain.base)}, {"gaps", r.chain.gaps}, {"u", r.chain.u}};
    chain["iterates"] = json::array();
    for (const auto& i : r.chain.iterates) chain["iterates"].push_back(interval_json(i));
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    json audits = json::array();
    for (const auto& a : r.local_audits)
        audits.push_back({{"x_r", a.x_r}, {"h", a.h}, {"max_abs_error", a.max_abs_error}, {"bound", a.bound}});
    return {{"sequences",
             {{"alphas", s.alphas},
              {"betas", s.betas},
              {"sigma", s.sigma},
              {"t_base", s.t_base},
              {"theta", s.theta},
              {"k", s.k},
              {"epsilon", s.epsilon}}},
            {"chain", chain},
            {"lhs", r.lhs},
            {"rhs", r.rhs},
            {"ratio", r.ratio},
            {"d_point", point_json(r.d_point)},
            {"e_point", point_json(r.e_point)},
            {"diagnostics", r.diagnostics},
            {"checks", checks},
            {"local_audits", audits},
            {"stage_seconds", r.stage_seconds}};
}

MetamorphosisReport report_from(const json& j) {
    MetamorphosisReport r;
    const auto& s = j.at("sequences");
    r.sequences.alphas = s.at("alphas").get<std::vector<double>>();
    r.sequences.betas = s.at("betas").get<std::vector<double>>();
    r.sequences.sigma = s.at("sigma").get<double>();
    r.sequences.t_base = s.at("t_base").get<double>();
    r.sequences.theta = s.at("theta").get<double>();
    r.sequences.k = s.at("k").get<int>();
    r.sequences.epsilon = s.at("epsilon").get<double>();
    const auto& c = j.at("chain");
    r.chain.base = interval_from(c.at("base"));
    for (const auto& i : c.at("iterates")) r.chain.iterates.push_back(interval_from(i));
    r.chain.gaps = c.at("gaps").get<std::vector<double>>();
    r.chain.u = c.at("u").get<double>();
    r.lhs = j.at("lhs").get<double>();
    r.rhs = j.at("rhs").get<double>();
    r.ratio = j.at("ratio").get<double>();
    r.d_point = point_from(j.at("d_point"));
    r.e_point = point_from(j.at("e_point"));
    r.diagnostics = j.at("diagnostics").get<std::map<std::string, double>>();
    for (const auto& x : j.at("checks"))
        r.checks.push_back({x.at("name").get<std::string>(), x.at("passed").get<bool>(),
                            x.at("detail").get<std::string>()});
    for (const auto& x : j.at("local_audits")) {
        LocalErrorAudit a;
        a.x_r = x.at("x_r").get<double>();
        a.h = x.at("h").get<double>();
        a.max_abs_error = x.at("max_abs_error").get<double>();
        a.bound = x.at("bound").get<double>();
        r.local_audits.push_back(a);
    }
    r.stage_seconds = j.at("stage_seconds").get<std::map<std::string, double>>();
    return r;
}

}  // namespace

RunRecord run_one(const ExperimentConfig& config, EvalCache* cache) {
    RunRecord rec;
    rec.config = config;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        rec.report = run_metamorphosis(config, cache);
        rec.timings = rec.report->stage_seconds;
    } catch (const StageError& e) {
        rec.failed_stage = e.stage();
        rec.error = e.what();
    } catch (const std::exception& e) {
        rec.failed_stage = "unknown";
        rec.error = e.what();
    }
    rec.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rec;
}

std::vector<RunRecord> run_suite(const std::vector<ExperimentConfig>& configs, int parallelism,
                                 EvalCache* cache) {
    std::vector<RunRecord> out(configs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < configs.size(); i = next++) out[i] = run_one(configs[i], cache);
    };
    const auto n = static_cast<std::size_t>(std::max(1, parallelism));
    std::vector<std::jthread> pool;
    for (std::size_t i = 1; i < std::min(n, configs.size()); ++i) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (cache) cache->save();
    return out;
}

std::string summary_csv_header() { return "T,theta,k,sigma,lhs,rhs,ratio,d,e,gap_mean,gap_law_ratio"; }

std::string summary_csv(const std::vector<RunRecord>& records) {
    std::ostringstream os;
    os << summary_csv_header() << '\n';
    for (const RunRecord* r : sorted_successes(records)) {
        const auto& c = r->config;
        const auto& m = *r->report;
        os << g12(c.t_base) << ',' << g12(c.theta) << ',' << c.k << ',' << g12(c.sigma) << ','
           << g12(m.lhs) << ',' << g12(m.rhs) << ',' << g12(m.ratio) << ','
           << g12(m.d_point.location) << ',' << g12(m.e_point.location) << ','
           << g12(m.diagnostics.at("gap_mean")) << ',' << g12(m.diagnostics.at("gap_law_ratio")) << '\n';
    }
    return os.str();
}

json to_json(const RunRecord& r) {
    json j = {{"format_version", r.format_version},
              {"code_version", r.code_version},
              {"config", config_json(r.config)},
              {"failed_stage", r.failed_stage},
              {"error", r.error},
              {"timings", r.timings},
              {"total_seconds", r.total_seconds}};
    j["report"] = r.report ? report_json(*r.report) : json(nullptr);
    return j;
}

RunRecord record_from_json(const json& j) {
    try {
        RunRecord r;
        r.format_version = j.at("format_version").get<int>();
        if (r.format_version != kReportFormatVersion)
            throw ParseError("unsupported report format " + std::to_string(r.format_version), 0);
        r.code_version = j.at("code_version").get<std::string>();
        r.config = config_from(j.at("config"));
        r.failed_stage = j.at("failed_stage").get<std::string>();
        r.error = j.at("error").get<std::string>();
        r.timings = j.at("timings").get<std::map<std::string, double>>();
        r.total_seconds = j.at("total_seconds").get<double>();
        if (!j.at("report").is_null()) r.report = report_from(j.at("report"));
        return r;
    } catch (const json::exception& e) {
        throw ParseError(std::string("run record: ") + e.what(), 0);
    }
}

bool OracleSample::passed() const noexcept {
    return std::abs(std::abs(rs_uncorrected) - em_abs) <= bound_uncorrected &&
           std::abs(std::abs(rs_corrected) - em_abs) <= bound_corrected;
}

std::vector<OracleSample> rs_oracle_audit(int samples, std::uint64_t seed, double lo, double hi) {
    if (!(lo > 0.0 && hi > lo) || samples < 1) throw DomainError("rs_oracle_audit: bad range");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> pick(std::log(lo), std::log(hi));
    std::vector<OracleSample> out;
    for (int i = 0; i < samples; ++i) {
        OracleSample s;
        s.t = std::exp(pick(rng));
        const double tol = std::max(1e-11, 2.0 * euler_maclaurin_noise_floor(0.5, s.t));
        s.em_abs = std::abs(zeta_euler_maclaurin(0.5, s.t, tol).value);
        const auto plain = riemann_siegel_z(s.t, false);
        const auto corr = riemann_siegel_z(s.t, true);
        s.rs_uncorrected = plain.z;
        s.rs_corrected = corr.z;
        s.bound_uncorrected = plain.remainder_bound;
        s.bound_corrected = corr.remainder_bound;
        out.push_back(s);
    }
    return out;
}

std::string oracle_csv_header() {
    return "t,em_abs,rs_uncorrected,rs_corrected,bound_uncorrected,bound_corrected,passed";
}

std::string to_csv_row(const OracleSample& s) {
    return g12(s.t) + ',' + g12(s.em_abs) + ',' + g12(s.rs_uncorrected) + ',' + g12(s.rs_corrected) +
           ',' + g12(s.bound_uncorrected) + ',' + g12(s.bound_corrected) + ',' +
           (s.passed() ? "1" : "0");
}

std::vector<std::filesystem::path> emit_outputs(const std::vector<RunRecord>& records,
                                                const std::filesystem::path& dir) {
    if (records.empty()) throw DomainError("emit_outputs: no records");
    std::vector<std::filesystem::path> written;
    std::error_code ec;
    std::filesystem::create_directories(dir / "runs", ec);
    if (ec) throw Error("cannot create " + (dir / "runs").string() + ": " + ec.message());

    write_file(dir / "summary.csv", summary_csv(records), written);
    for (std::size_t i = 0; i < records.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "run-%03zu.json", i);
        write_file(dir / "runs" / name, to_json(records[i]).dump(2) + "\n", written);
    }

    std::ostringstream failures;
    bool any_failed = false;
    failures << "index,T,theta,k,sigma,stage,error\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (r.succeeded()) continue;
        any_failed = true;
        std::string msg = r.error;
        std::replace(msg.begin(), msg.end(), '"', '\'');
        failures << i << ',' << g12(r.config.t_base) << ',' << g12(r.config.theta) << ','
                 << r.config.k << ',' << g12(r.config.sigma) << ',' << r.failed_stage << ",\"" << msg
                 << "\"\n";
    }
    if (any_failed) write_file(dir / "failures.csv", failures.str(), written);

    const auto ok = sorted_successes(records);
    std::ostringstream ratio, gaps;
    ratio << "T,k,sigma,theta,ratio,lhs,rhs\n";
    gaps << "T,k,r,gap,gap_law_ratio\n";
    for (const RunRecord* r : ok) {
        const auto& c = r->config;
        const auto& m = *r->report;
        ratio << g12(c.t_base) << ',' << c.k << ',' << g12(c.sigma) << ',' << g12(c.theta) << ','
              << g12(m.ratio) << ',' << g12(m.lhs) << ',' << g12(m.rhs) << '\n';
        for (std::size_t i = 0; i < m.chain.gaps.size(); ++i)
            gaps << g12(c.t_base) << ',' << c.k << ',' << i + 1 << ',' << g12(m.chain.gaps[i]) << ','
                 << g12(m.chain.gaps[i] / gap_law_scale(c.t_base)) << '\n';
    }
    write_file(dir / "ratio_vs_T.csv", ratio.str(), written);
    write_file(dir / "gaps_vs_T.csv", gaps.str(), written);

    std::vector<LocalErrorAudit> audits;
    for (const RunRecord* r : ok)
        audits.insert(audits.end(), r->report->local_audits.begin(), r->report->local_audits.end());
    std::stable_sort(audits.begin(), audits.end(),
                     [](const LocalErrorAudit& a, const LocalErrorAudit& b) { return a.x_r < b.x_r; });
    std::ostringstream local;
    local << "x_r,h,max_abs_error,bound\n";
    for (const auto& a : audits)
        local << g12(a.x_r) << ',' << g12(a.h) << ',' << g12(a.max_abs_error) << ',' << g12(a.bound) << '\n';
    write_file(dir / "local_error_vs_x.csv", local.str(), written);
    return written;
}

}  // namespace zl
