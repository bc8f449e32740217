#include "zetaladder/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "zetaladder/errors.hpp"
#include "zetaladder/spectral_local.hpp"

namespace zl {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// Returns the key whose bound fails, or nullptr.
const char* violation(const ExperimentConfig& c, std::string& why) {
    if (!(c.t_base >= kWorkingFloor)) {
        why = "t_base must be at least " + fmt(kWorkingFloor);
        return "t_base";
    }
    if (!(c.theta >= 0.0 && c.theta <= 1.0)) {
        why = "theta must lie in [0, 1]";
        return "theta";
    }
    if (c.k < 1 || c.k > 16) {
        why = "k must lie in [1, 16]";
        return "k";
    }
    if (!(c.epsilon > 0.0)) {
        why = "epsilon must be positive";
        return "epsilon";
    }
    if (!(c.sigma >= 1.0 + c.epsilon)) {
        why = "sigma must be at least 1 + epsilon";
        return "sigma";
    }
    if (!(c.quad_tol > 0.0) || !(c.root_tol > 0.0)) {
        why = "tolerances must be positive";
        return c.quad_tol > 0.0 ? "root_tol" : "quad_tol";
    }
    if (!(c.quad_tol < 10.0 * c.root_tol)) {
        why = "quad_tol must be below 10 * root_tol";
        return "quad_tol";
    }
    if (!(c.zero_guard > 0.0)) {
        why = "zero_guard must be positive";
        return "zero_guard";
    }
    if (c.sieve_limit < 2) {
        why = "sieve_limit must be at least 2";
        return "sieve_limit";
    }
    return nullptr;
}

struct Entry {
    std::vector<std::string> values;
    int line = 0;
};

using Entries = std::map<std::string, Entry>;

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{"t_base",   "theta",      "k",          "sigma",
                                               "epsilon",  "quad_tol",   "root_tol",   "zero_guard",
                                               "sieve_limit", "cache_path", "seed"};
    return keys;
}

bool is_list_key(const std::string& key) {
    return key == "t_base" || key == "theta" || key == "k" || key == "sigma";
}

Entries read_entries(const std::string& source, bool allow_lists) {
    Entries out;
    std::istringstream in(source);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (const auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
        const std::string text = trim(raw);
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ParseError("expected key = value", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        bool known = false;
        for (const auto& k : known_keys()) known = known || k == key;
        if (!known) throw ParseError("unknown key '" + key + "'", line);
        if (out.count(key)) throw ParseError("duplicate key '" + key + "'", line);
        if (value.empty()) throw ParseError("missing value for '" + key + "'", line);
        Entry e;
        e.line = line;
        if (key == "cache_path") {
            e.values.push_back(value);
        } else {
            std::istringstream items(value);
            std::string item;
            while (std::getline(items, item, ',')) e.values.push_back(trim(item));
            if (e.values.size() > 1 && !(allow_lists && is_list_key(key)))
                throw ParseError("'" + key + "' takes a single value", line);
        }
        out.emplace(key, std::move(e));
    }
    return out;
}

template <class T>
T to_number(const std::string& text, const std::string& key, int line) {
    T v{};
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ParseError("malformed value '" + text + "' for '" + key + "'", line);
    return v;
}

void assign(ExperimentConfig& c, const std::string& key, const std::string& value, int line) {
    if (key == "t_base") c.t_base = to_number<double>(value, key, line);
    else if (key == "theta") c.theta = to_number<double>(value, key, line);
    else if (key == "k") c.k = to_number<int>(value, key, line);
    else if (key == "sigma") c.sigma = to_number<double>(value, key, line);
    else if (key == "epsilon") c.epsilon = to_number<double>(value, key, line);
    else if (key == "quad_tol") c.quad_tol = to_number<double>(value, key, line);
    else if (key == "root_tol") c.root_tol = to_number<double>(value, key, line);
    else if (key == "zero_guard") c.zero_guard = to_number<double>(value, key, line);
    else if (key == "sieve_limit") c.sieve_limit = to_number<std::int64_t>(value, key, line);
    else if (key == "seed") c.seed = to_number<std::uint64_t>(value, key, line);
    else if (key == "cache_path") c.cache_path = value;
}

void check(const ExperimentConfig& c, const Entries& entries) {
    std::string why;
    if (const char* key = violation(c, why)) {
        const auto it = entries.find(key);
        throw ParseError(why, it == entries.end() ? 0 : it->second.line);
    }
}

}  // namespace

void validate(const ExperimentConfig& config) {
    std::string why;
    if (violation(config, why)) throw DomainError("config: " + why);
}

ExperimentConfig parse_config(const std::string& source) {
    const Entries entries = read_entries(source, false);
    ExperimentConfig c;
    for (const auto& [key, e] : entries) assign(c, key, e.values.front(), e.line);
    check(c, entries);
    return c;
}

std::vector<ExperimentConfig> parse_sweep(const std::string& source) {
    const Entries entries = read_entries(source, true);
    ExperimentConfig proto;
    for (const auto& [key, e] : entries)
        if (!is_list_key(key)) assign(proto, key, e.values.front(), e.line);

    auto values_of = [&](const std::string& key, double fallback) {
        std::vector<double> v;
        const auto it = entries.find(key);
        if (it == entries.end()) return std::vector<double>{fallback};
        for (const auto& s : it->second.values) {
            if (key == "k") v.push_back(to_number<int>(s, key, it->second.line));
            else v.push_back(to_number<double>(s, key, it->second.line));
        }
        return v;
    };
    auto ts = values_of("t_base", proto.t_base);
    auto thetas = values_of("theta", proto.theta);
    auto ks = values_of("k", proto.k);
    auto sigmas = values_of("sigma", proto.sigma);
    for (auto* v : {&ts, &thetas, &ks, &sigmas}) std::sort(v->begin(), v->end());

    std::vector<ExperimentConfig> out;
    for (double t : ts)
        for (double th : thetas)
            for (double k : ks)
                for (double s : sigmas) {
                    ExperimentConfig c = proto;
                    c.t_base = t;
                    c.theta = th;
                    c.k = static_cast<int>(k);
                    c.sigma = s;
                    check(c, entries);
                    out.push_back(c);
                }
    return out;
}

std::string serialize(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "t_base = " << fmt(c.t_base) << '\n'
       << "theta = " << fmt(c.theta) << '\n'
       << "k = " << c.k << '\n'
       << "sigma = " << fmt(c.sigma) << '\n'
       << "epsilon = " << fmt(c.epsilon) << '\n'
       << "quad_tol = " << fmt(c.quad_tol) << '\n'
       << "root_tol = " << fmt(c.root_tol) << '\n'
       << "zero_guard = " << fmt(c.zero_guard) << '\n'
       << "sieve_limit = " << c.sieve_limit << '\n'
       << "seed = " << c.seed << '\n';
    if (!c.cache_path.empty()) os << "cache_path = " << c.cache_path << '\n';
    return os.str();
}

std::string run_key(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "T=" << fmt(c.t_base) << ";theta=" << fmt(c.theta) << ";k=" << c.k
       << ";sigma=" << fmt(c.sigma) << ";quad_tol=" << fmt(c.quad_tol)
       << ";root_tol=" << fmt(c.root_tol) << ";sieve=" << c.sieve_limit;
    return os.str();
}

}  // namespace zl
