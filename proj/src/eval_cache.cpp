#include "zetaladder/eval_cache.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "zetaladder/errors.hpp"

namespace zl {

namespace {

std::int64_t slot_of(double arg) { return std::llround(arg / kCacheGranularity); }

std::string hex(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return buf;
}

// FNV-1a, stable across builds
std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class CacheMemo : public EvalMemo {
public:
    CacheMemo(EvalCache& cache, std::string id, double tol)
        : cache_(cache), id_(std::move(id)), tol_(tol) {}
    std::optional<double> find(double t) const override { return cache_.find(id_, t, tol_); }
    void store(double t, double value) override { cache_.store(id_, t, tol_, value); }

private:
    EvalCache& cache_;
    std::string id_;
    double tol_;
};

}  // namespace

EvalCache::EvalCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    const auto file = dir_ / "evals.tsv";
    std::ifstream in(file);
    if (!in) return;
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (n == 1 && line != "# zetaladder eval cache v" + std::to_string(kCacheFormatVersion))
                throw ParseError("unsupported cache header in " + file.string(), n);
            continue;
        }
        // id \t tol \t slot \t value
        std::istringstream ls(line);
        std::string id, tol, slot, value;
        if (!std::getline(ls, id, '\t') || !std::getline(ls, tol, '\t') ||
            !std::getline(ls, slot, '\t') || !std::getline(ls, value))
            throw ParseError("malformed cache entry in " + file.string(), n);
        try {
            values_.emplace(Key{id, std::stoll(slot), std::strtod(tol.c_str(), nullptr)},
                            std::strtod(value.c_str(), nullptr));
        } catch (const std::logic_error&) {
            throw ParseError("malformed cache entry in " + file.string(), n);
        }
    }
}

std::optional<double> EvalCache::find(const std::string& id, double arg, double tol) const {
    std::shared_lock lock(mutex_);
    const auto it = values_.find(Key{id, slot_of(arg), tol});
    if (it == values_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    return it->second;
}

void EvalCache::store(const std::string& id, double arg, double tol, double value) {
    std::unique_lock lock(mutex_);
    values_.emplace(Key{id, slot_of(arg), tol}, value);
}

std::shared_ptr<EvalMemo> EvalCache::memo(std::string id, double tol) {
    return std::make_shared<CacheMemo>(*this, std::move(id), tol);
}

std::filesystem::path EvalCache::ladder_file(const std::string& key) const {
    char name[40];
    std::snprintf(name, sizeof name, "ladder-%016llx.txt",
                  static_cast<unsigned long long>(fnv1a(key)));
    return dir_ / name;
}

std::shared_ptr<const LadderTable> EvalCache::find_ladder(const std::string& key) const {
    {
        std::shared_lock lock(mutex_);
        if (const auto it = ladders_.find(key); it != ladders_.end()) {
            ++hits_;
            return it->second;
        }
    }
    if (dir_.empty()) {
        ++misses_;
        return nullptr;
    }
    std::ifstream in(ladder_file(key));
    if (!in) {
        ++misses_;
        return nullptr;
    }
    auto table = std::make_shared<const LadderTable>(LadderTable::load(in));
    std::unique_lock lock(mutex_);
    ++hits_;
    return ladders_.emplace(key, std::move(table)).first->second;
}

void EvalCache::store_ladder(const std::string& key, const LadderTable& table) {
    auto copy = std::make_shared<const LadderTable>(table);
    std::unique_lock lock(mutex_);
    ladders_[key] = copy;
    if (dir_.empty()) return;
    std::ofstream out(ladder_file(key));
    if (!out) throw Error("cannot write ladder table to " + ladder_file(key).string());
    copy->save(out);
}

void EvalCache::save() const {
    if (dir_.empty()) return;
    std::shared_lock lock(mutex_);
    const auto file = dir_ / "evals.tsv";
    const auto tmp = dir_ / "evals.tsv.tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw Error("cannot write cache file " + tmp.string());
        out << "# zetaladder eval cache v" << kCacheFormatVersion << '\n';
        for (const auto& [key, value] : values_) {
            const auto& [id, slot, tol] = key;
            out << id << '\t' << hex(tol) << '\t' << slot << '\t' << hex(value) << '\n';
        }
    }
    std::filesystem::rename(tmp, file);
}

std::size_t EvalCache::size() const {
    std::shared_lock lock(mutex_);
    return values_.size();
}

}  // namespace zl
