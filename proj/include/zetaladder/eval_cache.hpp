#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <tuple>

#include "zetaladder/jacobs_ladder.hpp"
#include "zetaladder/quadrature.hpp"

namespace zl {

// Arguments are rounded to this absolute granularity before lookup.
inline constexpr double kCacheGranularity = 1e-9;
inline constexpr int kCacheFormatVersion = 1;

/// Store of expensive evaluations keyed by (function id, rounded argument,
/// tolerance), plus ladder tables keyed by their build parameters.
///
/// With a directory, evaluations persist in <dir>/evals.tsv (written by
/// save()) and each ladder table in its own file written on store.
/// Readers run concurrently; writers are serialized.
class EvalCache {
public:
    EvalCache() = default;
    /// Creates the directory if needed and loads what it holds; ParseError
    /// on a malformed evals file.
    explicit EvalCache(std::filesystem::path dir);

    std::optional<double> find(const std::string& id, double arg, double tol) const;
    void store(const std::string& id, double arg, double tol, double value);

    /// Adapter for ComposedIntegrand::attach_memo.
    std::shared_ptr<EvalMemo> memo(std::string id, double tol);

    std::shared_ptr<const LadderTable> find_ladder(const std::string& key) const;
    void store_ladder(const std::string& key, const LadderTable& table);

    void save() const;

    std::size_t size() const;
    std::size_t hits() const noexcept { return hits_; }
    std::size_t misses() const noexcept { return misses_; }
    const std::filesystem::path& directory() const noexcept { return dir_; }

private:
    using Key = std::tuple<std::string, std::int64_t, double>;

    std::filesystem::path ladder_file(const std::string& key) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::map<Key, double> values_;
    mutable std::map<std::string, std::shared_ptr<const LadderTable>> ladders_;
    mutable std::atomic<std::size_t> hits_{0}, misses_{0};
};

}  // namespace zl
