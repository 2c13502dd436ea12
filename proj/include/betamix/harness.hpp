#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "betamix/oracles.hpp"
#include "betamix/processes.hpp"
#include "json.hpp"

namespace betamix {

inline constexpr int kConfigSchemaVersion = 1;

/// Builds a process from its JSON description, e.g.
///   {"type": "two-state", "p": 0.3333, "q": 0.1667}
///   {"type": "even"}            (optional "p", "q" for the hidden chain)
///   {"type": "ar1", "phi": 0.5, "sigma2": 1}
///   {"type": "iid-uniform"}
///   {"type": "markov", "transition": [[...], ...]}
/// Throws std::invalid_argument naming the offending field.
[[nodiscard]] ProcessSpec process_from_json(const nlohmann::json& j);

/// Bin counts per (a, d); unset means "auto" (schedule bandwidth for
/// continuous data, one bin per symbol for discrete data).
struct BinsSetting {
    std::optional<std::size_t> fallback;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> overrides;  // (a, d) -> bins

    [[nodiscard]] std::optional<std::size_t> lookup(std::size_t lag, std::size_t dim) const;
};

struct ExperimentConfig {
    nlohmann::json process_json;
    ProcessSpec process;
    std::size_t n = 1000;
    std::size_t replications = 1;
    std::vector<std::size_t> lags;
    std::vector<std::size_t> dims;
    BinsSetting bins;
    std::uint64_t seed = 0;
    std::size_t workers = 0;  // 0 = default pool size
    double oracle_tolerance = 1e-10;
    std::optional<std::string> output;

    /// Throws std::invalid_argument on replications < 1 or empty lags/dims.
    void validate() const;
};

/// Parses a lag/dim list: a JSON array of counts or a "lo..hi" string.
[[nodiscard]] std::vector<std::size_t> parse_count_list(const nlohmann::json& j, const std::string& field);

/// Throws std::invalid_argument naming the offending field; unknown
/// top-level fields are rejected.
[[nodiscard]] ExperimentConfig config_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json config_to_json(const ExperimentConfig& config);

struct CellStats {
    std::size_t lag = 1;
    std::size_t dim = 1;
    std::size_t bins = 1;
    std::size_t replications = 0;
    double mean = 0.0;
    std::optional<double> sd;  // undefined for a single replication
    std::optional<double> lo;
    std::optional<double> hi;
    std::optional<double> oracle;

    [[nodiscard]] std::optional<double> half_width() const {
        return hi ? std::optional<double>(*hi - mean) : std::nullopt;
    }
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<CellStats> cells;                  // ordered by (d, a)
    std::map<std::size_t, BetaCurve> oracle;       // target beta^d(a) per d, when computable
    std::optional<BetaCurve> bound;                // upper bound on beta(a), when known
    std::optional<std::string> oracle_unavailable; // reason, if no oracle

    [[nodiscard]] const CellStats& cell(std::size_t lag, std::size_t dim) const;
};

/// Simulates `replications` paths (path r seeded by stream_seed(seed, r)),
/// estimates beta^d(a) on each and aggregates mean, sd and the 95% interval
/// mean +- 1.96 sd / sqrt(R). Results do not depend on the worker count.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentConfig& config);

[[nodiscard]] nlohmann::json report_to_json(const ExperimentReport& report);
/// Columns a,d,mean,lo,hi,oracle.
void write_plot_csv(std::ostream& out, const ExperimentReport& report);
/// Minimal line chart: one series of means with interval bars per d plus a
/// dashed oracle (or bound) curve.
void write_plot_svg(std::ostream& out, const ExperimentReport& report);

}  // namespace betamix
