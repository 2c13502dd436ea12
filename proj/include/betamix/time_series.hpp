#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace betamix {

enum class SeriesKind { Continuous, Discrete };

/// Observations X_1..X_n. Discrete series hold symbol indices 0..alphabet-1
/// stored as doubles so both kinds share one code path.
class TimeSeries {
public:
    static TimeSeries continuous(std::vector<double> values);
    static TimeSeries discrete(std::vector<double> symbols, std::size_t alphabet);

    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] SeriesKind kind() const noexcept { return kind_; }
    /// Zero for continuous series.
    [[nodiscard]] std::size_t alphabet() const noexcept { return alphabet_; }
    [[nodiscard]] bool is_discrete() const noexcept { return kind_ == SeriesKind::Discrete; }

private:
    TimeSeries(std::vector<double> values, SeriesKind kind, std::size_t alphabet);

    std::vector<double> values_;
    SeriesKind kind_;
    std::size_t alphabet_;
};

/// Free-form `key=value` pairs carried on the optional `#` line of a series CSV.
using SeriesMetadata = std::map<std::string, std::string>;

/// Single-column CSV: header `value`, then one observation per line. When
/// metadata is non-empty a `# k=v, k=v` line precedes the header. Discrete
/// series always record `kind=discrete, alphabet=K` so they round-trip.
void write_series_csv(std::ostream& out, const TimeSeries& series, const SeriesMetadata& metadata = {});

struct LoadedSeries {
    TimeSeries series;
    SeriesMetadata metadata;
};

/// Throws std::runtime_error naming the offending line on malformed input.
[[nodiscard]] LoadedSeries read_series_csv(std::istream& in);
[[nodiscard]] LoadedSeries read_series_csv_file(const std::string& path);

}  // namespace betamix
