#include "betamix/time_series.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace betamix {

TimeSeries::TimeSeries(std::vector<double> values, SeriesKind kind, std::size_t alphabet)
    : values_(std::move(values)), kind_(kind), alphabet_(alphabet) {
    if (values_.empty()) {
        throw std::invalid_argument("TimeSeries: series must hold at least one observation");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        const double v = values_[i];
        if (!std::isfinite(v)) {
            throw std::invalid_argument("TimeSeries: non-finite value at index " + std::to_string(i));
        }
        if (kind_ == SeriesKind::Discrete &&
            (v < 0.0 || v != std::floor(v) || v >= static_cast<double>(alphabet_))) {
            throw std::invalid_argument("TimeSeries: symbol outside alphabet at index " + std::to_string(i));
        }
    }
}

TimeSeries TimeSeries::continuous(std::vector<double> values) {
    return TimeSeries(std::move(values), SeriesKind::Continuous, 0);
}

TimeSeries TimeSeries::discrete(std::vector<double> symbols, std::size_t alphabet) {
    if (alphabet < 1) {
        throw std::invalid_argument("TimeSeries: alphabet must be non-empty");
    }
    return TimeSeries(std::move(symbols), SeriesKind::Discrete, alphabet);
}

void write_series_csv(std::ostream& out, const TimeSeries& series, const SeriesMetadata& metadata) {
    SeriesMetadata meta = metadata;
    if (series.is_discrete()) {
        meta["kind"] = "discrete";
        meta["alphabet"] = std::to_string(series.alphabet());
    }
    if (!meta.empty()) {
        out << "#";
        bool first = true;
        for (const auto& [k, v] : meta) {
            out << (first ? " " : ", ") << k << '=' << v;
            first = false;
        }
        out << '\n';
    }
    out << "value\n";
    char buf[64];
    for (double v : series.values()) {
        auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.write(buf, end - buf);
        out << '\n';
    }
}

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

SeriesMetadata parse_metadata(std::string_view line) {
    SeriesMetadata meta;
    std::stringstream ss{std::string(line)};
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) continue;
        meta[trim(std::string_view(item).substr(0, eq))] = trim(std::string_view(item).substr(eq + 1));
    }
    return meta;
}

}  // namespace

LoadedSeries read_series_csv(std::istream& in) {
    SeriesMetadata meta;
    std::vector<double> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            auto m = parse_metadata(std::string_view(t).substr(1));
            meta.insert(m.begin(), m.end());
            continue;
        }
        if (!header_seen) {
            if (t != "value") {
                throw std::runtime_error("series csv line " + std::to_string(line_no) +
                                         ": expected header `value`, got `" + t + "`");
            }
            header_seen = true;
            continue;
        }
        double v = 0.0;
        const char* first = t.data();
        const char* last = t.data() + t.size();
        if (*first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc() || ptr != last) {
            throw std::runtime_error("series csv line " + std::to_string(line_no) + ": field `value` is not a number: `" +
                                     t + "`");
        }
        values.push_back(v);
    }
    if (!header_seen) throw std::runtime_error("series csv: missing header `value`");
    if (values.empty()) throw std::runtime_error("series csv: no observations");

    if (auto it = meta.find("kind"); it != meta.end() && it->second == "discrete") {
        const auto a = meta.find("alphabet");
        if (a == meta.end()) throw std::runtime_error("series csv: discrete series missing field `alphabet`");
        std::size_t alphabet = 0;
        auto [p, ec] = std::from_chars(a->second.data(), a->second.data() + a->second.size(), alphabet);
        if (ec != std::errc() || alphabet == 0) {
            throw std::runtime_error("series csv: field `alphabet` is not a positive integer");
        }
        try {
            return {TimeSeries::discrete(std::move(values), alphabet), std::move(meta)};
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(std::string("series csv: ") + e.what());
        }
    }
    try {
        return {TimeSeries::continuous(std::move(values)), std::move(meta)};
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("series csv: ") + e.what());
    }
}

LoadedSeries read_series_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open series file `" + path + "`");
    return read_series_csv(in);
}

}  // namespace betamix
