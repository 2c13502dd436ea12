#include "betamix/harness.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "betamix/estimator.hpp"
#include "betamix/format.hpp"
#include "betamix/numerics.hpp"
#include "betamix/parallel.hpp"
#include "betamix/rng.hpp"

namespace betamix {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw std::invalid_argument("field `" + field + "`: " + why);
}

double number_field(const json& j, const std::string& key, const std::string& path, std::optional<double> fallback) {
    if (!j.contains(key)) {
        if (fallback) return *fallback;
        bad_field(path + key, "is required");
    }
    if (!j[key].is_number()) bad_field(path + key, "must be a number");
    return j[key].get<double>();
}

std::size_t count_value(const json& v, const std::string& field) {
    if (!v.is_number_integer() || v.get<long long>() < 0) bad_field(field, "must be a non-negative integer");
    return v.get<std::size_t>();
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    for (const auto& [key, value] : j.items()) {
        if (!allowed.contains(key)) bad_field(path + key, "is not a recognised field");
    }
}

}  // namespace

ProcessSpec process_from_json(const json& j) {
    if (!j.is_object()) bad_field("process", "must be an object");
    if (!j.contains("type") || !j["type"].is_string()) bad_field("process.type", "must be a string");
    const std::string type = j["type"].get<std::string>();
    const std::string p = "process.";

    ProcessSpec spec;
    if (type == "two-state") {
        reject_unknown(j, {"type", "p", "q"}, p);
        spec = two_state_chain(number_field(j, "p", p, 1.0 / 3.0), number_field(j, "q", p, 1.0 / 6.0));
    } else if (type == "even") {
        reject_unknown(j, {"type", "p", "q"}, p);
        spec = even_process_spec(number_field(j, "p", p, 0.5), number_field(j, "q", p, 1.0));
    } else if (type == "ar1") {
        reject_unknown(j, {"type", "phi", "sigma2"}, p);
        spec = Ar1{number_field(j, "phi", p, 0.5), number_field(j, "sigma2", p, 1.0)};
    } else if (type == "iid-uniform") {
        reject_unknown(j, {"type"}, p);
        spec = IidUniform{};
    } else if (type == "markov") {
        reject_unknown(j, {"type", "transition"}, p);
        if (!j.contains("transition") || !j["transition"].is_array() || j["transition"].empty()) {
            bad_field("process.transition", "must be a non-empty array of rows");
        }
        const auto& rows = j["transition"];
        const auto k = static_cast<Eigen::Index>(rows.size());
        FiniteMarkovChain chain;
        chain.transition.resize(k, k);
        for (Eigen::Index r = 0; r < k; ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != k) {
                bad_field("process.transition[" + std::to_string(r) + "]", "must have one entry per state");
            }
            for (Eigen::Index c = 0; c < k; ++c) {
                if (!row[static_cast<std::size_t>(c)].is_number()) {
                    bad_field("process.transition[" + std::to_string(r) + "][" + std::to_string(c) + "]",
                              "must be a number");
                }
                chain.transition(r, c) = row[static_cast<std::size_t>(c)].get<double>();
            }
        }
        spec = std::move(chain);
    } else {
        bad_field("process.type", "unknown process `" + type + "`");
    }
    try {
        validate(spec);
    } catch (const std::invalid_argument& e) {
        bad_field("process", e.what());
    }
    return spec;
}

std::optional<std::size_t> BinsSetting::lookup(std::size_t lag, std::size_t dim) const {
    if (auto it = overrides.find({lag, dim}); it != overrides.end()) return it->second;
    return fallback;
}

void ExperimentConfig::validate() const {
    if (replications < 1) bad_field("replications", "must be at least 1");
    if (lags.empty()) bad_field("lags", "must be non-empty");
    if (dims.empty()) bad_field("dims", "must be non-empty");
    if (n < 1) bad_field("n", "must be at least 1");
    if (!(oracle_tolerance > 0.0)) bad_field("oracle_tolerance", "must be positive");
    for (auto a : lags) {
        if (a < 1) bad_field("lags", "entries must be at least 1");
    }
    for (auto d : dims) {
        if (d < 1) bad_field("dims", "entries must be at least 1");
    }
}

std::vector<std::size_t> parse_count_list(const json& j, const std::string& field) {
    std::vector<std::size_t> out;
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        const auto dots = s.find("..");
        if (dots == std::string::npos) bad_field(field, "range must look like `lo..hi`");
        try {
            std::size_t used = 0;
            const std::string lo_s = s.substr(0, dots);
            const std::string hi_s = s.substr(dots + 2);
            const auto lo = std::stoul(lo_s, &used);
            if (used != lo_s.size()) throw std::invalid_argument(lo_s);
            const auto hi = std::stoul(hi_s, &used);
            if (used != hi_s.size()) throw std::invalid_argument(hi_s);
            if (hi < lo) bad_field(field, "range upper end is below its lower end");
            for (auto v = lo; v <= hi; ++v) out.push_back(v);
        } catch (const std::logic_error&) {
            bad_field(field, "range must look like `lo..hi`");
        }
        return out;
    }
    if (!j.is_array()) bad_field(field, "must be an array of counts or a `lo..hi` string");
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(count_value(j[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

namespace {

std::optional<std::size_t> bins_value(const json& v, const std::string& field) {
    if (v.is_string()) {
        if (v.get<std::string>() == "auto") return std::nullopt;
        bad_field(field, "must be a bin count or \"auto\"");
    }
    const auto b = count_value(v, field);
    if (b < 1) bad_field(field, "must be at least 1");
    return b;
}

json bins_to_json(const BinsSetting& bins) {
    const json fallback = bins.fallback ? json(*bins.fallback) : json("auto");
    if (bins.overrides.empty()) return fallback;
    json overrides = json::array();
    for (const auto& [key, b] : bins.overrides) overrides.push_back({{"a", key.first}, {"d", key.second}, {"bins", b}});
    return {{"default", fallback}, {"overrides", overrides}};
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("experiment config must be a JSON object");
    reject_unknown(j,
                   {"schema_version", "process", "n", "replications", "lags", "dims", "bins", "seed", "workers",
                    "oracle_tolerance", "output"},
                   "");
    if (j.contains("schema_version")) {
        if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != kConfigSchemaVersion) {
            bad_field("schema_version", "unsupported version (expected " + std::to_string(kConfigSchemaVersion) + ")");
        }
    }
    ExperimentConfig c;
    if (!j.contains("process")) bad_field("process", "is required");
    c.process_json = j["process"];
    c.process = process_from_json(j["process"]);

    for (const char* key : {"n", "replications", "lags", "dims"}) {
        if (!j.contains(key)) bad_field(key, "is required");
    }
    c.n = count_value(j["n"], "n");
    c.replications = count_value(j["replications"], "replications");
    c.lags = parse_count_list(j["lags"], "lags");
    c.dims = parse_count_list(j["dims"], "dims");
    if (j.contains("seed")) {
        const json& s = j["seed"];
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0)) {
            bad_field("seed", "must be a non-negative integer");
        }
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("workers")) c.workers = count_value(j["workers"], "workers");
    if (j.contains("oracle_tolerance")) c.oracle_tolerance = number_field(j, "oracle_tolerance", "", std::nullopt);
    if (j.contains("output")) {
        if (!j["output"].is_string()) bad_field("output", "must be a path string");
        c.output = j["output"].get<std::string>();
    }
    if (j.contains("bins")) {
        const json& b = j["bins"];
        if (b.is_object()) {
            reject_unknown(b, {"default", "overrides"}, "bins.");
            if (b.contains("default")) c.bins.fallback = bins_value(b["default"], "bins.default");
            if (b.contains("overrides")) {
                if (!b["overrides"].is_array()) bad_field("bins.overrides", "must be an array");
                for (std::size_t i = 0; i < b["overrides"].size(); ++i) {
                    const json& o = b["overrides"][i];
                    const std::string f = "bins.overrides[" + std::to_string(i) + "]";
                    if (!o.is_object() || !o.contains("a") || !o.contains("d") || !o.contains("bins")) {
                        bad_field(f, "needs `a`, `d` and `bins`");
                    }
                    const auto bins = bins_value(o["bins"], f + ".bins");
                    if (!bins) bad_field(f + ".bins", "overrides need an explicit count");
                    c.bins.overrides[{count_value(o["a"], f + ".a"), count_value(o["d"], f + ".d")}] = *bins;
                }
            }
        } else {
            c.bins.fallback = bins_value(b, "bins");
        }
    }
    c.validate();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j{{"schema_version", kConfigSchemaVersion},
           {"process", c.process_json},
           {"n", c.n},
           {"replications", c.replications},
           {"lags", c.lags},
           {"dims", c.dims},
           {"bins", bins_to_json(c.bins)},
           {"seed", c.seed},
           {"oracle_tolerance", c.oracle_tolerance}};
    if (c.output) j["output"] = *c.output;
    return j;
}

const CellStats& ExperimentReport::cell(std::size_t lag, std::size_t dim) const {
    for (const auto& c : cells) {
        if (c.lag == lag && c.dim == dim) return c;
    }
    throw std::out_of_range("no cell for a=" + std::to_string(lag) + ", d=" + std::to_string(dim));
}

namespace {

std::size_t resolve_bins(const ExperimentConfig& c, std::size_t lag, std::size_t dim) {
    if (auto b = c.bins.lookup(lag, dim)) return *b;
    if (const auto* chain = std::get_if<FiniteMarkovChain>(&c.process)) return chain->states();
    if (const auto* e = std::get_if<FunctionalEmission>(&c.process)) return e->alphabet();
    return schedule_for(c.n).bins_per_axis();
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
    config.validate();
    ExperimentReport report;
    report.config = config;

    std::vector<std::size_t> lags = config.lags;
    std::vector<std::size_t> dims = config.dims;
    std::sort(lags.begin(), lags.end());
    lags.erase(std::unique(lags.begin(), lags.end()), lags.end());
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());

    for (auto d : dims) {
        for (auto a : lags) {
            CellStats cell;
            cell.lag = a;
            cell.dim = d;
            cell.bins = resolve_bins(config, a, d);
            cell.replications = config.replications;
            report.cells.push_back(cell);
        }
    }

    const std::size_t R = config.replications;
    std::vector<std::vector<double>> values(R, std::vector<double>(report.cells.size()));
    parallel_for(
        R,
        [&](std::size_t r) {
            const TimeSeries path = simulate(config.process, config.n, stream_seed(config.seed, r));
            for (std::size_t k = 0; k < report.cells.size(); ++k) {
                const auto& cell = report.cells[k];
                values[r][k] = beta_hat(path, cell.dim, cell.lag, cell.bins).value;
            }
        },
        config.workers);

    for (std::size_t k = 0; k < report.cells.size(); ++k) {
        CellStats& cell = report.cells[k];
        double sum = 0.0;
        for (std::size_t r = 0; r < R; ++r) sum += values[r][k];
        cell.mean = sum / static_cast<double>(R);
        if (R > 1) {
            double ss = 0.0;
            for (std::size_t r = 0; r < R; ++r) ss += (values[r][k] - cell.mean) * (values[r][k] - cell.mean);
            cell.sd = std::sqrt(ss / static_cast<double>(R - 1));
            const double half = 1.96 * *cell.sd / std::sqrt(static_cast<double>(R));
            cell.lo = cell.mean - half;
            cell.hi = cell.mean + half;
        }
    }

    try {
        for (auto d : dims) {
            BetaCurve curve;
            for (auto a : lags) {
                const OracleValue o = oracle_beta(config.process, d, a, config.oracle_tolerance);
                curve.provenance = o.provenance;
                curve.points.push_back({a, o.value, std::nullopt, std::nullopt});
            }
            report.oracle[d] = std::move(curve);
        }
        for (auto& cell : report.cells) {
            const auto& pts = report.oracle.at(cell.dim).points;
            cell.oracle = std::find_if(pts.begin(), pts.end(), [&](const BetaPoint& p) { return p.lag == cell.lag; })->value;
        }
    } catch (const std::exception& e) {
        report.oracle.clear();
        for (auto& cell : report.cells) cell.oracle.reset();
        report.oracle_unavailable = e.what();
    }

    if (const auto* emission = std::get_if<FunctionalEmission>(&config.process)) {
        // A function of a Markov chain mixes at least as fast as the chain.
        try {
            BetaCurve bound;
            bound.provenance = Provenance::Bound;
            for (auto a : lags) bound.points.push_back({a, markov_beta(emission->hidden, a), std::nullopt, std::nullopt});
            report.bound = std::move(bound);
        } catch (const std::exception&) {
            // Hidden chain without a unique stationary law: no bound to draw.
        }
    }
    return report;
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json report_to_json(const ExperimentReport& report) {
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"a", c.lag},
                         {"d", c.dim},
                         {"bins", c.bins},
                         {"replications", c.replications},
                         {"mean", c.mean},
                         {"sd", optional_number(c.sd)},
                         {"lo", optional_number(c.lo)},
                         {"hi", optional_number(c.hi)},
                         {"oracle", optional_number(c.oracle)}});
    }
    json oracle = json::array();
    for (const auto& [d, curve] : report.oracle) oracle.push_back({{"d", d}, {"curve", curve_to_json(curve)}});

    json j{{"schema_version", kConfigSchemaVersion},
           {"software", {{"name", "betamix"}, {"version", BETAMIX_VERSION}}},
           {"config", config_to_json(report.config)},
           {"seed", report.config.seed},
           {"process", describe(report.config.process)},
           {"method",
            {{"estimator", "half L1 distance between the 2d-block histogram and the product of d-block histograms"},
             {"embedding", "all overlapping windows"},
             {"grid", "equal-width bins over the sample [min, max]; one bin per symbol for discrete data"},
             {"interval", "mean +- 1.96 sd / sqrt(R) over replications of the estimate"},
             {"seeding", "replication r uses SplitMix64 stream_seed(seed, r)"},
             {"oracle_tolerance", report.config.oracle_tolerance}}},
           {"results", cells},
           {"oracle", oracle}};
    j["bound"] = report.bound ? curve_to_json(*report.bound) : json(nullptr);
    j["oracle_unavailable"] = report.oracle_unavailable ? json(*report.oracle_unavailable) : json(nullptr);
    return j;
}

void write_plot_csv(std::ostream& out, const ExperimentReport& report) {
    out << "a,d,mean,lo,hi,oracle\n";
    const auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& c : report.cells) {
        out << c.lag << ',' << c.dim << ',' << format_double(c.mean) << ',' << opt(c.lo) << ',' << opt(c.hi) << ','
            << opt(c.oracle) << '\n';
    }
}

void write_plot_svg(std::ostream& out, const ExperimentReport& report) {
    constexpr double W = 640, H = 400, L = 60, Rm = 20, T = 20, B = 50;
    std::size_t max_lag = 1;
    double max_y = 0.0;
    for (const auto& c : report.cells) {
        max_lag = std::max(max_lag, c.lag);
        max_y = std::max({max_y, c.hi.value_or(c.mean), c.oracle.value_or(0.0)});
    }
    if (report.bound) {
        for (const auto& p : report.bound->points) max_y = std::max(max_y, p.value);
    }
    max_y = max_y > 0.0 ? max_y * 1.05 : 1.0;
    const auto sx = [&](double a) { return L + (a - 0.5) / (static_cast<double>(max_lag) + 0.5) * (W - L - Rm); };
    const auto sy = [&](double v) { return H - B - v / max_y * (H - T - B); };

    std::ostringstream svg;
    svg.setf(std::ios::fixed);
    svg.precision(2);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - Rm << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (std::size_t a = 1; a <= max_lag; ++a) {
        svg << "<text x=\"" << sx(static_cast<double>(a)) << "\" y=\"" << H - B + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << a << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double v = max_y * k / 4.0;
        svg << "<text x=\"" << L - 6 << "\" y=\"" << sy(v) + 4 << "\" font-size=\"11\" text-anchor=\"end\">"
            << format_double(std::round(v * 1000.0) / 1000.0) << "</text>\n";
    }
    svg << "<text x=\"" << (L + W - Rm) / 2 << "\" y=\"" << H - 10 << "\" font-size=\"12\" text-anchor=\"middle\">a</text>\n";

    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    std::map<std::size_t, std::vector<const CellStats*>> by_dim;
    for (const auto& c : report.cells) by_dim[c.dim].push_back(&c);
    std::size_t series = 0;
    for (const auto& [d, cells] : by_dim) {
        const char* color = colors[series++ % 5];
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
        for (const auto* c : cells) svg << sx(static_cast<double>(c->lag)) << ',' << sy(c->mean) << ' ';
        svg << "\"/>\n";
        for (const auto* c : cells) {
            const double x = sx(static_cast<double>(c->lag));
            if (c->lo && c->hi) {
                svg << "<line x1=\"" << x << "\" y1=\"" << sy(std::max(0.0, *c->lo)) << "\" x2=\"" << x << "\" y2=\""
                    << sy(*c->hi) << "\" stroke=\"" << color << "\"/>\n";
            }
            svg << "<circle cx=\"" << x << "\" cy=\"" << sy(c->mean) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        svg << "<text x=\"" << W - Rm - 60 << "\" y=\"" << T + 14 * static_cast<double>(series) << "\" font-size=\"11\" fill=\""
            << color << "\">d=" << d << "</text>\n";
    }
    const BetaCurve* dashed = report.bound ? &*report.bound
                              : report.oracle.empty() ? nullptr
                                                      : &report.oracle.begin()->second;
    if (dashed != nullptr) {
        svg << "<polyline fill=\"none\" stroke=\"black\" stroke-dasharray=\"5,4\" points=\"";
        for (const auto& p : dashed->points) svg << sx(static_cast<double>(p.lag)) << ',' << sy(p.value) << ' ';
        svg << "\"/>\n";
    }
    svg << "</svg>\n";
    out << svg.str();
}

}  // namespace betamix
