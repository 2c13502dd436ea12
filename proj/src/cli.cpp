#include "betamix/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "betamix/bounds.hpp"
#include "betamix/estimator.hpp"
#include "betamix/format.hpp"
#include "betamix/harness.hpp"
#include "betamix/numerics.hpp"
#include "betamix/oracles.hpp"
#include "betamix/processes.hpp"
#include "betamix/time_series.hpp"

namespace betamix {

namespace {

using nlohmann::json;

/// "1..10", "1..41:2", "1,2,5" or any comma-joined mix of these.
std::vector<std::size_t> parse_counts(const std::string& text, const std::string& option) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    const auto fail = [&] { throw std::invalid_argument("option " + option + ": cannot parse `" + text + "`"); };
    const auto to_count = [&](const std::string& s) {
        std::size_t used = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(s, &used);
        } catch (const std::logic_error&) {
            fail();
        }
        if (used != s.size() || s.empty() || s.front() == '-') fail();
        return static_cast<std::size_t>(v);
    };
    while (std::getline(ss, item, ',')) {
        if (item.empty()) fail();
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_count(item));
            continue;
        }
        std::string hi_part = item.substr(dots + 2);
        std::size_t step = 1;
        if (const auto colon = hi_part.find(':'); colon != std::string::npos) {
            step = to_count(hi_part.substr(colon + 1));
            hi_part = hi_part.substr(0, colon);
        }
        const std::size_t lo = to_count(item.substr(0, dots));
        const std::size_t hi = to_count(hi_part);
        if (step == 0 || hi < lo) fail();
        for (std::size_t v = lo; v <= hi; v += step) out.push_back(v);
    }
    if (out.empty()) fail();
    return out;
}

std::vector<double> parse_reals(const std::string& text, const std::string& option) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        try {
            out.push_back(std::stod(item, &used));
        } catch (const std::logic_error&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) {
            throw std::invalid_argument("option " + option + ": cannot parse `" + text + "`");
        }
    }
    if (out.empty()) throw std::invalid_argument("option " + option + ": empty list");
    return out;
}

/// Process selection shared by several subcommands.
struct ProcessOptions {
    std::string name = "two-state";
    std::optional<double> p, q, phi, sigma2;
    std::string json_text;

    void attach(CLI::App* cmd) {
        cmd->add_option("--process", name, "two-state | even | ar1 | iid-uniform")
            ->check(CLI::IsMember({"two-state", "even", "ar1", "iid-uniform"}));
        cmd->add_option("--p", p, "P(A->B) of the (hidden) two-state chain");
        cmd->add_option("--q", q, "P(B->A) of the (hidden) two-state chain");
        cmd->add_option("--phi", phi, "AR(1) coefficient");
        cmd->add_option("--sigma2", sigma2, "AR(1) innovation variance");
        cmd->add_option("--process-json", json_text, "process as a JSON object (overrides --process)");
    }

    [[nodiscard]] json to_json() const {
        if (!json_text.empty()) {
            try {
                return json::parse(json_text);
            } catch (const json::parse_error& e) {
                throw std::invalid_argument(std::string("option --process-json: ") + e.what());
            }
        }
        json j{{"type", name}};
        if (p) j["p"] = *p;
        if (q) j["q"] = *q;
        if (phi) j["phi"] = *phi;
        if (sigma2) j["sigma2"] = *sigma2;
        return j;
    }

    [[nodiscard]] ProcessSpec spec() const { return process_from_json(to_json()); }
};

/// Writes to the named file, or to `fallback` when the path is empty.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw std::runtime_error("cannot open `" + path + "` for writing");
            stream_ = file_.get();
        }
    }
    std::ostream& get() { return *stream_; }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* stream_;
};

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open `" + path + "`");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("`" + path + "` is not valid JSON: " + e.what());
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Estimate beta-mixing coefficients of stationary time series", "betamix"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(BETAMIX_VERSION));

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a process and write a series CSV");
    ProcessOptions sim_process;
    sim_process.attach(sim);
    std::size_t sim_n = 0;
    std::uint64_t sim_seed = 1;
    std::string sim_output;
    sim->add_option("--n", sim_n, "series length")->required()->check(CLI::PositiveNumber);
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--output,-o", sim_output, "output CSV (default stdout)");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate beta^d(a) from a series CSV");
    std::string est_input, est_lags = "1", est_format = "csv", est_output, est_bins = "auto";
    std::size_t est_dim = 1;
    est->add_option("--input,-i", est_input, "series CSV")->required();
    est->add_option("--lag,--lags", est_lags, "lags, e.g. 1 or 1..10");
    est->add_option("--dim", est_dim, "block dimension d")->check(CLI::PositiveNumber);
    est->add_option("--bins", est_bins, "bins per axis, or auto");
    est->add_option("--format", est_format, "csv | json | estimates")
        ->check(CLI::IsMember({"csv", "json", "estimates"}));
    est->add_option("--output,-o", est_output, "output file (default stdout)");

    // oracle
    auto* orc = app.add_subcommand("oracle", "Exact or numerically integrated beta(a) for a process");
    ProcessOptions orc_process;
    orc_process.attach(orc);
    std::string orc_lags = "1..10", orc_format = "csv", orc_output;
    std::size_t orc_dim = 1;
    double orc_tol = 1e-10;
    orc->add_option("--lags", orc_lags, "lags, e.g. 1..10");
    orc->add_option("--dim", orc_dim, "block dimension d (functional emissions)")->check(CLI::PositiveNumber);
    orc->add_option("--tolerance", orc_tol, "AR(1) quadrature tolerance")->check(CLI::PositiveNumber);
    orc->add_option("--format", orc_format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
    orc->add_option("--output,-o", orc_output, "output file (default stdout)");

    // select-bins
    auto* sel = app.add_subcommand("select-bins", "Monte-Carlo choice of bins per axis minimising E|beta_hat - beta|");
    ProcessOptions sel_process;
    sel_process.attach(sel);
    std::size_t sel_n = 1000, sel_dim = 1, sel_reps = 100;
    std::uint64_t sel_seed = 1;
    std::size_t sel_workers = 0;
    std::string sel_lags = "1", sel_candidates = "1..41:2", sel_output;
    bool sel_details = false;
    sel->add_option("--n", sel_n, "simulated series length")->check(CLI::PositiveNumber);
    sel->add_option("--dim", sel_dim, "block dimension d")->check(CLI::PositiveNumber);
    sel->add_option("--lags", sel_lags, "lags, e.g. 1..8");
    sel->add_option("--candidates", sel_candidates, "bin counts, e.g. 1..41:2");
    sel->add_option("--replications", sel_reps, "simulated paths")->check(CLI::PositiveNumber);
    sel->add_option("--seed", sel_seed, "random seed");
    sel->add_option("--workers", sel_workers, "worker threads (0 = default)");
    sel->add_flag("--details", sel_details, "print the error of every candidate");
    sel->add_option("--output,-o", sel_output, "output CSV (default stdout)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a replication study from a JSON config");
    std::string exp_config, exp_output, exp_csv, exp_svg;
    std::optional<std::size_t> exp_workers;
    exp->add_option("--config,-c", exp_config, "experiment config JSON")->required();
    exp->add_option("--output,-o", exp_output, "report JSON (default: config `output`, else stdout)");
    exp->add_option("--csv", exp_csv, "plot CSV with columns a,d,mean,lo,hi,oracle");
    exp->add_option("--svg", exp_svg, "SVG line chart");
    exp->add_option("--workers", exp_workers, "worker threads (overrides config)");

    // bounds
    auto* bnd = app.add_subcommand("bounds", "Evaluate the deviation bounds over a parameter grid");
    std::string bnd_n = "1000", bnd_eps = "0.05,0.1,0.2,0.3,0.5", bnd_output, bnd_bias_d = "auto",
                bnd_bias_2d = "auto";
    std::optional<double> bnd_rho;
    std::optional<std::size_t> bnd_dim;
    double bnd_growth = 1.0;
    HistogramRateConstants bnd_constants;
    ProcessOptions bnd_process;
    bnd_process.attach(bnd);
    bnd->add_option("--n", bnd_n, "sample sizes, e.g. 1000,10000");
    bnd->add_option("--eps", bnd_eps, "deviation levels, comma separated");
    bnd->add_option("--block-growth", bnd_growth, "m_n = ceil(block_growth * log n)")->check(CLI::PositiveNumber);
    bnd->add_option("--rho", bnd_rho, "use beta(m) = rho^m instead of the process oracle")
        ->check(CLI::Range(0.0, 1.0));
    bnd->add_option("--dim", bnd_dim, "histogram dimension d (default d_n)")->check(CLI::PositiveNumber);
    bnd->add_option("--bias-d", bnd_bias_d, "expected L1 error of the d-histogram, or auto");
    bnd->add_option("--bias-2d", bnd_bias_2d, "expected L1 error of the 2d-histogram, or auto");
    bnd->add_option("--c-var", bnd_constants.variance, "rate constant of 1/sqrt(n h^d)");
    bnd->add_option("--c-lin", bnd_constants.linear_bias, "rate constant of d h");
    bnd->add_option("--c-quad", bnd_constants.quadratic_bias, "rate constant of d^2 h^2");
    bnd->add_option("--output,-o", bnd_output, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            const ProcessSpec spec = sim_process.spec();
            const TimeSeries series = simulate(spec, sim_n, sim_seed);
            Sink sink(sim_output, out);
            write_series_csv(sink.get(), series,
                             {{"seed", std::to_string(sim_seed)}, {"spec", describe(spec)}});
        } else if (*est) {
            const LoadedSeries loaded = read_series_csv_file(est_input);
            const auto lags = parse_counts(est_lags, "--lag");
            Sink sink(est_output, out);
            std::vector<BetaEstimate> estimates;
            for (auto a : lags) {
                if (est_bins == "auto") {
                    const std::size_t bins = loaded.series.is_discrete() ? loaded.series.alphabet()
                                                                         : schedule_for(loaded.series.size()).bins_per_axis();
                    estimates.push_back(beta_hat(loaded.series, est_dim, a, bins));
                } else {
                    const auto bins = parse_counts(est_bins, "--bins");
                    if (bins.size() != 1) throw std::invalid_argument("option --bins: expected a single count");
                    estimates.push_back(beta_hat(loaded.series, est_dim, a, bins.front()));
                }
            }
            if (est_format == "estimates") {
                sink.get() << "a,d,bins,value,n_effective\n";
                for (const auto& e : estimates) {
                    sink.get() << e.lag << ',' << e.dim << ',' << e.bins_per_axis << ',' << format_double(e.value) << ','
                               << e.n_effective << '\n';
                }
            } else {
                BetaCurve curve;
                curve.provenance = Provenance::Estimated;
                for (const auto& e : estimates) curve.points.push_back({e.lag, e.value, std::nullopt, std::nullopt});
                curve.validate();
                if (est_format == "csv") {
                    write_curve_csv(sink.get(), curve);
                } else {
                    json j = curve_to_json(curve);
                    json details = json::array();
                    for (const auto& e : estimates) {
                        details.push_back({{"a", e.lag}, {"d", e.dim}, {"bins", e.bins_per_axis}, {"value", e.value},
                                           {"n_effective", e.n_effective}});
                    }
                    j["estimates"] = details;
                    sink.get() << j.dump(2) << '\n';
                }
            }
        } else if (*orc) {
            const ProcessSpec spec = orc_process.spec();
            BetaCurve curve;
            for (auto a : parse_counts(orc_lags, "--lags")) {
                const OracleValue o = oracle_beta(spec, orc_dim, a, orc_tol);
                curve.provenance = o.provenance;
                curve.points.push_back({a, o.value, std::nullopt, std::nullopt});
            }
            curve.validate();
            Sink sink(orc_output, out);
            if (orc_format == "csv") {
                write_curve_csv(sink.get(), curve);
            } else {
                sink.get() << curve_to_json(curve).dump(2) << '\n';
            }
        } else if (*sel) {
            const ProcessSpec spec = sel_process.spec();
            const auto candidates = parse_counts(sel_candidates, "--candidates");
            Sink sink(sel_output, out);
            sink.get() << (sel_details ? "a,bins,mean_abs_error,oracle,selected\n" : "a,bins,mean_abs_error,oracle\n");
            for (auto a : parse_counts(sel_lags, "--lags")) {
                const BinSelection s = select_bins(spec, sel_n, sel_dim, a, candidates, sel_reps, sel_seed, sel_workers);
                for (std::size_t c = 0; c < s.candidates.size(); ++c) {
                    const bool chosen = s.candidates[c] == s.bins;
                    if (!sel_details && !chosen) continue;
                    sink.get() << a << ',' << s.candidates[c] << ',' << format_double(s.mean_abs_error[c]) << ','
                               << format_double(s.oracle);
                    if (sel_details) sink.get() << ',' << (chosen ? 1 : 0);
                    sink.get() << '\n';
                }
            }
        } else if (*exp) {
            ExperimentConfig config = config_from_json(read_json_file(exp_config));
            if (exp_workers) config.workers = *exp_workers;
            const ExperimentReport report = run_experiment(config);
            const std::string report_path = !exp_output.empty() ? exp_output : config.output.value_or("");
            {
                Sink sink(report_path, out);
                sink.get() << report_to_json(report).dump(2) << '\n';
            }
            if (!exp_csv.empty()) {
                Sink sink(exp_csv, out);
                write_plot_csv(sink.get(), report);
            }
            if (!exp_svg.empty()) {
                Sink sink(exp_svg, out);
                write_plot_svg(sink.get(), report);
            }
        } else if (*bnd) {
            const auto ns = parse_counts(bnd_n, "--n");
            const auto eps_list = parse_reals(bnd_eps, "--eps");
            std::optional<ProcessSpec> spec;
            if (!bnd_rho) spec = bnd_process.spec();
            Sink sink(bnd_output, out);
            sink.get() << "n,d,h,m,mu,beta_m,eps,bias_d,bias_2d,estimator_bound,histogram_bound\n";
            for (auto n : ns) {
                const Schedule s = schedule_for(n, bnd_growth);
                const std::size_t d = bnd_dim.value_or(s.dimension);
                const double beta_m = bnd_rho ? std::pow(*bnd_rho, static_cast<double>(s.block_length))
                                              : oracle_beta(*spec, d, s.block_length).value;
                const BlockingScheme scheme = blocking_from(s, beta_m);
                const double bias_d = bnd_bias_d == "auto" ? histogram_l1_rate(n, s.bandwidth, d, bnd_constants)
                                                           : parse_reals(bnd_bias_d, "--bias-d").front();
                const double bias_2d = bnd_bias_2d == "auto"
                                           ? histogram_l1_rate(n, s.bandwidth, 2 * d, bnd_constants)
                                           : parse_reals(bnd_bias_2d, "--bias-2d").front();
                for (double eps : eps_list) {
                    sink.get() << n << ',' << d << ',' << format_double(s.bandwidth) << ',' << s.block_length << ','
                               << s.block_pairs << ',' << format_double(beta_m) << ',' << format_double(eps) << ','
                               << format_double(bias_d) << ',' << format_double(bias_2d) << ','
                               << format_double(estimator_deviation_bound(scheme, eps, bias_d, bias_2d)) << ','
                               << format_double(histogram_deviation_bound(scheme, eps, bias_d)) << '\n';
                }
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace betamix
