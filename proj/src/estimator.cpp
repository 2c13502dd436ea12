#include "betamix/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "betamix/numerics.hpp"
#include "betamix/oracles.hpp"
#include "betamix/parallel.hpp"
#include "betamix/rng.hpp"

namespace betamix {

Embedding embed(const TimeSeries& series, std::size_t dim, std::size_t lag) {
    if (dim < 1) throw std::invalid_argument("embed: dimension must be at least 1");
    if (lag < 1) throw std::invalid_argument("embed: lag must be at least 1");
    const std::size_t n = series.size();
    const std::size_t span = 2 * dim + lag - 1;
    if (n < span) {
        throw std::invalid_argument("embed: series of length " + std::to_string(n) + " is too short for d=" +
                                    std::to_string(dim) + ", a=" + std::to_string(lag) + " (need " +
                                    std::to_string(span) + ")");
    }
    const auto& x = series.values();

    Embedding e;
    e.blocks.dims = dim;
    e.blocks.coords.reserve((n - dim + 1) * dim);
    for (std::size_t t = 0; t + dim <= n; ++t) {
        e.blocks.coords.insert(e.blocks.coords.end(), x.begin() + t, x.begin() + t + dim);
    }
    e.pairs.dims = 2 * dim;
    const std::size_t second = dim - 1 + lag;  // offset of the second block
    e.pairs.coords.reserve((n - span + 1) * 2 * dim);
    for (std::size_t t = 0; t + span <= n; ++t) {
        e.pairs.coords.insert(e.pairs.coords.end(), x.begin() + t, x.begin() + t + dim);
        e.pairs.coords.insert(e.pairs.coords.end(), x.begin() + t + second, x.begin() + t + second + dim);
    }
    return e;
}

Axis series_axis(const TimeSeries& series, std::size_t bins_per_axis) {
    if (bins_per_axis < 1) throw std::invalid_argument("bins_per_axis must be at least 1");
    if (series.is_discrete()) {
        if (bins_per_axis != 1 && bins_per_axis != series.alphabet()) {
            throw std::invalid_argument("discrete series take 1 bin or one bin per symbol (" +
                                        std::to_string(series.alphabet()) + "), not " + std::to_string(bins_per_axis));
        }
        return Axis::discrete(series.alphabet(), bins_per_axis == 1 && series.alphabet() != 1);
    }
    const auto [lo, hi] = std::minmax_element(series.values().begin(), series.values().end());
    return Axis::spanning(*lo, *hi, bins_per_axis);
}

BetaEstimate beta_hat(const TimeSeries& series, std::size_t dim, std::size_t lag, std::size_t bins_per_axis) {
    const Embedding e = embed(series, dim, lag);
    const Axis axis = series_axis(series, bins_per_axis);
    const SparseHistogram marginal = build_histogram(e.blocks, BinGrid::repeated(axis, dim));
    const SparseHistogram joint = build_histogram(e.pairs, BinGrid::repeated(axis, 2 * dim));

    BetaEstimate est;
    est.lag = lag;
    est.dim = dim;
    est.bins_per_axis = axis.bin_count;
    est.value = std::clamp(0.5 * independence_l1(joint, marginal), 0.0, 1.0);
    est.n_effective = e.pairs.size();
    return est;
}

BetaEstimate beta_hat_scheduled(const TimeSeries& series, std::size_t lag) {
    const Schedule s = schedule_for(series.size());
    const std::size_t n = series.size();
    if (n < lag + 1) throw std::invalid_argument("beta_hat_scheduled: series too short for the lag");
    const std::size_t max_dim = std::max<std::size_t>(1, (n - lag + 1) / 2);
    const std::size_t dim = std::min(s.dimension, max_dim);
    const std::size_t bins = series.is_discrete() ? series.alphabet() : s.bins_per_axis();
    return beta_hat(series, dim, lag, bins);
}

std::vector<std::size_t> default_bin_candidates() {
    std::vector<std::size_t> c;
    for (std::size_t b = 1; b <= 41; b += 2) c.push_back(b);
    return c;
}

BinSelection select_bins(const ProcessSpec& process, std::size_t n, std::size_t dim, std::size_t lag,
                         std::vector<std::size_t> candidates, std::size_t replications, std::uint64_t seed,
                         std::size_t workers) {
    if (candidates.empty()) throw std::invalid_argument("select_bins: candidate list is empty");
    if (replications < 1) throw std::invalid_argument("select_bins: need at least one replication");
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (candidates.front() < 1) throw std::invalid_argument("select_bins: bin counts must be positive");

    const double truth = oracle_beta(process, dim, lag).value;

    std::vector<std::vector<double>> errors(replications, std::vector<double>(candidates.size()));
    parallel_for(
        replications,
        [&](std::size_t r) {
            const TimeSeries path = simulate(process, n, stream_seed(seed, r));
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                errors[r][c] = std::abs(beta_hat(path, dim, lag, candidates[c]).value - truth);
            }
        },
        workers);

    BinSelection sel;
    sel.oracle = truth;
    sel.candidates = candidates;
    sel.mean_abs_error.assign(candidates.size(), 0.0);
    for (std::size_t r = 0; r < replications; ++r) {
        for (std::size_t c = 0; c < candidates.size(); ++c) sel.mean_abs_error[c] += errors[r][c];
    }
    std::size_t best = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        sel.mean_abs_error[c] /= static_cast<double>(replications);
        if (sel.mean_abs_error[c] < sel.mean_abs_error[best]) best = c;
    }
    sel.bins = candidates[best];
    return sel;
}

}  // namespace betamix
