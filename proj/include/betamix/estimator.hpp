#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "betamix/histogram.hpp"
#include "betamix/processes.hpp"
#include "betamix/time_series.hpp"

namespace betamix {

struct BetaEstimate {
    std::size_t lag = 1;
    std::size_t dim = 1;
    std::size_t bins_per_axis = 1;
    double value = 0.0;
    std::size_t n_effective = 0;  // number of embedded 2d-vectors
};

struct Embedding {
    PointSet blocks;  // all windows (X_t, ..., X_{t+d-1})
    PointSet pairs;   // (X_t..X_{t+d-1}, X_{t+d-1+a}..X_{t+2d-2+a})
};

/// Delay embedding with every valid start t. The two d-blocks of a pair have
/// a-1 observations between them. Throws std::invalid_argument unless
/// d >= 1, a >= 1 and n >= 2d + a - 1.
[[nodiscard]] Embedding embed(const TimeSeries& series, std::size_t dim, std::size_t lag);

/// Shared per-axis bins for a series: bins_per_axis equal-width bins over
/// [min, max] for continuous data. Discrete data gets one bin per symbol;
/// bins_per_axis must then be 1 (all symbols merged) or the alphabet size.
[[nodiscard]] Axis series_axis(const TimeSeries& series, std::size_t bins_per_axis);

/// Histogram estimate of beta^d(a): half the L1 distance between the
/// 2d-dimensional joint histogram of gap-separated blocks and the product of
/// the d-dimensional block histogram with itself. Both histograms share the
/// axis from series_axis, so the integral is an exact finite sum.
[[nodiscard]] BetaEstimate beta_hat(const TimeSeries& series, std::size_t dim, std::size_t lag,
                                    std::size_t bins_per_axis);

/// beta_hat with d and bins from schedule_for(n): d = d_n (capped so the
/// embedding fits) and bins = ceil(1/h_n), or one bin per symbol for
/// discrete series.
[[nodiscard]] BetaEstimate beta_hat_scheduled(const TimeSeries& series, std::size_t lag);

/// Odd counts 1, 3, ..., 41.
[[nodiscard]] std::vector<std::size_t> default_bin_candidates();

struct BinSelection {
    std::size_t bins = 1;
    double oracle = 0.0;
    std::vector<std::size_t> candidates;
    std::vector<double> mean_abs_error;  // per candidate
};

/// Picks the candidate minimising the Monte-Carlo mean of |beta_hat - beta|
/// over `replications` simulated paths of length n. Every candidate is
/// scored on the same paths (path r uses stream_seed(seed, r)); ties go to
/// fewer bins. Replications run on `workers` threads (0 = default pool
/// size) and the result does not depend on the worker count.
[[nodiscard]] BinSelection select_bins(const ProcessSpec& process, std::size_t n, std::size_t dim, std::size_t lag,
                                       std::vector<std::size_t> candidates, std::size_t replications,
                                       std::uint64_t seed, std::size_t workers = 0);

}  // namespace betamix
