#pragma once

#include <cstddef>

#include "betamix/numerics.hpp"

namespace betamix {

/// Alternating blocks of length m (mu pairs) used to reduce dependent data to
/// nearly independent blocks; beta_at_block is beta(m).
struct BlockingScheme {
    std::size_t block_length = 1;
    std::size_t block_pairs = 1;
    double beta_at_block = 0.0;

    /// Throws std::invalid_argument on m < 1, mu < 1 or beta(m) outside [0, 1].
    void validate() const;
};

[[nodiscard]] BlockingScheme blocking_from(const Schedule& schedule, double beta_at_block);

/// Deviation bound for the beta estimate:
///   2 exp(-mu e1^2 / 2) + 2 exp(-mu e2^2 / 2) + 4 (mu - 1) beta(m)
/// with e1 = eps/2 - bias_d and e2 = eps - bias_2d, where the biases are the
/// expected L1 errors of the d- and 2d-dimensional histograms. Returns 1 when
/// e1 <= 0 or e2 <= 0 and otherwise clamps to [0, 1].
[[nodiscard]] double estimator_deviation_bound(const BlockingScheme& scheme, double eps, double bias_d,
                                               double bias_2d);

/// Deviation bound for the L1 error of one histogram:
///   2 exp(-mu e1^2 / 2) + 2 (mu - 1) beta(m),  e1 = eps - bias.
[[nodiscard]] double histogram_deviation_bound(const BlockingScheme& scheme, double eps, double bias);

/// Expected histogram L1 error from its rate, with caller-chosen constants:
///   c_var / sqrt(n h^d) + c_lin d h + c_quad d^2 h^2.
struct HistogramRateConstants {
    double variance = 1.0;
    double linear_bias = 1.0;
    double quadratic_bias = 1.0;
};
[[nodiscard]] double histogram_l1_rate(std::size_t n, double bandwidth, std::size_t dim,
                                       const HistogramRateConstants& c = {});

}  // namespace betamix
