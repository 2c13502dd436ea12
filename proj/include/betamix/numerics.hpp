#pragma once

#include <cstddef>

namespace betamix {

/// Principal branch of the Lambert W function, the inverse of w -> w*exp(w)
/// on [-1/e, inf). Throws std::domain_error for x < -1/e.
[[nodiscard]] double lambert_w0(double x);

/// Dimension, bandwidth and blocking choices for a sample of length n.
///
/// The dimension grows like exp{W(log n)} (between log log n and log n) and
/// the bandwidth h = n^-k balances the histogram variance term
/// 1/sqrt(n h^d) against the bias terms d*h and d^2*h^2. Blocks of length
/// m ~ block_growth * log n are used by the concentration bounds only; the
/// estimator itself always consumes the whole sample.
struct Schedule {
    std::size_t n = 0;
    std::size_t dimension = 1;       // d_n
    double bandwidth_exponent = 1.0; // k_n
    double bandwidth = 1.0;          // h_n, for data rescaled to unit range
    std::size_t block_length = 1;    // m_n
    std::size_t block_pairs = 1;     // mu_n, with 2*mu*m <= n < 2*(mu+1)*m

    /// Histogram bins per axis implied by the bandwidth on unit-range data.
    [[nodiscard]] std::size_t bins_per_axis() const;
};

/// Throws std::domain_error for n < 8, and std::invalid_argument when
/// block_growth is not positive or leaves fewer than one block pair.
[[nodiscard]] Schedule schedule_for(std::size_t n, double block_growth = 1.0);

}  // namespace betamix
