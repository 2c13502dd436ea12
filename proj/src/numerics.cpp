#include "betamix/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace betamix {

namespace {

constexpr double kInvE = 1.0 / std::numbers::e;

double initial_guess(double x) {
    if (x > std::numbers::e) {
        const double lx = std::log(x);
        return lx - std::log(lx);
    }
    // Branch-point expansion in p = sqrt(2(e x + 1)).
    if (x < -0.25) {
        const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    }
    // Taylor series about 0, good enough as a seed on [-1/4, e].
    return x * (1.0 - x + 1.5 * x * x);
}

}  // namespace

double lambert_w0(double x) {
    if (std::isnan(x) || x < -kInvE) {
        throw std::domain_error("lambert_w0: argument below -1/e");
    }
    if (x == 0.0) return 0.0;
    if (x == -kInvE) return -1.0;
    if (std::isinf(x)) return x;

    double w = initial_guess(x);
    for (int iter = 0; iter < 64; ++iter) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        // Halley step.
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) {
            break;
        }
    }
    return w;
}

std::size_t Schedule::bins_per_axis() const {
    return static_cast<std::size_t>(std::ceil(1.0 / bandwidth - 1e-12));
}

Schedule schedule_for(std::size_t n, double block_growth) {
    if (n < 8) {
        throw std::domain_error("schedule_for: need n >= 8");
    }
    if (!(block_growth > 0.0)) {
        throw std::invalid_argument("schedule_for: block_growth must be positive");
    }
    const double log_n = std::log(static_cast<double>(n));
    const double w = lambert_w0(log_n);
    const double growth = std::exp(w);

    Schedule s;
    s.n = n;
    s.dimension = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(growth)));
    s.bandwidth_exponent = (w + 0.5 * log_n) / (log_n * (0.5 * growth + 1.0));
    s.bandwidth = std::pow(static_cast<double>(n), -s.bandwidth_exponent);
    s.block_length = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(block_growth * log_n)));
    s.block_pairs = n / (2 * s.block_length);
    if (s.block_pairs < 1) {
        throw std::invalid_argument("schedule_for: block_growth leaves no complete block pair");
    }
    return s;
}

}  // namespace betamix
