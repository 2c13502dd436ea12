#include "betamix/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betamix {

void BlockingScheme::validate() const {
    if (block_length < 1 || block_pairs < 1) {
        throw std::invalid_argument("BlockingScheme: block length and pair count must be at least 1");
    }
    if (!(beta_at_block >= 0.0 && beta_at_block <= 1.0)) {
        throw std::invalid_argument("BlockingScheme: beta(m) must lie in [0, 1]");
    }
}

BlockingScheme blocking_from(const Schedule& schedule, double beta_at_block) {
    BlockingScheme s{schedule.block_length, schedule.block_pairs, beta_at_block};
    s.validate();
    return s;
}

namespace {

void check_eps(double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("deviation bound: eps must be positive");
}

void check_bias(double bias) {
    if (!(bias >= 0.0)) throw std::invalid_argument("deviation bound: bias terms must be non-negative");
}

double tail(double mu, double e) { return 2.0 * std::exp(-mu * e * e / 2.0); }

}  // namespace

double estimator_deviation_bound(const BlockingScheme& scheme, double eps, double bias_d, double bias_2d) {
    scheme.validate();
    check_eps(eps);
    check_bias(bias_d);
    check_bias(bias_2d);
    const double e1 = eps / 2.0 - bias_d;
    const double e2 = eps - bias_2d;
    if (e1 <= 0.0 || e2 <= 0.0) return 1.0;
    const double mu = static_cast<double>(scheme.block_pairs);
    const double bound = tail(mu, e1) + tail(mu, e2) + 4.0 * (mu - 1.0) * scheme.beta_at_block;
    return std::clamp(bound, 0.0, 1.0);
}

double histogram_deviation_bound(const BlockingScheme& scheme, double eps, double bias) {
    scheme.validate();
    check_eps(eps);
    check_bias(bias);
    const double e1 = eps - bias;
    if (e1 <= 0.0) return 1.0;
    const double mu = static_cast<double>(scheme.block_pairs);
    return std::clamp(tail(mu, e1) + 2.0 * (mu - 1.0) * scheme.beta_at_block, 0.0, 1.0);
}

double histogram_l1_rate(std::size_t n, double bandwidth, std::size_t dim, const HistogramRateConstants& c) {
    if (n < 1 || !(bandwidth > 0.0) || dim < 1) {
        throw std::invalid_argument("histogram_l1_rate: need n >= 1, h > 0, d >= 1");
    }
    const double d = static_cast<double>(dim);
    const double dh = d * bandwidth;
    return c.variance / std::sqrt(static_cast<double>(n) * std::pow(bandwidth, d)) + c.linear_bias * dh +
           c.quadratic_bias * dh * dh;
}

}  // namespace betamix
