#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "betamix/numerics.hpp"
#include "doctest.h"

using namespace betamix;

namespace {

// Independent oracle: bisection on w*e^w = x over the principal branch.
double lambert_bisect(double x) {
    double lo = -1.0;
    double hi = std::max(1.0, std::log1p(x) + 1.0);
    while (hi * std::exp(hi) < x) hi *= 2.0;
    for (int i = 0; i < 400; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid * std::exp(mid) < x) lo = mid; else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("lambert_w0 fixed points") {
    CHECK(lambert_w0(0.0) == 0.0);
    CHECK(lambert_w0(std::numbers::e) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lambert_w0(-1.0 / std::numbers::e) == -1.0);
}

TEST_CASE("lambert_w0 at log(1000) matches bisection") {
    const double x = std::log(1000.0);
    const double oracle = lambert_bisect(x);
    CHECK(oracle == doctest::Approx(1.5157).epsilon(1e-3));
    CHECK(std::abs(lambert_w0(x) - oracle) < 1e-12);
}

TEST_CASE("lambert_w0 rejects arguments below -1/e") {
    CHECK_THROWS_AS((void)lambert_w0(-0.5), std::domain_error);
    CHECK_THROWS_AS((void)lambert_w0(std::nan("")), std::domain_error);
}

TEST_CASE("lambert_w0 round trip") {
    for (int k = -3; k <= 6; ++k) {
        const double x = std::pow(10.0, k);
        const double w = lambert_w0(x);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * x);
    }
    // Negative arguments including the neighbourhood of the branch point.
    for (double x : {-0.367, -0.36, -0.3, -0.2, -0.1, -1e-5}) {
        const double w = lambert_w0(x);
        CHECK(std::abs(w * std::exp(w) - x) <= 1e-12);
        CHECK(std::abs(w - lambert_bisect(x)) < 1e-6);
    }
}

TEST_CASE("lambert_w0 is strictly increasing") {
    double prev = lambert_w0(-1.0 / std::numbers::e);
    for (double x = -0.36; x < 1e4; x = x < 1.0 ? x + 0.01 : x * 1.1) {
        const double w = lambert_w0(x);
        CHECK(w > prev);
        prev = w;
    }
}

TEST_CASE("schedule at n = 1000") {
    const Schedule s = schedule_for(1000);
    const double log_n = std::log(1000.0);
    const double w = lambert_bisect(log_n);
    const double k = (w + 0.5 * log_n) / (log_n * (0.5 * std::exp(w) + 1.0));
    CHECK(s.dimension == 4);
    CHECK(s.bandwidth_exponent == doctest::Approx(k).epsilon(1e-12));
    CHECK(s.bandwidth_exponent == doctest::Approx(0.2196).epsilon(2e-4));
    CHECK(s.bandwidth == doctest::Approx(0.2194).epsilon(2e-4));
    CHECK(s.bins_per_axis() == 5);
    CHECK(s.block_length == 7);
    CHECK(s.block_pairs == 71);
}

TEST_CASE("schedule at n = 8") {
    const Schedule s = schedule_for(8, 1.0);
    CHECK(s.block_length == 3);
    CHECK(s.block_pairs == 1);
    CHECK_THROWS_AS((void)schedule_for(7), std::domain_error);
    CHECK_THROWS_AS((void)schedule_for(8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)schedule_for(8, 10.0), std::invalid_argument);
}

TEST_CASE("schedule at n = 10^6") {
    const Schedule s = schedule_for(1'000'000);
    const double log_n = std::log(1e6);
    CHECK(s.dimension == static_cast<std::size_t>(std::floor(std::exp(lambert_bisect(log_n)))));
    CHECK(s.dimension > schedule_for(1000).dimension);
    CHECK(static_cast<double>(s.dimension) <= log_n);
}

TEST_CASE("schedule sanity over n") {
    std::vector<std::size_t> ns;
    for (std::size_t n = 16; n <= 1'000'000; n = n * 3 / 2) ns.push_back(n);
    ns.push_back(1'000'000);
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const std::size_t n = ns[i];
        const Schedule s = schedule_for(n);
        const double log_n = std::log(static_cast<double>(n));
        const double growth = std::exp(lambert_w0(log_n));
        CHECK(growth >= std::log(log_n));
        CHECK(growth <= log_n);
        CHECK(static_cast<double>(s.dimension) >= std::log(log_n));
        CHECK(static_cast<double>(s.dimension) <= log_n);
        CHECK(s.bandwidth > 0.0);
        CHECK(s.bandwidth <= 1.0);
        CHECK(s.bandwidth_exponent > 0.0);
        for (double g : {0.5, 1.0, 2.0}) {
            if (2 * static_cast<std::size_t>(std::ceil(g * log_n)) > n) continue;
            const Schedule b = schedule_for(n, g);
            CHECK(2 * b.block_pairs * b.block_length <= n);
            CHECK(n < 2 * (b.block_pairs + 1) * b.block_length);
        }
        if (i > 0) {
            const Schedule prev = schedule_for(ns[i - 1]);
            CHECK(prev.dimension <= s.dimension);
            CHECK(prev.bandwidth >= s.bandwidth);
        }
    }
}
