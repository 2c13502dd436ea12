#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "betamix/markov.hpp"
#include "betamix/oracles.hpp"
#include "betamix/processes.hpp"
#include "betamix/rng.hpp"
#include "doctest.h"

using namespace betamix;

namespace {

double two_state_closed_form(double p, double q, std::size_t a) {
    return 2.0 * p * q / ((p + q) * (p + q)) * std::pow(std::abs(1.0 - p - q), static_cast<double>(a));
}

double gauss_pdf(double x, double mean, double var) {
    return std::exp(-(x - mean) * (x - mean) / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

// Riemann sum of |p - q| / 2 on a fine grid.
double dense_normal_tv(double m1, double v1, double m2, double v2) {
    const double sd = std::sqrt(std::max(v1, v2));
    const double lo = std::min(m1, m2) - 14.0 * sd;
    const double hi = std::max(m1, m2) + 14.0 * sd;
    const int steps = 400'000;
    const double dx = (hi - lo) / steps;
    double s = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double x = lo + (i + 0.5) * dx;
        s += std::abs(gauss_pdf(x, m1, v1) - gauss_pdf(x, m2, v2));
    }
    return 0.5 * s * dx;
}

// beta(a) = E_{x ~ pi, y ~ P^a(x, .)} max(0, 1 - pi(y) / p_a(y | x)).
double ar1_beta_monte_carlo(const Ar1& spec, std::size_t lag, std::size_t draws, std::uint64_t seed) {
    const double v = spec.stationary_variance();
    const double phi_a = std::pow(spec.phi, static_cast<double>(lag));
    const double cond_var = v * (1.0 - phi_a * phi_a);
    Rng rng(seed);
    std::normal_distribution<double> normal;
    double sum = 0.0;
    for (std::size_t i = 0; i < draws; ++i) {
        const double x = std::sqrt(v) * normal(rng);
        const double y = phi_a * x + std::sqrt(cond_var) * normal(rng);
        sum += std::max(0.0, 1.0 - gauss_pdf(y, 0.0, v) / gauss_pdf(y, phi_a * x, cond_var));
    }
    return sum / static_cast<double>(draws);
}

// Enumerates every hidden path of length 2d + a - 1 and sums path
// probabilities into the two observed d-words directly.
double naive_beta_d(const FunctionalEmission& process, std::size_t d, std::size_t a) {
    const auto& P = process.hidden.transition;
    const Eigen::VectorXd pi = stationary_distribution(P);
    const std::size_t k = process.hidden.states();
    const std::size_t A = process.alphabet();
    const std::size_t len = 2 * d + a - 1;
    std::size_t words = 1;
    for (std::size_t i = 0; i < d; ++i) words *= A;
    std::vector<double> joint(words * words, 0.0);
    std::vector<std::size_t> path(len, 0);
    while (true) {
        double prob = pi(static_cast<Eigen::Index>(path[0]));
        for (std::size_t t = 1; t < len && prob > 0.0; ++t) {
            prob *= P(static_cast<Eigen::Index>(path[t - 1]), static_cast<Eigen::Index>(path[t]));
        }
        if (prob > 0.0) {
            std::size_t w1 = 0, w2 = 0, scale = 1;
            for (std::size_t i = 0; i < d; ++i) {
                w1 += process.emit[path[i]] * scale;
                w2 += process.emit[path[d - 1 + a + i]] * scale;
                scale *= A;
            }
            joint[w1 + w2 * words] += prob;
        }
        std::size_t pos = 0;
        while (pos < len && ++path[pos] == k) path[pos++] = 0;
        if (pos == len) break;
    }
    std::vector<double> marginal(words, 0.0);
    for (std::size_t w1 = 0; w1 < words; ++w1) {
        for (std::size_t w2 = 0; w2 < words; ++w2) marginal[w1] += joint[w1 + w2 * words];
    }
    double s = 0.0;
    for (std::size_t w1 = 0; w1 < words; ++w1) {
        for (std::size_t w2 = 0; w2 < words; ++w2) s += std::abs(joint[w1 + w2 * words] - marginal[w1] * marginal[w2]);
    }
    return 0.5 * s;
}

FunctionalEmission identity_emission(const FiniteMarkovChain& chain) {
    FunctionalEmission e{chain, {}};
    for (std::size_t s = 0; s < chain.states(); ++s) e.emit.push_back(s);
    return e;
}

}  // namespace

TEST_CASE("two-state beta examples") {
    const auto chain = default_two_state_chain();
    CHECK(markov_beta(chain, 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
    CHECK(markov_beta(chain, 2) == doctest::Approx(1.0 / 9.0).epsilon(1e-13));
    CHECK(markov_beta(chain, 10) == doctest::Approx(4.0 / 9.0 / 1024.0).epsilon(1e-11));
    CHECK(markov_beta(two_state_chain(0.5, 1.0), 1) == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
    CHECK(markov_beta(two_state_chain(0.5, 0.5), 3) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("two-state beta matches the closed form on a grid") {
    for (double p = 0.05; p < 1.0; p += 0.15) {
        for (double q = 0.1; q < 1.0; q += 0.2) {
            const auto chain = two_state_chain(p, q);
            for (std::size_t a = 1; a <= 12; ++a) {
                CHECK(std::abs(markov_beta(chain, a) - two_state_closed_form(p, q, a)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("log beta is affine in a for a two-state chain") {
    const auto chain = two_state_chain(0.2, 0.3);
    const double slope = std::log(markov_beta(chain, 2)) - std::log(markov_beta(chain, 1));
    CHECK(slope == doctest::Approx(std::log(0.5)).epsilon(1e-10));
    for (std::size_t a = 2; a <= 15; ++a) {
        CHECK(std::log(markov_beta(chain, a + 1)) - std::log(markov_beta(chain, a)) ==
              doctest::Approx(slope).epsilon(1e-8));
    }
}

TEST_CASE("chains without a unique aperiodic law are rejected") {
    Eigen::MatrixXd flip(2, 2);
    flip << 0, 1, 1, 0;
    CHECK_THROWS_AS((void)markov_beta(FiniteMarkovChain{flip, std::nullopt}, 1), std::domain_error);
    CHECK_THROWS_AS((void)markov_beta(FiniteMarkovChain{Eigen::MatrixXd::Identity(2, 2), std::nullopt}, 1),
                    std::domain_error);
    Eigen::MatrixXd transient(3, 3);
    transient << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.0, 0.5, 0.5;
    CHECK_NOTHROW((void)markov_beta(FiniteMarkovChain{transient, std::nullopt}, 1));
}

TEST_CASE("stationary distribution solves pi P = pi") {
    Eigen::MatrixXd P(3, 3);
    P << 0.1, 0.6, 0.3, 0.4, 0.4, 0.2, 0.5, 0.0, 0.5;
    const Eigen::VectorXd pi = stationary_distribution(P);
    const Eigen::RowVectorXd residual = pi.transpose() * P - pi.transpose();
    CHECK(residual.cwiseAbs().sum() < 1e-13);
    CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-14));
    const Eigen::MatrixXd P5 = matrix_power(P, 5);
    CHECK((P5 - P * P * P * P * P).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("normal_tv agrees with dense integration") {
    CHECK(normal_tv(0, 1, 0, 1) == 0.0);
    const double cases[][4] = {{0, 1, 1, 1}, {0, 1, 0, 4}, {0.3, 2, -1, 0.5}, {5, 1, 5.1, 1.2}, {0, 1, 10, 1}};
    for (const auto& c : cases) {
        const double v = normal_tv(c[0], c[1], c[2], c[3]);
        CHECK(v == doctest::Approx(dense_normal_tv(c[0], c[1], c[2], c[3])).epsilon(1e-7));
        CHECK(v == doctest::Approx(normal_tv(c[2], c[3], c[0], c[1])).epsilon(1e-14));
    }
}

TEST_CASE("AR(1) beta basics") {
    CHECK(ar1_beta(Ar1{0.0, 1.0}, 1) == 0.0);
    double prev = 1.0;
    for (std::size_t a = 1; a <= 10; ++a) {
        const double b = ar1_beta(Ar1{0.5, 1.0}, a);
        CHECK(b > 0.0);
        CHECK(b < prev);
        prev = b;
    }
    // Scale invariance: only phi matters.
    CHECK(ar1_beta(Ar1{0.5, 7.0}, 3) == doctest::Approx(ar1_beta(Ar1{0.5, 1.0}, 3)).epsilon(1e-9));
    // Sign of phi does not change the law of |dependence|.
    CHECK(ar1_beta(Ar1{-0.5, 1.0}, 1) == doctest::Approx(ar1_beta(Ar1{0.5, 1.0}, 1)).epsilon(1e-9));
}

TEST_CASE("AR(1) beta agrees with Monte Carlo") {
    const Ar1 spec{0.5, 1.0};
    for (std::size_t a : {1, 2, 4}) {
        const double mc = ar1_beta_monte_carlo(spec, a, 200'000, 100 + a);
        CHECK(std::abs(ar1_beta(spec, a) - mc) < 3e-3);
    }
}

TEST_CASE("enumeration matches the chain oracle for observed chains") {
    const auto chain = two_state_chain(0.3, 0.45);
    for (std::size_t a = 1; a <= 5; ++a) {
        for (std::size_t d = 1; d <= 3; ++d) {
            CHECK(finite_beta_d(chain, d, a) == doctest::Approx(markov_beta(chain, a)).epsilon(1e-12));
        }
    }
}

TEST_CASE("enumeration matches naive path summation") {
    const FunctionalEmission even = even_process_spec();
    Eigen::MatrixXd P(3, 3);
    P << 0.2, 0.5, 0.3, 0.6, 0.1, 0.3, 0.25, 0.25, 0.5;
    const FunctionalEmission lumped{FiniteMarkovChain{P, std::nullopt}, {0, 1, 1}};
    for (std::size_t d = 1; d <= 2; ++d) {
        for (std::size_t a = 1; a <= 4; ++a) {
            CHECK(std::abs(finite_beta_d(even, d, a) - naive_beta_d(even, d, a)) <= 1e-13);
            CHECK(std::abs(finite_beta_d(lumped, d, a) - naive_beta_d(lumped, d, a)) <= 1e-13);
        }
    }
    const auto chain = default_two_state_chain();
    CHECK(std::abs(naive_beta_d(identity_emission(chain), 1, 3) - markov_beta(chain, 3)) <= 1e-13);
}

TEST_CASE("even process beta_d grows with d and stays under the hidden-chain beta") {
    const FunctionalEmission even = even_process_spec();
    for (std::size_t a = 1; a <= 4; ++a) {
        const double bound = markov_beta(even.hidden, a);
        double prev = 0.0;
        for (std::size_t d = 1; d <= 4; ++d) {
            const double b = finite_beta_d(even, d, a);
            CHECK(b >= prev - 8 * std::numeric_limits<double>::epsilon());
            CHECK(b <= bound + 1e-12);
            prev = b;
        }
    }
    CHECK(markov_beta(even.hidden, 1) == doctest::Approx(4.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("joint law is a probability vector with consistent marginals") {
    const auto law = finite_joint_law(even_process_spec(), 3, 2);
    CHECK(law.marginal.size() == 8);
    CHECK(law.joint.size() == 64);
    double total = 0.0;
    for (double x : law.joint) total += x;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
    for (std::size_t w = 0; w < 8; ++w) {
        double first = 0.0, second = 0.0;
        for (std::size_t u = 0; u < 8; ++u) {
            first += law.joint[w + u * 8];
            second += law.joint[u + w * 8];
        }
        CHECK(first == doctest::Approx(law.marginal[w]).epsilon(1e-12));
        CHECK(second == doctest::Approx(law.marginal[w]).epsilon(1e-12));
    }
}

TEST_CASE("enumeration refuses oversized alphabets") {
    CHECK_THROWS_AS((void)finite_joint_law(even_process_spec(), 12, 1), std::length_error);
}

TEST_CASE("oracle dispatch") {
    CHECK(oracle_beta(default_two_state_chain(), 1, 1).provenance == Provenance::OracleClosedForm);
    CHECK(oracle_beta(even_process_spec(), 2, 1).provenance == Provenance::OracleEnumeration);
    CHECK(oracle_beta(Ar1{}, 1, 1).provenance == Provenance::OracleQuadrature);
    CHECK(oracle_beta(IidUniform{}, 1, 1).value == 0.0);
}

TEST_CASE("beta curve validation and serialisation") {
    BetaCurve curve{Provenance::Estimated, {{1, 0.2, 0.1, 0.3}, {2, 0.1, std::nullopt, std::nullopt}}};
    CHECK_NOTHROW(curve.validate());
    const BetaCurve back = curve_from_json(curve_to_json(curve));
    REQUIRE(back.points.size() == 2);
    CHECK(back.points[0].lo == 0.1);
    CHECK_FALSE(back.points[1].hi.has_value());
    CHECK(back.provenance == Provenance::Estimated);

    std::ostringstream out;
    write_curve_csv(out, curve);
    CHECK(out.str().rfind("a,value,lo,hi,provenance\n", 0) == 0);
    CHECK(out.str().find("2,0.1,,,estimated") != std::string::npos);

    BetaCurve bad = curve;
    bad.points[1].lag = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = curve;
    bad.points[0].value = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = curve;
    bad.points[0].lo = 0.25;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    for (auto p : {Provenance::Estimated, Provenance::OracleClosedForm, Provenance::OracleQuadrature,
                   Provenance::OracleEnumeration, Provenance::Bound}) {
        CHECK(provenance_from_string(to_string(p)) == p);
    }
    CHECK_THROWS((void)provenance_from_string("guess"));
}
