#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "betamix/markov.hpp"
#include "betamix/processes.hpp"
#include "betamix/time_series.hpp"
#include "doctest.h"

using namespace betamix;

TEST_CASE("identity chain from a fixed start stays put") {
    FiniteMarkovChain chain{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Unit(3, 2)};
    const TimeSeries s = simulate(chain, 500, 1);
    CHECK(s.is_discrete());
    CHECK(s.alphabet() == 3);
    for (double x : s.values()) CHECK(x == 2.0);
}

TEST_CASE("identity chain without a start law is rejected") {
    FiniteMarkovChain chain{Eigen::MatrixXd::Identity(2, 2), std::nullopt};
    CHECK_THROWS((void)simulate(chain, 10, 1));
}

TEST_CASE("two-state chain visits A a third of the time") {
    const TimeSeries s = simulate(default_two_state_chain(), 100'000, 42);
    double zeros = 0.0;
    for (double x : s.values()) zeros += x == 0.0 ? 1.0 : 0.0;
    CHECK(std::abs(zeros / 1e5 - 1.0 / 3.0) <= 0.02);
}

TEST_CASE("two-state chain layout") {
    const auto c = two_state_chain(0.2, 0.7);
    CHECK(c.transition(0, 1) == 0.2);
    CHECK(c.transition(0, 0) == doctest::Approx(0.8));
    CHECK(c.transition(1, 0) == 0.7);
    const Eigen::VectorXd pi = stationary_distribution(c.transition);
    CHECK(pi(0) == doctest::Approx(0.7 / 0.9).epsilon(1e-13));
    CHECK_THROWS_AS((void)two_state_chain(-0.1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)two_state_chain(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("even process emits only even runs of ones") {
    const TimeSeries s = simulate(even_process_spec(), 100'000, 3);
    const auto& v = s.values();
    std::size_t first_zero = 0;
    while (first_zero < v.size() && v[first_zero] != 0.0) ++first_zero;
    REQUIRE(first_zero < v.size());
    std::size_t run = 0;
    std::size_t runs = 0;
    for (std::size_t i = first_zero; i < v.size(); ++i) {
        if (v[i] == 1.0) {
            ++run;
        } else {
            if (run > 0) {
                CHECK(run % 2 == 0);
                ++runs;
            }
            run = 0;
        }
    }
    CHECK(runs > 1000);
}

TEST_CASE("even process emission table") {
    const FunctionalEmission e = even_process_spec();
    CHECK(e.alphabet() == 2);
    REQUIRE(e.hidden.states() == 4);
    REQUIRE(e.emit.size() == 4);
    // state = current * 2 + previous
    CHECK(e.emit[0] == 0);
    CHECK(e.emit[1] == 1);
    CHECK(e.emit[2] == 1);
    CHECK(e.emit[3] == 0);
}

TEST_CASE("pair chain stationary law is pi(prev) P(prev, cur)") {
    const auto base = two_state_chain(0.3, 0.6);
    const auto pairs = pair_chain(base);
    const Eigen::VectorXd pi = stationary_distribution(base.transition);
    const Eigen::VectorXd joint = stationary_distribution(pairs.transition);
    for (int cur = 0; cur < 2; ++cur) {
        for (int prev = 0; prev < 2; ++prev) {
            CHECK(joint(cur * 2 + prev) == doctest::Approx(pi(prev) * base.transition(prev, cur)).epsilon(1e-12));
        }
    }
}

TEST_CASE("same seed same path, different seed different path") {
    const ProcessSpec specs[] = {default_two_state_chain(), even_process_spec(), Ar1{}, IidUniform{}};
    for (const auto& spec : specs) {
        for (std::uint64_t seed = 0; seed < 25; ++seed) {
            const auto a = simulate(spec, 200, seed);
            const auto b = simulate(spec, 200, seed);
            const auto c = simulate(spec, 200, seed + 1000);
            CHECK(a.values() == b.values());
            CHECK(a.values() != c.values());
        }
    }
}

TEST_CASE("AR(1) moments") {
    const TimeSeries s = simulate(Ar1{0.5, 1.0}, 100'000, 17);
    double mean = 0.0;
    for (double x : s.values()) mean += x;
    mean /= 1e5;
    double var = 0.0;
    for (double x : s.values()) var += (x - mean) * (x - mean);
    var /= 1e5 - 1.0;
    CHECK(std::abs(mean) <= 0.032);
    CHECK(std::abs(var - 4.0 / 3.0) <= 0.0385);
    CHECK_FALSE(s.is_discrete());
}

TEST_CASE("IID uniform stays in the unit interval") {
    const TimeSeries s = simulate(IidUniform{}, 10'000, 5);
    for (double x : s.values()) {
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("process validation") {
    CHECK_THROWS_AS(validate(Ar1{1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(Ar1{0.5, 0.0}), std::invalid_argument);
    Eigen::MatrixXd bad(2, 2);
    bad << 0.5, 0.6, 0.5, 0.5;
    CHECK_THROWS_AS(validate(FiniteMarkovChain{bad, std::nullopt}), std::invalid_argument);
    FunctionalEmission e = even_process_spec();
    e.emit.pop_back();
    CHECK_THROWS_AS(validate(e), std::invalid_argument);
    CHECK_NOTHROW(validate(IidUniform{}));
    CHECK(describe(Ar1{0.5, 1.0}) == "ar1(phi=0.5 sigma2=1)");
}

TEST_CASE("series CSV round trip") {
    const TimeSeries cont = simulate(Ar1{}, 300, 8);
    std::stringstream buf;
    write_series_csv(buf, cont, {{"seed", "8"}});
    const LoadedSeries back = read_series_csv(buf);
    CHECK(back.series.values() == cont.values());
    CHECK(back.metadata.at("seed") == "8");

    const TimeSeries disc = simulate(default_two_state_chain(), 300, 8);
    std::stringstream dbuf;
    write_series_csv(dbuf, disc);
    const LoadedSeries dback = read_series_csv(dbuf);
    CHECK(dback.series.is_discrete());
    CHECK(dback.series.alphabet() == 2);
    CHECK(dback.series.values() == disc.values());
}

TEST_CASE("malformed series CSV names the line") {
    std::istringstream in("value\n1.0\nabc\n");
    try {
        (void)read_series_csv(in);
        FAIL("expected runtime_error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::istringstream empty("");
    CHECK_THROWS_AS((void)read_series_csv(empty), std::runtime_error);
    CHECK_THROWS_AS((void)TimeSeries::discrete({0.0, 2.0}, 2), std::invalid_argument);
    CHECK_THROWS_AS((void)TimeSeries::continuous({std::nan("")}), std::invalid_argument);
}
