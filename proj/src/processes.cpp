#include "betamix/processes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "betamix/markov.hpp"
#include "betamix/rng.hpp"

namespace betamix {

std::size_t FunctionalEmission::alphabet() const noexcept {
    return emit.empty() ? 0 : *std::max_element(emit.begin(), emit.end()) + 1;
}

namespace {

void validate_chain(const FiniteMarkovChain& chain) {
    require_stochastic(chain.transition);
    if (chain.initial) {
        const auto& init = *chain.initial;
        if (init.size() != chain.transition.rows()) {
            throw std::invalid_argument("initial distribution length does not match the number of states");
        }
        if ((init.array() < 0.0).any() || std::abs(init.sum() - 1.0) > 1e-12) {
            throw std::invalid_argument("initial distribution is not a probability vector");
        }
    }
}

struct Validator {
    void operator()(const FiniteMarkovChain& c) const { validate_chain(c); }
    void operator()(const FunctionalEmission& e) const {
        validate_chain(e.hidden);
        if (e.emit.size() != e.hidden.states()) {
            throw std::invalid_argument("emission map must be defined on every hidden state");
        }
    }
    void operator()(const Ar1& ar) const {
        if (!(std::abs(ar.phi) < 1.0)) throw std::invalid_argument("AR(1) coefficient must satisfy |phi| < 1");
        if (!(ar.innovation_variance > 0.0) || !std::isfinite(ar.innovation_variance)) {
            throw std::invalid_argument("AR(1) innovation variance must be positive");
        }
    }
    void operator()(const IidUniform&) const {}
};

std::size_t draw_index(Rng& rng, const Eigen::Ref<const Eigen::RowVectorXd>& probs) {
    const double u = rng.uniform();
    double acc = 0.0;
    const Eigen::Index last = probs.size() - 1;
    for (Eigen::Index i = 0; i < last; ++i) {
        acc += probs(i);
        if (u < acc) return static_cast<std::size_t>(i);
    }
    // Fall through to the last state with positive probability.
    Eigen::Index i = last;
    while (i > 0 && probs(i) <= 0.0) --i;
    return static_cast<std::size_t>(i);
}

std::vector<std::size_t> simulate_states(const FiniteMarkovChain& chain, std::size_t n, Rng& rng) {
    const Eigen::RowVectorXd start =
        chain.initial ? Eigen::RowVectorXd(chain.initial->transpose())
                      : Eigen::RowVectorXd(stationary_distribution(chain.transition).transpose());
    std::vector<std::size_t> states(n);
    states[0] = draw_index(rng, start);
    for (std::size_t t = 1; t < n; ++t) {
        states[t] = draw_index(rng, chain.transition.row(static_cast<Eigen::Index>(states[t - 1])));
    }
    return states;
}

}  // namespace

void validate(const ProcessSpec& spec) { std::visit(Validator{}, spec); }

std::string describe(const ProcessSpec& spec) {
    struct Namer {
        std::string operator()(const FiniteMarkovChain& c) const {
            return "markov(" + std::to_string(c.states()) + " states)";
        }
        std::string operator()(const FunctionalEmission& e) const {
            return "functional-emission(" + std::to_string(e.hidden.states()) + " hidden states)";
        }
        std::string operator()(const Ar1& ar) const {
            std::ostringstream os;
            os << "ar1(phi=" << ar.phi << " sigma2=" << ar.innovation_variance << ")";
            return os.str();
        }
        std::string operator()(const IidUniform&) const { return "iid-uniform"; }
    };
    return std::visit(Namer{}, spec);
}

FiniteMarkovChain two_state_chain(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0 && q >= 0.0 && q <= 1.0)) {
        throw std::invalid_argument("two_state_chain: p and q must lie in [0, 1]");
    }
    FiniteMarkovChain chain;
    chain.transition.resize(2, 2);
    chain.transition << 1.0 - p, p, q, 1.0 - q;
    return chain;
}

FiniteMarkovChain default_two_state_chain() { return two_state_chain(1.0 / 3.0, 1.0 / 6.0); }

FiniteMarkovChain pair_chain(const FiniteMarkovChain& base) {
    const Eigen::Index k = base.transition.rows();
    FiniteMarkovChain pairs;
    pairs.transition = Eigen::MatrixXd::Zero(k * k, k * k);
    for (Eigen::Index cur = 0; cur < k; ++cur) {
        for (Eigen::Index prev = 0; prev < k; ++prev) {
            for (Eigen::Index next = 0; next < k; ++next) {
                pairs.transition(cur * k + prev, next * k + cur) = base.transition(cur, next);
            }
        }
    }
    return pairs;
}

FunctionalEmission even_process_spec(double p, double q) {
    FunctionalEmission spec;
    spec.hidden = pair_chain(two_state_chain(p, q));
    spec.emit.resize(4);
    for (std::size_t cur = 0; cur < 2; ++cur) {
        for (std::size_t prev = 0; prev < 2; ++prev) {
            spec.emit[cur * 2 + prev] = cur != prev ? 1 : 0;
        }
    }
    return spec;
}

TimeSeries simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("simulate: n must be at least 1");
    validate(spec);
    Rng rng(seed);

    struct Simulator {
        std::size_t n;
        Rng& rng;

        TimeSeries operator()(const FiniteMarkovChain& c) const {
            const auto states = simulate_states(c, n, rng);
            return TimeSeries::discrete(std::vector<double>(states.begin(), states.end()), c.states());
        }
        TimeSeries operator()(const FunctionalEmission& e) const {
            const auto states = simulate_states(e.hidden, n, rng);
            std::vector<double> out(n);
            std::transform(states.begin(), states.end(), out.begin(),
                           [&](std::size_t s) { return static_cast<double>(e.emit[s]); });
            return TimeSeries::discrete(std::move(out), e.alphabet());
        }
        TimeSeries operator()(const Ar1& ar) const {
            std::normal_distribution<double> normal(0.0, 1.0);
            const double innovation_sd = std::sqrt(ar.innovation_variance);
            std::vector<double> z(n);
            z[0] = std::sqrt(ar.stationary_variance()) * normal(rng);
            for (std::size_t t = 1; t < n; ++t) z[t] = ar.phi * z[t - 1] + innovation_sd * normal(rng);
            return TimeSeries::continuous(std::move(z));
        }
        TimeSeries operator()(const IidUniform&) const {
            std::vector<double> u(n);
            for (auto& v : u) v = rng.uniform();
            return TimeSeries::continuous(std::move(u));
        }
    };
    return std::visit(Simulator{n, rng}, spec);
}

}  // namespace betamix
