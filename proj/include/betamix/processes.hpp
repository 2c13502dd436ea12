#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "betamix/time_series.hpp"

namespace betamix {

/// Finite-state chain observed directly; the emitted symbol is the state.
struct FiniteMarkovChain {
    Eigen::MatrixXd transition;
    /// Starting law; the stationary law when empty.
    std::optional<Eigen::VectorXd> initial;

    [[nodiscard]] std::size_t states() const noexcept { return static_cast<std::size_t>(transition.rows()); }
};

/// Deterministic function of a hidden finite chain: X_t = emit[S_t].
struct FunctionalEmission {
    FiniteMarkovChain hidden;
    std::vector<std::size_t> emit;

    [[nodiscard]] std::size_t alphabet() const noexcept;
};

/// Z_t = phi Z_{t-1} + eta_t with eta_t ~ N(0, innovation_variance).
struct Ar1 {
    double phi = 0.5;
    double innovation_variance = 1.0;

    [[nodiscard]] double stationary_variance() const noexcept {
        return innovation_variance / (1.0 - phi * phi);
    }
};

/// IID draws from U[0, 1].
struct IidUniform {};

using ProcessSpec = std::variant<FiniteMarkovChain, FunctionalEmission, Ar1, IidUniform>;

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const ProcessSpec& spec);

/// Short human-readable label, used in file metadata.
[[nodiscard]] std::string describe(const ProcessSpec& spec);

/// States A = 0, B = 1 with P(A->B) = p and P(B->A) = q.
[[nodiscard]] FiniteMarkovChain two_state_chain(double p, double q);

/// The chain used by the two-state examples: beta(a) = (4/9)(1/2)^a.
[[nodiscard]] FiniteMarkovChain default_two_state_chain();

/// Chain of consecutive pairs (S_t, S_{t-1}); state index = current * K + previous.
[[nodiscard]] FiniteMarkovChain pair_chain(const FiniteMarkovChain& base);

/// X_t = 1 when (S_t, S_{t-1}) is (A, B) or (B, A), else 0, over the pair
/// chain of two_state_chain(p, q). The default hidden chain (A stays with
/// probability 1/2, B always returns to A) makes every run of ones even
/// and has the same beta curve as default_two_state_chain().
[[nodiscard]] FunctionalEmission even_process_spec(double p = 0.5, double q = 1.0);

/// Path of length n started from the stationary law (or chain.initial).
/// Finite-state specs produce discrete series; the same seed always yields
/// the same path.
[[nodiscard]] TimeSeries simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

}  // namespace betamix
