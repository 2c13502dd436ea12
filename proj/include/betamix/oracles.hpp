#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "betamix/processes.hpp"
#include "json.hpp"

namespace betamix {

enum class Provenance { Estimated, OracleClosedForm, OracleQuadrature, OracleEnumeration, Bound };

[[nodiscard]] std::string to_string(Provenance p);
[[nodiscard]] Provenance provenance_from_string(const std::string& s);

struct BetaPoint {
    std::size_t lag = 1;
    double value = 0.0;
    std::optional<double> lo;
    std::optional<double> hi;
};

/// beta values over increasing lags, tagged with where they came from.
struct BetaCurve {
    Provenance provenance = Provenance::Estimated;
    std::vector<BetaPoint> points;

    /// Throws std::invalid_argument unless values are in [0, 1], lags strictly
    /// increase and lo <= value <= hi wherever bounds are present.
    void validate() const;
};

/// CSV with header `a,value,lo,hi,provenance`; absent bounds are empty fields.
void write_curve_csv(std::ostream& out, const BetaCurve& curve);
[[nodiscard]] nlohmann::json curve_to_json(const BetaCurve& curve);
[[nodiscard]] BetaCurve curve_from_json(const nlohmann::json& j);

/// beta(a) = sum_x pi(x) * TV(P^a(x, .), pi) for a stationary finite chain.
/// Throws std::domain_error for chains without a unique aperiodic stationary law.
[[nodiscard]] double markov_beta(const FiniteMarkovChain& chain, std::size_t lag);

/// Total variation distance between N(mean1, var1) and N(mean2, var2),
/// from the crossing points of the two densities.
[[nodiscard]] double normal_tv(double mean1, double var1, double mean2, double var2);

/// beta(a) of a stationary Gaussian AR(1): the outer integral over the
/// stationary law is done by composite Gauss-Legendre panels on +-8 SD with
/// panel doubling until successive estimates differ by < tolerance/2.
/// Throws std::runtime_error if that does not happen within 2^16 panels.
[[nodiscard]] double ar1_beta(const Ar1& spec, std::size_t lag, double tolerance = 1e-10);

/// Exact law of (X_{t-d+1..t}, X_{t+a..t+a+d-1}) for a finite-state process
/// in stationarity. Words are packed with the first symbol least
/// significant; joint index = first_word + second_word * alphabet^d, the
/// same layout the histogram module uses for a 2d-axis grid.
struct FiniteJointLaw {
    std::size_t alphabet = 0;
    std::size_t dim = 0;
    std::vector<double> marginal;
    std::vector<double> joint;
};

/// Forward propagation over hidden states; throws std::length_error when
/// alphabet^(2d) exceeds 10^7.
[[nodiscard]] FiniteJointLaw finite_joint_law(const FunctionalEmission& process, std::size_t dim, std::size_t lag);
[[nodiscard]] FiniteJointLaw finite_joint_law(const FiniteMarkovChain& chain, std::size_t dim, std::size_t lag);

/// beta^d(a) = (1/2) sum |joint - marginal x marginal| from finite_joint_law.
[[nodiscard]] double finite_beta_d(const FunctionalEmission& process, std::size_t dim, std::size_t lag);
[[nodiscard]] double finite_beta_d(const FiniteMarkovChain& chain, std::size_t dim, std::size_t lag);

/// Ground truth targeted by a d-dimensional estimate at lag a. Markov and
/// AR(1) specs return beta(a) (which equals beta^d(a)); functional emissions
/// return the enumerated beta^d(a); IID returns 0.
struct OracleValue {
    double value = 0.0;
    Provenance provenance = Provenance::OracleClosedForm;
};
[[nodiscard]] OracleValue oracle_beta(const ProcessSpec& spec, std::size_t dim, std::size_t lag,
                                      double tolerance = 1e-10);

}  // namespace betamix
