#include "betamix/oracles.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "betamix/format.hpp"
#include "betamix/markov.hpp"

namespace betamix {

std::string to_string(Provenance p) {
    switch (p) {
        case Provenance::Estimated: return "estimated";
        case Provenance::OracleClosedForm: return "oracle-closed-form";
        case Provenance::OracleQuadrature: return "oracle-quadrature";
        case Provenance::OracleEnumeration: return "oracle-enumeration";
        case Provenance::Bound: return "bound";
    }
    return "unknown";
}

Provenance provenance_from_string(const std::string& s) {
    for (Provenance p : {Provenance::Estimated, Provenance::OracleClosedForm, Provenance::OracleQuadrature,
                         Provenance::OracleEnumeration, Provenance::Bound}) {
        if (to_string(p) == s) return p;
    }
    throw std::invalid_argument("unknown provenance `" + s + "`");
}

void BetaCurve::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        if (!(pt.value >= 0.0 && pt.value <= 1.0)) {
            throw std::invalid_argument("BetaCurve: value at a=" + std::to_string(pt.lag) + " outside [0, 1]");
        }
        if (i > 0 && pt.lag <= points[i - 1].lag) throw std::invalid_argument("BetaCurve: lags must strictly increase");
        if ((pt.lo && *pt.lo > pt.value) || (pt.hi && *pt.hi < pt.value)) {
            throw std::invalid_argument("BetaCurve: interval at a=" + std::to_string(pt.lag) + " excludes the value");
        }
    }
}

void write_curve_csv(std::ostream& out, const BetaCurve& curve) {
    out << "a,value,lo,hi,provenance\n";
    const std::string prov = to_string(curve.provenance);
    for (const auto& pt : curve.points) {
        out << pt.lag << ',' << format_double(pt.value) << ',' << (pt.lo ? format_double(*pt.lo) : "") << ','
            << (pt.hi ? format_double(*pt.hi) : "") << ',' << prov << '\n';
    }
}

nlohmann::json curve_to_json(const BetaCurve& curve) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& pt : curve.points) {
        nlohmann::json p{{"a", pt.lag}, {"value", pt.value}};
        p["lo"] = pt.lo ? nlohmann::json(*pt.lo) : nlohmann::json(nullptr);
        p["hi"] = pt.hi ? nlohmann::json(*pt.hi) : nlohmann::json(nullptr);
        pts.push_back(std::move(p));
    }
    return {{"provenance", to_string(curve.provenance)}, {"points", std::move(pts)}};
}

BetaCurve curve_from_json(const nlohmann::json& j) {
    BetaCurve curve;
    curve.provenance = provenance_from_string(j.at("provenance").get<std::string>());
    for (const auto& p : j.at("points")) {
        BetaPoint pt;
        pt.lag = p.at("a").get<std::size_t>();
        pt.value = p.at("value").get<double>();
        if (p.contains("lo") && !p["lo"].is_null()) pt.lo = p["lo"].get<double>();
        if (p.contains("hi") && !p["hi"].is_null()) pt.hi = p["hi"].get<double>();
        curve.points.push_back(pt);
    }
    curve.validate();
    return curve;
}

double markov_beta(const FiniteMarkovChain& chain, std::size_t lag) {
    const Eigen::VectorXd pi = stationary_distribution(chain.transition);
    const Eigen::MatrixXd pa = matrix_power(chain.transition, lag);
    double beta = 0.0;
    for (Eigen::Index x = 0; x < pa.rows(); ++x) {
        if (pi(x) == 0.0) continue;
        beta += pi(x) * 0.5 * (pa.row(x) - pi.transpose()).lpNorm<1>();
    }
    return std::clamp(beta, 0.0, 1.0);
}

namespace {

// P(Z < lo) + P(Z > hi) for Z ~ N(mean, var), using erfc on both tails.
double outside_mass(double lo, double hi, double mean, double var) {
    const double scale = std::sqrt(2.0 * var);
    return 0.5 * std::erfc((mean - lo) / scale) + 0.5 * std::erfc((hi - mean) / scale);
}

double normal_pdf(double x, double var) {
    return std::exp(-0.5 * x * x / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
GaussLegendre gauss_legendre(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

template <typename F>
double composite_gauss(const F& f, double lo, double hi, std::size_t panels, const GaussLegendre& rule) {
    const double h = (hi - lo) / static_cast<double>(panels);
    double sum = 0.0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double mid = lo + (static_cast<double>(p) + 0.5) * h;
        double panel = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) panel += rule.weights[k] * f(mid + 0.5 * h * rule.nodes[k]);
        sum += 0.5 * h * panel;
    }
    return sum;
}

}  // namespace

double normal_tv(double mean1, double var1, double mean2, double var2) {
    if (!(var1 > 0.0) || !(var2 > 0.0)) throw std::invalid_argument("normal_tv: variances must be positive");
    if (var1 == var2) {
        // Single crossing at the midpoint.
        return std::erf(std::abs(mean1 - mean2) / (2.0 * std::sqrt(2.0 * var1)));
    }
    if (var1 > var2) {
        std::swap(var1, var2);
        std::swap(mean1, mean2);
    }
    // Narrow density 1 exceeds wide density 2 strictly between the roots of
    // (v1 - v2) x^2 + 2 (v2 m1 - v1 m2) x + (v1 m2^2 - v2 m1^2 + v1 v2 log(v2/v1)).
    const double a = var1 - var2;
    const double b = 2.0 * (var2 * mean1 - var1 * mean2);
    const double c = var1 * mean2 * mean2 - var2 * mean1 * mean1 + var1 * var2 * std::log(var2 / var1);
    const double disc = std::max(0.0, b * b - 4.0 * a * c);
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = q / a;
    double r2 = q != 0.0 ? c / q : r1;
    if (r1 > r2) std::swap(r1, r2);
    // TV = P1(inside) - P2(inside) = P2(outside) - P1(outside).
    const double tv = outside_mass(r1, r2, mean2, var2) - outside_mass(r1, r2, mean1, var1);
    return std::clamp(tv, 0.0, 1.0);
}

double ar1_beta(const Ar1& spec, std::size_t lag, double tolerance) {
    validate(ProcessSpec{spec});
    if (!(tolerance > 0.0)) throw std::invalid_argument("ar1_beta: tolerance must be positive");
    if (spec.phi == 0.0) return 0.0;

    const double stationary_var = spec.stationary_variance();
    const double shrink = std::pow(spec.phi, static_cast<double>(lag));
    const double conditional_var = stationary_var * (1.0 - shrink * shrink);
    if (!(conditional_var > 0.0)) return 1.0;

    const auto integrand = [&](double x) {
        return normal_pdf(x, stationary_var) * normal_tv(shrink * x, conditional_var, 0.0, stationary_var);
    };
    static const GaussLegendre rule = gauss_legendre(10);
    const double half_width = 8.0 * std::sqrt(stationary_var);

    std::size_t panels = 8;
    double previous = composite_gauss(integrand, -half_width, half_width, panels, rule);
    while (panels < (std::size_t{1} << 16)) {
        panels *= 2;
        const double current = composite_gauss(integrand, -half_width, half_width, panels, rule);
        if (std::abs(current - previous) < 0.5 * tolerance) return std::clamp(current, 0.0, 1.0);
        previous = current;
    }
    throw std::runtime_error("ar1_beta: quadrature did not converge to the requested tolerance");
}

namespace {

std::size_t checked_power(std::size_t base, std::size_t exp, std::size_t limit) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (r > limit / base) throw std::length_error("finite_joint_law: alphabet^(2d) exceeds 1e7 words");
        r *= base;
    }
    return r;
}

}  // namespace

FiniteJointLaw finite_joint_law(const FunctionalEmission& process, std::size_t dim, std::size_t lag) {
    validate(ProcessSpec{process});
    if (dim < 1 || lag < 1) throw std::invalid_argument("finite_joint_law: need d >= 1 and a >= 1");
    const std::size_t alphabet = process.alphabet();
    constexpr std::size_t kMaxWords = 10'000'000;
    checked_power(alphabet, 2 * dim, kMaxWords);
    const std::size_t words = checked_power(alphabet, dim, kMaxWords);

    const Eigen::MatrixXd& P = process.hidden.transition;
    const Eigen::Index k = P.rows();
    const Eigen::VectorXd pi = stationary_distribution(P);

    Eigen::MatrixXd emits = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(alphabet), k);
    for (Eigen::Index s = 0; s < k; ++s) emits(static_cast<Eigen::Index>(process.emit[s]), s) = 1.0;

    // forward.row(w)(s) = P(first block = w, hidden state at its last step = s).
    Eigen::MatrixXd forward(static_cast<Eigen::Index>(alphabet), k);
    for (std::size_t x = 0; x < alphabet; ++x) {
        forward.row(static_cast<Eigen::Index>(x)) = pi.transpose().cwiseProduct(emits.row(static_cast<Eigen::Index>(x)));
    }
    // backward.row(w)(s) = P(second block = w | hidden state at its first step = s).
    Eigen::MatrixXd backward = emits;
    std::size_t len_words = alphabet;
    for (std::size_t step = 1; step < dim; ++step) {
        const Eigen::MatrixXd moved = forward * P;
        const Eigen::MatrixXd ahead = backward * P.transpose();
        Eigen::MatrixXd next_forward(static_cast<Eigen::Index>(len_words * alphabet), k);
        Eigen::MatrixXd next_backward(static_cast<Eigen::Index>(len_words * alphabet), k);
        for (std::size_t x = 0; x < alphabet; ++x) {
            const auto mask = emits.row(static_cast<Eigen::Index>(x));
            for (std::size_t w = 0; w < len_words; ++w) {
                // Appending x as the newest (most significant) symbol.
                next_forward.row(static_cast<Eigen::Index>(w + x * len_words)) =
                    moved.row(static_cast<Eigen::Index>(w)).cwiseProduct(mask);
                // Prepending x as the oldest (least significant) symbol.
                next_backward.row(static_cast<Eigen::Index>(x + w * alphabet)) =
                    ahead.row(static_cast<Eigen::Index>(w)).cwiseProduct(mask);
            }
        }
        forward = std::move(next_forward);
        backward = std::move(next_backward);
        len_words *= alphabet;
    }

    const Eigen::MatrixXd gap = matrix_power(P, lag);
    const Eigen::MatrixXd joint = (forward * gap) * backward.transpose();

    FiniteJointLaw law;
    law.alphabet = alphabet;
    law.dim = dim;
    law.marginal.resize(words);
    for (std::size_t w = 0; w < words; ++w) law.marginal[w] = forward.row(static_cast<Eigen::Index>(w)).sum();
    law.joint.resize(words * words);
    for (std::size_t w2 = 0; w2 < words; ++w2) {
        for (std::size_t w1 = 0; w1 < words; ++w1) {
            law.joint[w1 + w2 * words] = joint(static_cast<Eigen::Index>(w1), static_cast<Eigen::Index>(w2));
        }
    }
    return law;
}

FiniteJointLaw finite_joint_law(const FiniteMarkovChain& chain, std::size_t dim, std::size_t lag) {
    FunctionalEmission identity{chain, {}};
    identity.emit.resize(chain.states());
    for (std::size_t s = 0; s < chain.states(); ++s) identity.emit[s] = s;
    return finite_joint_law(identity, dim, lag);
}

namespace {

double half_l1_from_law(const FiniteJointLaw& law) {
    const std::size_t words = law.marginal.size();
    double sum = 0.0;
    for (std::size_t w2 = 0; w2 < words; ++w2) {
        for (std::size_t w1 = 0; w1 < words; ++w1) {
            sum += std::abs(law.joint[w1 + w2 * words] - law.marginal[w1] * law.marginal[w2]);
        }
    }
    return std::clamp(0.5 * sum, 0.0, 1.0);
}

}  // namespace

double finite_beta_d(const FunctionalEmission& process, std::size_t dim, std::size_t lag) {
    return half_l1_from_law(finite_joint_law(process, dim, lag));
}

double finite_beta_d(const FiniteMarkovChain& chain, std::size_t dim, std::size_t lag) {
    return half_l1_from_law(finite_joint_law(chain, dim, lag));
}

OracleValue oracle_beta(const ProcessSpec& spec, std::size_t dim, std::size_t lag, double tolerance) {
    struct Dispatch {
        std::size_t dim;
        std::size_t lag;
        double tolerance;
        OracleValue operator()(const FiniteMarkovChain& c) const {
            return {markov_beta(c, lag), Provenance::OracleClosedForm};
        }
        OracleValue operator()(const FunctionalEmission& e) const {
            return {finite_beta_d(e, dim, lag), Provenance::OracleEnumeration};
        }
        OracleValue operator()(const Ar1& ar) const {
            return {ar1_beta(ar, lag, tolerance), Provenance::OracleQuadrature};
        }
        OracleValue operator()(const IidUniform&) const { return {0.0, Provenance::OracleClosedForm}; }
    };
    return std::visit(Dispatch{dim, lag, tolerance}, spec);
}

}  // namespace betamix
