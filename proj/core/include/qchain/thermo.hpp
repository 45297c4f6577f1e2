// thermo.hpp - Steady-state heat, work and entropy production of the chain
//
// Sign convention everywhere: positive heat or work is energy entering the chain.

#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "qchain/fock.hpp"
#include "qchain/gaussian.hpp"
#include "qchain/linalg.hpp"
#include "qchain/lyapunov.hpp"
#include "qchain/model.hpp"

namespace qchain::thermo {

enum class Regime {
    Refrigerator,   ///< heat drawn from the cold bath, work consumed
    Engine,         ///< work produced from the hot bath
    Accelerator,    ///< work consumed, hot-to-cold flow boosted
    Heater,         ///< work dumped as heat into both baths
    CarnotPoint,    ///< all rates vanish with the chain coupled
    EqualFrequency, ///< no work, plain conduction
    Degenerate,     ///< uncoupled chain
};

std::string_view to_string(Regime r);

struct Classification {
    Regime regime{Regime::Degenerate};
    std::optional<double> figure_of_merit; ///< COP (refrigerator) or efficiency (engine)
};

struct ThermoReport {
    std::array<double, 2> q_dot{};          ///< cold bath, hot bath
    double w_dot{0.0};
    std::optional<double> internal_current; ///< N = 2, eta = 0 only
    double entropy_rate{0.0};
    Regime regime{Regime::Degenerate};
    std::optional<double> figure_of_merit;
};

/// Returns <O> for an operator on the truncated space.
using ExpectationFn = std::function<cplx(const CMatrix&)>;

struct SiteHeat {
    std::size_t site{0};
    double rate{0.0};
};

/// sum_k w_k { gamma_up <L L^dag> - gamma_down <L^dag L> }, accumulated per site
/// in order of first appearance.
std::vector<SiteHeat> heat_rate_general(std::span<const fock::JumpChannel> jumps, const ExpectationFn& expect);

/// Re sum_k { gamma_down <L^dag F> - gamma_up <F L^dag> } with F = [H_I, L].
double work_rate_general(std::span<const fock::JumpChannel> jumps, const CMatrix& h_int, const ExpectationFn& expect);

/// Q_i = gamma w_i (n_i - <a_i^dag a_i>) and
/// W = -gamma sum_ends [eps Re<a_e^dag a_nb> + eta Re<a_e a_nb>].
/// Fills q_dot, w_dot and entropy_rate.
ThermoReport gaussian_rates(const ChainSpec& spec, const gaussian::MomentTable& moments);

/// 2 eps w_1 Im<a_1^dag a_2>, equal to -Q_1 at steady state.
/// WrongShapeError unless N = 2 and eta = 0.
double internal_current(const ChainSpec& spec, const gaussian::MomentTable& moments);

struct RateTriple {
    double q_cold{0.0};
    double q_hot{0.0};
    double work{0.0};
};

/// Exact N = 2, eta = 0 rates, c = 2 gamma eps^2 / Delta^2:
/// Q_1 = c w_1 (n_1 - n_2), Q_2 = -c w_2 (n_1 - n_2), W = -c (w_1 - w_2)(n_1 - n_2).
/// WrongShapeError otherwise.
RateTriple closed_form_rates(const ChainSpec& spec);

/// Leading order in 1/gamma for N = 2:
///   Q_1 = (2 w_1/gamma) [eps^2 (n_1 - n_2) - eta^2 (n_1 + n_2 + 1)]
///   Q_2 = -(2 w_2/gamma) [eps^2 (n_1 - n_2) + eta^2 (n_1 + n_2 + 1)]
///   W = -(2/gamma) [eps^2 (n_1 - n_2)(w_1 - w_2) - eta^2 (w_1 + w_2)(n_1 + n_2 + 1)]
/// WrongShapeError unless N = 2.
RateTriple large_gamma_rates(const ChainSpec& spec);

/// Pi = -beta_cold Q_cold - beta_hot Q_hot.
double entropy_production_rate(double q_cold, double q_hot, const ChainSpec& spec);

/// |rate| below this counts as zero: 1e-12 max(|q1|, |qN|, |w|, gamma w_N).
double zero_tolerance(double q_cold, double q_hot, double w, const ChainSpec& spec);

/// Operating regime from the sign pattern of the rates. When t_cold > t_hot the
/// roles of the baths are exchanged first. A rate below zero_tolerance counts
/// as zero: W alone zero gives EqualFrequency, any zero heat rate gives
/// CarnotPoint (Degenerate for an uncoupled chain). InconsistentSignsError for
/// patterns that no thermodynamically consistent machine produces.
Classification classify(double q_cold, double q_hot, double w, const ChainSpec& spec);

/// Full Gaussian steady-state analysis.
struct SteadyAnalysis {
    gaussian::CovarianceState covariance;
    gaussian::MomentTable moments;
    ThermoReport report;
};

SteadyAnalysis analyze_steady(const ChainSpec& spec, const lyapunov::Options& opts = {});

} // namespace qchain::thermo
