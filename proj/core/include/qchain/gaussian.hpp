// gaussian.hpp - Covariance-matrix description of the chain
//
// Quadratures are ordered Y = (x_1, p_1, x_2, p_2, ...) with
// a_i = (w_i x_i + i p_i)/sqrt(2 w_i) and V_jk = <{Y_j, Y_k}>/2.
// Second moments obey dV/dt = K V + V K^T + D.

#pragma once

#include <cstddef>
#include <span>

#include "qchain/linalg.hpp"
#include "qchain/lyapunov.hpp"
#include "qchain/model.hpp"

namespace qchain::gaussian {

/// Drift K and diffusion D of the covariance dynamics.
///
/// `reference` is the stationary covariance of the uncoupled chain
/// (boundary sites thermal at their bath occupation, interior sites thermal at
/// the mean of the two), with `reference_occupation` holding those occupations.
/// Steady states are solved as reference + deviation, which keeps the small
/// coupling-induced corrections at full relative precision.
struct DriftDiffusion {
    RMatrix drift;
    RMatrix diffusion;
    RMatrix reference;
    RVector reference_occupation;

    std::size_t n_modes() const { return static_cast<std::size_t>(drift.rows()) / 2; }
};

/// 2N x 2N covariance, stored as reference + deviation.
class CovarianceState {
public:
    /// Wraps a full covariance (reference = v, deviation = 0). `frequencies`
    /// are needed to attach reference occupations.
    CovarianceState(RMatrix v, std::span<const double> frequencies);
    CovarianceState(RMatrix reference, RVector reference_occupation, RMatrix deviation);

    RMatrix matrix() const { return reference_ + deviation_; }
    const RMatrix& reference() const { return reference_; }
    const RVector& reference_occupation() const { return reference_occupation_; }
    const RMatrix& deviation() const { return deviation_; }
    std::size_t n_modes() const { return static_cast<std::size_t>(reference_.rows()) / 2; }

private:
    RMatrix reference_;
    RVector reference_occupation_;
    RMatrix deviation_;
};

/// Mode moments. <a_i^dag a_j> is split as reference_occupation_i delta_ij +
/// normal_deviation(i, j) for the same precision reason as CovarianceState.
struct MomentTable {
    RVector reference_occupation;
    CMatrix normal_deviation;
    CMatrix anomalous; ///< <a_i a_j>

    std::size_t n_modes() const { return static_cast<std::size_t>(anomalous.rows()); }
    CMatrix normal() const; ///< <a_i^dag a_j>
    double occupation(std::size_t i) const;
    /// <a_i^dag a_i> - n, evaluated without cancellation against the reference.
    double occupation_minus(std::size_t i, double n) const;
};

DriftDiffusion build_drift_diffusion(const ChainSpec& spec);

/// Steady covariance. Checks the Hurwitz property first (NonHurwitzError),
/// then solves the Lyapunov equation for the deviation from the reference.
CovarianceState solve_steady(const DriftDiffusion& dd, const lyapunov::Options& opts = {});

/// Exact propagation of dV/dt = K V + V K^T + D over time t >= 0.
CovarianceState evolve_covariance(const DriftDiffusion& dd, const CovarianceState& v0, double t);

MomentTable mode_moments(const CovarianceState& v, const ChainSpec& spec);
MomentTable mode_moments(const CovarianceState& v, std::span<const double> frequencies);

/// Analytic N = 2, eta = 0 steady state.
struct TwoOscillatorClosedForm {
    double delta_sq{0.0}; ///< gamma^2 + 4 eps^2 + (w1 - w2)^2
    MomentTable moments;
    double energy_1{0.0}; ///< <H_1> = w1 (<a1^dag a1> + 1/2)
    double energy_2{0.0};
    RMatrix covariance;   ///< 4 x 4 steady covariance
};

/// WrongShapeError unless N = 2 and eta = 0.
TwoOscillatorClosedForm closed_form_two_osc(const ChainSpec& spec);

/// Thermal (product) covariance diag((2n_i+1)/(2w_i), (2n_i+1)w_i/2).
RMatrix thermal_covariance(std::span<const double> frequencies, std::span<const double> occupations);

/// Symplectic form in the (x_1, p_1, ...) ordering.
RMatrix symplectic_form(std::size_t n_modes);

/// Symplectic eigenvalues in ascending order. UnphysicalError if `v` is not
/// positive definite.
RVector symplectic_eigenvalues(const RMatrix& v);

/// True when V + (i/2) Omega >= 0, i.e. every symplectic eigenvalue >= 1/2 - tol.
bool is_physical(const RMatrix& v, double tol = 1e-9);

/// von Neumann entropy sum_k g(nu_k), g(nu) = (nu+1/2)ln(nu+1/2) - (nu-1/2)ln(nu-1/2).
/// UnphysicalError if any nu_k < 1/2 - 1e-9.
double gaussian_entropy(const CovarianceState& v);
double gaussian_entropy(const RMatrix& v);

} // namespace qchain::gaussian
