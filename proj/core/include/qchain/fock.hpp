// fock.hpp - Truncated-Fock-space Lindblad oracle for short chains
//
// Every mode is truncated to d levels. The steady state is obtained from a
// dense superoperator restricted to the symmetry sector that holds it:
// coherences between states of equal excitation number (eps-only coupling)
// or equal excitation parity (eta != 0).

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "qchain/fock_space.hpp"
#include "qchain/gaussian.hpp"
#include "qchain/linalg.hpp"
#include "qchain/model.hpp"

namespace qchain::fock {

/// Dissipative channel gamma_down L[L] + gamma_up L[L^dag] with [H_site, L] = -w L.
struct JumpChannel {
    std::size_t site{0};
    CMatrix op;
    double bohr_frequency{0.0};
    double rate_down{0.0};
    double rate_up{0.0};
};

struct LindbladModel {
    std::size_t dim_per_mode{0};
    std::vector<double> frequencies;
    CMatrix hamiltonian;  ///< H_S = sum_i H_i + H_I
    CMatrix interaction;  ///< H_I
    std::vector<JumpChannel> jumps;

    ModeSpace space{1, 2};
    QuadraticHamiltonian quadratic; ///< H_S in term form, for symmetry analysis

    std::size_t n_modes() const { return frequencies.size(); }
    std::size_t dim() const { return space.dim(); }
    CMatrix lowering(std::size_t mode) const;
    CMatrix site_hamiltonian(std::size_t mode) const; ///< w_i a_i^dag a_i
};

/// Default cap on d^N.
inline constexpr std::size_t kDefaultStateBudget = 4096;

/// Jumps {a_1: (gamma(n_1+1), gamma n_1)}, {a_N: (gamma(n_N+1), gamma n_N)}.
/// DomainError if d < 2; DimensionBudgetError if d^N > max_states.
LindbladModel build_model(const ChainSpec& spec, std::size_t d, std::size_t max_states = kDefaultStateBudget);

/// Superoperator on vec(rho) restricted to the matrix elements listed in `basis`.
struct Superoperator {
    CMatrix matrix;
    std::vector<std::pair<std::size_t, std::size_t>> basis; ///< (row, col) of rho per vector entry
    std::size_t hilbert_dim{0};

    bool is_full() const { return basis.size() == hilbert_dim * hilbert_dim; }
    CVector vectorize(const CMatrix& rho) const;
    CMatrix unvectorize(const CVector& x) const;
};

enum class Restriction {
    Full,         ///< all d^2N elements
    SteadySector, ///< elements coupled to the populations
};

/// Default cap on the superoperator side length.
inline constexpr std::size_t kDefaultSuperoperatorBudget = 4096;

/// DimensionBudgetError when the retained basis exceeds `max_dim`.
Superoperator liouvillian(const LindbladModel& model,
                          Restriction restriction = Restriction::SteadySector,
                          std::size_t max_dim = kDefaultSuperoperatorBudget);

/// d rho/dt for a full density matrix.
CMatrix apply_liouvillian(const LindbladModel& model, const CMatrix& rho);

struct SteadyOptions {
    std::size_t eigen_max_dim = 512; ///< above this, LU with a trace constraint
    double kernel_gap = 1e-8;        ///< second-smallest |lambda| below this => degenerate
    double min_rcond = 1e-11;        ///< LU path: smaller reciprocal condition => degenerate
};

/// Unit-trace Hermitian kernel element. DegenerateKernelError if the kernel
/// is not one-dimensional.
CMatrix steady_state(const Superoperator& l, const SteadyOptions& opts = {});

/// exp(L t) rho for a full superoperator. WrongShapeError for restricted ones.
CMatrix evolve(const Superoperator& l, const CMatrix& rho, double t);

/// tr(rho obs). WrongShapeError on mismatched shapes.
cplx expectation(const CMatrix& rho, const CMatrix& obs);

/// Largest population of the top Fock level over all modes.
double top_level_population(const LindbladModel& model, const CMatrix& rho);

inline constexpr double kLowConfidencePopulation = 1e-6;

/// Steady state together with its truncation diagnostics.
struct OracleState {
    CMatrix rho;
    double top_population{0.0};
    bool low_confidence{false};
};

OracleState solve_oracle(const LindbladModel& model, const SteadyOptions& opts = {});

/// <a_i>.
CVector first_moments(const LindbladModel& model, const CMatrix& rho);

/// <a_i^dag a_j> and <a_i a_j> (reference occupations zero).
gaussian::MomentTable second_moments(const LindbladModel& model, const CMatrix& rho);

/// Symmetrized quadrature covariance <{Y_j, Y_k}>/2 in the (x_1, p_1, ...) ordering.
RMatrix quadrature_covariance(const LindbladModel& model, const CMatrix& rho);

} // namespace qchain::fock
