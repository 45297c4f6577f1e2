// lyapunov.hpp - Continuous Lyapunov solvers  K X + X K^T + C = 0

#pragma once

#include <cstddef>

#include "qchain/linalg.hpp"

namespace qchain::lyapunov {

enum class Method {
    Auto,      ///< Kronecker up to `kronecker_max_dim`, Schur above
    Kronecker, ///< dense LU on the vectorized (n^2 x n^2) system
    Schur,     ///< complex Schur form + triangular back-substitution (Bartels-Stewart)
};

struct Options {
    Method method{Method::Auto};
    std::size_t kronecker_max_dim{16};
};

/// Largest real part over the spectrum of `k`.
double spectral_abscissa(const RMatrix& k);

/// Throws NonHurwitzError unless every eigenvalue of `k` has real part
/// below -1e-10 * ||k||_F.
void require_hurwitz(const RMatrix& k);

/// Solves K X + X K^T + C = 0 for X. Does not check stability; the caller decides.
/// Throws SolverSingularError when the linear system is numerically rank deficient.
RMatrix solve(const RMatrix& k, const RMatrix& c, const Options& opts = {});

RMatrix solve_kronecker(const RMatrix& k, const RMatrix& c);
RMatrix solve_schur(const RMatrix& k, const RMatrix& c);

} // namespace qchain::lyapunov
