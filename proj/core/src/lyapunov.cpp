// lyapunov.cpp - Kronecker and Bartels-Stewart Lyapunov solvers

#include "qchain/lyapunov.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qchain/errors.hpp"

namespace qchain::lyapunov {

double spectral_abscissa(const RMatrix& k)
{
    Eigen::EigenSolver<RMatrix> es(k, false);
    if (es.info() != Eigen::Success) {
        throw SolverSingularError("eigenvalue computation of the drift matrix failed");
    }
    return es.eigenvalues().real().maxCoeff();
}

void require_hurwitz(const RMatrix& k)
{
    const double abscissa = spectral_abscissa(k);
    const double threshold = -1e-10 * k.norm();
    if (!(abscissa < threshold)) {
        std::ostringstream msg;
        msg << "drift matrix is not Hurwitz (max Re lambda = " << abscissa
            << "); no steady state exists";
        throw NonHurwitzError(msg.str());
    }
}

static void require_shapes(const RMatrix& k, const RMatrix& c)
{
    if (k.rows() != k.cols() || c.rows() != k.rows() || c.cols() != k.cols()) {
        throw WrongShapeError("Lyapunov equation needs square K and C of equal size");
    }
}

RMatrix solve_kronecker(const RMatrix& k, const RMatrix& c)
{
    require_shapes(k, c);
    const Eigen::Index n = k.rows();
    const Eigen::Index nn = n * n;
    // Column-major vec: vec(K X) = (I (x) K) vec X, vec(X K^T) = (K (x) I) vec X.
    RMatrix a = RMatrix::Zero(nn, nn);
    for (Eigen::Index blk = 0; blk < n; ++blk) {
        a.block(blk * n, blk * n, n, n) += k;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const double kij = k(i, j);
            if (kij == 0.0) continue;
            for (Eigen::Index r = 0; r < n; ++r) a(i * n + r, j * n + r) += kij;
        }
    }
    Eigen::PartialPivLU<RMatrix> lu(a);
    if (!(lu.rcond() > 1e-14)) {
        throw SolverSingularError("Lyapunov operator is numerically singular");
    }
    const RVector rhs = -Eigen::Map<const RVector>(c.data(), nn);
    const RVector x = lu.solve(rhs);
    return Eigen::Map<const RMatrix>(x.data(), n, n);
}

RMatrix solve_schur(const RMatrix& k, const RMatrix& c)
{
    require_shapes(k, c);
    const Eigen::Index n = k.rows();
    Eigen::ComplexSchur<CMatrix> schur(k.cast<cplx>());
    if (schur.info() != Eigen::Success) {
        throw SolverSingularError("Schur decomposition of the drift matrix failed");
    }
    const CMatrix& t = schur.matrixT();
    const CMatrix& u = schur.matrixU();

    // K = U T U^*, so with X = U Y U^T:  T Y + Y T^T = -U^* C conj(U).
    const CMatrix f = -(u.adjoint() * c.cast<cplx>() * u.conjugate());
    CMatrix y = CMatrix::Zero(n, n);
    const double tiny = 1e-14 * std::max(1.0, t.norm());
    for (Eigen::Index col = n - 1; col >= 0; --col) {
        CVector rhs = f.col(col);
        for (Eigen::Index j = col + 1; j < n; ++j) rhs -= t(col, j) * y.col(j);
        // Upper-triangular solve with (T + t_cc I).
        const cplx shift = t(col, col);
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            cplx acc = rhs(i);
            for (Eigen::Index j = i + 1; j < n; ++j) acc -= t(i, j) * y(j, col);
            const cplx diag = t(i, i) + shift;
            if (std::abs(diag) < tiny) {
                throw SolverSingularError("Lyapunov operator is numerically singular");
            }
            y(i, col) = acc / diag;
        }
    }
    return (u * y * u.transpose()).real();
}

RMatrix solve(const RMatrix& k, const RMatrix& c, const Options& opts)
{
    require_shapes(k, c);
    switch (opts.method) {
    case Method::Kronecker:
        return solve_kronecker(k, c);
    case Method::Schur:
        return solve_schur(k, c);
    case Method::Auto:
        break;
    }
    if (static_cast<std::size_t>(k.rows()) <= opts.kronecker_max_dim) return solve_kronecker(k, c);
    return solve_schur(k, c);
}

} // namespace qchain::lyapunov
