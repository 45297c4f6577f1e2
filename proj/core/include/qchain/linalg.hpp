// linalg.hpp - Eigen aliases and small dense helpers shared across modules

#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qchain {

using cplx = std::complex<double>;

using RMatrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using SparseC = Eigen::SparseMatrix<cplx>;
using SparseR = Eigen::SparseMatrix<double>;

inline CMatrix commutator(const CMatrix& a, const CMatrix& b) { return a * b - b * a; }

inline CMatrix hermitize(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline double max_abs(const RMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }
inline double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

/// S(rho) = -tr rho ln rho, with eigenvalues below `floor` treated as zero.
double von_neumann_entropy(const CMatrix& rho, double floor = 1e-300);

} // namespace qchain
