// linalg.cpp - Shared dense helpers

#include "qchain/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qchain {

double von_neumann_entropy(const CMatrix& rho, double floor)
{
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitize(rho), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
        const double p = es.eigenvalues()(k);
        if (p > floor) s -= p * std::log(p);
    }
    return s;
}

} // namespace qchain
