// gaussian.cpp - Drift/diffusion assembly, steady and transient covariances, moments, entropy

#include "qchain/gaussian.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "qchain/errors.hpp"

namespace qchain::gaussian {

namespace {

Eigen::Index xi(std::size_t site) { return static_cast<Eigen::Index>(2 * site); }
Eigen::Index pi(std::size_t site) { return static_cast<Eigen::Index>(2 * site + 1); }

RVector occupations_of(const RMatrix& v, std::span<const double> w)
{
    const std::size_t n = w.size();
    RVector occ(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        occ(static_cast<Eigen::Index>(i)) =
            (w[i] * w[i] * v(xi(i), xi(i)) + v(pi(i), pi(i)) - w[i]) / (2.0 * w[i]);
    }
    return occ;
}

// Linear part of the quadrature -> mode map, without the -1/2 delta_ij that
// the canonical commutator adds on the diagonal of <a^dag a>.
void accumulate_moments(const RMatrix& v, std::span<const double> w, bool skip_normal_diagonal,
                        CMatrix& normal, CMatrix& anomalous)
{
    const std::size_t n = w.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double s = 2.0 * std::sqrt(w[i] * w[j]);
            const double xx = v(xi(i), xi(j));
            const double pp = v(pi(i), pi(j));
            const double xp = v(xi(i), pi(j));
            const double px = v(pi(i), xi(j));
            const auto a = static_cast<Eigen::Index>(i);
            const auto b = static_cast<Eigen::Index>(j);
            if (!(skip_normal_diagonal && i == j)) {
                normal(a, b) += cplx(w[i] * w[j] * xx + pp, w[i] * xp - w[j] * px) / s;
            }
            anomalous(a, b) += cplx(w[i] * w[j] * xx - pp, w[i] * xp + w[j] * px) / s;
        }
    }
}

RMatrix symmetrized(const RMatrix& m) { return 0.5 * (m + m.transpose()); }

} // namespace

CovarianceState::CovarianceState(RMatrix v, std::span<const double> frequencies)
    : reference_(std::move(v))
    , deviation_(RMatrix::Zero(reference_.rows(), reference_.cols()))
{
    if (reference_.rows() != reference_.cols() ||
        static_cast<std::size_t>(reference_.rows()) != 2 * frequencies.size()) {
        throw WrongShapeError("covariance dimension does not match the number of modes");
    }
    reference_occupation_ = occupations_of(reference_, frequencies);
}

CovarianceState::CovarianceState(RMatrix reference, RVector reference_occupation, RMatrix deviation)
    : reference_(std::move(reference))
    , reference_occupation_(std::move(reference_occupation))
    , deviation_(std::move(deviation))
{
    if (reference_.rows() != reference_.cols() || deviation_.rows() != reference_.rows() ||
        deviation_.cols() != reference_.cols() ||
        2 * reference_occupation_.size() != reference_.rows()) {
        throw WrongShapeError("inconsistent covariance dimensions");
    }
}

CMatrix MomentTable::normal() const
{
    CMatrix out = normal_deviation;
    for (Eigen::Index i = 0; i < out.rows(); ++i) out(i, i) += reference_occupation(i);
    return out;
}

double MomentTable::occupation(std::size_t i) const
{
    const auto k = static_cast<Eigen::Index>(i);
    return reference_occupation(k) + normal_deviation(k, k).real();
}

double MomentTable::occupation_minus(std::size_t i, double n) const
{
    const auto k = static_cast<Eigen::Index>(i);
    return (reference_occupation(k) - n) + normal_deviation(k, k).real();
}

DriftDiffusion build_drift_diffusion(const ChainSpec& spec)
{
    const std::size_t n = spec.n_sites();
    const auto dim = static_cast<Eigen::Index>(2 * n);
    const auto& w = spec.frequencies();

    // H = Y^T M Y / 2 + const, then the unitary drift is Omega M.
    RMatrix m = RMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < n; ++i) {
        m(xi(i), xi(i)) = w[i] * w[i];
        m(pi(i), pi(i)) = 1.0;
    }
    const double eps = spec.epsilon();
    const double eta = spec.eta();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double root = std::sqrt(w[i] * w[i + 1]);
        m(xi(i), xi(i + 1)) = m(xi(i + 1), xi(i)) = (eps + eta) * root;
        m(pi(i), pi(i + 1)) = m(pi(i + 1), pi(i)) = (eps - eta) / root;
    }

    DriftDiffusion dd;
    dd.drift = symplectic_form(n) * m;
    dd.diffusion = RMatrix::Zero(dim, dim);

    const BathOccupations occ = spec.occupations();
    const double g = spec.gamma();
    for (std::size_t site : {spec.cold_site(), spec.hot_site()}) {
        const double nb = site == spec.cold_site() ? occ.n_cold : occ.n_hot;
        dd.drift(xi(site), xi(site)) -= 0.5 * g;
        dd.drift(pi(site), pi(site)) -= 0.5 * g;
        dd.diffusion(xi(site), xi(site)) = g * (2.0 * nb + 1.0) / (2.0 * w[site]);
        dd.diffusion(pi(site), pi(site)) = g * (2.0 * nb + 1.0) * w[site] / 2.0;
    }

    std::vector<double> ref_occ(n, 0.5 * (occ.n_cold + occ.n_hot));
    ref_occ.front() = occ.n_cold;
    ref_occ.back() = occ.n_hot;
    dd.reference = thermal_covariance(w, ref_occ);
    dd.reference_occupation = Eigen::Map<const RVector>(ref_occ.data(), static_cast<Eigen::Index>(n));
    return dd;
}

CovarianceState solve_steady(const DriftDiffusion& dd, const lyapunov::Options& opts)
{
    lyapunov::require_hurwitz(dd.drift);
    const RMatrix& k = dd.drift;
    const RMatrix& r = dd.reference;
    const RMatrix source = k * r + r * k.transpose() + dd.diffusion;
    RMatrix w = lyapunov::solve(k, symmetrized(source), opts);
    return {r, dd.reference_occupation, symmetrized(w)};
}

CovarianceState evolve_covariance(const DriftDiffusion& dd, const CovarianceState& v0, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("evolve_covariance: t must be >= 0");
    if (t == 0.0) return v0;

    const RMatrix& k = dd.drift;
    const Eigen::Index n = k.rows();
    const RMatrix& r = v0.reference();
    const RMatrix source = k * r + r * k.transpose() + dd.diffusion;

    // Van Loan block exponential on a short step h, then doubling:
    // Phi_2h = Phi_h^2, Q_2h = Phi_h Q_h Phi_h^T + Q_h.
    int doublings = 0;
    double h = t;
    const double knorm = k.norm();
    while (knorm * h > 0.5 && doublings < 60) {
        h *= 0.5;
        ++doublings;
    }
    RMatrix block = RMatrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = -k * h;
    block.topRightCorner(n, n) = source * h;
    block.bottomRightCorner(n, n) = k.transpose() * h;
    const RMatrix e = block.exp();
    RMatrix phi = e.bottomRightCorner(n, n).transpose();
    RMatrix q = phi * e.topRightCorner(n, n);
    for (int s = 0; s < doublings; ++s) {
        q = phi * q * phi.transpose() + q;
        phi = phi * phi;
    }
    RMatrix w = phi * v0.deviation() * phi.transpose() + q;
    return {r, v0.reference_occupation(), symmetrized(w)};
}

MomentTable mode_moments(const CovarianceState& v, const ChainSpec& spec)
{
    return mode_moments(v, spec.frequencies());
}

MomentTable mode_moments(const CovarianceState& v, std::span<const double> frequencies)
{
    const std::size_t n = frequencies.size();
    if (v.n_modes() != n) throw WrongShapeError("mode_moments: dimension mismatch");
    const auto nn = static_cast<Eigen::Index>(n);
    MomentTable out;
    out.reference_occupation = v.reference_occupation();
    out.normal_deviation = CMatrix::Zero(nn, nn);
    out.anomalous = CMatrix::Zero(nn, nn);
    // Reference diagonal is carried exactly by reference_occupation.
    accumulate_moments(v.reference(), frequencies, true, out.normal_deviation, out.anomalous);
    accumulate_moments(v.deviation(), frequencies, false, out.normal_deviation, out.anomalous);
    return out;
}

TwoOscillatorClosedForm closed_form_two_osc(const ChainSpec& spec)
{
    if (spec.n_sites() != 2 || spec.eta() != 0.0) {
        throw WrongShapeError("closed form requires N = 2 and eta = 0");
    }
    const double w1 = spec.frequency(0);
    const double w2 = spec.frequency(1);
    const double eps = spec.epsilon();
    const double g = spec.gamma();
    const auto [n1, n2] = spec.occupations();
    const double dw = w1 - w2;
    const double d2 = g * g + 4.0 * eps * eps + dw * dw;
    const double shift = 2.0 * eps * eps / d2 * (n2 - n1);

    TwoOscillatorClosedForm out;
    out.delta_sq = d2;
    auto& m = out.moments;
    m.reference_occupation = RVector(2);
    m.reference_occupation << n1, n2;
    m.normal_deviation = CMatrix::Zero(2, 2);
    m.normal_deviation(0, 0) = shift;
    m.normal_deviation(1, 1) = -shift;
    const cplx a2dag_a1 = eps / d2 * cplx(dw, g) * (n1 - n2);
    m.normal_deviation(1, 0) = a2dag_a1;
    m.normal_deviation(0, 1) = std::conj(a2dag_a1);
    m.anomalous = CMatrix::Zero(2, 2);
    out.energy_1 = w1 * (n1 + 0.5) + w1 * shift;
    out.energy_2 = w2 * (n2 + 0.5) - w2 * shift;

    const double root = std::sqrt(w1 * w2);
    const double c1 = 4.0 * eps * eps * (n2 - n1) / d2 + 2.0 * n1 + 1.0;
    const double c2 = 4.0 * eps * eps * (n1 - n2) / d2 + 2.0 * n2 + 1.0;
    RMatrix v = RMatrix::Zero(4, 4);
    v(0, 0) = c1 / (2.0 * w1);
    v(1, 1) = 0.5 * w1 * c1;
    v(2, 2) = c2 / (2.0 * w2);
    v(3, 3) = 0.5 * w2 * c2;
    v(0, 2) = eps * (n1 - n2) * dw / (root * d2);
    v(0, 3) = g * w2 * eps * (n2 - n1) / (root * d2);
    v(1, 2) = g * w1 * eps * (n1 - n2) / (root * d2);
    v(1, 3) = eps * (n1 - n2) * dw * root / d2;
    out.covariance = v.selfadjointView<Eigen::Upper>();
    return out;
}

RMatrix thermal_covariance(std::span<const double> frequencies, std::span<const double> occupations)
{
    if (frequencies.size() != occupations.size()) {
        throw WrongShapeError("thermal_covariance: size mismatch");
    }
    const std::size_t n = frequencies.size();
    RMatrix v = RMatrix::Zero(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        const double c = 2.0 * occupations[i] + 1.0;
        v(xi(i), xi(i)) = c / (2.0 * frequencies[i]);
        v(pi(i), pi(i)) = c * frequencies[i] / 2.0;
    }
    return v;
}

RMatrix symplectic_form(std::size_t n_modes)
{
    const auto dim = static_cast<Eigen::Index>(2 * n_modes);
    RMatrix omega = RMatrix::Zero(dim, dim);
    for (std::size_t i = 0; i < n_modes; ++i) {
        omega(xi(i), pi(i)) = 1.0;
        omega(pi(i), xi(i)) = -1.0;
    }
    return omega;
}

RVector symplectic_eigenvalues(const RMatrix& v)
{
    const Eigen::Index dim = v.rows();
    if (dim % 2 != 0 || v.cols() != dim) throw WrongShapeError("covariance must be 2N x 2N");
    Eigen::SelfAdjointEigenSolver<RMatrix> es(symmetrized(v));
    if (es.info() != Eigen::Success || !(es.eigenvalues().minCoeff() > 0.0)) {
        throw UnphysicalError("covariance matrix is not positive definite");
    }
    const RMatrix sqrt_v = es.operatorSqrt();
    // A = V^{1/2} Omega V^{1/2} is antisymmetric with eigenvalues +-i nu_k, so
    // -A^2 is symmetric PSD with each nu_k^2 appearing twice.
    const RMatrix a = sqrt_v * symplectic_form(static_cast<std::size_t>(dim / 2)) * sqrt_v;
    Eigen::SelfAdjointEigenSolver<RMatrix> es2(symmetrized(-a * a), Eigen::EigenvaluesOnly);
    const RVector sq = es2.eigenvalues();
    RVector nu(dim / 2);
    for (Eigen::Index k = 0; k < dim / 2; ++k) {
        nu(k) = std::sqrt(std::max(0.0, 0.5 * (sq(2 * k) + sq(2 * k + 1))));
    }
    return nu;
}

bool is_physical(const RMatrix& v, double tol)
{
    try {
        return symplectic_eigenvalues(v).minCoeff() >= 0.5 - tol;
    } catch (const UnphysicalError&) {
        return false;
    }
}

double gaussian_entropy(const RMatrix& v)
{
    const RVector nu = symplectic_eigenvalues(v);
    double s = 0.0;
    for (Eigen::Index k = 0; k < nu.size(); ++k) {
        if (nu(k) < 0.5 - 1e-9) {
            throw UnphysicalError("symplectic eigenvalue below 1/2");
        }
        const double up = nu(k) + 0.5;
        const double down = nu(k) - 0.5;
        s += up * std::log(up);
        if (down > 0.0) s -= down * std::log(down);
    }
    return std::max(0.0, s);
}

double gaussian_entropy(const CovarianceState& v) { return gaussian_entropy(v.matrix()); }

} // namespace qchain::gaussian
