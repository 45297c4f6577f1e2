// fock.cpp - Truncated-Fock-space Lindblad oracle

#include "qchain/fock.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "qchain/errors.hpp"

namespace qchain::fock {
namespace {

// tr(rho op) for a sparse operator.
cplx trace_product(const CMatrix& rho, const SparseC& op)
{
    cplx acc{0.0, 0.0};
    for (Eigen::Index c = 0; c < op.outerSize(); ++c) {
        for (SparseC::InnerIterator it(op, c); it; ++it) acc += it.value() * rho(c, it.row());
    }
    return acc;
}

void require_density_shape(const LindbladModel& model, const CMatrix& rho)
{
    const auto n = static_cast<Eigen::Index>(model.dim());
    if (rho.rows() != n || rho.cols() != n) throw WrongShapeError("density matrix does not match the model dimension");
}

struct LindbladTerm {
    SparseC op;
    double rate;
};

std::vector<LindbladTerm> lindblad_terms(const LindbladModel& model)
{
    std::vector<LindbladTerm> out;
    for (const auto& j : model.jumps) {
        SparseC op = j.op.sparseView();
        SparseC dag = SparseC(op.adjoint());
        if (j.rate_down != 0.0) out.push_back({op, j.rate_down});
        if (j.rate_up != 0.0) out.push_back({dag, j.rate_up});
    }
    return out;
}

} // namespace

CMatrix LindbladModel::lowering(std::size_t mode) const
{
    return CMatrix(space.lowering(mode));
}

CMatrix LindbladModel::site_hamiltonian(std::size_t mode) const
{
    return CMatrix(space.number(mode)) * frequencies.at(mode);
}

LindbladModel build_model(const ChainSpec& spec, std::size_t d, std::size_t max_states)
{
    if (d < 2) throw DomainError("Fock truncation needs d >= 2");
    const std::size_t n = spec.n_sites();
    std::size_t states = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (states > max_states / d) {
            throw DimensionBudgetError("d^N exceeds the state budget of " + std::to_string(max_states));
        }
        states *= d;
    }

    LindbladModel model;
    model.dim_per_mode = d;
    model.frequencies = spec.frequencies();
    model.space = ModeSpace(n, d);

    QuadraticHamiltonian coupling;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        coupling.add_hopping(i, i + 1, spec.epsilon());
        if (spec.eta() != 0.0) coupling.add_pairing(i, i + 1, spec.eta());
    }
    model.quadratic = coupling;
    for (std::size_t i = 0; i < n; ++i) model.quadratic.add_number(i, spec.frequency(i));

    model.interaction = CMatrix(coupling.matrix(model.space).cast<cplx>());
    model.hamiltonian = CMatrix(model.quadratic.matrix(model.space).cast<cplx>());

    const auto occ = spec.occupations();
    const std::pair<std::size_t, double> baths[] = {{spec.cold_site(), occ.n_cold}, {spec.hot_site(), occ.n_hot}};
    for (const auto& [site, nbar] : baths) {
        JumpChannel ch;
        ch.site = site;
        ch.op = model.lowering(site);
        ch.bohr_frequency = spec.frequency(site);
        ch.rate_down = spec.gamma() * (nbar + 1.0);
        ch.rate_up = spec.gamma() * nbar;
        model.jumps.push_back(std::move(ch));
    }
    return model;
}

CVector Superoperator::vectorize(const CMatrix& rho) const
{
    CVector x(static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        x(static_cast<Eigen::Index>(k)) = rho(static_cast<Eigen::Index>(basis[k].first),
                                             static_cast<Eigen::Index>(basis[k].second));
    }
    return x;
}

CMatrix Superoperator::unvectorize(const CVector& x) const
{
    const auto n = static_cast<Eigen::Index>(hilbert_dim);
    CMatrix rho = CMatrix::Zero(n, n);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        rho(static_cast<Eigen::Index>(basis[k].first), static_cast<Eigen::Index>(basis[k].second)) =
            x(static_cast<Eigen::Index>(k));
    }
    return rho;
}

Superoperator liouvillian(const LindbladModel& model, Restriction restriction, std::size_t max_dim)
{
    const std::size_t dim = model.dim();
    Superoperator out;
    out.hilbert_dim = dim;

    const ChargeSymmetry sym = symmetry_of(model.space, model.quadratic);
    std::vector<std::int32_t> index(dim * dim, -1);
    for (std::size_t m = 0; m < dim; ++m) {
        for (std::size_t n = 0; n < dim; ++n) {
            if (restriction == Restriction::SteadySector && !sym.same_sector(m, n)) continue;
            if (out.basis.size() >= max_dim) {
                throw DimensionBudgetError("superoperator exceeds the budget of " + std::to_string(max_dim));
            }
            index[m * dim + n] = static_cast<std::int32_t>(out.basis.size());
            out.basis.emplace_back(m, n);
        }
    }

    const auto terms = lindblad_terms(model);
    SparseC a = SparseC(model.hamiltonian.sparseView()) * cplx(0.0, -1.0);
    for (const auto& t : terms) a -= SparseC(0.5 * t.rate * SparseC(t.op.adjoint()) * t.op);
    a.makeCompressed();

    const auto side = static_cast<Eigen::Index>(out.basis.size());
    out.matrix = CMatrix::Zero(side, side);
    auto add = [&](std::size_t r, std::size_t c, Eigen::Index col, cplx v) {
        const std::int32_t row = index[r * dim + c];
        if (row < 0) {
            if (v != cplx(0.0, 0.0)) throw DomainError("Liouvillian leaks out of the retained sector");
            return;
        }
        out.matrix(row, col) += v;
    };

    for (Eigen::Index col = 0; col < side; ++col) {
        const auto [m, n] = out.basis[static_cast<std::size_t>(col)];
        const auto mi = static_cast<Eigen::Index>(m);
        const auto ni = static_cast<Eigen::Index>(n);
        for (SparseC::InnerIterator it(a, mi); it; ++it) add(static_cast<std::size_t>(it.row()), n, col, it.value());
        for (SparseC::InnerIterator it(a, ni); it; ++it) {
            add(m, static_cast<std::size_t>(it.row()), col, std::conj(it.value()));
        }
        for (const auto& t : terms) {
            for (SparseC::InnerIterator i1(t.op, mi); i1; ++i1) {
                for (SparseC::InnerIterator i2(t.op, ni); i2; ++i2) {
                    add(static_cast<std::size_t>(i1.row()), static_cast<std::size_t>(i2.row()), col,
                        t.rate * i1.value() * std::conj(i2.value()));
                }
            }
        }
    }
    return out;
}

CMatrix apply_liouvillian(const LindbladModel& model, const CMatrix& rho)
{
    require_density_shape(model, rho);
    const cplx minus_i(0.0, -1.0);
    CMatrix out = minus_i * commutator(model.hamiltonian, rho);
    for (const auto& j : model.jumps) {
        const CMatrix& l = j.op;
        const CMatrix ld = l.adjoint();
        const CMatrix ldl = ld * l;
        const CMatrix lld = l * ld;
        out += j.rate_down * (l * rho * ld - 0.5 * (ldl * rho + rho * ldl));
        out += j.rate_up * (ld * rho * l - 0.5 * (lld * rho + rho * lld));
    }
    return out;
}

CMatrix steady_state(const Superoperator& l, const SteadyOptions& opts)
{
    const Eigen::Index side = l.matrix.rows();
    if (side == 0) throw WrongShapeError("empty superoperator");

    std::vector<Eigen::Index> diagonal;
    for (std::size_t k = 0; k < l.basis.size(); ++k) {
        if (l.basis[k].first == l.basis[k].second) diagonal.push_back(static_cast<Eigen::Index>(k));
    }
    if (diagonal.empty()) throw WrongShapeError("superoperator basis holds no populations");

    CVector x;
    if (static_cast<std::size_t>(side) <= opts.eigen_max_dim) {
        Eigen::ComplexEigenSolver<CMatrix> es(l.matrix, true);
        if (es.info() != Eigen::Success) throw SolverSingularError("superoperator eigendecomposition failed");
        const CVector& ev = es.eigenvalues();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(side));
        for (Eigen::Index k = 0; k < side; ++k) order[static_cast<std::size_t>(k)] = k;
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index p, Eigen::Index q) { return std::abs(ev(p)) < std::abs(ev(q)); });
        if (side > 1 && std::abs(ev(order[1])) < opts.kernel_gap) {
            throw DegenerateKernelError("Liouvillian kernel is not one-dimensional");
        }
        x = es.eigenvectors().col(order[0]);
    } else {
        CMatrix m = l.matrix;
        const Eigen::Index pinned = diagonal.front();
        m.row(pinned).setZero();
        for (Eigen::Index k : diagonal) m(pinned, k) = 1.0;
        CVector rhs = CVector::Zero(side);
        rhs(pinned) = 1.0;
        Eigen::PartialPivLU<CMatrix> lu(m);
        if (!(lu.rcond() > opts.min_rcond)) {
            throw DegenerateKernelError("Liouvillian kernel is not one-dimensional (rcond "
                                        + std::to_string(lu.rcond()) + ")");
        }
        x = lu.solve(rhs);
    }

    cplx trace{0.0, 0.0};
    for (Eigen::Index k : diagonal) trace += x(k);
    if (std::abs(trace) < std::numeric_limits<double>::epsilon()) {
        throw DegenerateKernelError("kernel vector has vanishing trace");
    }
    CMatrix rho = hermitize(l.unvectorize(x / trace));
    rho /= rho.trace().real();
    return rho;
}

CMatrix evolve(const Superoperator& l, const CMatrix& rho, double t)
{
    if (!l.is_full()) throw WrongShapeError("time evolution needs the full superoperator");
    const auto n = static_cast<Eigen::Index>(l.hilbert_dim);
    if (rho.rows() != n || rho.cols() != n) throw WrongShapeError("density matrix does not match the superoperator");
    if (!(t >= 0.0)) throw DomainError("evolution time must be non-negative");
    const CMatrix prop = (l.matrix * cplx(t, 0.0)).exp();
    return l.unvectorize(prop * l.vectorize(rho));
}

cplx expectation(const CMatrix& rho, const CMatrix& obs)
{
    if (rho.rows() != rho.cols() || obs.rows() != obs.cols() || rho.rows() != obs.rows()) {
        throw WrongShapeError("expectation needs square matrices of equal size");
    }
    return (rho.transpose().cwiseProduct(obs)).sum();
}

double top_level_population(const LindbladModel& model, const CMatrix& rho)
{
    require_density_shape(model, rho);
    const std::size_t top = model.dim_per_mode - 1;
    double worst = 0.0;
    for (std::size_t mode = 0; mode < model.n_modes(); ++mode) {
        double pop = 0.0;
        for (std::size_t s = 0; s < model.dim(); ++s) {
            if (model.space.occupation(s, mode) == top) {
                pop += rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
            }
        }
        worst = std::max(worst, pop);
    }
    return worst;
}

OracleState solve_oracle(const LindbladModel& model, const SteadyOptions& opts)
{
    OracleState out;
    out.rho = steady_state(liouvillian(model), opts);
    out.top_population = top_level_population(model, out.rho);
    out.low_confidence = out.top_population > kLowConfidencePopulation;
    return out;
}

CVector first_moments(const LindbladModel& model, const CMatrix& rho)
{
    require_density_shape(model, rho);
    CVector out(static_cast<Eigen::Index>(model.n_modes()));
    for (std::size_t i = 0; i < model.n_modes(); ++i) {
        out(static_cast<Eigen::Index>(i)) = trace_product(rho, model.space.lowering(i));
    }
    return out;
}

gaussian::MomentTable second_moments(const LindbladModel& model, const CMatrix& rho)
{
    require_density_shape(model, rho);
    const auto n = static_cast<Eigen::Index>(model.n_modes());
    std::vector<SparseC> low;
    for (std::size_t i = 0; i < model.n_modes(); ++i) low.push_back(model.space.lowering(i));

    gaussian::MomentTable out;
    out.reference_occupation = RVector::Zero(n);
    out.normal_deviation = CMatrix::Zero(n, n);
    out.anomalous = CMatrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const SparseC dag = low[static_cast<std::size_t>(i)].adjoint();
        for (Eigen::Index j = 0; j < n; ++j) {
            const SparseC& aj = low[static_cast<std::size_t>(j)];
            out.normal_deviation(i, j) = trace_product(rho, SparseC(dag * aj));
            out.anomalous(i, j) = trace_product(rho, SparseC(low[static_cast<std::size_t>(i)] * aj));
        }
    }
    return out;
}

RMatrix quadrature_covariance(const LindbladModel& model, const CMatrix& rho)
{
    require_density_shape(model, rho);
    const std::size_t n = model.n_modes();
    std::vector<SparseC> quad;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = model.frequencies[i];
        const SparseC a = model.space.lowering(i);
        const SparseC ad = a.adjoint();
        quad.push_back(SparseC(a + ad) * cplx(1.0 / std::sqrt(2.0 * w), 0.0));
        quad.push_back(SparseC(a - ad) * cplx(0.0, -std::sqrt(0.5 * w)));
    }
    const auto m = static_cast<Eigen::Index>(2 * n);
    RMatrix v(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = j; k < m; ++k) {
            const SparseC prod = quad[static_cast<std::size_t>(j)] * quad[static_cast<std::size_t>(k)];
            v(j, k) = trace_product(rho, prod).real();
            v(k, j) = v(j, k);
        }
    }
    return v;
}

} // namespace qchain::fock
