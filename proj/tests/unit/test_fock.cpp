#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qchain/errors.hpp"
#include "qchain/fock.hpp"
#include "qchain/gaussian.hpp"

using namespace qchain;

namespace {

CMatrix random_density(Eigen::Index n, std::mt19937_64& rng)
{
    std::normal_distribution<double> normal;
    CMatrix a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(normal(rng), normal(rng));
    }
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// Matrix elements of [H, L] + w L restricted to states below the top level of `mode`.
double ladder_defect(const fock::LindbladModel& model, const CMatrix& h, const fock::JumpChannel& ch)
{
    const CMatrix defect = commutator(h, ch.op) + ch.bohr_frequency * ch.op;
    double worst = 0.0;
    const std::size_t top = model.dim_per_mode - 1;
    for (std::size_t r = 0; r < model.dim(); ++r) {
        for (std::size_t c = 0; c < model.dim(); ++c) {
            if (model.space.occupation(c, ch.site) == top || model.space.occupation(r, ch.site) == top) continue;
            worst = std::max(worst, std::abs(defect(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))));
        }
    }
    return worst;
}

} // namespace

TEST(ModeSpace, OrdersFirstModeMostSignificant)
{
    const fock::ModeSpace space(2, 2);
    const CMatrix a0 = CMatrix(space.lowering(0));
    CMatrix low(2, 2);
    low << 0, 1, 0, 0;
    EXPECT_LT((a0 - fock::kron(low, CMatrix::Identity(2, 2))).norm(), 1e-15);
    const CMatrix a1 = CMatrix(space.lowering(1));
    EXPECT_LT((a1 - fock::kron(CMatrix::Identity(2, 2), low)).norm(), 1e-15);
    EXPECT_THROW(fock::ModeSpace(2, 1), DomainError);
}

TEST(QuadraticHamiltonian, BlockMatchesFullMatrix)
{
    const fock::ModeSpace space(3, 4);
    fock::QuadraticHamiltonian h;
    h.add_number(0, 0.5);
    h.add_number(1, 1.0);
    h.add_number(2, 1.5);
    h.add_hopping(0, 1, 0.2);
    h.add_hopping(1, 2, 0.3);
    EXPECT_TRUE(h.conserves_number());
    const RMatrix full = RMatrix(h.matrix(space));
    const auto sym = fock::symmetry_of(space, h);
    std::vector<std::ptrdiff_t> local(space.dim(), -1);
    std::size_t covered = 0;
    for (const auto& states : fock::sectors(sym)) {
        for (std::size_t k = 0; k < states.size(); ++k) local[states[k]] = static_cast<std::ptrdiff_t>(k);
        const RMatrix blk = h.block(space, states, local);
        for (std::size_t r = 0; r < states.size(); ++r) {
            for (std::size_t c = 0; c < states.size(); ++c) {
                EXPECT_EQ(blk(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)),
                          full(static_cast<Eigen::Index>(states[r]), static_cast<Eigen::Index>(states[c])));
            }
        }
        for (std::size_t s : states) local[s] = -1;
        covered += states.size();
    }
    EXPECT_EQ(covered, space.dim());
    h.add_pairing(0, 1, 0.1);
    EXPECT_FALSE(h.conserves_number());
    EXPECT_EQ(fock::symmetry_of(space, h).modulus, 2);
}

TEST(BuildModel, TensorStructureAndJumps)
{
    const ChainSpec spec({0.8, 1.2}, 0.1, 0.0, 0.5, 0.7, 1.5);
    const auto model = fock::build_model(spec, 2);
    EXPECT_EQ(model.hamiltonian.rows(), 4);
    ASSERT_EQ(model.jumps.size(), 2u);
    const auto occ = spec.occupations();
    EXPECT_EQ(model.jumps[0].site, 0u);
    EXPECT_DOUBLE_EQ(model.jumps[0].rate_down, 0.5 * (occ.n_cold + 1));
    EXPECT_DOUBLE_EQ(model.jumps[0].rate_up, 0.5 * occ.n_cold);
    EXPECT_EQ(model.jumps[1].site, 1u);
    EXPECT_DOUBLE_EQ(model.jumps[1].rate_up, 0.5 * occ.n_hot);
    EXPECT_LT((model.hamiltonian - model.hamiltonian.adjoint()).norm(), 1e-12);
}

TEST(BuildModel, JumpChannelsSatisfyLocalDetailedBalance)
{
    const ChainSpec spec({0.8, 1.0, 1.2}, 0.1, 0.05, 0.5, 0.7, 1.5);
    const auto model = fock::build_model(spec, 5);
    for (const auto& ch : model.jumps) {
        const double beta = 1.0 / spec.bath_temperature(ch.site);
        EXPECT_NEAR(ch.rate_up / ch.rate_down, std::exp(-beta * ch.bohr_frequency), 1e-12);
        EXPECT_LT(ladder_defect(model, model.site_hamiltonian(ch.site), ch), 1e-10);
    }
}

TEST(BuildModel, TightBindingConservesNumber)
{
    const ChainSpec spec({0.8, 1.0, 1.2}, 0.3, 0.0, 0.5, 0.7, 1.5);
    const auto model = fock::build_model(spec, 4);
    CMatrix total = CMatrix::Zero(64, 64);
    for (std::size_t i = 0; i < 3; ++i) total += CMatrix(model.space.number(i));
    EXPECT_LT(commutator(model.hamiltonian, total).norm(), 1e-12);
    const auto squeezed = fock::build_model(spec.with_eta(0.1), 4);
    EXPECT_GT(commutator(squeezed.hamiltonian, total).norm(), 1e-3);
}

TEST(BuildModel, EnforcesBudget)
{
    const ChainSpec spec({1.0, 1.0, 1.0}, 0.1, 0.0, 0.5, 1.0, 1.0);
    EXPECT_THROW(fock::build_model(spec, 17), DimensionBudgetError);
    EXPECT_THROW(fock::build_model(spec, 1), DomainError);
    EXPECT_NO_THROW(fock::build_model(spec, 16));
}

TEST(Liouvillian, MatchesDirectApplication)
{
    const ChainSpec spec({0.8, 1.2}, 0.2, 0.1, 0.5, 0.7, 1.5);
    const auto model = fock::build_model(spec, 3);
    const auto l = fock::liouvillian(model, fock::Restriction::Full);
    ASSERT_TRUE(l.is_full());
    std::mt19937_64 rng(2);
    const CMatrix rho = random_density(9, rng);
    const CMatrix via_super = l.unvectorize(l.matrix * l.vectorize(rho));
    EXPECT_LT((via_super - fock::apply_liouvillian(model, rho)).norm(), 1e-12);
}

TEST(Liouvillian, PreservesTrace)
{
    const ChainSpec spec({0.8, 1.2}, 0.2, 0.1, 0.5, 0.7, 1.5);
    const auto model = fock::build_model(spec, 3);
    const auto l = fock::liouvillian(model, fock::Restriction::Full);
    // Left action on the identity: sum of rows belonging to populations.
    RVector trace_row = RVector::Zero(l.matrix.cols());
    for (Eigen::Index c = 0; c < l.matrix.cols(); ++c) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = 0; k < l.basis.size(); ++k) {
            if (l.basis[k].first == l.basis[k].second) acc += l.matrix(static_cast<Eigen::Index>(k), c);
        }
        trace_row(c) = std::abs(acc);
    }
    EXPECT_LT(trace_row.maxCoeff(), 1e-12);

    std::mt19937_64 rng(4);
    const CMatrix rho0 = random_density(9, rng);
    const CMatrix rho_t = fock::evolve(l, rho0, 0.3);
    EXPECT_LT(std::abs(rho_t.trace() - cplx(1.0, 0.0)), 1e-10);
}

TEST(Liouvillian, UnitaryLimitHasImaginarySpectrum)
{
    // gamma = 0 is not a valid chain, so drop the jumps from a valid model.
    const ChainSpec spec({0.8, 1.2}, 0.2, 0.0, 0.5, 0.7, 1.5);
    auto model = fock::build_model(spec, 3);
    model.jumps.clear();
    const auto l = fock::liouvillian(model, fock::Restriction::Full);
    Eigen::ComplexEigenSolver<CMatrix> es(l.matrix, false);
    EXPECT_LT(es.eigenvalues().real().cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SteadyState, SingleChannelIsTruncatedThermal)
{
    // Uncoupled chain: each end relaxes to its truncated Gibbs state.
    const ChainSpec spec({0.9, 1.4}, 0.0, 0.0, 0.5, 0.6, 1.1);
    const auto model = fock::build_model(spec, 8);
    const CMatrix rho = fock::steady_state(fock::liouvillian(model));
    const CMatrix gibbs = fock::kron(fock::truncated_thermal(0.9, 0.6, 8), fock::truncated_thermal(1.4, 1.1, 8));
    EXPECT_LT((rho - gibbs).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(fock::apply_liouvillian(model, gibbs).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SteadyState, IsHermitianPositiveAndNormalised)
{
    const ChainSpec spec({0.8, 1.0, 1.2}, 0.3, 0.05, 0.5, 0.4, 0.8);
    const auto model = fock::build_model(spec, 4);
    const auto l = fock::liouvillian(model);
    const CMatrix rho = fock::steady_state(l);
    EXPECT_NEAR(rho.trace().real(), 1.0, 1e-12);
    EXPECT_LT((rho - rho.adjoint()).norm(), 1e-12);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-10);
    EXPECT_LT(fock::apply_liouvillian(model, rho).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SteadyState, EigenAndLuPathsAgree)
{
    const ChainSpec spec({0.8, 1.2}, 0.3, 0.0, 0.5, 0.4, 0.8);
    const auto model = fock::build_model(spec, 8);
    const auto l = fock::liouvillian(model);
    fock::SteadyOptions eig;
    eig.eigen_max_dim = 100000;
    fock::SteadyOptions lu;
    lu.eigen_max_dim = 0;
    EXPECT_LT((fock::steady_state(l, eig) - fock::steady_state(l, lu)).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(SteadyState, DecoupledInteriorModeIsDegenerate)
{
    const ChainSpec spec({0.8, 1.0, 1.2}, 0.0, 0.0, 0.5, 0.4, 0.8);
    const auto model = fock::build_model(spec, 3);
    const auto l = fock::liouvillian(model);
    fock::SteadyOptions eig;
    eig.eigen_max_dim = 100000;
    fock::SteadyOptions lu;
    lu.eigen_max_dim = 0;
    EXPECT_THROW(fock::steady_state(l, eig), DegenerateKernelError);
    EXPECT_THROW(fock::steady_state(l, lu), DegenerateKernelError);
}

TEST(SteadyState, MatchesGaussianMoments)
{
    const ChainSpec spec({0.7, 1.0}, 0.3, 0.0, 0.6, 0.3, 0.5);
    const auto model = fock::build_model(spec, 15);
    const auto oracle = fock::solve_oracle(model);
    EXPECT_FALSE(oracle.low_confidence);
    const auto fm = fock::second_moments(model, oracle.rho);
    const auto cf = gaussian::closed_form_two_osc(spec);
    EXPECT_LT((fm.normal() - cf.moments.normal()).cwiseAbs().maxCoeff(), 1e-4);
    EXPECT_LT(fm.anomalous.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT(fock::first_moments(model, oracle.rho).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((fock::quadrature_covariance(model, oracle.rho) - cf.covariance).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(SteadyState, SqueezedChainMatchesGaussianPath)
{
    const ChainSpec spec({0.8, 1.2}, 0.3, 0.1, 0.8, 0.3, 0.5);
    const auto model = fock::build_model(spec, 8);
    const auto oracle = fock::solve_oracle(model);
    const RMatrix vf = fock::quadrature_covariance(model, oracle.rho);
    const RMatrix vg = gaussian::solve_steady(gaussian::build_drift_diffusion(spec)).matrix();
    EXPECT_LT((vf - vg).cwiseAbs().maxCoeff(), 1e-3);
}

TEST(SteadyState, TruncationConvergesMonotonically)
{
    const ChainSpec spec({0.7, 1.0}, 0.3, 0.0, 0.6, 0.5, 0.9);
    const double exact = gaussian::closed_form_two_osc(spec).moments.occupation(0);
    double previous = 1.0;
    for (std::size_t d : {8u, 12u, 16u}) {
        const auto model = fock::build_model(spec, d);
        const auto oracle = fock::solve_oracle(model);
        const double err = std::abs(fock::second_moments(model, oracle.rho).occupation(0) - exact);
        EXPECT_LT(err, previous) << d;
        previous = err;
    }
}

TEST(SteadyState, HotChainIsFlaggedLowConfidence)
{
    const ChainSpec spec({0.7, 1.0}, 0.3, 0.0, 0.6, 3.0, 5.0);
    const auto oracle = fock::solve_oracle(fock::build_model(spec, 6));
    EXPECT_TRUE(oracle.low_confidence);
    EXPECT_GT(oracle.top_population, fock::kLowConfidencePopulation);
}

TEST(DriftDiffusion, AgreesWithFockShortTimeDynamics)
{
    // Moments of d rho/dt reproduce K V + V K^T + D up to truncation.
    const ChainSpec spec({0.8, 1.0, 1.2}, 0.2, 0.1, 0.5, 0.3, 0.4);
    const auto model = fock::build_model(spec, 7);
    // Gaussian product state with low occupations keeps truncation error small.
    CMatrix rho = fock::kron(fock::kron(fock::truncated_thermal(0.8, 0.25, 7), fock::truncated_thermal(1.0, 0.3, 7)),
                             fock::truncated_thermal(1.2, 0.35, 7));
    const RMatrix v = fock::quadrature_covariance(model, rho);
    const RMatrix dv_fock = fock::quadrature_covariance(model, fock::apply_liouvillian(model, rho));
    const auto dd = gaussian::build_drift_diffusion(spec);
    const RMatrix dv_gauss = dd.drift * v + v * dd.drift.transpose() + dd.diffusion;
    EXPECT_LT((dv_fock - dv_gauss).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Expectation, BasicIdentities)
{
    const ChainSpec spec({0.9, 1.4}, 0.0, 0.0, 0.5, 0.6, 1.1);
    const auto model = fock::build_model(spec, 20, 4096);
    const CMatrix gibbs = fock::kron(fock::truncated_thermal(0.9, 0.6, 20), fock::truncated_thermal(1.4, 1.1, 20));
    EXPECT_NEAR(std::abs(fock::expectation(gibbs, CMatrix::Identity(400, 400)) - cplx(1.0, 0.0)), 0.0, 1e-14);
    const auto occ = spec.occupations();
    const cplx e = fock::expectation(gibbs, model.hamiltonian);
    EXPECT_NEAR(e.real(), 0.9 * occ.n_cold + 1.4 * occ.n_hot, 1e-6);
    EXPECT_LT(std::abs(e.imag()), 1e-12);
    EXPECT_THROW(fock::expectation(gibbs, CMatrix::Identity(3, 3)), WrongShapeError);
}
