// collision.hpp - Repeated-interaction (collision) model of the boundary baths
//
// Each stroke couples the chain to one fresh thermal ancilla per bath,
// b_i with frequency w_i, through H_tot = H_S + H_E + (g/sqrt(tau)) V,
// V = sum_i (a_i^dag b_i + b_i^dag a_i), for a time tau. The ancillas are then
// traced out. Positive heat and work mean energy entering the chain.

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "qchain/fock_space.hpp"
#include "qchain/linalg.hpp"
#include "qchain/model.hpp"

namespace qchain::collision {

/// Per-stroke energy and entropy ledger. Index 0 is the cold bath, 1 the hot bath.
struct StrokeRecord {
    std::array<double, 2> heat{};          ///< dQ_i = <H_Ei>_0 - <H_Ei>_tau
    double work{0.0};                      ///< dW = dH_S + sum_i dH_Ei
    double work_switching{0.0};            ///< (<V>_0 - <V>_tau) g / sqrt(tau)
    double d_energy_system{0.0};           ///< dH_S
    double entropy_production{0.0};        ///< I(S:E) + S(rho_E' || rho_E^th)
    double mutual_information{0.0};        ///< S(rho_S') + S(rho_E') - S(rho_S) - S(rho_E)
    double relative_entropy{0.0};          ///< S(rho_E' || rho_E^th), joint ancilla state
    double entropy_production_additive{0.0}; ///< I(S:E) + sum_i S(rho_Ei' || rho_Ei^th)
    double d_entropy_system{0.0};          ///< S(rho_S') - S(rho_S)
    double top_population{0.0};            ///< largest top-level population after the stroke
    bool truncation_warning{false};        ///< top_population > 1e-6
};

/// Gibbs state of a d-level truncated oscillator (T = 0 gives the ground state).
CMatrix thermal_ancilla(double omega, double temperature, std::size_t d);

/// Default cap on the largest symmetry block of H_tot.
inline constexpr std::size_t kDefaultBlockBudget = 2048;

/// Block pairs of rho_S (x) rho_E whose largest element is below this fraction
/// of the largest element of the joint state are not propagated.
inline constexpr double kDefaultNegligibleWeight = 1e-15;

/// Spectral decomposition of H_tot for a fixed chain, tau, g and d, reused across
/// strokes. Blocks are diagonalized on first use; a propagator must not be
/// shared between threads.
class StrokePropagator {
public:
    /// DomainError for tau <= 0, g < 0 or d < 2; DimensionBudgetError when a
    /// symmetry block of H_tot exceeds `max_block`.
    StrokePropagator(const ChainSpec& spec, double tau, double g, std::size_t d,
                     std::size_t max_block = kDefaultBlockBudget, double negligible = kDefaultNegligibleWeight);

    const ChainSpec& spec() const { return spec_; }
    double tau() const { return tau_; }
    double g() const { return g_; }
    std::size_t levels() const { return levels_; }
    std::size_t system_dim() const { return system_.dim(); }

    /// System Hamiltonian on the N-mode truncated space.
    const CMatrix& system_hamiltonian() const { return h_system_; }
    /// Ancilla product thermal state, cold (x) hot.
    const CMatrix& ancilla_state() const { return rho_env_; }

    std::pair<CMatrix, StrokeRecord> stroke(const CMatrix& rho_s) const;

private:
    struct Block {
        std::vector<std::size_t> states;
        mutable bool ready{false};
        mutable RMatrix vectors;
        mutable CVector phases;   ///< exp(-i E_k tau)
        mutable RMatrix coupling; ///< E^T V E on the block
    };

    /// Local indices of a block grouped by ancilla label and by system label.
    struct Grouping {
        std::vector<std::pair<std::size_t, std::vector<Eigen::Index>>> by_env;
        std::vector<std::pair<std::size_t, std::vector<Eigen::Index>>> by_sys;
    };

    const Block& prepared(std::size_t index) const;
    Grouping grouping(const Block& blk) const;

    ChainSpec spec_;
    double tau_;
    double g_;
    std::size_t levels_;
    fock::ModeSpace system_;
    fock::ModeSpace joint_;
    double negligible_;
    bool parity_only_{false};
    std::vector<Block> blocks_;
    fock::QuadraticHamiltonian h_tot_;
    fock::QuadraticHamiltonian coupling_;
    mutable std::vector<std::ptrdiff_t> scratch_;
    CMatrix h_system_;
    CMatrix rho_env_;
};

/// One stroke: returns the post-stroke system state and its ledger.
std::pair<CMatrix, StrokeRecord> stroke(const CMatrix& rho_s, const ChainSpec& spec, double tau, double g,
                                        std::size_t d);

/// `count` successive strokes from rho0. DomainError if count < 1.
std::pair<CMatrix, std::vector<StrokeRecord>> run_strokes(const CMatrix& rho0, const ChainSpec& spec, double tau,
                                                          double g, std::size_t d, std::size_t count);

/// Operators of the joint system + ancilla space used in balance diagnostics.
struct CouplingOperators {
    std::vector<CMatrix> site_plus_ancilla; ///< H_Si + H_Ei, cold then hot
    std::vector<CMatrix> site_coupling;     ///< V_i, cold then hot
    CMatrix bare;                           ///< H_S + H_E
    CMatrix interaction;                    ///< H_I
    CMatrix coupling;                       ///< V = sum_i V_i
};

/// Dense operators on the (d^(N+2))-dimensional joint space.
CouplingOperators coupling_operators(const ChainSpec& spec, std::size_t d);

struct LinearFit {
    double intercept{0.0};
    double slope{0.0};
};

/// Least-squares line through (x_k, y_k). InsufficientSamplesError for fewer than two points.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct RateSample {
    double tau{0.0};
    std::array<double, 2> heat_rate{};
    double work_rate{0.0};
    double entropy_rate{0.0};
    StrokeRecord record;
};

struct ConvergenceReport {
    std::vector<RateSample> samples;
    std::array<LinearFit, 2> heat;
    LinearFit work;
    LinearFit entropy;
    double top_population{0.0}; ///< of the held steady state
};

/// Per-stroke rates at the steady state of the master equation with gamma = g^2,
/// extrapolated linearly to tau -> 0. InsufficientSamplesError for fewer than
/// three taus; DomainError unless taus are strictly decreasing and positive.
ConvergenceReport rate_extrapolation(const ChainSpec& spec, double g, std::size_t d, std::span<const double> taus);

} // namespace qchain::collision
