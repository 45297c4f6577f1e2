// commands.hpp - Batch commands behind the qchain executable
//
// Reported energies are in units of w_N (the hot-side frequency): rates are
// divided by w_N^2, entropy production rates by w_N and durations multiplied by w_N.

#pragma once

#include <cstddef>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qchain/collision.hpp"
#include "qchain/thermo.hpp"
#include "qchain_cli/config.hpp"

namespace qchain::cli {

enum ExitCode : int {
    kOk = 0,
    kUnexpected = 1,
    kConfig = 2,
    kInstability = 3,
    kSolver = 4,
    kBudget = 5,
    kInsufficientSamples = 6,
};

/// Exit code for an exception escaping one of the commands.
int exit_code_for(std::exception_ptr error);

/// JSON text of the steady-state report: rates, regime, figure of merit,
/// entropy production and covariance matrix.
std::string steady_report(const ScenarioConfig& cfg);

struct SweepRow {
    double ratio{0.0};
    bool stable{true};
    double q_cold{0.0};
    double q_hot{0.0};
    double work{0.0};
    double entropy_rate{0.0};
    std::string regime;
    std::optional<double> figure_of_merit;
    /// Ratios use the classification zero tolerance: empty when the denominator
    /// is zero, exactly 0 when only the numerator is.
    std::optional<double> q_cold_over_work;
    std::optional<double> work_over_q_hot;
};

/// One sweep point at w_1 = ratio w_N. NonHurwitz chains give an unstable row.
SweepRow sweep_row(const ScenarioConfig& cfg, double ratio);

/// Rows in grid order, computed on `threads` workers (0: hardware concurrency).
std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned threads = 0);

inline constexpr const char* kSweepHeader = "omega1_over_omega2,Q1,Q2,W,Pi,regime,fom,Q1_over_W,W_over_Q2";

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// JSON text comparing every first and second moment of the Gaussian and
/// truncated-Fock steady states. Needs a [fock] block.
std::string oracle_compare(const ScenarioConfig& cfg);

struct CollisionStudy {
    collision::ConvergenceReport report;
    double omega_scale{1.0};
    std::string summary; ///< JSON: fits and the comparison against the master-equation rates
};

/// Needs a [collision] block.
CollisionStudy run_collision(const ScenarioConfig& cfg);

inline constexpr const char* kCollisionHeader = "tau,dQ1_rate,dQN_rate,dW_rate,Sigma";

void write_collision_csv(std::ostream& out, const CollisionStudy& study);

/// Full command line: `qchain <steady|sweep|oracle-compare|collision> <config>
/// [--out path] [--quiet]`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace qchain::cli
