// config.hpp - Scenario configuration files
//
// One `key = value` per line, `#` starts a comment, `[section]` opens a block
// that runs to the next header. Lists are comma separated.
//
//   n_sites = 2
//   omega_first = 0.4          # or: frequencies = 0.4, 1.0
//   omega_last = 1.0
//   epsilon = 0.3              # or: rate_prefactor = 1 (N = 2, eta = 0)
//   eta = 0
//   gamma = 1
//   t_cold = 0.5
//   t_hot = 1
//   [sweep]
//   parameter = omega_first_ratio
//   lo = 0.01
//   hi = 2
//   steps = 200
//   [fock]
//   dim = 15
//   [collision]
//   g = 1                      # default sqrt(gamma)
//   taus = 0.05, 0.02, 0.01, 0.005
//   strokes = 1
//   dim = 12                   # default: [fock] dim, else 10

#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qchain/model.hpp"

namespace qchain::cli {

/// Malformed, missing or out-of-range configuration entry. `key()` names the
/// offending key (empty when the problem is not tied to a single key).
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct SweepBlock {
    std::string parameter{"omega_first_ratio"};
    double lo{0.0};
    double hi{0.0};
    std::size_t steps{0};
};

struct FockBlock {
    std::size_t dim{0};
};

struct CollisionBlock {
    std::optional<double> g;
    std::vector<double> taus;
    std::size_t strokes{1};
    std::optional<std::size_t> dim;
};

struct ScenarioConfig {
    std::size_t n_sites{0};
    std::optional<double> omega_first;
    std::optional<double> omega_last;
    std::vector<double> frequencies;      ///< explicit profile; empty for the linear one
    std::optional<double> epsilon;
    std::optional<double> rate_prefactor; ///< gamma eps^2 / Delta^2 in units of w_N
    double eta{0.0};
    double gamma{0.0};
    double t_cold{0.0};
    double t_hot{0.0};
    std::optional<SweepBlock> sweep;
    std::optional<FockBlock> fock;
    std::optional<CollisionBlock> collision;

    /// Chain at the configured frequencies.
    ChainSpec spec() const;
    /// Chain with w_1 = ratio * w_N. A linear profile is rebuilt between the new
    /// w_1 and w_N; an explicit list only has its first entry replaced.
    ChainSpec spec_at_ratio(double ratio) const;
    /// lo + (hi - lo) k / (steps - 1), k = 0..steps-1. ConfigError without a sweep block.
    std::vector<double> sweep_grid() const;
    /// sqrt(gamma) unless set. ConfigError without a collision block.
    double collision_g() const;
    /// Ancilla and system truncation for collision runs.
    std::size_t collision_dim() const;
};

/// ConfigError on syntax errors, unknown or duplicate keys, missing required
/// keys and values outside the chain invariants.
ScenarioConfig parse_config(std::istream& in);
/// As parse_config; ConfigError if the file cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path);

} // namespace qchain::cli
