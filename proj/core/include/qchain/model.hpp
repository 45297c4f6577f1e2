// model.hpp - Physical description of a boundary-driven oscillator chain
//
// Conventions: hbar = k_B = 1, unit mass. Site 0 couples to the bath at t_cold,
// site N-1 to the bath at t_hot; interior sites have no bath.

#pragma once

#include <cstddef>
#include <vector>

namespace qchain {

/// Mean excitation numbers of the two boundary baths.
struct BathOccupations {
    double n_cold{0.0};
    double n_hot{0.0};
};

/// Validated, immutable chain + bath parameters.
///
/// H_S = sum_i w_i a_i^dag a_i
///     + sum_i [ eps (a_i^dag a_{i+1} + h.c.) + eta (a_i^dag a_{i+1}^dag + h.c.) ]
/// with local dissipators of rate gamma on the first and last sites.
class ChainSpec {
public:
    /// Throws DomainError unless N >= 2, all frequencies > 0, eps >= 0,
    /// eta >= 0, gamma > 0 and both temperatures > 0.
    ChainSpec(std::vector<double> frequencies,
              double epsilon,
              double eta,
              double gamma,
              double t_cold,
              double t_hot);

    std::size_t n_sites() const { return frequencies_.size(); }
    const std::vector<double>& frequencies() const { return frequencies_; }
    double frequency(std::size_t site) const { return frequencies_.at(site); }
    double omega_cold() const { return frequencies_.front(); }
    double omega_hot() const { return frequencies_.back(); }

    double epsilon() const { return epsilon_; }
    double eta() const { return eta_; }
    double gamma() const { return gamma_; }
    double t_cold() const { return t_cold_; }
    double t_hot() const { return t_hot_; }
    double beta_cold() const { return 1.0 / t_cold_; }
    double beta_hot() const { return 1.0 / t_hot_; }

    std::size_t cold_site() const { return 0; }
    std::size_t hot_site() const { return frequencies_.size() - 1; }
    bool has_bath(std::size_t site) const { return site == cold_site() || site == hot_site(); }

    BathOccupations occupations() const;
    /// Bath temperature seen by a boundary site; DomainError for interior sites.
    double bath_temperature(std::size_t site) const;

    ChainSpec with_gamma(double gamma) const;
    ChainSpec with_eta(double eta) const;
    ChainSpec with_epsilon(double epsilon) const;
    ChainSpec with_frequencies(std::vector<double> frequencies) const;

private:
    std::vector<double> frequencies_;
    double epsilon_;
    double eta_;
    double gamma_;
    double t_cold_;
    double t_hot_;
};

/// Bose-Einstein occupation 1/(exp(omega/T) - 1). DomainError unless both > 0.
double bose_einstein(double omega, double temperature);

/// w_i = ((N-i) w_first + (i-1) w_last)/(N-1), i = 1..N. DomainError if N < 2.
std::vector<double> linear_profile(double omega_first, double omega_last, std::size_t n_sites);

} // namespace qchain
