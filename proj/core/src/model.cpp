// model.cpp - ChainSpec validation, Bose-Einstein occupations, frequency profiles

#include "qchain/model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "qchain/errors.hpp"

namespace qchain {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) throw DomainError(what);
}

bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool nonnegative(double x) { return std::isfinite(x) && x >= 0.0; }

} // namespace

ChainSpec::ChainSpec(std::vector<double> frequencies,
                     double epsilon,
                     double eta,
                     double gamma,
                     double t_cold,
                     double t_hot)
    : frequencies_(std::move(frequencies))
    , epsilon_(epsilon)
    , eta_(eta)
    , gamma_(gamma)
    , t_cold_(t_cold)
    , t_hot_(t_hot)
{
    require(frequencies_.size() >= 2, "chain needs at least two sites");
    for (std::size_t i = 0; i < frequencies_.size(); ++i) {
        require(positive(frequencies_[i]),
                "frequency of site " + std::to_string(i) + " must be positive");
    }
    require(nonnegative(epsilon_), "epsilon must be >= 0");
    require(nonnegative(eta_), "eta must be >= 0");
    require(positive(gamma_), "gamma must be positive");
    require(positive(t_cold_), "t_cold must be positive");
    require(positive(t_hot_), "t_hot must be positive");
}

BathOccupations ChainSpec::occupations() const
{
    return {bose_einstein(omega_cold(), t_cold_), bose_einstein(omega_hot(), t_hot_)};
}

double ChainSpec::bath_temperature(std::size_t site) const
{
    if (site == cold_site()) return t_cold_;
    if (site == hot_site()) return t_hot_;
    throw DomainError("site " + std::to_string(site) + " has no bath");
}

ChainSpec ChainSpec::with_gamma(double gamma) const
{
    return {frequencies_, epsilon_, eta_, gamma, t_cold_, t_hot_};
}

ChainSpec ChainSpec::with_eta(double eta) const
{
    return {frequencies_, epsilon_, eta, gamma_, t_cold_, t_hot_};
}

ChainSpec ChainSpec::with_epsilon(double epsilon) const
{
    return {frequencies_, epsilon, eta_, gamma_, t_cold_, t_hot_};
}

ChainSpec ChainSpec::with_frequencies(std::vector<double> frequencies) const
{
    return {std::move(frequencies), epsilon_, eta_, gamma_, t_cold_, t_hot_};
}

double bose_einstein(double omega, double temperature)
{
    require(positive(omega), "bose_einstein: omega must be positive");
    require(positive(temperature), "bose_einstein: temperature must be positive");
    // expm1 keeps precision at high temperature; overflow to inf gives 0 at T -> 0.
    return 1.0 / std::expm1(omega / temperature);
}

std::vector<double> linear_profile(double omega_first, double omega_last, std::size_t n_sites)
{
    require(n_sites >= 2, "linear_profile: need at least two sites");
    require(positive(omega_first) && positive(omega_last), "linear_profile: frequencies must be positive");
    std::vector<double> out(n_sites);
    const double span = static_cast<double>(n_sites - 1);
    for (std::size_t k = 0; k < n_sites; ++k) {
        const double i = static_cast<double>(k); // i - 1 in one-based indexing
        out[k] = ((span - i) * omega_first + i * omega_last) / span;
    }
    out.front() = omega_first;
    out.back() = omega_last;
    return out;
}

} // namespace qchain
