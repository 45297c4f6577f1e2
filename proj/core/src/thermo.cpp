// thermo.cpp - Heat and work rates, entropy production, regime classification

#include "qchain/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "qchain/errors.hpp"

namespace qchain::thermo {
namespace {

void require_two_sites(const ChainSpec& spec, const char* what)
{
    if (spec.n_sites() != 2) throw WrongShapeError(std::string(what) + " needs a two-site chain");
}

} // namespace

std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::Refrigerator: return "refrigerator";
    case Regime::Engine: return "engine";
    case Regime::Accelerator: return "accelerator";
    case Regime::Heater: return "heater";
    case Regime::CarnotPoint: return "carnot_point";
    case Regime::EqualFrequency: return "equal_frequency";
    case Regime::Degenerate: return "degenerate";
    }
    return "unknown";
}

std::vector<SiteHeat> heat_rate_general(std::span<const fock::JumpChannel> jumps, const ExpectationFn& expect)
{
    std::vector<SiteHeat> out;
    for (const auto& j : jumps) {
        const CMatrix ld = j.op.adjoint();
        const double rate = j.bohr_frequency
                            * (j.rate_up * expect(j.op * ld).real() - j.rate_down * expect(ld * j.op).real());
        auto it = std::find_if(out.begin(), out.end(), [&](const SiteHeat& h) { return h.site == j.site; });
        if (it == out.end()) {
            out.push_back({j.site, rate});
        } else {
            it->rate += rate;
        }
    }
    return out;
}

double work_rate_general(std::span<const fock::JumpChannel> jumps, const CMatrix& h_int, const ExpectationFn& expect)
{
    double total = 0.0;
    for (const auto& j : jumps) {
        const CMatrix f = commutator(h_int, j.op);
        if (max_abs(f) == 0.0) continue;
        const CMatrix ld = j.op.adjoint();
        total += (j.rate_down * expect(ld * f) - j.rate_up * expect(f * ld)).real();
    }
    return total;
}

ThermoReport gaussian_rates(const ChainSpec& spec, const gaussian::MomentTable& moments)
{
    if (moments.n_modes() != spec.n_sites()) throw WrongShapeError("moment table does not match the chain");
    const auto occ = spec.occupations();
    const double g = spec.gamma();
    const auto c = static_cast<Eigen::Index>(spec.cold_site());
    const auto h = static_cast<Eigen::Index>(spec.hot_site());

    ThermoReport r;
    r.q_dot[0] = g * spec.omega_cold() * -moments.occupation_minus(spec.cold_site(), occ.n_cold);
    r.q_dot[1] = g * spec.omega_hot() * -moments.occupation_minus(spec.hot_site(), occ.n_hot);

    const CMatrix normal = moments.normal();
    auto end_term = [&](Eigen::Index e, Eigen::Index nb) {
        return spec.epsilon() * normal(e, nb).real() + spec.eta() * moments.anomalous(e, nb).real();
    };
    r.w_dot = -g * (end_term(c, c + 1) + end_term(h, h - 1));
    r.entropy_rate = entropy_production_rate(r.q_dot[0], r.q_dot[1], spec);
    return r;
}

double internal_current(const ChainSpec& spec, const gaussian::MomentTable& moments)
{
    require_two_sites(spec, "internal_current");
    if (spec.eta() != 0.0) throw WrongShapeError("internal_current needs eta = 0");
    if (moments.n_modes() != 2) throw WrongShapeError("moment table does not match the chain");
    return 2.0 * spec.epsilon() * spec.frequency(0) * moments.normal_deviation(0, 1).imag();
}

RateTriple closed_form_rates(const ChainSpec& spec)
{
    require_two_sites(spec, "closed_form_rates");
    if (spec.eta() != 0.0) throw WrongShapeError("closed_form_rates needs eta = 0");
    const double w1 = spec.frequency(0);
    const double w2 = spec.frequency(1);
    const double eps = spec.epsilon();
    const double g = spec.gamma();
    const double delta_sq = g * g + 4.0 * eps * eps + (w1 - w2) * (w1 - w2);
    const auto occ = spec.occupations();
    const double c = 2.0 * g * eps * eps / delta_sq * (occ.n_cold - occ.n_hot);
    return {c * w1, -c * w2, -c * (w1 - w2)};
}

RateTriple large_gamma_rates(const ChainSpec& spec)
{
    require_two_sites(spec, "large_gamma_rates");
    const double w1 = spec.frequency(0);
    const double w2 = spec.frequency(1);
    const double e2 = spec.epsilon() * spec.epsilon();
    const double h2 = spec.eta() * spec.eta();
    const double g = spec.gamma();
    const auto occ = spec.occupations();
    const double dn = occ.n_cold - occ.n_hot;
    const double sn = occ.n_cold + occ.n_hot + 1.0;
    RateTriple r;
    r.q_cold = 2.0 * w1 / g * (e2 * dn - h2 * sn);
    r.q_hot = -2.0 * w2 / g * (e2 * dn + h2 * sn);
    r.work = -2.0 / g * (e2 * dn * (w1 - w2) - h2 * (w1 + w2) * sn);
    return r;
}

double entropy_production_rate(double q_cold, double q_hot, const ChainSpec& spec)
{
    return -spec.beta_cold() * q_cold - spec.beta_hot() * q_hot;
}

double zero_tolerance(double q_cold, double q_hot, double w, const ChainSpec& spec)
{
    const double scale = std::max({std::abs(q_cold), std::abs(q_hot), std::abs(w), spec.gamma() * spec.omega_hot()});
    return 1e-12 * scale;
}

Classification classify(double q_cold, double q_hot, double w, const ChainSpec& spec)
{
    const double tol = zero_tolerance(q_cold, q_hot, w, spec);
    if (spec.t_cold() > spec.t_hot()) std::swap(q_cold, q_hot);
    auto sign = [tol](double x) { return std::abs(x) < tol ? 0 : (x > 0.0 ? 1 : -1); };
    const int sc = sign(q_cold);
    const int sh = sign(q_hot);
    const int sw = sign(w);

    Classification out;
    const bool uncoupled = spec.epsilon() == 0.0 && spec.eta() == 0.0;
    if (sc == 0 && sh == 0 && sw == 0) {
        out.regime = uncoupled ? Regime::Degenerate : Regime::CarnotPoint;
        return out;
    }
    if (sw == 0 && sc != 0 && sh != 0) {
        if (sc == sh) throw InconsistentSignsError("heat flows in or out of both baths without work");
        out.regime = Regime::EqualFrequency;
        return out;
    }
    if (sc == 0 || sh == 0) {
        out.regime = uncoupled ? Regime::Degenerate : Regime::CarnotPoint;
        return out;
    }
    if (sc > 0 && sh < 0 && sw > 0) {
        out.regime = Regime::Refrigerator;
        out.figure_of_merit = q_cold / w;
    } else if (sc < 0 && sh > 0 && sw < 0) {
        out.regime = Regime::Engine;
        out.figure_of_merit = std::abs(w) / q_hot;
    } else if (sc < 0 && sh > 0 && sw > 0) {
        out.regime = Regime::Accelerator;
    } else if (sc <= 0 && sh <= 0 && sw > 0) {
        out.regime = Regime::Heater;
    } else {
        throw InconsistentSignsError("rates (" + std::to_string(q_cold) + ", " + std::to_string(q_hot) + ", "
                                     + std::to_string(w) + ") match no operating regime");
    }
    return out;
}

SteadyAnalysis analyze_steady(const ChainSpec& spec, const lyapunov::Options& opts)
{
    const auto dd = gaussian::build_drift_diffusion(spec);
    auto cov = gaussian::solve_steady(dd, opts);
    auto moments = gaussian::mode_moments(cov, spec);
    ThermoReport report = gaussian_rates(spec, moments);
    if (spec.n_sites() == 2 && spec.eta() == 0.0) report.internal_current = internal_current(spec, moments);
    const auto cls = classify(report.q_dot[0], report.q_dot[1], report.w_dot, spec);
    report.regime = cls.regime;
    report.figure_of_merit = cls.figure_of_merit;
    return {std::move(cov), std::move(moments), report};
}

} // namespace qchain::thermo
