// collision.cpp - Repeated-interaction simulator with exact block propagators

#include "qchain/collision.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "qchain/errors.hpp"
#include "qchain/fock.hpp"

namespace qchain::collision {
namespace {

constexpr double kTruncationPopulation = 1e-6;
constexpr std::size_t kJointStateBudget = std::size_t{1} << 24;

fock::QuadraticHamiltonian system_terms(const ChainSpec& spec, bool with_numbers, bool with_coupling)
{
    fock::QuadraticHamiltonian h;
    const std::size_t n = spec.n_sites();
    if (with_numbers) {
        for (std::size_t i = 0; i < n; ++i) h.add_number(i, spec.frequency(i));
    }
    if (with_coupling) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h.add_hopping(i, i + 1, spec.epsilon());
            if (spec.eta() != 0.0) h.add_pairing(i, i + 1, spec.eta());
        }
    }
    return h;
}

// Ancilla modes follow the system modes: cold at index N, hot at N + 1.
std::array<std::size_t, 2> ancilla_modes(const ChainSpec& spec)
{
    return {spec.n_sites(), spec.n_sites() + 1};
}

std::array<std::size_t, 2> bath_sites(const ChainSpec& spec)
{
    return {spec.cold_site(), spec.hot_site()};
}

double expectation_real(const CMatrix& rho, const CMatrix& obs)
{
    return fock::expectation(rho, obs).real();
}

double diagonal_energy(const CMatrix& rho, const RVector& energies)
{
    double acc = 0.0;
    for (Eigen::Index k = 0; k < energies.size(); ++k) acc += energies(k) * rho(k, k).real();
    return acc;
}

// S(rho || sigma) for diagonal sigma.
double relative_entropy_to_diagonal(const CMatrix& rho, const CMatrix& sigma)
{
    double cross = 0.0;
    for (Eigen::Index k = 0; k < rho.rows(); ++k) {
        const double p = rho(k, k).real();
        if (p == 0.0) continue;
        cross -= p * std::log(std::max(sigma(k, k).real(), 1e-300));
    }
    return cross - von_neumann_entropy(rho);
}

// Marginal of one ancilla from the joint cold (x) hot ancilla state.
CMatrix ancilla_marginal(const CMatrix& rho_env, std::size_t d, int which)
{
    const auto di = static_cast<Eigen::Index>(d);
    CMatrix out = CMatrix::Zero(di, di);
    for (Eigen::Index c1 = 0; c1 < di; ++c1) {
        for (Eigen::Index h1 = 0; h1 < di; ++h1) {
            for (Eigen::Index c2 = 0; c2 < di; ++c2) {
                for (Eigen::Index h2 = 0; h2 < di; ++h2) {
                    const cplx v = rho_env(c1 * di + h1, c2 * di + h2);
                    if (which == 0 && h1 == h2) out(c1, c2) += v;
                    if (which == 1 && c1 == c2) out(h1, h2) += v;
                }
            }
        }
    }
    return out;
}

double top_population(const CMatrix& rho, const fock::ModeSpace& space)
{
    const std::size_t top = space.levels() - 1;
    double worst = 0.0;
    for (std::size_t mode = 0; mode < space.modes(); ++mode) {
        double pop = 0.0;
        for (std::size_t s = 0; s < space.dim(); ++s) {
            if (space.occupation(s, mode) == top) pop += rho(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)).real();
        }
        worst = std::max(worst, pop);
    }
    return worst;
}

} // namespace

CMatrix thermal_ancilla(double omega, double temperature, std::size_t d)
{
    return fock::truncated_thermal(omega, temperature, d);
}

StrokePropagator::StrokePropagator(const ChainSpec& spec, double tau, double g, std::size_t d, std::size_t max_block,
                                   double negligible)
    : spec_(spec)
    , tau_(tau)
    , g_(g)
    , levels_(d)
    , system_(spec.n_sites(), std::max<std::size_t>(d, 2))
    , joint_(1, 2)
    , negligible_(0.0)
{
    if (!(tau > 0.0) || !std::isfinite(tau)) throw DomainError("stroke duration must be positive");
    if (!(g >= 0.0) || !std::isfinite(g)) throw DomainError("collision coupling must be non-negative");
    if (d < 2) throw DomainError("ancilla truncation needs d >= 2");
    if (!(negligible >= 0.0)) throw DomainError("negligible weight must be non-negative");
    negligible_ = negligible;
    const std::size_t modes = spec.n_sites() + 2;
    std::size_t dim = 1;
    for (std::size_t k = 0; k < modes; ++k) {
        if (dim > kJointStateBudget / d) throw DimensionBudgetError("joint system-ancilla space too large");
        dim *= d;
    }
    joint_ = fock::ModeSpace(modes, d);

    const auto anc = ancilla_modes(spec);
    const auto sites = bath_sites(spec);
    fock::QuadraticHamiltonian h_tot = system_terms(spec, true, true);
    fock::QuadraticHamiltonian v;
    const double strength = g / std::sqrt(tau);
    for (int b = 0; b < 2; ++b) {
        h_tot.add_number(anc[b], spec.frequency(sites[b]));
        h_tot.add_hopping(sites[b], anc[b], strength);
        v.add_hopping(sites[b], anc[b], 1.0);
    }

    const auto sym = fock::symmetry_of(joint_, h_tot);
    parity_only_ = sym.modulus == 2;
    for (auto& states : fock::sectors(sym)) {
        if (states.size() > max_block) {
            throw DimensionBudgetError("symmetry block of size " + std::to_string(states.size())
                                       + " exceeds the budget of " + std::to_string(max_block));
        }
        Block blk;
        blk.states = std::move(states);
        blocks_.push_back(std::move(blk));
    }
    h_tot_ = std::move(h_tot);
    coupling_ = std::move(v);
    scratch_.assign(dim, -1);

    h_system_ = CMatrix(system_terms(spec, true, true).matrix(system_).cast<cplx>());
    rho_env_ = fock::kron(thermal_ancilla(spec.frequency(sites[0]), spec.t_cold(), d),
                          thermal_ancilla(spec.frequency(sites[1]), spec.t_hot(), d));
}

const StrokePropagator::Block& StrokePropagator::prepared(std::size_t index) const
{
    const Block& blk = blocks_[index];
    if (blk.ready) return blk;
    for (std::size_t k = 0; k < blk.states.size(); ++k) scratch_[blk.states[k]] = static_cast<std::ptrdiff_t>(k);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(h_tot_.block(joint_, blk.states, scratch_));
    if (es.info() != Eigen::Success) throw SolverSingularError("block diagonalization failed");
    blk.vectors = es.eigenvectors();
    blk.phases = (es.eigenvalues() * -tau_).unaryExpr([](double x) { return std::polar(1.0, x); });
    blk.coupling = blk.vectors.transpose() * coupling_.block(joint_, blk.states, scratch_) * blk.vectors;
    for (std::size_t s : blk.states) scratch_[s] = -1;
    blk.ready = true;
    return blk;
}

StrokePropagator::Grouping StrokePropagator::grouping(const Block& blk) const
{
    const std::size_t edim = levels_ * levels_;
    Grouping out;
    std::vector<std::ptrdiff_t> env_slot(edim, -1);
    std::vector<std::ptrdiff_t> sys_slot(system_.dim(), -1);
    for (std::size_t k = 0; k < blk.states.size(); ++k) {
        const std::size_t e = blk.states[k] % edim;
        const std::size_t s = blk.states[k] / edim;
        if (env_slot[e] < 0) {
            env_slot[e] = static_cast<std::ptrdiff_t>(out.by_env.size());
            out.by_env.push_back({e, {}});
        }
        if (sys_slot[s] < 0) {
            sys_slot[s] = static_cast<std::ptrdiff_t>(out.by_sys.size());
            out.by_sys.push_back({s, {}});
        }
        const auto local = static_cast<Eigen::Index>(k);
        out.by_env[static_cast<std::size_t>(env_slot[e])].second.push_back(local);
        out.by_sys[static_cast<std::size_t>(sys_slot[s])].second.push_back(local);
    }
    return out;
}

std::pair<CMatrix, StrokeRecord> StrokePropagator::stroke(const CMatrix& rho_s) const
{
    const auto sdim = static_cast<Eigen::Index>(system_.dim());
    if (rho_s.rows() != sdim || rho_s.cols() != sdim) throw WrongShapeError("system state does not match the chain");

    const std::size_t d = levels_;
    const std::size_t edim = d * d;
    const auto ei = static_cast<Eigen::Index>(edim);

    // Charge differences present in the system state; only block pairs whose
    // labels differ by one of them carry weight in rho_S (x) rho_E.
    std::set<int> diffs;
    for (Eigen::Index r = 0; r < sdim; ++r) {
        for (Eigen::Index c = 0; c < sdim; ++c) {
            if (rho_s(r, c) != cplx(0.0, 0.0)) {
                diffs.insert(static_cast<int>(system_.total_excitations(static_cast<std::size_t>(r)))
                             - static_cast<int>(system_.total_excitations(static_cast<std::size_t>(c))));
            }
        }
    }
    auto block_label = [&](const Block& b) {
        return static_cast<int>(joint_.total_excitations(b.states.front()));
    };
    auto pair_allowed = [&](const Block& p, const Block& q) {
        const int diff = block_label(p) - block_label(q);
        for (int k : diffs) {
            if (parity_only_ ? ((k - diff) % 2 == 0) : (k == diff)) return true;
        }
        return false;
    };

    std::vector<Grouping> groups;
    groups.reserve(blocks_.size());
    for (const auto& blk : blocks_) groups.push_back(grouping(blk));

    CMatrix rho_s_out = CMatrix::Zero(sdim, sdim);
    CMatrix rho_e_out = CMatrix::Zero(ei, ei);
    double v_before = 0.0;
    double v_after = 0.0;

    // The joint input state only couples entries with equal ancilla labels, and
    // the partial traces only read entries with equal system or ancilla labels,
    // so both basis changes are done group by group on one side.
    const double floor = negligible_ * max_abs(rho_s) * rho_env_.diagonal().real().maxCoeff();
    for (std::size_t ip = 0; ip < blocks_.size(); ++ip) {
        for (std::size_t iq = 0; iq < blocks_.size(); ++iq) {
            if (!pair_allowed(blocks_[ip], blocks_[iq])) continue;
            const auto& sp = blocks_[ip].states;
            const auto& sq = blocks_[iq].states;
            const auto& gp = groups[ip];
            const auto& gq = groups[iq];

            // Matching ancilla groups and the largest input element they carry.
            std::vector<std::pair<std::size_t, std::size_t>> matched;
            std::vector<std::pair<std::size_t, std::size_t>> shared;
            double largest = 0.0;
            for (std::size_t x = 0; x < gp.by_env.size(); ++x) {
                for (std::size_t y = 0; y < gq.by_env.size(); ++y) {
                    if (gp.by_env[x].first != gq.by_env[y].first) continue;
                    matched.emplace_back(x, y);
                    const double pe = rho_env_(static_cast<Eigen::Index>(gp.by_env[x].first),
                                               static_cast<Eigen::Index>(gp.by_env[x].first))
                                          .real();
                    if (pe == 0.0) continue;
                    for (Eigen::Index a : gp.by_env[x].second) {
                        const auto sa = static_cast<Eigen::Index>(sp[static_cast<std::size_t>(a)] / edim);
                        for (Eigen::Index b : gq.by_env[y].second) {
                            const auto sb = static_cast<Eigen::Index>(sq[static_cast<std::size_t>(b)] / edim);
                            largest = std::max(largest, std::abs(rho_s(sa, sb)) * pe);
                        }
                    }
                    shared.emplace_back(x, y);
                }
            }
            if (!(largest > floor)) continue;
            const Block& bp = prepared(ip);
            const Block& bq = prepared(iq);
            const auto np = static_cast<Eigen::Index>(sp.size());
            const auto nq = static_cast<Eigen::Index>(sq.size());

            // A = E_p^T rho, then T = A E_q.
            RMatrix ar = RMatrix::Zero(np, nq);
            RMatrix ai = RMatrix::Zero(np, nq);
            for (const auto& [x, y] : shared) {
                const auto& rows = gp.by_env[x].second;
                const auto& cols = gq.by_env[y].second;
                const double pe = rho_env_(static_cast<Eigen::Index>(gp.by_env[x].first),
                                           static_cast<Eigen::Index>(gp.by_env[x].first))
                                      .real();
                const auto m = static_cast<Eigen::Index>(rows.size());
                const auto n = static_cast<Eigen::Index>(cols.size());
                RMatrix gr(m, n);
                RMatrix gi(m, n);
                for (Eigen::Index i = 0; i < m; ++i) {
                    const auto sa = static_cast<Eigen::Index>(sp[static_cast<std::size_t>(rows[i])] / edim);
                    for (Eigen::Index j = 0; j < n; ++j) {
                        const auto sb = static_cast<Eigen::Index>(sq[static_cast<std::size_t>(cols[j])] / edim);
                        const cplx v = rho_s(sa, sb) * pe;
                        gr(i, j) = v.real();
                        gi(i, j) = v.imag();
                    }
                }
                const RMatrix et = bp.vectors(rows, Eigen::all).transpose();
                ar(Eigen::all, cols) += et * gr;
                ai(Eigen::all, cols) += et * gi;
            }
            RMatrix tr = ar * bq.vectors;
            RMatrix ti = ai * bq.vectors;

            // tr(V sigma) = tr(E^T V E T) in the eigenbasis.
            if (ip == iq) v_before += bp.coupling.cwiseProduct(tr).sum();
            for (Eigen::Index l = 0; l < nq; ++l) {
                for (Eigen::Index k = 0; k < np; ++k) {
                    const cplx z = cplx(tr(k, l), ti(k, l)) * bp.phases(k) * std::conj(bq.phases(l));
                    tr(k, l) = z.real();
                    ti(k, l) = z.imag();
                }
            }
            if (ip == iq) v_after += bp.coupling.cwiseProduct(tr).sum();

            // B = E_p T; sigma = B E_q^T is only formed on the traced entries.
            const RMatrix br = bp.vectors * tr;
            const RMatrix bi = bp.vectors * ti;
            for (const auto& [x, y] : matched) {
                const auto& rows = gp.by_env[x].second;
                const auto& cols = gq.by_env[y].second;
                const RMatrix eq = bq.vectors(cols, Eigen::all).transpose();
                const RMatrix sr = br(rows, Eigen::all) * eq;
                const RMatrix si = bi(rows, Eigen::all) * eq;
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    const auto sa = static_cast<Eigen::Index>(sp[static_cast<std::size_t>(rows[i])] / edim);
                    for (std::size_t j = 0; j < cols.size(); ++j) {
                        const auto sb = static_cast<Eigen::Index>(sq[static_cast<std::size_t>(cols[j])] / edim);
                        const auto ii = static_cast<Eigen::Index>(i);
                        const auto jj = static_cast<Eigen::Index>(j);
                        rho_s_out(sa, sb) += cplx(sr(ii, jj), si(ii, jj));
                    }
                }
            }
            for (const auto& [s_p, rows] : gp.by_sys) {
                for (const auto& [s_q, cols] : gq.by_sys) {
                    if (s_p != s_q) continue;
                    const RMatrix eq = bq.vectors(cols, Eigen::all).transpose();
                    const RMatrix sr = br(rows, Eigen::all) * eq;
                    const RMatrix si = bi(rows, Eigen::all) * eq;
                    for (std::size_t i = 0; i < rows.size(); ++i) {
                        const auto ea = static_cast<Eigen::Index>(sp[static_cast<std::size_t>(rows[i])] % edim);
                        for (std::size_t j = 0; j < cols.size(); ++j) {
                            const auto eb = static_cast<Eigen::Index>(sq[static_cast<std::size_t>(cols[j])] % edim);
                            const auto ii = static_cast<Eigen::Index>(i);
                            const auto jj = static_cast<Eigen::Index>(j);
                            rho_e_out(ea, eb) += cplx(sr(ii, jj), si(ii, jj));
                        }
                    }
                }
            }
        }
    }
    rho_s_out = hermitize(rho_s_out);
    rho_e_out = hermitize(rho_e_out);

    const auto sites = bath_sites(spec_);
    StrokeRecord rec;
    const double es_before = expectation_real(rho_s, h_system_);
    const double es_after = expectation_real(rho_s_out, h_system_);
    rec.d_energy_system = es_after - es_before;

    std::array<CMatrix, 2> marg_before;
    std::array<CMatrix, 2> marg_after;
    double sum_de = 0.0;
    RVector levels(static_cast<Eigen::Index>(d));
    for (Eigen::Index n = 0; n < levels.size(); ++n) levels(n) = static_cast<double>(n);
    for (int b = 0; b < 2; ++b) {
        marg_before[b] = ancilla_marginal(rho_env_, d, b);
        marg_after[b] = ancilla_marginal(rho_e_out, d, b);
        const double w = spec_.frequency(sites[b]);
        const double before = w * diagonal_energy(marg_before[b], levels);
        const double after = w * diagonal_energy(marg_after[b], levels);
        rec.heat[b] = before - after;
        sum_de += after - before;
    }
    rec.work = rec.d_energy_system + sum_de;
    rec.work_switching = g_ / std::sqrt(tau_) * (v_before - v_after);

    const double s_sys_before = von_neumann_entropy(rho_s);
    const double s_sys_after = von_neumann_entropy(rho_s_out);
    const double s_env_before = von_neumann_entropy(rho_env_);
    const double s_env_after = von_neumann_entropy(rho_e_out);
    rec.d_entropy_system = s_sys_after - s_sys_before;
    rec.mutual_information = s_sys_after + s_env_after - s_sys_before - s_env_before;
    rec.relative_entropy = relative_entropy_to_diagonal(rho_e_out, rho_env_);
    rec.entropy_production = rec.mutual_information + rec.relative_entropy;
    double additive = rec.mutual_information;
    for (int b = 0; b < 2; ++b) additive += relative_entropy_to_diagonal(marg_after[b], marg_before[b]);
    rec.entropy_production_additive = additive;

    double top = top_population(rho_s_out, system_);
    const fock::ModeSpace env_space(2, d);
    top = std::max(top, top_population(rho_e_out, env_space));
    rec.top_population = top;
    rec.truncation_warning = top > kTruncationPopulation;
    return {rho_s_out, rec};
}

std::pair<CMatrix, StrokeRecord> stroke(const CMatrix& rho_s, const ChainSpec& spec, double tau, double g,
                                        std::size_t d)
{
    return StrokePropagator(spec, tau, g, d).stroke(rho_s);
}

std::pair<CMatrix, std::vector<StrokeRecord>> run_strokes(const CMatrix& rho0, const ChainSpec& spec, double tau,
                                                          double g, std::size_t d, std::size_t count)
{
    if (count < 1) throw DomainError("run_strokes needs at least one stroke");
    const StrokePropagator prop(spec, tau, g, d);
    std::vector<StrokeRecord> records;
    records.reserve(count);
    CMatrix rho = rho0;
    for (std::size_t k = 0; k < count; ++k) {
        auto [next, rec] = prop.stroke(rho);
        rho = std::move(next);
        records.push_back(rec);
    }
    return {rho, records};
}

CouplingOperators coupling_operators(const ChainSpec& spec, std::size_t d)
{
    const fock::ModeSpace joint(spec.n_sites() + 2, d);
    const auto anc = ancilla_modes(spec);
    const auto sites = bath_sites(spec);
    auto dense = [&](const fock::QuadraticHamiltonian& h) { return CMatrix(h.matrix(joint).cast<cplx>()); };

    CouplingOperators out;
    fock::QuadraticHamiltonian bare = system_terms(spec, true, false);
    fock::QuadraticHamiltonian coupling;
    for (int b = 0; b < 2; ++b) {
        const double w = spec.frequency(sites[b]);
        fock::QuadraticHamiltonian local;
        local.add_number(sites[b], w);
        local.add_number(anc[b], w);
        out.site_plus_ancilla.push_back(dense(local));
        fock::QuadraticHamiltonian vi;
        vi.add_hopping(sites[b], anc[b], 1.0);
        out.site_coupling.push_back(dense(vi));
        bare.add_number(anc[b], w);
        coupling.add_hopping(sites[b], anc[b], 1.0);
    }
    out.bare = dense(bare);
    out.interaction = dense(system_terms(spec, false, true));
    out.coupling = dense(coupling);
    return out;
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) throw WrongShapeError("fit_line needs equally many abscissae and ordinates");
    if (x.size() < 2) throw InsufficientSamplesError("a line fit needs at least two samples");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    if (sxx == 0.0) throw InsufficientSamplesError("a line fit needs distinct abscissae");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

ConvergenceReport rate_extrapolation(const ChainSpec& spec, double g, std::size_t d, std::span<const double> taus)
{
    if (taus.size() < 3) throw InsufficientSamplesError("rate extrapolation needs at least three stroke durations");
    for (std::size_t k = 0; k < taus.size(); ++k) {
        if (!(taus[k] > 0.0)) throw DomainError("stroke durations must be positive");
        if (k > 0 && !(taus[k] < taus[k - 1])) throw DomainError("stroke durations must be strictly decreasing");
    }
    const ChainSpec held = g > 0.0 ? spec.with_gamma(g * g) : spec;
    const auto model = fock::build_model(held, d);
    const auto steady = fock::solve_oracle(model);

    ConvergenceReport report;
    report.top_population = steady.top_population;
    std::vector<double> xs;
    std::array<std::vector<double>, 2> q;
    std::vector<double> w;
    std::vector<double> s;
    for (double tau : taus) {
        const StrokePropagator prop(spec, tau, g, d);
        const auto rec = prop.stroke(steady.rho).second;
        RateSample sample;
        sample.tau = tau;
        sample.heat_rate = {rec.heat[0] / tau, rec.heat[1] / tau};
        sample.work_rate = rec.work / tau;
        sample.entropy_rate = rec.entropy_production / tau;
        sample.record = rec;
        report.samples.push_back(sample);
        xs.push_back(tau);
        q[0].push_back(sample.heat_rate[0]);
        q[1].push_back(sample.heat_rate[1]);
        w.push_back(sample.work_rate);
        s.push_back(sample.entropy_rate);
    }
    report.heat = {fit_line(xs, q[0]), fit_line(xs, q[1])};
    report.work = fit_line(xs, w);
    report.entropy = fit_line(xs, s);
    return report;
}

} // namespace qchain::collision
