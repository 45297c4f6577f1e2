// commands.cpp - steady, sweep, oracle-compare and collision commands

#include "qchain_cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "qchain/errors.hpp"
#include "qchain/fock.hpp"
#include "qchain/gaussian.hpp"

namespace qchain::cli {
namespace {

using json = nlohmann::ordered_json;

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string format_optional(const std::optional<double>& v)
{
    return v ? format_double(*v) : std::string();
}

json optional_json(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

json matrix_json(const RMatrix& m)
{
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json complex_json(cplx z)
{
    return json::array({z.real(), z.imag()});
}

json chain_json(const ChainSpec& spec)
{
    const double s = spec.omega_hot();
    std::vector<double> w;
    for (double x : spec.frequencies()) w.push_back(x / s);
    return {
        {"n_sites", spec.n_sites()},
        {"frequencies", w},
        {"epsilon", spec.epsilon() / s},
        {"eta", spec.eta() / s},
        {"gamma", spec.gamma() / s},
        {"t_cold", spec.t_cold() / s},
        {"t_hot", spec.t_hot() / s},
    };
}

json rates_json(double q_cold, double q_hot, double work, double scale)
{
    const double s2 = scale * scale;
    return {{"Q_cold", q_cold / s2}, {"Q_hot", q_hot / s2}, {"W", work / s2}};
}

std::string timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    std::ostringstream os;
    os << std::put_time(&utc, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

std::optional<double> ratio_if_defined(double num, double den, double tol)
{
    if (std::abs(den) < tol) return std::nullopt;
    if (std::abs(num) < tol) return 0.0;
    return num / den;
}

} // namespace

int exit_code_for(std::exception_ptr error)
{
    try {
        std::rethrow_exception(error);
    } catch (const ConfigError&) {
        return kConfig;
    } catch (const DomainError&) {
        return kConfig;
    } catch (const WrongShapeError&) {
        return kConfig;
    } catch (const NonHurwitzError&) {
        return kInstability;
    } catch (const SolverSingularError&) {
        return kSolver;
    } catch (const UnphysicalError&) {
        return kSolver;
    } catch (const DegenerateKernelError&) {
        return kSolver;
    } catch (const InconsistentSignsError&) {
        return kSolver;
    } catch (const DimensionBudgetError&) {
        return kBudget;
    } catch (const InsufficientSamplesError&) {
        return kInsufficientSamples;
    } catch (...) {
        return kUnexpected;
    }
}

std::string steady_report(const ScenarioConfig& cfg)
{
    const ChainSpec spec = cfg.spec();
    const auto a = thermo::analyze_steady(spec);
    const auto& r = a.report;
    const double s = spec.omega_hot();
    json out = rates_json(r.q_dot[0], r.q_dot[1], r.w_dot, s);
    out["command"] = "steady";
    out["units"] = "energies in w_N, rates in w_N^2, entropy production in w_N";
    out["chain"] = chain_json(spec);
    out["Pi"] = r.entropy_rate / s;
    out["first_law_residual"] = (r.q_dot[0] + r.q_dot[1] + r.w_dot) / (s * s);
    out["internal_current"] = r.internal_current ? json(*r.internal_current / (s * s)) : json(nullptr);
    out["regime"] = std::string(thermo::to_string(r.regime));
    out["figure_of_merit"] = optional_json(r.figure_of_merit);
    out["covariance"] = matrix_json(a.covariance.matrix());
    return out.dump(2);
}

SweepRow sweep_row(const ScenarioConfig& cfg, double ratio)
{
    const ChainSpec spec = cfg.spec_at_ratio(ratio);
    SweepRow row;
    row.ratio = ratio;
    try {
        const auto r = thermo::analyze_steady(spec).report;
        const double s = spec.omega_hot();
        const double tol = thermo::zero_tolerance(r.q_dot[0], r.q_dot[1], r.w_dot, spec);
        row.q_cold = r.q_dot[0] / (s * s);
        row.q_hot = r.q_dot[1] / (s * s);
        row.work = r.w_dot / (s * s);
        row.entropy_rate = r.entropy_rate / s;
        row.regime = std::string(thermo::to_string(r.regime));
        row.figure_of_merit = r.figure_of_merit;
        row.q_cold_over_work = ratio_if_defined(r.q_dot[0], r.w_dot, tol);
        row.work_over_q_hot = ratio_if_defined(r.w_dot, r.q_dot[1], tol);
    } catch (const NonHurwitzError&) {
        row.stable = false;
        row.regime = "unstable";
    }
    return row;
}

std::vector<SweepRow> run_sweep(const ScenarioConfig& cfg, unsigned threads)
{
    const auto grid = cfg.sweep_grid();
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(grid.size()));
    std::vector<SweepRow> rows(grid.size());
    std::vector<std::exception_ptr> errors(grid.size());
    auto work = [&](unsigned t) {
        for (std::size_t k = t; k < grid.size(); k += threads) {
            try {
                rows[k] = sweep_row(cfg, grid[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << kSweepHeader << '\n';
    for (const auto& r : rows) {
        out << format_double(r.ratio) << ',';
        if (r.stable) {
            out << format_double(r.q_cold) << ',' << format_double(r.q_hot) << ',' << format_double(r.work) << ','
                << format_double(r.entropy_rate) << ',';
        } else {
            out << ",,,,";
        }
        out << r.regime << ',' << format_optional(r.figure_of_merit) << ',' << format_optional(r.q_cold_over_work)
            << ',' << format_optional(r.work_over_q_hot) << '\n';
    }
}

std::string oracle_compare(const ScenarioConfig& cfg)
{
    if (!cfg.fock) throw ConfigError("fock", "oracle-compare needs a [fock] block");
    const ChainSpec spec = cfg.spec();
    const auto a = thermo::analyze_steady(spec);
    const auto model = fock::build_model(spec, cfg.fock->dim);
    const auto oracle = fock::solve_oracle(model);
    const auto fm = fock::second_moments(model, oracle.rho);
    const CVector first = fock::first_moments(model, oracle.rho);
    const CMatrix g_normal = a.moments.normal();
    const CMatrix f_normal = fm.normal();

    json moments = json::array();
    double max_dev = 0.0;
    auto add = [&](const std::string& name, cplx g, cplx f) {
        const double dev = std::abs(g - f);
        max_dev = std::max(max_dev, dev);
        moments.push_back({{"moment", name}, {"gaussian", complex_json(g)}, {"fock", complex_json(f)}, {"deviation", dev}});
    };
    const auto n = static_cast<Eigen::Index>(spec.n_sites());
    for (Eigen::Index i = 0; i < n; ++i) add("<a" + std::to_string(i + 1) + ">", 0.0, first(i));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i; j < n; ++j) {
            const std::string ij = std::to_string(i + 1) + " a" + std::to_string(j + 1);
            add("<a" + std::to_string(i + 1) + "^dag a" + std::to_string(j + 1) + ">", g_normal(i, j), f_normal(i, j));
            add("<a" + ij + ">", a.moments.anomalous(i, j), fm.anomalous(i, j));
        }
    }
    const RMatrix cov_dev = a.covariance.matrix() - fock::quadrature_covariance(model, oracle.rho);

    const auto expect = [&](const CMatrix& op) { return fock::expectation(oracle.rho, op); };
    const auto heat = thermo::heat_rate_general(model.jumps, expect);
    const double work = thermo::work_rate_general(model.jumps, model.interaction, expect);
    double fock_q[2] = {0.0, 0.0};
    for (const auto& h : heat) fock_q[h.site == spec.cold_site() ? 0 : 1] += h.rate;

    const double s = spec.omega_hot();
    json out;
    out["command"] = "oracle-compare";
    out["chain"] = chain_json(spec);
    out["dim"] = cfg.fock->dim;
    out["top_population"] = oracle.top_population;
    out["low_confidence"] = oracle.low_confidence;
    out["max_deviation"] = max_dev;
    out["covariance_max_deviation"] = cov_dev.cwiseAbs().maxCoeff();
    out["moments"] = moments;
    out["rates"] = {
        {"gaussian", rates_json(a.report.q_dot[0], a.report.q_dot[1], a.report.w_dot, s)},
        {"fock", rates_json(fock_q[0], fock_q[1], work, s)},
    };
    return out.dump(2);
}

CollisionStudy run_collision(const ScenarioConfig& cfg)
{
    if (!cfg.collision) throw ConfigError("collision", "collision needs a [collision] block");
    const ChainSpec spec = cfg.spec();
    const double g = cfg.collision_g();
    const std::size_t d = cfg.collision_dim();
    const auto& taus = cfg.collision->taus;

    CollisionStudy study;
    study.omega_scale = spec.omega_hot();
    study.report = collision::rate_extrapolation(spec, g, d, taus);
    const auto& rep = study.report;
    const double s = study.omega_scale;

    double min_sigma = rep.samples.front().record.entropy_production;
    double max_residual = 0.0;
    bool warning = false;
    for (const auto& smp : rep.samples) {
        const auto& rec = smp.record;
        min_sigma = std::min(min_sigma, rec.entropy_production);
        max_residual =
            std::max(max_residual, std::abs(rec.d_energy_system - rec.heat[0] - rec.heat[1] - rec.work) / s);
        warning = warning || rec.truncation_warning;
    }

    json out;
    out["command"] = "collision";
    out["chain"] = chain_json(spec);
    out["g"] = g / std::sqrt(s);
    out["dim"] = d;
    out["taus"] = taus;
    auto fit = [&](const collision::LinearFit& f, double unit) {
        return json{{"intercept", f.intercept / unit}, {"slope", f.slope / (unit * s)}};
    };
    out["fits"] = {
        {"Q_cold", fit(rep.heat[0], s * s)},
        {"Q_hot", fit(rep.heat[1], s * s)},
        {"W", fit(rep.work, s * s)},
        {"Sigma_rate", fit(rep.entropy, s)},
    };
    out["min_sigma"] = min_sigma;
    out["max_first_law_residual"] = max_residual;
    out["steady_top_population"] = rep.top_population;
    out["truncation_warning"] = warning || rep.top_population > 1e-6;

    if (g > 0.0) {
        const ChainSpec held = spec.with_gamma(g * g);
        thermo::RateTriple ref;
        std::string source;
        if (held.n_sites() == 2 && held.eta() == 0.0) {
            ref = thermo::closed_form_rates(held);
            source = "closed_form";
        } else {
            const auto r = thermo::analyze_steady(held).report;
            ref = {r.q_dot[0], r.q_dot[1], r.w_dot};
            source = "gaussian_master_equation";
        }
        auto rel = [](double fitted, double exact) {
            return exact == 0.0 ? json(nullptr) : json(std::abs(fitted / exact - 1.0));
        };
        out["reference"] = rates_json(ref.q_cold, ref.q_hot, ref.work, s);
        out["reference"]["source"] = source;
        out["relative_error"] = {
            {"Q_cold", rel(rep.heat[0].intercept, ref.q_cold)},
            {"Q_hot", rel(rep.heat[1].intercept, ref.q_hot)},
            {"W", rel(rep.work.intercept, ref.work)},
        };
    } else {
        out["reference"] = nullptr;
        out["relative_error"] = nullptr;
    }

    if (cfg.collision->strokes > 1) {
        const ChainSpec held = g > 0.0 ? spec.with_gamma(g * g) : spec;
        const CMatrix rho0 = fock::solve_oracle(fock::build_model(held, d)).rho;
        json repeated = json::array();
        for (double tau : taus) {
            const auto records = collision::run_strokes(rho0, spec, tau, g, d, cfg.collision->strokes).second;
            double sig = records.front().entropy_production;
            double res = 0.0;
            double top = 0.0;
            double q[2] = {0.0, 0.0};
            double w = 0.0;
            for (const auto& rec : records) {
                sig = std::min(sig, rec.entropy_production);
                res = std::max(res, std::abs(rec.d_energy_system - rec.heat[0] - rec.heat[1] - rec.work) / s);
                top = std::max(top, rec.top_population);
                q[0] += rec.heat[0];
                q[1] += rec.heat[1];
                w += rec.work;
            }
            const double span = tau * static_cast<double>(records.size());
            json entry = rates_json(q[0] / span, q[1] / span, w / span, s);
            entry["tau"] = tau * s;
            entry["strokes"] = records.size();
            entry["min_sigma"] = sig;
            entry["max_first_law_residual"] = res;
            entry["top_population"] = top;
            repeated.push_back(entry);
        }
        out["repeated"] = repeated;
    }
    study.summary = out.dump(2);
    return study;
}

void write_collision_csv(std::ostream& out, const CollisionStudy& study)
{
    const double s = study.omega_scale;
    out << kCollisionHeader << '\n';
    for (const auto& smp : study.report.samples) {
        out << format_double(smp.tau * s) << ',' << format_double(smp.heat_rate[0] / (s * s)) << ','
            << format_double(smp.heat_rate[1] / (s * s)) << ',' << format_double(smp.work_rate / (s * s)) << ','
            << format_double(smp.record.entropy_production) << '\n';
    }
}

namespace {

void emit(const std::optional<std::filesystem::path>& path, std::ostream& fallback, const std::string& text)
{
    if (!path) {
        fallback << text;
        return;
    }
    std::ofstream f(*path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path->string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path->string());
}

std::filesystem::path sidecar(const std::filesystem::path& out)
{
    return std::filesystem::path(out.string() + ".json");
}

json metadata(const std::string& command, const std::filesystem::path& config)
{
    return {
        {"command", command},
        {"config", config.string()},
        {"generated_at", timestamp()},
        {"version", QCHAIN_VERSION},
        {"units", "energies in w_N, rates in w_N^2, entropy production in w_N, durations in 1/w_N"},
    };
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Steady states, heat and work of boundary-driven oscillator chains"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path;
    bool quiet = false;
    app.add_option("--out", out_path, "Output file (stdout when omitted)");
    app.add_flag("--quiet", quiet, "Suppress progress messages");

    std::string config_path;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"steady", "Steady-state rates, regime and covariance as JSON"},
        {"sweep", "CSV of rates over the w_1/w_N sweep"},
        {"oracle-compare", "Gaussian vs truncated-Fock moment comparison as JSON"},
        {"collision", "Collision-model rates per stroke duration with a tau -> 0 fit"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("config", config_path, "Scenario configuration file")->required();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream eo;
        const int code = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return code == 0 ? kOk : kConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    const std::optional<std::filesystem::path> target =
        out_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_path);
    auto log = [&](const std::string& msg) {
        if (!quiet) err << "qchain " << command << ": " << msg << '\n';
    };

    try {
        const ScenarioConfig cfg = load_config(config_path);
        if (command == "steady") {
            emit(target, out, steady_report(cfg) + "\n");
        } else if (command == "sweep") {
            const auto rows = run_sweep(cfg);
            std::ostringstream csv;
            write_sweep_csv(csv, rows);
            emit(target, out, csv.str());
            const auto unstable = std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return !r.stable; });
            if (target) {
                json meta = metadata(command, config_path);
                meta["rows"] = rows.size();
                meta["unstable_rows"] = unstable;
                meta["csv"] = target->filename().string();
                emit(sidecar(*target), out, meta.dump(2) + "\n");
            }
            log(std::to_string(rows.size()) + " rows, " + std::to_string(unstable) + " unstable");
        } else if (command == "oracle-compare") {
            const std::string report = oracle_compare(cfg);
            emit(target, out, report + "\n");
            if (json::parse(report)["low_confidence"].get<bool>()) log("LowConfidence: top-level population above 1e-6");
        } else {
            log("running " + std::to_string(cfg.collision ? cfg.collision->taus.size() : 0) + " stroke durations");
            const auto study = run_collision(cfg);
            std::ostringstream csv;
            write_collision_csv(csv, study);
            emit(target, out, csv.str());
            if (target) {
                json summary = json::parse(study.summary);
                summary["metadata"] = metadata(command, config_path);
                emit(sidecar(*target), out, summary.dump(2) + "\n");
            } else {
                log("fit summary is written to <out>.json when --out is given");
            }
        }
    } catch (const ConfigError& e) {
        err << "qchain " << command << ": config error";
        if (!e.key().empty()) err << " [" << e.key() << "]";
        err << ": " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        err << "qchain " << command << ": " << e.what() << '\n';
        return exit_code_for(std::current_exception());
    }
    return kOk;
}

} // namespace qchain::cli
