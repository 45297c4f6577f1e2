#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "qchain/errors.hpp"
#include "qchain/thermo.hpp"
#include "qchain_cli/commands.hpp"
#include "qchain_cli/config.hpp"

using namespace qchain;
using namespace qchain::cli;

namespace {

const std::filesystem::path kData = QCHAIN_TEST_DATA_DIR;

ScenarioConfig parse(const std::string& text)
{
    std::istringstream in(text);
    return parse_config(in);
}

const std::string kBase = R"(n_sites = 2
omega_first = 0.5   # cold end
omega_last = 1.0
epsilon = 0.3
gamma = 1
t_cold = 0.5
t_hot = 1.0
)";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "qchain");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string key_of(const std::string& text)
{
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.key().empty() ? std::string("<none>") : e.key();
    }
    return {};
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("qchain_cli_test_" + name);
}

} // namespace

TEST(Config, ParsesKeysSectionsAndLists)
{
    const auto cfg = parse(kBase + "eta = 0.1\n[sweep]\nlo = 0.1\nhi = 1.9\nsteps = 5\n[collision]\ntaus = 0.1, 0.05 ,0.01\n");
    EXPECT_EQ(cfg.n_sites, 2u);
    EXPECT_DOUBLE_EQ(*cfg.omega_first, 0.5);
    EXPECT_DOUBLE_EQ(cfg.eta, 0.1);
    ASSERT_TRUE(cfg.sweep);
    EXPECT_EQ(cfg.sweep->parameter, "omega_first_ratio");
    EXPECT_EQ(cfg.sweep->steps, 5u);
    ASSERT_TRUE(cfg.collision);
    EXPECT_EQ(cfg.collision->taus, (std::vector<double>{0.1, 0.05, 0.01}));
    EXPECT_DOUBLE_EQ(cfg.collision_g(), 1.0);
    EXPECT_EQ(cfg.collision_dim(), 10u);
    EXPECT_FALSE(cfg.fock);
}

TEST(Config, ExplicitFrequencyList)
{
    const auto cfg = parse("frequencies = 0.3, 0.6, 1.0\nepsilon = 0.1\ngamma = 1\nt_cold = 1\nt_hot = 2\n");
    EXPECT_EQ(cfg.n_sites, 3u);
    EXPECT_EQ(cfg.spec().frequencies(), (std::vector<double>{0.3, 0.6, 1.0}));
    EXPECT_EQ(cfg.spec_at_ratio(0.5).frequencies(), (std::vector<double>{0.5, 0.6, 1.0}));
}

TEST(Config, LinearProfileFollowsTheRatio)
{
    const auto cfg = parse("n_sites = 3\nomega_first = 0.2\nomega_last = 2\nepsilon = 0.1\ngamma = 1\nt_cold = 1\nt_hot = 2\n");
    const auto w = cfg.spec_at_ratio(0.5).frequencies();
    ASSERT_EQ(w.size(), 3u);
    EXPECT_DOUBLE_EQ(w[0], 1.0);
    EXPECT_DOUBLE_EQ(w[1], 1.5);
    EXPECT_DOUBLE_EQ(w[2], 2.0);
}

TEST(Config, ErrorsNameTheOffendingKey)
{
    EXPECT_EQ(key_of(kBase + "epsilonn = 0.3\n"), "epsilonn");
    EXPECT_EQ(key_of(kBase + "gamma = 2\n"), "gamma");
    EXPECT_EQ(key_of(kBase + "eta = abc\n"), "eta");
    EXPECT_EQ(key_of(kBase + "[sweep]\nlo = 0.1\nhi = 2\nsteps = 1\n"), "sweep.steps");
    EXPECT_EQ(key_of(kBase + "[sweep]\nlo = 0\nhi = 2\nsteps = 5\n"), "sweep.lo");
    EXPECT_EQ(key_of(kBase + "[sweep]\nparameter = gamma\nlo = 0.1\nhi = 2\nsteps = 5\n"), "sweep.parameter");
    EXPECT_EQ(key_of(kBase + "[fock]\n"), "fock.dim");
    EXPECT_EQ(key_of(kBase + "[collision]\ng = 1\n"), "collision.taus");
    EXPECT_EQ(key_of(kBase + "[nonsense]\n"), "nonsense");
    EXPECT_EQ(key_of("omega_first = 0.5\nomega_last = 1\nepsilon = 0.3\ngamma = 1\nt_cold = 1\nt_hot = 1\n"), "n_sites");
    EXPECT_EQ(key_of("n_sites = 2\nomega_first = 0.5\nomega_last = 1\ngamma = 1\nt_cold = 1\nt_hot = 1\n"), "epsilon");
    EXPECT_EQ(key_of(kBase + "rate_prefactor = 1\n"), "rate_prefactor");
    EXPECT_EQ(key_of(kBase + "no equals sign\n"), "<none>");
}

TEST(Config, ChainInvariantsAreConfigErrors)
{
    EXPECT_THROW(parse("n_sites = 2\nomega_first = 0.5\nomega_last = 1\nepsilon = 0.3\ngamma = -1\nt_cold = 1\nt_hot = 1\n"),
                 ConfigError);
    EXPECT_THROW(parse("n_sites = 2\nomega_first = 0.5\nomega_last = 1\nepsilon = 0.3\ngamma = 1\nt_cold = 0\nt_hot = 1\n"),
                 ConfigError);
    EXPECT_THROW(parse("n_sites = 1\nomega_first = 0.5\nomega_last = 1\nepsilon = 0.3\ngamma = 1\nt_cold = 1\nt_hot = 1\n"),
                 ConfigError);
    EXPECT_THROW(load_config(kData / "does_not_exist.cfg"), ConfigError);
}

TEST(Config, RatePrefactorFixesGammaEpsSquaredOverDelta)
{
    const auto cfg = load_config(kData / "refrigerator_point.cfg");
    for (double ratio : {0.1, 0.4, 1.0, 1.7}) {
        const auto spec = cfg.spec_at_ratio(ratio);
        const double delta = spec.frequency(0) - spec.frequency(1);
        const double e2 = spec.epsilon() * spec.epsilon();
        const double delta_sq = spec.gamma() * spec.gamma() + 4.0 * e2 + delta * delta;
        EXPECT_NEAR(spec.gamma() * e2 / delta_sq, 1.0, 1e-14) << ratio;
    }
}

TEST(Config, SweepGridHitsTheReferenceRatios)
{
    const auto cfg = parse(kBase + "[sweep]\nlo = 0.01\nhi = 2\nsteps = 200\n");
    const auto grid = cfg.sweep_grid();
    ASSERT_EQ(grid.size(), 200u);
    EXPECT_DOUBLE_EQ(grid.front(), 0.01);
    EXPECT_DOUBLE_EQ(grid.back(), 2.0);
    EXPECT_NEAR(grid[49], 0.5, 1e-15);
    EXPECT_NEAR(grid[99], 1.0, 1e-15);
}

TEST(Steady, RefrigeratorPointAndUncoupledChain)
{
    const auto fridge = invoke({"steady", (kData / "refrigerator_point.cfg").string()});
    ASSERT_EQ(fridge.code, kOk) << fridge.err;
    EXPECT_NE(fridge.out.find("\"regime\": \"refrigerator\""), std::string::npos);
    EXPECT_NE(fridge.out.find("\"covariance\""), std::string::npos);

    const auto cfg = load_config(kData / "uncoupled.cfg");
    const auto r = thermo::analyze_steady(cfg.spec()).report;
    EXPECT_EQ(r.regime, thermo::Regime::Degenerate);
    EXPECT_EQ(r.q_dot[0], 0.0);
    EXPECT_EQ(r.q_dot[1], 0.0);
    EXPECT_EQ(r.w_dot, 0.0);
    const auto out = invoke({"steady", (kData / "uncoupled.cfg").string()});
    ASSERT_EQ(out.code, kOk);
    EXPECT_NE(out.out.find("\"regime\": \"degenerate\""), std::string::npos);
}

TEST(Steady, ExitCodes)
{
    const auto bad = invoke({"steady", (kData / "malformed_key.cfg").string()});
    EXPECT_EQ(bad.code, kConfig);
    EXPECT_NE(bad.err.find("epsilonn"), std::string::npos);
    EXPECT_EQ(invoke({"steady", (kData / "unstable.cfg").string()}).code, kInstability);
    EXPECT_EQ(invoke({"steady"}).code, kConfig);
    EXPECT_EQ(invoke({}).code, kConfig);
    EXPECT_EQ(invoke({"frobnicate", "x.cfg"}).code, kConfig);
    EXPECT_EQ(invoke({"--help"}).code, kOk);
}

TEST(Sweep, UnstableRowsAreMarked)
{
    const auto cfg = load_config(kData / "unstable.cfg");
    const auto rows = run_sweep(cfg, 1);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_FALSE(rows.front().stable);
    EXPECT_EQ(rows.front().regime, "unstable");
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    std::istringstream in(csv.str());
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    const auto fields = split(line);
    ASSERT_EQ(fields.size(), 9u);
    EXPECT_EQ(fields[1], "");
    EXPECT_EQ(fields[5], "unstable");
}

TEST(Sweep, CsvIsByteStableAndConservesEnergy)
{
    const auto cfg = parse(kBase + "eta = 0.05\n[sweep]\nlo = 0.05\nhi = 2\nsteps = 40\n");
    std::ostringstream a;
    std::ostringstream b;
    write_sweep_csv(a, run_sweep(cfg, 1));
    write_sweep_csv(b, run_sweep(cfg, 3));
    EXPECT_EQ(a.str(), b.str());

    std::istringstream in(a.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, kSweepHeader);
    int rows = 0;
    while (std::getline(in, line)) {
        const auto f = split(line);
        ASSERT_EQ(f.size(), 9u) << line;
        const double q1 = std::stod(f[1]);
        const double q2 = std::stod(f[2]);
        const double w = std::stod(f[3]);
        const double scale = std::max({std::abs(q1), std::abs(q2), std::abs(w), cfg.gamma});
        EXPECT_LT(std::abs(q1 + q2 + w), 1e-10 * scale) << line;
        EXPECT_GE(std::stod(f[4]), -1e-12) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 40);
}

TEST(Sweep, WritesCsvAndSidecar)
{
    const auto path = temp_path("sweep.csv");
    const auto cfg_path = temp_path("sweep.cfg");
    std::ofstream(cfg_path) << kBase << "[sweep]\nlo = 0.1\nhi = 1.9\nsteps = 7\n";
    const auto r = invoke({"sweep", cfg_path.string(), "--out", path.string(), "--quiet"});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_TRUE(r.err.empty());
    std::ifstream csv(path);
    std::string header;
    std::getline(csv, header);
    EXPECT_EQ(header, kSweepHeader);
    std::ifstream meta(path.string() + ".json");
    std::stringstream text;
    text << meta.rdbuf();
    EXPECT_NE(text.str().find("\"generated_at\""), std::string::npos);
    EXPECT_NE(text.str().find("\"rows\": 7"), std::string::npos);
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".json");
    std::filesystem::remove(cfg_path);
}

TEST(OracleCompare, AgreementBudgetAndLowConfidence)
{
    const auto cfg_path = temp_path("oracle.cfg");
    std::ofstream(cfg_path) << "n_sites = 2\nomega_first = 0.8\nomega_last = 1\nepsilon = 0\ngamma = 0.7\n"
                               "t_cold = 0.3\nt_hot = 0.4\n[fock]\ndim = 10\n";
    const auto zero = invoke({"oracle-compare", cfg_path.string()});
    ASSERT_EQ(zero.code, kOk) << zero.err;
    const auto pos = zero.out.find("\"max_deviation\": ");
    ASSERT_NE(pos, std::string::npos);
    EXPECT_LT(std::stod(zero.out.substr(pos + 17)), 1e-8);
    EXPECT_NE(zero.out.find("\"low_confidence\": false"), std::string::npos);
    std::filesystem::remove(cfg_path);

    const auto hot = invoke({"oracle-compare", (kData / "hot_oracle.cfg").string()});
    ASSERT_EQ(hot.code, kOk) << hot.err;
    EXPECT_NE(hot.out.find("\"low_confidence\": true"), std::string::npos);

    EXPECT_EQ(invoke({"oracle-compare", (kData / "budget.cfg").string()}).code, kBudget);
    EXPECT_EQ(invoke({"oracle-compare", (kData / "refrigerator_point.cfg").string()}).code, kConfig);
}

TEST(Collision, RowsFitsAndExitCodes)
{
    EXPECT_EQ(invoke({"collision", (kData / "few_taus.cfg").string()}).code, kInsufficientSamples);

    auto cfg = parse(kBase + "[collision]\ntaus = 0.1, 0.05, 0.02\ndim = 5\n");
    const auto study = run_collision(cfg);
    ASSERT_EQ(study.report.samples.size(), 3u);
    for (const auto& s : study.report.samples) EXPECT_GE(s.record.entropy_production, -1e-10);
    EXPECT_NE(study.summary.find("\"reference\""), std::string::npos);
    std::ostringstream csv;
    write_collision_csv(csv, study);
    EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), kCollisionHeader);

    cfg.collision->g = 0.0;
    const auto off = run_collision(cfg);
    for (const auto& s : off.report.samples) {
        EXPECT_NEAR(s.heat_rate[0], 0.0, 1e-12);
        EXPECT_NEAR(s.heat_rate[1], 0.0, 1e-12);
        EXPECT_NEAR(s.work_rate, 0.0, 1e-12);
    }
}

TEST(Collision, RepeatedStrokesAreSummarized)
{
    const auto cfg = parse(kBase + "[collision]\ntaus = 0.1, 0.05, 0.02\nstrokes = 3\ndim = 4\n");
    const auto study = run_collision(cfg);
    EXPECT_NE(study.summary.find("\"repeated\""), std::string::npos);
    EXPECT_NE(study.summary.find("\"strokes\": 3"), std::string::npos);
}

TEST(ExitCodes, MapLibraryErrors)
{
    auto code = [](auto e) { return exit_code_for(std::make_exception_ptr(e)); };
    EXPECT_EQ(code(ConfigError("k", "m")), kConfig);
    EXPECT_EQ(code(DomainError("m")), kConfig);
    EXPECT_EQ(code(NonHurwitzError("m")), kInstability);
    EXPECT_EQ(code(SolverSingularError("m")), kSolver);
    EXPECT_EQ(code(DegenerateKernelError("m")), kSolver);
    EXPECT_EQ(code(DimensionBudgetError("m")), kBudget);
    EXPECT_EQ(code(InsufficientSamplesError("m")), kInsufficientSamples);
    EXPECT_EQ(code(std::runtime_error("m")), kUnexpected);
}
