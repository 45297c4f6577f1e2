// config.cpp - Scenario configuration parser

#include "qchain_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "qchain/errors.hpp"

namespace qchain::cli {
namespace {

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct Entry {
    std::string value;
    int line{0};
};

/// Flattened `section.key` -> value.
using Table = std::map<std::string, Entry>;

const std::set<std::string> kKnownKeys = {
    "n_sites", "omega_first", "omega_last", "frequencies", "epsilon", "rate_prefactor", "eta", "gamma",
    "t_cold", "t_hot", "sweep.parameter", "sweep.lo", "sweep.hi", "sweep.steps", "fock.dim", "collision.g",
    "collision.taus", "collision.strokes", "collision.dim",
};

const std::set<std::string> kSections = {"sweep", "fock", "collision"};

Table tokenize(std::istream& in)
{
    Table table;
    std::string section;
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("", "line " + std::to_string(line_no) + ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!kSections.contains(section)) {
                throw ConfigError(section, "line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            }
            table.emplace("[" + section + "]", Entry{"", line_no});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", "line " + std::to_string(line_no) + ": expected `key = value`");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string full = section.empty() ? key : section + "." + key;
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + ": missing key");
        if (!kKnownKeys.contains(full)) {
            throw ConfigError(full, "line " + std::to_string(line_no) + ": unknown key '" + full + "'");
        }
        const std::string value = trim(line.substr(eq + 1));
        if (value.empty()) throw ConfigError(full, "line " + std::to_string(line_no) + ": empty value for '" + full + "'");
        if (!table.emplace(full, Entry{value, line_no}).second) {
            throw ConfigError(full, "line " + std::to_string(line_no) + ": duplicate key '" + full + "'");
        }
    }
    return table;
}

double to_double(const std::string& key, const std::string& text, int line)
{
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        throw ConfigError(key, "line " + std::to_string(line) + ": '" + key + "' is not a finite number: " + text);
    }
    return v;
}

std::size_t to_count(const std::string& key, const std::string& text, int line)
{
    std::size_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError(key, "line " + std::to_string(line) + ": '" + key + "' is not a non-negative integer: " + text);
    }
    return v;
}

std::vector<double> to_list(const std::string& key, const std::string& text, int line)
{
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const std::string item = trim(text.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        out.push_back(to_double(key, item, line));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

class Reader {
public:
    explicit Reader(Table table)
        : table_(std::move(table))
    {
    }

    bool has(const std::string& key) const { return table_.contains(key); }

    std::optional<double> number(const std::string& key) const
    {
        const auto it = table_.find(key);
        if (it == table_.end()) return std::nullopt;
        return to_double(key, it->second.value, it->second.line);
    }

    double required_number(const std::string& key) const
    {
        auto v = number(key);
        if (!v) throw ConfigError(key, "missing required key '" + key + "'");
        return *v;
    }

    std::optional<std::size_t> count(const std::string& key) const
    {
        const auto it = table_.find(key);
        if (it == table_.end()) return std::nullopt;
        return to_count(key, it->second.value, it->second.line);
    }

    std::vector<double> list(const std::string& key) const
    {
        const auto it = table_.find(key);
        if (it == table_.end()) return {};
        return to_list(key, it->second.value, it->second.line);
    }

    std::optional<std::string> text(const std::string& key) const
    {
        const auto it = table_.find(key);
        if (it == table_.end()) return std::nullopt;
        return it->second.value;
    }

private:
    Table table_;
};

void require(bool ok, const std::string& key, const std::string& message)
{
    if (!ok) throw ConfigError(key, "'" + key + "' " + message);
}

/// eps with gamma eps^2 / (gamma^2 + 4 eps^2 + delta^2) = p w_N.
double epsilon_for_prefactor(double p, const std::vector<double>& w, double gamma)
{
    const double target = p * w.back();
    const double delta = w.front() - w.back();
    if (!(gamma > 4.0 * target)) {
        throw ConfigError("rate_prefactor", "'rate_prefactor' needs gamma > 4 rate_prefactor w_N");
    }
    return std::sqrt(target * (gamma * gamma + delta * delta) / (gamma - 4.0 * target));
}

} // namespace

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(message)
    , key_(std::move(key))
{
}

ScenarioConfig parse_config(std::istream& in)
{
    const Reader r(tokenize(in));
    ScenarioConfig cfg;

    cfg.frequencies = r.list("frequencies");
    cfg.omega_first = r.number("omega_first");
    cfg.omega_last = r.number("omega_last");
    const auto n = r.count("n_sites");
    if (!cfg.frequencies.empty()) {
        require(!cfg.omega_first && !cfg.omega_last, "frequencies", "cannot be combined with omega_first/omega_last");
        require(!n || *n == cfg.frequencies.size(), "n_sites", "does not match the length of 'frequencies'");
        cfg.n_sites = cfg.frequencies.size();
    } else {
        if (!n) throw ConfigError("n_sites", "missing required key 'n_sites'");
        if (!cfg.omega_first) throw ConfigError("omega_first", "missing required key 'omega_first'");
        if (!cfg.omega_last) throw ConfigError("omega_last", "missing required key 'omega_last'");
        cfg.n_sites = *n;
    }
    require(cfg.n_sites >= 2, "n_sites", "must be at least 2");

    cfg.epsilon = r.number("epsilon");
    cfg.rate_prefactor = r.number("rate_prefactor");
    if (cfg.epsilon && cfg.rate_prefactor) {
        throw ConfigError("rate_prefactor", "'rate_prefactor' cannot be combined with 'epsilon'");
    }
    if (!cfg.epsilon && !cfg.rate_prefactor) throw ConfigError("epsilon", "missing required key 'epsilon'");
    cfg.eta = r.number("eta").value_or(0.0);
    cfg.gamma = r.required_number("gamma");
    cfg.t_cold = r.required_number("t_cold");
    cfg.t_hot = r.required_number("t_hot");
    if (cfg.rate_prefactor) {
        require(*cfg.rate_prefactor > 0.0, "rate_prefactor", "must be positive");
        require(cfg.n_sites == 2, "rate_prefactor", "needs n_sites = 2");
        require(cfg.eta == 0.0, "rate_prefactor", "needs eta = 0");
    }

    if (r.has("[sweep]")) {
        SweepBlock s;
        s.parameter = r.text("sweep.parameter").value_or("omega_first_ratio");
        require(s.parameter == "omega_first_ratio", "sweep.parameter", "must be omega_first_ratio");
        s.lo = r.required_number("sweep.lo");
        s.hi = r.required_number("sweep.hi");
        s.steps = r.count("sweep.steps").value_or(0);
        require(s.lo > 0.0, "sweep.lo", "must be positive");
        require(s.hi > s.lo, "sweep.hi", "must exceed sweep.lo");
        require(s.steps >= 2, "sweep.steps", "must be at least 2");
        cfg.sweep = s;
    }
    if (r.has("[fock]")) {
        FockBlock f;
        const auto dim = r.count("fock.dim");
        if (!dim) throw ConfigError("fock.dim", "missing required key 'fock.dim'");
        f.dim = *dim;
        require(f.dim >= 2, "fock.dim", "must be at least 2");
        cfg.fock = f;
    }
    if (r.has("[collision]")) {
        CollisionBlock c;
        c.g = r.number("collision.g");
        if (c.g) require(*c.g >= 0.0, "collision.g", "must be non-negative");
        c.taus = r.list("collision.taus");
        if (c.taus.empty()) throw ConfigError("collision.taus", "missing required key 'collision.taus'");
        for (double t : c.taus) require(t > 0.0, "collision.taus", "entries must be positive");
        c.strokes = r.count("collision.strokes").value_or(1);
        require(c.strokes >= 1, "collision.strokes", "must be at least 1");
        c.dim = r.count("collision.dim");
        if (c.dim) require(*c.dim >= 2, "collision.dim", "must be at least 2");
        cfg.collision = c;
    }

    try {
        (void)cfg.spec();
        if (cfg.sweep) {
            for (double x : {cfg.sweep->lo, cfg.sweep->hi}) (void)cfg.spec_at_ratio(x);
        }
    } catch (const DomainError& e) {
        throw ConfigError("", e.what());
    }
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot read config file " + path.string());
    return parse_config(in);
}

namespace {

ChainSpec build(const ScenarioConfig& cfg, std::vector<double> w)
{
    const double eps = cfg.rate_prefactor ? epsilon_for_prefactor(*cfg.rate_prefactor, w, cfg.gamma) : *cfg.epsilon;
    return ChainSpec(std::move(w), eps, cfg.eta, cfg.gamma, cfg.t_cold, cfg.t_hot);
}

} // namespace

ChainSpec ScenarioConfig::spec() const
{
    if (!frequencies.empty()) return build(*this, frequencies);
    return build(*this, linear_profile(*omega_first, *omega_last, n_sites));
}

ChainSpec ScenarioConfig::spec_at_ratio(double ratio) const
{
    if (!frequencies.empty()) {
        auto w = frequencies;
        w.front() = ratio * w.back();
        return build(*this, std::move(w));
    }
    return build(*this, linear_profile(ratio * *omega_last, *omega_last, n_sites));
}

std::vector<double> ScenarioConfig::sweep_grid() const
{
    if (!sweep) throw ConfigError("sweep", "config has no [sweep] block");
    std::vector<double> grid(sweep->steps);
    const double span = sweep->hi - sweep->lo;
    const double last = static_cast<double>(sweep->steps - 1);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = sweep->lo + span * static_cast<double>(k) / last;
    return grid;
}

double ScenarioConfig::collision_g() const
{
    if (!collision) throw ConfigError("collision", "config has no [collision] block");
    return collision->g.value_or(std::sqrt(gamma));
}

std::size_t ScenarioConfig::collision_dim() const
{
    if (!collision) throw ConfigError("collision", "config has no [collision] block");
    if (collision->dim) return *collision->dim;
    return fock ? fock->dim : 10;
}

} // namespace qchain::cli
