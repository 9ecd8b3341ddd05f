#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sdwave/fit.hpp"
#include "sdwave/grid.hpp"
#include "sdwave/littlewood_paley.hpp"

namespace sdwave {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "partition-check", "symbol-invariants", "shell-bounds",   "littman-scan",
        "corollary-scan",  "besov-scan",        "lemma1-check",   "interpolation-check",
        "scaling-check",   "curvature-report",  "solve",          "convergence-study"};
    return names;
}

/// Flat key = value configuration with sections, fully defaulted per
/// experiment so every run is reproducible from the file alone.
struct ExperimentConfig {
    std::string experiment;

    // [grid]
    int n = 2;
    int points = 0;   // 0 = experiment default
    double box = 0.0; // 0 = experiment default

    // [scan]
    std::vector<double> deltas;
    std::vector<double> ps;
    double t_min = 0.0;
    double t_max = 0.0;
    int t_count = 0;

    // [besov]
    double sigma = 1.0;
    double q = 2.0;
    int levels = 3;

    // [probes]
    std::vector<double> gaussian_widths;
    std::vector<double> carriers;
    double carrier_width = 1.0;
    std::vector<int> shells;
    std::uint64_t seed = 0x9e3779b97f4a7c15ull;

    // [solver]
    double solver_delta = 0.1;
    double nl_a = 0.0;
    double nl_b = -1.0;
    double nl_r = 3.0;
    double tau = 1e-2;
    double total_time = 10.0;
    double picard_tol = 1e-10;
    int picard_max = 50;
    int snapshot_every = 0;

    // [littman]
    double max_phase_step = 0.5;

    // [output]
    std::string output_dir = "out";

    // [tolerances]
    std::map<std::string, double> tolerances;

    double tolerance(const std::string& key, double fallback) const {
        auto it = tolerances.find(key);
        return it == tolerances.end() ? fallback : it->second;
    }

    std::vector<double> times() const { return log_spaced(t_min, t_max, t_count); }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value '" + s + "' for key " + key);
    }
}

inline long parse_long(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos, 0);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value '" + s + "' for key " + key);
    }
}

inline std::vector<double> parse_double_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    for (const auto& tok : split_list(s)) out.push_back(parse_double(tok, key));
    return out;
}

inline std::vector<int> parse_int_list(const std::string& s, const std::string& key) {
    std::vector<int> out;
    for (const auto& tok : split_list(s)) out.push_back(static_cast<int>(parse_long(tok, key)));
    return out;
}

inline std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v[i]);
        out += buf;
    }
    return out;
}

inline std::string join(const std::vector<int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace detail

/// Applies one "section.key = value" setting.
inline void apply_setting(ExperimentConfig& c, const std::string& section,
                          const std::string& key, const std::string& value) {
    using namespace detail;
    const std::string full = section.empty() ? key : section + "." + key;
    auto num = [&] { return parse_double(value, full); };
    auto integer = [&] { return parse_long(value, full); };

    if (full == "experiment.name") c.experiment = value;
    else if (full == "grid.n") c.n = static_cast<int>(integer());
    else if (full == "grid.N") c.points = static_cast<int>(integer());
    else if (full == "grid.L") c.box = num();
    else if (full == "scan.delta") c.deltas = parse_double_list(value, full);
    else if (full == "scan.p") c.ps = parse_double_list(value, full);
    else if (full == "scan.t_min") c.t_min = num();
    else if (full == "scan.t_max") c.t_max = num();
    else if (full == "scan.t_count") c.t_count = static_cast<int>(integer());
    else if (full == "besov.sigma") c.sigma = num();
    else if (full == "besov.q") c.q = num();
    else if (full == "besov.J") c.levels = static_cast<int>(integer());
    else if (full == "probes.gaussian_widths") c.gaussian_widths = parse_double_list(value, full);
    else if (full == "probes.carriers") c.carriers = parse_double_list(value, full);
    else if (full == "probes.carrier_width") c.carrier_width = num();
    else if (full == "probes.shells") c.shells = parse_int_list(value, full);
    else if (full == "probes.seed") {
        try {
            std::size_t pos = 0;
            c.seed = std::stoull(value, &pos, 0);
            if (pos != value.size()) throw std::invalid_argument(value);
        } catch (const std::exception&) {
            throw ConfigError("config: bad seed value '" + value + "'");
        }
    }
    else if (full == "solver.delta") c.solver_delta = num();
    else if (full == "solver.a") c.nl_a = num();
    else if (full == "solver.b") c.nl_b = num();
    else if (full == "solver.r") c.nl_r = num();
    else if (full == "solver.tau") c.tau = num();
    else if (full == "solver.T") c.total_time = num();
    else if (full == "solver.picard_tol") c.picard_tol = num();
    else if (full == "solver.picard_max") c.picard_max = static_cast<int>(integer());
    else if (full == "solver.snapshot_every") c.snapshot_every = static_cast<int>(integer());
    else if (full == "littman.max_phase_step") c.max_phase_step = num();
    else if (full == "output.dir") c.output_dir = value;
    else if (section == "tolerances") c.tolerances[key] = num();
    else throw ConfigError("config: unknown key '" + full + "'");
}

ExperimentConfig default_config(const std::string& experiment);

/// Parses "key = value" lines under [section] headers; '#' and ';' start
/// comments. Settings are applied on top of the named experiment's defaults
/// (the [experiment] section must come first or the name defaults to the
/// file's setting order).
inline ExperimentConfig parse_config_text(const std::string& text) {
    // First pass: find the experiment name so defaults can seed the rest.
    std::string name;
    {
        std::istringstream is(text);
        std::string line, section;
        while (std::getline(is, line)) {
            const auto hash = line.find_first_of("#;");
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') {
                section = detail::trim(line.substr(1, line.size() - 2));
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            if (section == "experiment" && detail::trim(line.substr(0, eq)) == "name") {
                name = detail::trim(line.substr(eq + 1));
                break;
            }
        }
    }
    if (name.empty()) throw ConfigError("config: missing [experiment] name");
    ExperimentConfig cfg = default_config(name);

    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = detail::trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) + " is not key = value");
        apply_setting(cfg, section, detail::trim(line.substr(0, eq)),
                      detail::trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config_text(ss.str());
}

/// Canonical serialization; also the input to the config hash.
inline std::string to_ini(const ExperimentConfig& c) {
    using detail::join;
    std::ostringstream os;
    char buf[40];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    os << "[experiment]\nname = " << c.experiment << "\n\n";
    os << "[grid]\nn = " << c.n << "\nN = " << c.points << "\nL = " << num(c.box) << "\n\n";
    os << "[scan]\ndelta = " << join(c.deltas) << "\np = " << join(c.ps)
       << "\nt_min = " << num(c.t_min) << "\nt_max = " << num(c.t_max)
       << "\nt_count = " << c.t_count << "\n\n";
    os << "[besov]\nsigma = " << num(c.sigma) << "\nq = " << num(c.q) << "\nJ = " << c.levels
       << "\n\n";
    os << "[probes]\ngaussian_widths = " << join(c.gaussian_widths)
       << "\ncarriers = " << join(c.carriers) << "\ncarrier_width = " << num(c.carrier_width)
       << "\nshells = " << join(c.shells) << "\nseed = " << c.seed << "\n\n";
    os << "[solver]\ndelta = " << num(c.solver_delta) << "\na = " << num(c.nl_a)
       << "\nb = " << num(c.nl_b) << "\nr = " << num(c.nl_r) << "\ntau = " << num(c.tau)
       << "\nT = " << num(c.total_time) << "\npicard_tol = " << num(c.picard_tol)
       << "\npicard_max = " << c.picard_max << "\nsnapshot_every = " << c.snapshot_every
       << "\n\n";
    os << "[littman]\nmax_phase_step = " << num(c.max_phase_step) << "\n\n";
    os << "[output]\ndir = " << c.output_dir << "\n";
    if (!c.tolerances.empty()) {
        os << "\n[tolerances]\n";
        for (const auto& [k, v] : c.tolerances) os << k << " = " << num(v) << "\n";
    }
    return os.str();
}

/// Fully-populated defaults for each named experiment. Grids are sized so the
/// stated parameter ranges are actually resolved (shell truncation, wave-cone
/// containment, Littman phase sampling).
inline ExperimentConfig default_config(const std::string& experiment) {
    ExperimentConfig c;
    c.experiment = experiment;
    c.deltas = {0.0, 1e-3, 1e-2, 0.1, 0.3, delta_max_littman, 1.0};
    c.ps = {1.2};
    c.gaussian_widths = {0.25, 0.5, 1.0, 2.0};
    c.carriers = {1.0, 2.0, 4.0, 8.0};
    c.shells = {1, 2, 3};

    if (experiment == "partition-check") {
        c.n = 2;
        c.points = 1024;
        c.box = 8.0;  // Nyquist ~ 402 >= 2^(J+1)
        c.levels = 7;
    } else if (experiment == "symbol-invariants") {
        // scalar scans; grid unused
        c.points = 16;
        c.box = 8.0;
    } else if (experiment == "shell-bounds") {
        c.n = 2;
        c.deltas = {0.0, 0.015625};  // 2^-6 mixes both regimes over j = 1..7
        c.levels = 7;
        c.points = 0;  // per-shell grids are sized internally
        c.box = 12.0;
    } else if (experiment == "littman-scan") {
        c.n = 2;
        c.deltas = {0.0, 0.1, 0.2, 0.3, delta_max_littman};
        c.t_min = 10.0;
        c.t_max = 200.0;
        c.t_count = 12;
        // L >= 4 pi t_max keeps the phase step below the default 0.5 rad.
        c.box = 2576.0;
        c.points = 4096;
    } else if (experiment == "corollary-scan") {
        c.n = 2;
        c.deltas = {0.0, 1e-2, 0.1, 0.3, 1.0};
        c.ps = {1.2, 2.0};
        c.t_min = 4.0;
        c.t_max = 128.0;
        c.t_count = 9;
        // Box contains the wave cone at t_max; N resolves the probe spectra.
        c.box = 288.0;
        c.points = 2048;
    } else if (experiment == "besov-scan") {
        c.n = 2;
        c.deltas = {0.0, 1e-3, 1e-2, 0.1, 0.3, 1.0};
        c.ps = {1.2};
        c.sigma = 1.0;
        c.q = 2.0;
        c.levels = 3;
        c.t_min = 1.0;
        c.t_max = 64.0;
        c.t_count = 5;
        c.box = 160.0;
        c.points = 1024;
        c.gaussian_widths = {1.0, 2.0};
        c.carriers = {1.0};
        c.shells = {1, 2};
    } else if (experiment == "lemma1-check") {
        c.n = 2;
        c.deltas = {0.1};
        c.ps = {1.2};
        c.sigma = 1.0;
        c.q = 2.0;
        c.levels = 3;
        c.box = 160.0;
        c.points = 1024;
        c.gaussian_widths = {1.0, 2.0};
        c.carriers = {1.0};
        c.shells = {1, 2};
    } else if (experiment == "interpolation-check") {
        c.n = 2;
        c.deltas = {0.0, 1e-2, 0.1, delta_max_littman, 1.0};
        c.ps = {1.0, 1.2, 1.5, 2.0};
        c.t_min = 0.5;
        c.t_max = 16.0;
        c.t_count = 4;  // {0.5, 1(~1.0), 4, 16} via explicit times in the runner
        c.levels = 3;
        c.box = 96.0;
        c.points = 1024;
    } else if (experiment == "scaling-check") {
        c.n = 2;
        c.deltas = {0.0, 0.1, 0.5};
        c.t_min = 0.5;
        c.t_max = 8.0;
        c.t_count = 3;  // log-spaced {0.5, 2, 8}
        // Box sized so the wave cone + heat spread at delta*t = 4 decays
        // below 1e-12 at the boundary (the identity is checked at 1e-6).
        c.box = 64.0;
        c.points = 2048;
        c.gaussian_widths = {0.5, 1.0};
    } else if (experiment == "curvature-report") {
        c.n = 3;  // report covers n = 2 and 3; n sets the CSV detail dimension
        c.deltas = {0.0, 0.05, 0.1, 0.2, 0.3, delta_max_littman};
        c.points = 16;
        c.box = 8.0;
    } else if (experiment == "solve") {
        c.n = 2;
        c.points = 64;
        c.box = 16.0;
        c.solver_delta = 0.1;
        c.nl_a = 0.0;
        c.nl_b = -1.0;
        c.nl_r = 3.0;
        c.tau = 1e-2;
        c.total_time = 10.0;
        c.snapshot_every = 200;
    } else if (experiment == "convergence-study") {
        c.n = 2;
        c.points = 32;
        c.box = 16.0;
        c.solver_delta = 0.1;
        c.nl_a = 0.0;
        c.nl_b = -1.0;
        c.nl_r = 3.0;
        c.total_time = 1.0;
        c.tau = 1.0 / 64.0;
    } else {
        throw ConfigError("default_config: unknown experiment '" + experiment + "'");
    }
    return c;
}

inline std::uint64_t fnv1a_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    return h;
}

/// Hash of the experiment-identity part of the config: the output directory
/// does not participate (two runs into different directories are the same
/// experiment and must produce identical data).
inline std::uint64_t config_hash(const ExperimentConfig& c) {
    ExperimentConfig canonical = c;
    canonical.output_dir.clear();
    return fnv1a_hash(to_ini(canonical));
}

// ---------------------------------------------------------------------------
// Static validation.
// ---------------------------------------------------------------------------

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
    bool ok() const { return errors.empty(); }
};

/// Static checks only: grid sizing rules, admissible p per ExponentSet,
/// the Littman delta interval, probe/Besov resolution rules. No computation.
inline ValidationReport validate(const ExperimentConfig& c) {
    ValidationReport rep;
    auto err = [&rep](const std::string& m) { rep.errors.push_back(m); };
    auto warn = [&rep](const std::string& m) { rep.warnings.push_back(m); };

    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
        err("unknown experiment '" + c.experiment + "'");
        return rep;
    }
    if (c.n < 1 || c.n > 3) err("grid.n must be 1, 2 or 3");
    if (c.points != 0 && (c.points < 4 || c.points % 2 != 0))
        err("grid.N must be even and >= 4");
    if (c.box < 0.0) err("grid.L must be positive (or 0 for the default)");

    const bool needs_scan = c.experiment == "littman-scan" || c.experiment == "corollary-scan" ||
                            c.experiment == "besov-scan" || c.experiment == "shell-bounds";
    if (needs_scan && c.deltas.empty()) err("scan.delta must be nonempty");
    if ((c.experiment == "corollary-scan" || c.experiment == "interpolation-check") &&
        c.ps.empty())
        err("scan.p must be nonempty");
    if ((c.experiment == "littman-scan" || c.experiment == "corollary-scan" ||
         c.experiment == "besov-scan") &&
        !(c.t_count >= 2 && c.t_min > 0.0 && c.t_max > c.t_min))
        err("scan.t_min/t_max/t_count must define a nonempty log grid");

    if (c.experiment == "littman-scan") {
        for (double d : c.deltas)
            if (d < 0.0 || d > delta_max_littman + 1e-15)
                err("littman-scan: delta = " + std::to_string(d) +
                    " outside [0, 1/(2 sqrt 2) ~= 0.35355]");
    }
    if (c.experiment == "corollary-scan" || c.experiment == "besov-scan") {
        const double lo = ExponentSet::lower_bound(c.n);
        for (double p : c.ps)
            if (!(p >= lo && p <= 2.0))
                err("p = " + std::to_string(p) + " outside admissible [" + std::to_string(lo) +
                    ", 2]");
        if (c.n <= 1) err("corollary/besov scans need n > 1");
    }
    if (c.experiment == "besov-scan" || c.experiment == "lemma1-check") {
        if (!(c.sigma > 0.0)) err("besov.sigma must be positive");
        if (!(c.q >= 1.0)) err("besov.q must be >= 1");
        if (c.levels < 1) err("besov.J must be >= 1");
        // Probe admissibility against the truncation level 2^J.
        const double top = std::ldexp(1.0, c.levels);
        const double reach = std::sqrt(2.0 * std::log(1e10));  // |spectrum| < 1e-10 beyond
        for (double w : c.gaussian_widths)
            if (reach / w > top)
                err("gaussian width " + std::to_string(w) +
                    " leaks above 2^J; widen the probe or raise besov.J");
        for (double cr : c.carriers)
            if (cr + reach / c.carrier_width > top)
                err("carrier " + std::to_string(cr) + " leaks above 2^J; raise besov.J");
        for (int j : c.shells)
            if (j >= c.levels)
                err("shell probe j = " + std::to_string(j) +
                    " reaches 2^(j+1) > 2^J; use j <= J-1");
    }
    if (c.points > 0 && c.box > 0.0) {
        const Grid g{c.n, c.points, c.box};
        const bool uses_partition = c.experiment == "partition-check" ||
                                    c.experiment == "besov-scan" ||
                                    c.experiment == "lemma1-check";
        if (uses_partition && g.nyquist() < std::ldexp(1.0, c.levels + 1))
            err("grid does not resolve shell J: Nyquist " + std::to_string(g.nyquist()) +
                " < 2^(J+1)");
        if (c.experiment == "littman-scan" && c.t_max > 0.0) {
            const double step = c.t_max * g.freq_step();
            if (step > c.max_phase_step)
                err("littman sizing: phase step per frequency cell " + std::to_string(step) +
                    " rad exceeds littman.max_phase_step");
            if (g.nyquist() < 4.0)
                warn("littman grid Nyquist < 4; the bump support is barely resolved");
        }
        const bool uses_probes =
            c.experiment == "corollary-scan" || c.experiment == "besov-scan" ||
            c.experiment == "lemma1-check" || c.experiment == "interpolation-check";
        if (uses_probes)
            for (double w : c.gaussian_widths) {
                const double reach = std::sqrt(2.0 * std::log(1e10)) / w;
                if (reach > g.nyquist())
                    warn("gaussian width " + std::to_string(w) +
                         " has spectral reach beyond the grid Nyquist (truncation > 1e-10)");
            }
    }
    if (c.experiment == "solve" || c.experiment == "convergence-study") {
        if (!(c.tau > 0.0)) err("solver.tau must be positive");
        if (!(c.nl_r >= 1.0)) err("solver.r must be >= 1");
        if (!(c.total_time > 0.0)) err("solver.T must be positive");
        const double ratio = c.total_time / c.tau;
        if (std::abs(ratio - std::lround(ratio)) > 1e-9)
            err("solver.T must be an integer multiple of solver.tau");
    }
    return rep;
}

}  // namespace sdwave
