#include "beltrami/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "beltrami/errors.hpp"
#include "beltrami/fields.hpp"
#include "beltrami/checkpoint.hpp"
#include "beltrami/operators.hpp"

namespace beltrami::io {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

// shortest representation that round-trips, so echoed defaults read naturally
// ("0.03", not "0.029999999999999999")
std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

} // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str(), path);
}

ConfigMap ConfigMap::from_string(const std::string& text, const std::string& origin) {
    ConfigMap cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // Strip comments ('#' to end of line) and trailing CR from CRLF files.
        if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string body = trim(line);
        if (body.empty()) continue;
        auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) +
                              ": expected 'key = value', got '" + body + "'");
        std::string key = trim(body.substr(0, eq));
        std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (cfg.values_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "'");
        cfg.values_[key] = value;
    }
    return cfg;
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    values_[key] = trim(value);
}

bool ConfigMap::has(const std::string& key) const { return values_.count(key) != 0; }

std::string ConfigMap::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

void ConfigMap::note(const std::string& key, const std::string& value) {
    consumed_.insert(key);
    resolved_[key] = value;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) {
    std::string v = has(key) ? raw(key) : fallback;
    note(key, v);
    return v;
}

double ConfigMap::get_double(const std::string& key, double fallback) {
    if (!has(key)) {
        note(key, format_double(fallback));
        return fallback;
    }
    return require_double(key);
}

double ConfigMap::require_double(const std::string& key) {
    std::string v = raw(key);
    const char* begin = v.c_str();
    char* end = nullptr;
    double parsed = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    note(key, format_double(parsed));
    return parsed;
}

int ConfigMap::get_int(const std::string& key, int fallback) {
    if (!has(key)) {
        note(key, std::to_string(fallback));
        return fallback;
    }
    return require_int(key);
}

int ConfigMap::require_int(const std::string& key) {
    std::string v = raw(key);
    try {
        std::size_t used = 0;
        int parsed = std::stoi(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        note(key, std::to_string(parsed));
        return parsed;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    }
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) {
        note(key, std::to_string(fallback));
        return fallback;
    }
    std::string v = raw(key);
    try {
        // stoull wraps negative inputs instead of rejecting them
        if (!v.empty() && v[0] == '-') throw std::invalid_argument(v);
        std::size_t used = 0;
        unsigned long long parsed = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        note(key, std::to_string(parsed));
        return static_cast<std::uint64_t>(parsed);
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + v + "'");
    }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) {
    if (!has(key)) {
        note(key, fallback ? "true" : "false");
        return fallback;
    }
    std::string v = lower(raw(key));
    bool parsed;
    if (v == "true" || v == "1" || v == "yes" || v == "on") parsed = true;
    else if (v == "false" || v == "0" || v == "no" || v == "off") parsed = false;
    else throw ConfigError("key '" + key + "': expected a boolean, got '" + raw(key) + "'");
    note(key, parsed ? "true" : "false");
    return parsed;
}

std::string ConfigMap::require_string(const std::string& key) {
    std::string v = raw(key);
    note(key, v);
    return v;
}

void ConfigMap::finish() const {
    std::vector<std::string> unknown;
    for (const auto& [key, value] : values_)
        if (!consumed_.count(key)) unknown.push_back(key);
    if (!unknown.empty()) {
        std::string msg = "unknown config key(s) in " + origin_ + ":";
        for (const auto& k : unknown) msg += " '" + k + "'";
        throw ConfigError(msg);
    }
}

std::vector<std::string> ConfigMap::echo_lines() const {
    std::vector<std::string> lines;
    lines.reserve(resolved_.size());
    for (const auto& [key, value] : resolved_) lines.push_back(key + " = " + value);
    return lines;
}

namespace {

fields::BeltramiComponent shell_from_config(ConfigMap& cfg, const GridSpec& g,
                                            const std::string& prefix, std::uint64_t seed_base) {
    int n = cfg.require_int(prefix + ".n");
    int sign = cfg.require_int(prefix + ".sign");
    if (sign != 1 && sign != -1)
        throw ConfigError("key '" + prefix + ".sign': expected +1 or -1");
    double norm = cfg.get_double(prefix + ".norm", 1.0);
    std::uint64_t seed = cfg.get_u64(prefix + ".seed", seed_base);
    return fields::shell_field(g, n, sign, seed, norm);
}

} // namespace

RunSetup build_run_setup(ConfigMap& cfg) {
    RunSetup rs;

    std::string kind = cfg.get_string("init.kind", "random");
    std::uint64_t seed = cfg.get_u64("init.seed", 1);

    dynamics::SimState s;

    if (kind == "checkpoint") {
        std::string path = cfg.require_string("init.checkpoint.path");
        s = read_state(path);
        // Config-specified physics (when present) overrides the stored values;
        // the stored values serve as the defaults for the provenance echo.
        s.params.nu = cfg.get_double("physics.nu", s.params.nu);
        s.params.eta = cfg.get_double("physics.eta", s.params.eta);
        s.params.hall = cfg.get_double("physics.hall", s.params.hall);
        if (s.params.nu < 0 || s.params.eta < 0)
            throw ConfigError("physics.nu and physics.eta must be >= 0");
    } else {
        dynamics::PhysicalParams p;
        p.nu = cfg.get_double("physics.nu", 0.0);
        p.eta = cfg.get_double("physics.eta", 0.0);
        p.hall = cfg.get_double("physics.hall", 1.0);
        if (p.nu < 0 || p.eta < 0) throw ConfigError("physics.nu and physics.eta must be >= 0");
        s.params = p;
        int n = cfg.require_int("grid.n");
        GridSpec g{n};
        s.u = SpectralVectorField(g);
        s.B = SpectralVectorField(g);
        if (kind == "abc") {
            double A = cfg.get_double("init.abc.a", 1.0);
            double Bc = cfg.get_double("init.abc.b", 1.0);
            double C = cfg.get_double("init.abc.c", 1.0);
            int lambda0 = cfg.get_int("init.abc.lambda", 1);
            auto c = fields::abc_flow(g, A, Bc, C, lambda0);
            std::string target = cfg.get_string("init.abc.target", "u");
            if (target == "u") s.u = c.field;
            else if (target == "b") s.B = c.field;
            else throw ConfigError("init.abc.target must be 'u' or 'b'");
        } else if (kind == "shell") {
            auto c = shell_from_config(cfg, g, "init.shell", seed);
            std::string target = cfg.get_string("init.shell.target", "u");
            if (target == "u") s.u = c.field;
            else if (target == "b") s.B = c.field;
            else throw ConfigError("init.shell.target must be 'u' or 'b'");
        } else if (kind == "double_beltrami") {
            auto c1 = shell_from_config(cfg, g, "init.db.shell1", seed);
            auto c2 = shell_from_config(cfg, g, "init.db.shell2", seed + 1);
            auto st = fields::make_double_beltrami(c1, c2);
            s.u = st.u;
            s.B = st.B;
            rs.alpha = st.alpha;
            rs.beta = st.beta;
            if (p.nu == p.eta && p.hall == 1.0)
                rs.exact = dynamics::ExactSolution::from_components(c1, c2, p);
        } else if (kind == "random") {
            int kmax2 = cfg.get_int("init.random.kmax2", 9);
            double nu_norm = cfg.get_double("init.random.norm_u", 1.0);
            double nb_norm = cfg.get_double("init.random.norm_b", 1.0);
            if (nu_norm > 0) s.u = fields::random_solenoidal(g, kmax2, seed, nu_norm);
            if (nb_norm > 0) s.B = fields::random_solenoidal(g, kmax2, seed + 1, nb_norm);
        } else {
            throw ConfigError("init.kind must be one of abc, shell, double_beltrami, random, "
                              "checkpoint (got '" +
                              kind + "')");
        }
    }

    // Diagnostics multipliers: explicit keys win; double_beltrami fills its own.
    rs.alpha = cfg.get_double("diagnostics.alpha", rs.alpha);
    rs.beta = cfg.get_double("diagnostics.beta", rs.beta);

    if (cfg.get_bool("perturbation.enabled", false)) {
        double amp = cfg.get_double("perturbation.amplitude", 0.01);
        std::string scaling = cfg.get_string("perturbation.scaling", "relative");
        int kmax2 = cfg.get_int("perturbation.kmax2", 9);
        std::uint64_t pseed = cfg.get_u64("perturbation.seed", seed + 7777);
        auto v = fields::random_solenoidal(s.grid(), kmax2, pseed, -1.0);
        auto b = fields::random_solenoidal(s.grid(), kmax2, pseed + 1, -1.0);
        auto joint_norm = [](const SpectralVectorField& a, const SpectralVectorField& c) {
            double na = spectral::norm(a), nc = spectral::norm(c);
            return std::sqrt(na * na + nc * nc);
        };
        double joint = joint_norm(v, b);
        double target;
        if (scaling == "relative") {
            double base = joint_norm(s.u, s.B);
            if (base == 0.0)
                throw ConfigError("perturbation.scaling = relative requires a nonzero background");
            target = amp * base;
        } else if (scaling == "absolute") {
            target = amp;
        } else {
            throw ConfigError("perturbation.scaling must be 'relative' or 'absolute'");
        }
        if (joint > 0.0) {
            double c = target / joint;
            s.u.axpy(c, v);
            s.B.axpy(c, b);
        }
        rs.exact.reset(); // the closed form no longer describes this run
    }

    std::string dt_str = cfg.get_string("time.dt", "auto");
    if (dt_str == "auto") {
        rs.dt = 0.0;
    } else {
        const char* begin = dt_str.c_str();
        char* end = nullptr;
        rs.dt = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || rs.dt <= 0.0)
            throw ConfigError("time.dt must be 'auto' or a positive number, got '" + dt_str + "'");
    }
    rs.t_end = cfg.get_double("time.t_end", 1.0);
    if (rs.t_end < s.t)
        throw ConfigError("time.t_end is before the initial state's time");
    rs.record_every = cfg.get_int("time.record_every", 100);
    if (rs.record_every < 1) throw ConfigError("time.record_every must be >= 1");

    rs.csv_path = cfg.get_string("output.csv", "");
    rs.checkpoint_path = cfg.get_string("output.checkpoint", "");

    rs.state = std::move(s);
    return rs;
}

} // namespace beltrami::io
