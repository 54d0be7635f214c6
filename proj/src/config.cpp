#include "hflow/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hflow/errors.hpp"

namespace hflow {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream is(text);
    std::string line;
    int ln = 0;
    while (std::getline(is, line)) {
        ++ln;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(ln) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("config line " + std::to_string(ln) + ": empty key");
        if (cfg.kv_.count(key)) throw ConfigError("duplicate config key: " + key);
        cfg.kv_[key] = val;
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_text(ss.str());
}

bool KeyValueConfig::has(const std::string& key) const {
    used_[key] = true;
    return kv_.count(key) > 0;
}

std::string KeyValueConfig::get_string(const std::string& key) const {
    used_[key] = true;
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& def) const {
    used_[key] = true;
    auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double KeyValueConfig::get_real(const std::string& key) const {
    std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        double r = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": expected a real, got '" + v + "'");
    }
}

double KeyValueConfig::get_real(const std::string& key, double def) const {
    return has(key) ? get_real(key) : def;
}

long KeyValueConfig::get_int(const std::string& key) const {
    std::string v = get_string(key);
    try {
        std::size_t pos = 0;
        long r = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw ConfigError("key " + key + ": expected an integer, got '" + v + "'");
    }
}

long KeyValueConfig::get_int(const std::string& key, long def) const {
    return has(key) ? get_int(key) : def;
}

bool KeyValueConfig::get_bool(const std::string& key, bool def) const {
    if (!has(key)) return def;
    std::string v = get_string(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("key " + key + ": expected a boolean, got '" + v + "'");
}

std::vector<double> KeyValueConfig::get_reals(const std::string& key) const {
    std::string v = get_string(key);
    std::vector<double> out;
    std::istringstream is(v);
    std::string cell;
    while (std::getline(is, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) continue;
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw ConfigError("key " + key + ": expected comma-separated reals, got '" + v + "'");
        }
    }
    if (out.empty()) throw ConfigError("key " + key + ": empty list");
    return out;
}

std::vector<double> KeyValueConfig::get_reals(const std::string& key,
                                              const std::vector<double>& def) const {
    return has(key) ? get_reals(key) : def;
}

std::vector<std::string> KeyValueConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
        if (!used_.count(k)) out.push_back(k);
    return out;
}

std::string KeyValueConfig::canonical_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << "=" << v << "\n";
    return os.str();
}

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::Smoothing: return "smoothing";
        case ExperimentKind::W1nGrowth: return "w1n_growth";
        case ExperimentKind::TimeLipschitz: return "time_lipschitz";
        case ExperimentKind::Uniqueness: return "uniqueness";
        case ExperimentKind::ScalarPersistence: return "scalar_persistence";
        case ExperimentKind::TorusRigidity: return "torus_rigidity";
        case ExperimentKind::LongtimeFlat: return "longtime_flat";
        case ExperimentKind::SingularPointDemo: return "singular_point_demo";
        case ExperimentKind::ConvergenceOrder: return "convergence_order";
    }
    return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::Smoothing, ExperimentKind::W1nGrowth, ExperimentKind::TimeLipschitz,
                   ExperimentKind::Uniqueness, ExperimentKind::ScalarPersistence,
                   ExperimentKind::TorusRigidity, ExperimentKind::LongtimeFlat,
                   ExperimentKind::SingularPointDemo, ExperimentKind::ConvergenceOrder})
        if (to_string(k) == s) return k;
    throw ConfigError("unknown experiment kind: " + s);
}

namespace {

unsigned long long fnv1a(const std::string& s) {
    unsigned long long h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

RoughKind rough_kind_from_string(const std::string& s) {
    if (s == "loglog_spike") return RoughKind::LoglogSpike;
    if (s == "fourier_multiscale") return RoughKind::FourierMultiscale;
    if (s == "point_singular_demo") return RoughKind::PointSingularDemo;
    if (s == "smooth_warp") return RoughKind::SmoothWarp;
    throw ConfigError("unknown rough.kind: " + s);
}

WarpShape warp_shape_from_string(const std::string& s) {
    if (s == "sinusoidal") return WarpShape::Sinusoidal;
    if (s == "profile_conformal") return WarpShape::ProfileConformal;
    if (s == "warped_product") return WarpShape::WarpedProduct;
    if (s == "diffeo_flat") return WarpShape::DiffeoFlat;
    throw ConfigError("unknown rough.warp_shape: " + s);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_kv(KeyValueConfig& kv) {
    ExperimentConfig c;
    c.kind = experiment_kind_from_string(kv.get_string("experiment"));
    c.dim = static_cast<int>(kv.get_int("dim", 3));
    c.n = static_cast<int>(kv.get_int("n", 32));
    c.period = kv.get_real("period", 1.0);

    std::string bg = kv.get_string("background", "flat");
    if (bg == "flat") {
        c.background.kind = BackgroundSpec::Kind::Flat;
    } else if (bg == "warped") {
        c.background.kind = BackgroundSpec::Kind::Warped;
        c.background.axis = static_cast<int>(kv.get_int("background.axis", 0));
        c.background.amplitude = kv.get_real("background.amplitude", 0.01);
        c.background.frequency = static_cast<int>(kv.get_int("background.frequency", 1));
    } else if (bg == "file") {
        c.background.kind = BackgroundSpec::Kind::File;
        c.background.path = kv.get_string("background.path");
    } else {
        throw ConfigError("unknown background: " + bg);
    }

    if (kv.has("rough.kind")) c.rough.kind = rough_kind_from_string(kv.get_string("rough.kind"));
    c.rough.lambda0 = kv.get_real("rough.lambda0", 1.5);
    c.rough.epsilon = kv.get_real("rough.epsilon", 0.1);
    c.rough.seed = static_cast<unsigned long long>(kv.get_int("seed", 1));
    if (kv.has("rough.center")) {
        auto v = kv.get_reals("rough.center");
        for (std::size_t i = 0; i < 3 && i < v.size(); ++i) c.rough.center[i] = v[i];
    }
    c.rough.beta = kv.get_real("rough.beta", 4.0);
    c.rough.r0 = kv.get_real("rough.r0", 0.35);
    c.rough.amp_margin = kv.get_real("rough.amp_margin", 0.9);
    c.rough.mode_min = static_cast<int>(kv.get_int("rough.mode_min", 1));
    c.rough.mode_count = static_cast<int>(kv.get_int("rough.mode_count", 4));
    if (kv.has("rough.warp_shape"))
        c.rough.warp_shape = warp_shape_from_string(kv.get_string("rough.warp_shape"));
    c.rough.axis = static_cast<int>(kv.get_int("rough.axis", 0));
    c.rough.amplitude = kv.get_real("rough.amplitude", 0.05);
    c.rough.frequency = static_cast<int>(kv.get_int("rough.frequency", 1));

    c.mollify_sigmas = kv.get_reals("mollify.sigmas", {});
    std::string mk = kv.get_string("mollify.kind", "gaussian");
    if (mk == "gaussian") c.mollify_kind = MollifierSpec::Kind::Gaussian;
    else if (mk == "box") c.mollify_kind = MollifierSpec::Kind::Box;
    else throw ConfigError("unknown mollify.kind: " + mk);

    std::string integ = kv.get_string("policy.integrator", "rk4");
    if (integ == "euler") c.policy.integrator = StepPolicy::Integrator::Euler;
    else if (integ == "rk4") c.policy.integrator = StepPolicy::Integrator::Rk4;
    else throw ConfigError("unknown policy.integrator: " + integ);
    c.policy.cfl_safety = kv.get_real("policy.cfl", 0.2);
    c.policy.dt_max = kv.get_real("policy.dt_max", 1e30);
    c.policy.stencil_order = static_cast<int>(kv.get_int("policy.stencil", 4));

    c.t_end = kv.get_real("t_end", 0.01);
    if (kv.has("observers")) c.observer_times = kv.get_reals("observers");
    c.obs_log_count = static_cast<int>(kv.get_int("observers.log_count", 12));
    c.obs_log_span = kv.get_real("observers.log_span", 256.0);
    c.radii = kv.get_reals("radii", {c.period / 4.0});
    c.conc_stride = static_cast<int>(kv.get_int("conc_stride", 1));
    c.out_dir = kv.get_string("out", "");
    c.seed = static_cast<unsigned long long>(kv.get_int("seed", 1));
    c.write_snapshots = kv.get_bool("write_snapshots", false);

    c.kappa = kv.get_real("kappa", 0.0);
    c.rigidity_ladder = kv.get_reals("rigidity.ladder", {1, 2, 4, 8});
    c.uniq_tstar = kv.get_real("uniqueness.tstar", 0.0);
    c.uniq_tolerance = kv.get_real("uniqueness.tolerance", 1e-3);
    c.negative_control = kv.get_bool("negative_control", false);

    c.config_hash = [&] {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx", fnv1a(kv.canonical_text()));
        return std::string(buf);
    }();

    auto unused = kv.unused_keys();
    if (!unused.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unused) msg += " " + k;
        throw ConfigError(msg);
    }
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    KeyValueConfig kv = KeyValueConfig::parse_file(path);
    return from_kv(kv);
}

void ExperimentConfig::validate() const {
    if (dim != 2 && dim != 3) throw ConfigError("dim must be 2 or 3");
    if (n < 8) throw ConfigError("n must be >= 8");
    if (!(period > 0)) throw ConfigError("period must be positive");
    if (!(t_end > 0)) throw ConfigError("t_end must be positive");
    for (double r : radii)
        if (!(r > 0) || r > period / 2) throw ConfigError("every radius must lie in (0, period/2]");
    for (double t : observer_times)
        if (!(t > 0) || t > t_end) throw ConfigError("observer times must lie in (0, t_end]");
    for (std::size_t i = 1; i < observer_times.size(); ++i)
        if (observer_times[i] <= observer_times[i - 1])
            throw ConfigError("observer times must be strictly increasing");
    if (!(policy.cfl_safety > 0) || policy.cfl_safety > 1.0)
        throw ConfigError("policy.cfl must lie in (0, 1]");
    if (policy.stencil_order != 2 && policy.stencil_order != 4)
        throw ConfigError("policy.stencil must be 2 or 4");
    for (double s : mollify_sigmas)
        if (!(s > 0)) throw ConfigError("mollify.sigmas must be positive");
}

}  // namespace hflow
