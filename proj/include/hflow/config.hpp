#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hflow/flow.hpp"
#include "hflow/rough_init.hpp"

namespace hflow {

/// Flat key = value config file: one typed key per line, '#' comments.
/// Unknown keys are errors (ConfigError), as are missing required keys.
class KeyValueConfig {
public:
    static KeyValueConfig parse_file(const std::string& path);
    static KeyValueConfig parse_text(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_real(const std::string& key) const;
    double get_real(const std::string& key, double def) const;
    long get_int(const std::string& key) const;
    long get_int(const std::string& key, long def) const;
    bool get_bool(const std::string& key, bool def) const;
    std::vector<double> get_reals(const std::string& key) const;  // comma separated
    std::vector<double> get_reals(const std::string& key, const std::vector<double>& def) const;

    /// Keys that were never read; used to reject unknown keys.
    std::vector<std::string> unused_keys() const;
    /// Canonical sorted text (for hashing).
    std::string canonical_text() const;

private:
    std::map<std::string, std::string> kv_;
    mutable std::map<std::string, bool> used_;
};

enum class ExperimentKind {
    Smoothing,
    W1nGrowth,
    TimeLipschitz,
    Uniqueness,
    ScalarPersistence,
    TorusRigidity,
    LongtimeFlat,
    SingularPointDemo,
    ConvergenceOrder,
};

std::string to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& s);

/// Background selector from config.
struct BackgroundSpec {
    enum class Kind { Flat, Warped, File } kind = Kind::Flat;
    int axis = 0;
    double amplitude = 0.0;
    int frequency = 1;
    std::string path;
};

/// Parsed experiment configuration (see docs/config.md for the schema).
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Smoothing;
    int dim = 3;
    int n = 32;
    double period = 1.0;
    BackgroundSpec background;
    RoughSpec rough;
    std::vector<double> mollify_sigmas;  // ladder, descending
    MollifierSpec::Kind mollify_kind = MollifierSpec::Kind::Gaussian;
    StepPolicy policy;
    double t_end = 0.01;
    std::vector<double> observer_times;  // strictly increasing, within (0, t_end]
    int obs_log_count = 12;              // used when observer_times is empty
    double obs_log_span = 256.0;
    std::vector<double> radii;           // concentration radii, each <= period/2
    int conc_stride = 1;
    std::string out_dir;
    unsigned long long seed = 1;
    bool write_snapshots = false;

    // experiment-specific knobs (documented per experiment)
    double kappa = 0.0;                   // scalar_persistence floor
    std::vector<double> rigidity_ladder;  // torus_rigidity: i values
    double uniq_tstar = 0.0;              // uniqueness comparison time (0 -> t_end)
    double uniq_tolerance = 1e-3;
    bool negative_control = false;

    std::string config_hash;  // FNV-1a of the canonical text

    static ExperimentConfig from_kv(KeyValueConfig& kv);
    static ExperimentConfig from_file(const std::string& path);
    void validate() const;  // throws ConfigError
};

}  // namespace hflow
