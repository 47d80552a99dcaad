#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "beltrami/dynamics.hpp"

namespace beltrami::io {

/// Flat key-value run configuration. Lines look like
///
///     # comment
///     grid.n = 32
///     physics.nu = 0.05
///
/// Keys are dotted lowercase words; values are read on demand with typed
/// getters. Every getter records the resolved value (including applied
/// defaults)  for the run-provenance echo, and marks the key consumed;
/// `finish()` rejects any key that was never consumed, so typos fail loudly
/// instead of being ignored.
class ConfigMap {
  public:
    ConfigMap() = default;

    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_string(const std::string& text, const std::string& origin = "<string>");

    /// Insert or overwrite a key (command-line overrides).
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback);
    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    bool get_bool(const std::string& key, bool fallback);

    std::string require_string(const std::string& key);
    double require_double(const std::string& key);
    int require_int(const std::string& key);

    /// Throws ConfigError listing keys that were present but never read.
    void finish() const;

    /// "key = value" lines for everything resolved so far, sorted by key.
    std::vector<std::string> echo_lines() const;

  private:
    std::string raw(const std::string& key) const; // throws if absent
    void note(const std::string& key, const std::string& value);

    std::map<std::string, std::string> values_;
    std::set<std::string> consumed_;
    std::map<std::string, std::string> resolved_;
    std::string origin_ = "<empty>";
};

/// Everything needed to run a simulation, assembled from a ConfigMap.
struct RunSetup {
    dynamics::SimState state;
    double alpha = 0.0; // alignment multipliers for the Phi/Psi diagnostics
    double beta = 0.0;
    std::optional<dynamics::ExactSolution> exact; // closed-form reference when valid
    double dt = 0.0;                              // 0 => stability-bound step
    double t_end = 1.0;
    int record_every = 100;
    std::string csv_path;        // empty => stdout
    std::string checkpoint_path; // empty => no final checkpoint
};

/// Build the initial state and run settings from a config. Consumes keys from
/// `cfg`; call cfg.finish() afterwards to reject unknown keys. A closed-form
/// reference is attached automatically for init.kind = double_beltrami when
/// nu = eta, hall = 1 and no perturbation is applied.
RunSetup build_run_setup(ConfigMap& cfg);

} // namespace beltrami::io
