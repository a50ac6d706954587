#ifndef SELFSIM_MANIFEST_HPP
#define SELFSIM_MANIFEST_HPP

#include <optional>
#include <string>
#include <vector>

#include "selfsim/observables.hpp"
#include "selfsim/shooting.hpp"
#include "selfsim/stability.hpp"

namespace selfsim {

inline constexpr const char* kVersion = "0.1.0";

// Full numeric configuration of one run; serializes to/from JSON and is the
// payload of the --config file.
struct RunConfig {
    int m = 3;
    int l = 1;
    int n_max = 4;
    double rel_tol = 1e-11;
    double abs_tol = 1e-13;
    double x_max = 40.0;
    double fit_point = 0.5;
    double bisect_tol = 1e-12;
    double newton_tol = 1e-10;
    double launch_eps_x = 1e-4;
    double launch_eps_rho = 1e-6;
    double w_escape_factor = 1.01;
    double lambda2_max = 1e5;
    double secant_tol = 1e-9;
    double match_point = 0.5;
    int threads = 1;

    ShooterConfig shooter() const;
    EigenShotConfig eigen() const;
};

struct OrbitRecord {
    int n = 0;
    double a = 0.0;
    double b_rho = 0.0;
    double beta_x = 0.0;
    std::optional<double> energy;
    double newton_residual = 0.0;
    std::vector<double> eigenvalues;
};

struct RunManifest {
    std::string version = kVersion;
    std::string timestamp;
    RunConfig config;
    std::vector<OrbitRecord> orbits;
    std::vector<double> energy_ratios;
    std::optional<ConditionReport> condition;
};

std::string to_json_string(const RunManifest& m);
RunManifest manifest_from_json_string(const std::string& text);

// Accepts either a bare RunConfig JSON object or a full manifest (in which
// case the embedded "config" block is read) -- this is what makes a saved
// manifest re-runnable.
RunConfig config_from_json_file(const std::string& path);

void save_manifest(const RunManifest& m, const std::string& path);
RunManifest load_manifest(const std::string& path);

// Fixed 9-significant-digit scientific notation used by all CSV output.
std::string format_sci(double v);

void write_table_csv(const std::string& path, const std::vector<OrbitRecord>& orbits,
                     const std::vector<double>& ratios);
void write_profile_dat(const std::string& path, const Trajectory& profile);
void write_spectrum_csv(const std::string& path, const std::vector<SpectrumResult>& spectra);
void write_gauge_csv(const std::string& path, const std::vector<SpectrumResult>& spectra);

} // namespace selfsim

#endif
