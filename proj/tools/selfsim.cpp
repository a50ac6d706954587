#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "selfsim/manifest.hpp"
#include "selfsim/observables.hpp"
#include "selfsim/shooting.hpp"
#include "selfsim/stability.hpp"

namespace fs = std::filesystem;
using namespace selfsim;

namespace {

constexpr int kExitInadmissible = 2;
constexpr int kExitSolverFailure = 3;
constexpr int kExitIo = 4;
constexpr int kExitCountMismatch = 5;

int default_threads() {
    int t = static_cast<int>(std::thread::hardware_concurrency());
    if (t < 1)
        t = 1;
    if (t > 8)
        t = 8;
    if (const char* env = std::getenv("SELFSIM_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1 && cap < t)
            t = cap;
    }
    return t;
}

std::string now_iso8601() {
    char buf[32];
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Common per-command options with CLI > config-file > defaults precedence.
struct CommonOpts {
    RunConfig cfg;
    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    bool show_config = false;

    void attach(CLI::App* app) {
        app->add_option("--m", cfg.m, "spatial dimension (odd, >= 3)");
        app->add_option("--l", cfg.l, "equivariance degree (>= 1)");
        app->add_option("--nmax", cfg.n_max, "highest excitation index");
        app->add_option("--rel-tol", cfg.rel_tol, "integrator relative tolerance");
        app->add_option("--abs-tol", cfg.abs_tol, "integrator absolute tolerance");
        app->add_option("--xmax", cfg.x_max, "truncation abscissa for X-coordinate runs");
        app->add_option("--fit-point", cfg.fit_point, "two-sided shooting fitting point rho_mid");
        app->add_option("--out-dir", out_dir, "output directory");
        app->add_option("--config", config_path, "JSON config file (or a saved manifest)");
        app->add_option("--format", format, "output format")
            ->check(CLI::IsMember({"csv", "json"}));
        app->add_flag("--show-config", show_config, "print the effective config as JSON and exit");
    }

    // Re-applies the precedence once the app is parsed: file values override
    // defaults, explicit flags override the file.
    void resolve(CLI::App* app) {
        cfg.threads = default_threads();
        if (!config_path.empty()) {
            RunConfig file_cfg = config_from_json_file(config_path);
            auto keep = [&](const char* flag, auto member) {
                if (app->count(flag) > 0)
                    file_cfg.*member = cfg.*member;
            };
            keep("--m", &RunConfig::m);
            keep("--l", &RunConfig::l);
            keep("--nmax", &RunConfig::n_max);
            keep("--rel-tol", &RunConfig::rel_tol);
            keep("--abs-tol", &RunConfig::abs_tol);
            keep("--xmax", &RunConfig::x_max);
            keep("--fit-point", &RunConfig::fit_point);
            file_cfg.threads = cfg.threads;
            cfg = file_cfg;
        }
    }

    bool handle_show_config() const {
        if (!show_config)
            return false;
        RunManifest m;
        m.config = cfg;
        std::cout << to_json_string(m) << "\n";
        return true;
    }
};

struct SolveOutput {
    std::vector<ConnectingOrbit> orbits;
    std::vector<OrbitRecord> records;
    std::vector<double> ratios;
    ConditionReport condition;
};

// Runs admissibility check + shooting pipeline + (m=3,l=1) energies.
// Throws; exit-code mapping happens in the command handlers.
SolveOutput run_solve(const RunConfig& cfg) {
    SolveOutput out;
    out.condition = check_condition(cfg.m, cfg.l);
    if (!out.condition.admissible) {
        throw std::invalid_argument(
            "inadmissible (m,l): the countable family requires l > (sqrt(2)-1)(m-2)/2 = " +
            std::to_string(out.condition.threshold) + " (got l = " + std::to_string(cfg.l) + ")");
    }
    const EquationParams p = EquationParams::make(cfg.m, cfg.l);
    out.orbits = solve_family(p, cfg.shooter());

    std::vector<EnergyReport> reports;
    for (auto& orbit : out.orbits) {
        OrbitRecord rec;
        rec.n = orbit.n;
        rec.a = orbit.a;
        rec.b_rho = orbit.b_rho;
        rec.beta_x = orbit.beta_x;
        rec.newton_residual = orbit.newton_residual;
        if (cfg.m == 3 && cfg.l == 1) {
            const EnergyReport er = energy(orbit);
            orbit.energy = er.E;
            rec.energy = er.E;
            reports.push_back(er);
        }
        out.records.push_back(rec);
    }
    if (reports.size() >= 2)
        out.ratios = energy_ratios(reports);
    return out;
}

RunManifest make_manifest(const RunConfig& cfg, const SolveOutput& s) {
    RunManifest m;
    m.timestamp = now_iso8601();
    m.config = cfg;
    m.orbits = s.records;
    m.energy_ratios = s.ratios;
    m.condition = s.condition;
    return m;
}

void write_solve_artifacts(const CommonOpts& opts, const SolveOutput& s) {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    save_manifest(make_manifest(opts.cfg, s), (dir / "profiles.json").string());
    if (opts.format == "json") {
        // table content lives in the manifest; still emit the csv for diffing
    }
    write_table_csv((dir / "table.csv").string(), s.records, s.ratios);
    for (const auto& orbit : s.orbits)
        write_profile_dat((dir / ("profile_" + std::to_string(orbit.n) + ".dat")).string(),
                          orbit.profile);
}

int cmd_solve(const CommonOpts& opts) {
    SolveOutput s;
    try {
        s = run_solve(opts.cfg);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInadmissible;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    try {
        write_solve_artifacts(opts, s);
    } catch (const std::exception& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    }
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        const OrbitRecord& r = s.records[i];
        std::cout << "n=" << r.n << "  a=" << format_sci(r.a) << "  b=" << format_sci(r.b_rho);
        if (r.energy)
            std::cout << "  E=" << format_sci(*r.energy);
        if (i < s.ratios.size())
            std::cout << "  E_n/E_n+1=" << format_sci(s.ratios[i]);
        std::cout << "\n";
    }
    return 0;
}

int cmd_spectrum(const CommonOpts& opts, int single_n) {
    if (opts.cfg.m != 3 || opts.cfg.l != 1) {
        std::cerr << "error: spectrum is implemented for m = 3, l = 1 only\n";
        return kExitInadmissible;
    }
    RunConfig cfg = opts.cfg;
    const int n_hi = (single_n >= 0) ? single_n : cfg.n_max;
    cfg.n_max = n_hi;

    SolveOutput s;
    try {
        s = run_solve(cfg);
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }

    std::vector<SpectrumResult> spectra;
    try {
        for (const auto& orbit : s.orbits) {
            if (single_n >= 0 && orbit.n != single_n)
                continue;
            spectra.push_back(find_spectrum(orbit, cfg.eigen()));
        }
    } catch (const CountMismatch& e) {
        std::cerr << "count mismatch: " << e.what() << "\n";
        return kExitCountMismatch;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }

    try {
        const fs::path dir(opts.out_dir);
        fs::create_directories(dir);
        write_spectrum_csv((dir / "spectrum.csv").string(), spectra);
        write_gauge_csv((dir / "gauge.csv").string(), spectra);
    } catch (const std::exception& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    }
    for (const auto& sp : spectra) {
        std::cout << "n=" << sp.n << "  eigenvalues:";
        if (sp.eigenvalues.empty())
            std::cout << " (none; linearly stable)";
        for (double l2 : sp.eigenvalues)
            std::cout << " " << format_sci(l2);
        std::cout << "  gauge zeros=" << sp.gauge_zero_count
                  << "  gauge residual=" << format_sci(sp.gauge_residual) << "\n";
    }
    return 0;
}

bool parse_range(const std::string& text, int& lo, int& hi) {
    const auto pos = text.find("..");
    try {
        if (pos == std::string::npos) {
            lo = hi = std::stoi(text);
        } else {
            lo = std::stoi(text.substr(0, pos));
            hi = std::stoi(text.substr(pos + 2));
        }
    } catch (...) {
        return false;
    }
    return lo <= hi;
}

int cmd_check(const std::string& m_range, const std::string& l_range) {
    int m_lo, m_hi, l_lo, l_hi;
    if (!parse_range(m_range, m_lo, m_hi) || !parse_range(l_range, l_lo, l_hi)) {
        std::cerr << "error: ranges must be N or N..M\n";
        return 1;
    }
    std::cout << "m,l,threshold,admissible,oscillation_check\n";
    for (int m = m_lo; m <= m_hi; ++m)
        for (int l = l_lo; l <= l_hi; ++l) {
            if (m % 2 == 0) {
                std::cout << m << "," << l << ",,m must be odd,\n";
                continue;
            }
            const ConditionReport r = check_condition(m, l);
            std::cout << m << "," << l << "," << format_sci(r.threshold) << ","
                      << (r.admissible ? "yes" : "no") << ","
                      << (r.oscillation_check ? "yes" : "no") << "\n";
        }
    return 0;
}

int cmd_energy(const CommonOpts& opts) {
    if (opts.cfg.m != 3 || opts.cfg.l != 1) {
        std::cerr << "error: the energy functional is defined for m = 3, l = 1 only\n";
        return kExitInadmissible;
    }
    SolveOutput s;
    try {
        s = run_solve(opts.cfg);
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    std::cout << "n,E,ratio\n";
    for (std::size_t i = 0; i < s.records.size(); ++i) {
        std::cout << s.records[i].n << "," << format_sci(*s.records[i].energy) << ",";
        if (i < s.ratios.size())
            std::cout << format_sci(s.ratios[i]);
        std::cout << "\n";
    }
    try {
        const fs::path dir(opts.out_dir);
        fs::create_directories(dir);
        write_table_csv((dir / "energies.csv").string(), s.records, s.ratios);
    } catch (const std::exception& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

int cmd_export(const std::string& manifest_path, const std::string& out_dir) {
    RunManifest m;
    try {
        m = load_manifest(manifest_path);
    } catch (const std::exception& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    }
    SolveOutput s;
    try {
        s = run_solve(m.config);
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolverFailure;
    }
    try {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        for (const auto& orbit : s.orbits)
            write_profile_dat((dir / ("profile_" + std::to_string(orbit.n) + ".dat")).string(),
                              orbit.profile);
        std::ofstream gp(dir / "plot.gp");
        gp << "# gnuplot script: profiles f_n(rho)\n";
        gp << "set xlabel 'rho'\nset ylabel 'f(rho)'\nset key top left\n";
        gp << "plot ";
        for (std::size_t i = 0; i < s.orbits.size(); ++i) {
            if (i)
                gp << ", \\\n     ";
            gp << "'profile_" << s.orbits[i].n << ".dat' using 1:2 with lines title 'f_"
               << s.orbits[i].n << "'";
        }
        gp << "\npause -1\n";
    } catch (const std::exception& e) {
        std::cerr << "i/o failure: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"selfsim: equivariant self-similar wave-map profiles, energies, and spectra"};
    app.require_subcommand(0, 1);

    CommonOpts solve_opts, spectrum_opts, energy_opts;
    int spectrum_n = -1;
    std::string check_m = "3..9", check_l = "1..3";
    std::string export_manifest = "profiles.json", export_out = ".";

    CLI::App* solve = app.add_subcommand("solve", "solve profiles f_0..f_nmax, write table + manifest");
    solve_opts.attach(solve);

    CLI::App* spectrum = app.add_subcommand("spectrum", "linear-stability spectra around f_n (m=3,l=1)");
    spectrum_opts.attach(spectrum);
    spectrum->add_option("--n", spectrum_n, "single excitation index (default: all up to --nmax)");

    CLI::App* check = app.add_subcommand("check", "admissibility condition over (m,l) ranges");
    check->add_option("--m", check_m, "m value or range a..b");
    check->add_option("--l", check_l, "l value or range a..b");

    CLI::App* energy_cmd = app.add_subcommand("energy", "energies and ratios of the solved profiles");
    energy_opts.attach(energy_cmd);

    CLI::App* export_cmd = app.add_subcommand("export", "re-run a manifest and emit plot-ready data");
    export_cmd->add_option("--manifest", export_manifest, "manifest to re-run");
    export_cmd->add_option("--out-dir", export_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    auto resolve_or_io_fail = [](CommonOpts& opts, CLI::App* sub) {
        try {
            opts.resolve(sub);
            return 0;
        } catch (const std::exception& e) {
            std::cerr << "i/o failure: " << e.what() << "\n";
            return kExitIo;
        }
    };

    try {
        if (solve->parsed()) {
            if (const int rc = resolve_or_io_fail(solve_opts, solve))
                return rc;
            if (solve_opts.handle_show_config())
                return 0;
            return cmd_solve(solve_opts);
        }
        if (spectrum->parsed()) {
            if (const int rc = resolve_or_io_fail(spectrum_opts, spectrum))
                return rc;
            if (spectrum_opts.handle_show_config())
                return 0;
            return cmd_spectrum(spectrum_opts, spectrum_n);
        }
        if (check->parsed())
            return cmd_check(check_m, check_l);
        if (energy_cmd->parsed()) {
            if (const int rc = resolve_or_io_fail(energy_opts, energy_cmd))
                return rc;
            if (energy_opts.handle_show_config())
                return 0;
            return cmd_energy(energy_opts);
        }
        if (export_cmd->parsed())
            return cmd_export(export_manifest, export_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cout << app.help();
    return 0;
}
