#include "selfsim/manifest.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace selfsim {

using nlohmann::json;

ShooterConfig RunConfig::shooter() const {
    ShooterConfig s;
    s.n_max = n_max;
    s.bisect_tol = bisect_tol;
    s.newton_tol = newton_tol;
    s.fit_point = fit_point;
    s.integ.rel_tol = rel_tol;
    s.integ.abs_tol = abs_tol;
    s.integ.x_max = x_max;
    s.integ.launch_eps_x = launch_eps_x;
    s.integ.launch_eps_rho = launch_eps_rho;
    s.integ.w_escape_factor = w_escape_factor;
    return s;
}

EigenShotConfig RunConfig::eigen() const {
    EigenShotConfig e;
    e.lambda2_max = lambda2_max;
    e.secant_tol = secant_tol;
    e.match_point = match_point;
    e.threads = threads;
    return e;
}

namespace {

json config_to_json(const RunConfig& c) {
    return json{{"m", c.m},
                {"l", c.l},
                {"n_max", c.n_max},
                {"rel_tol", c.rel_tol},
                {"abs_tol", c.abs_tol},
                {"x_max", c.x_max},
                {"fit_point", c.fit_point},
                {"bisect_tol", c.bisect_tol},
                {"newton_tol", c.newton_tol},
                {"launch_eps_x", c.launch_eps_x},
                {"launch_eps_rho", c.launch_eps_rho},
                {"w_escape_factor", c.w_escape_factor},
                {"lambda2_max", c.lambda2_max},
                {"secant_tol", c.secant_tol},
                {"match_point", c.match_point},
                {"threads", c.threads}};
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    auto get = [&j](const char* key, auto& field) {
        if (j.contains(key))
            field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("m", c.m);
    get("l", c.l);
    get("n_max", c.n_max);
    get("rel_tol", c.rel_tol);
    get("abs_tol", c.abs_tol);
    get("x_max", c.x_max);
    get("fit_point", c.fit_point);
    get("bisect_tol", c.bisect_tol);
    get("newton_tol", c.newton_tol);
    get("launch_eps_x", c.launch_eps_x);
    get("launch_eps_rho", c.launch_eps_rho);
    get("w_escape_factor", c.w_escape_factor);
    get("lambda2_max", c.lambda2_max);
    get("secant_tol", c.secant_tol);
    get("match_point", c.match_point);
    get("threads", c.threads);
    return c;
}

} // namespace

std::string to_json_string(const RunManifest& m) {
    json j;
    j["version"] = m.version;
    j["timestamp"] = m.timestamp;
    j["config"] = config_to_json(m.config);
    j["orbits"] = json::array();
    for (const auto& o : m.orbits) {
        json jo{{"n", o.n},
                {"a", o.a},
                {"b_rho", o.b_rho},
                {"beta_x", o.beta_x},
                {"newton_residual", o.newton_residual}};
        if (o.energy)
            jo["energy"] = *o.energy;
        else
            jo["energy"] = nullptr;
        if (!o.eigenvalues.empty())
            jo["eigenvalues"] = o.eigenvalues;
        j["orbits"].push_back(jo);
    }
    if (!m.energy_ratios.empty())
        j["energy_ratios"] = m.energy_ratios;
    if (m.condition) {
        j["condition"] = json{{"m", m.condition->m},
                              {"l", m.condition->l},
                              {"threshold", m.condition->threshold},
                              {"admissible", m.condition->admissible},
                              {"oscillation_check", m.condition->oscillation_check}};
    }
    return j.dump(2);
}

RunManifest manifest_from_json_string(const std::string& text) {
    const json j = json::parse(text);
    RunManifest m;
    m.version = j.value("version", std::string{});
    m.timestamp = j.value("timestamp", std::string{});
    m.config = config_from_json(j.at("config"));
    if (j.contains("orbits"))
        for (const auto& jo : j.at("orbits")) {
            OrbitRecord o;
            o.n = jo.at("n").get<int>();
            o.a = jo.at("a").get<double>();
            o.b_rho = jo.at("b_rho").get<double>();
            o.beta_x = jo.at("beta_x").get<double>();
            o.newton_residual = jo.value("newton_residual", 0.0);
            if (jo.contains("energy") && !jo.at("energy").is_null())
                o.energy = jo.at("energy").get<double>();
            if (jo.contains("eigenvalues"))
                o.eigenvalues = jo.at("eigenvalues").get<std::vector<double>>();
            m.orbits.push_back(o);
        }
    if (j.contains("energy_ratios"))
        m.energy_ratios = j.at("energy_ratios").get<std::vector<double>>();
    if (j.contains("condition")) {
        ConditionReport c;
        const json& jc = j.at("condition");
        c.m = jc.at("m").get<int>();
        c.l = jc.at("l").get<int>();
        c.threshold = jc.at("threshold").get<double>();
        c.admissible = jc.at("admissible").get<bool>();
        c.oscillation_check = jc.at("oscillation_check").get<bool>();
        m.condition = c;
    }
    return m;
}

RunConfig config_from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const json j = json::parse(ss.str());
    return config_from_json(j.contains("config") ? j.at("config") : j);
}

void save_manifest(const RunManifest& m, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write manifest: " + path);
    out << to_json_string(m) << "\n";
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open manifest: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return manifest_from_json_string(ss.str());
}

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

void write_table_csv(const std::string& path, const std::vector<OrbitRecord>& orbits,
                     const std::vector<double>& ratios) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "n,a,b,E,ratio\n";
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        const OrbitRecord& o = orbits[i];
        out << o.n << "," << format_sci(o.a) << "," << format_sci(o.b_rho) << ",";
        if (o.energy)
            out << format_sci(*o.energy);
        out << ",";
        if (i < ratios.size())
            out << format_sci(ratios[i]);
        out << "\n";
    }
}

void write_profile_dat(const std::string& path, const Trajectory& profile) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "# rho f fprime\n";
    for (const auto& node : profile.nodes)
        out << format_sci(node.t) << " " << format_sci(node.s.u) << " " << format_sci(node.s.du)
            << "\n";
}

void write_spectrum_csv(const std::string& path, const std::vector<SpectrumResult>& spectra) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "n,k,lambda2\n";
    for (const auto& s : spectra)
        for (std::size_t k = 0; k < s.eigenvalues.size(); ++k)
            out << s.n << "," << (k + 1) << "," << format_sci(s.eigenvalues[k]) << "\n";
}

void write_gauge_csv(const std::string& path, const std::vector<SpectrumResult>& spectra) {
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << "n,gauge_zero_count,gauge_max_rel_residual\n";
    for (const auto& s : spectra)
        out << s.n << "," << s.gauge_zero_count << "," << format_sci(s.gauge_residual) << "\n";
}

} // namespace selfsim
