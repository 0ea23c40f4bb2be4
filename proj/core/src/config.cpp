#include "cpstap/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "cpstap/csv.hpp"
#include "cpstap/errors.hpp"

namespace cpstap {

namespace {

constexpr double kDeg = kPi / 180.0;

const std::vector<std::pair<ExperimentKind, std::string>>& kind_names() {
    static const std::vector<std::pair<ExperimentKind, std::string>> names = {
        {ExperimentKind::RankValidation, "rank_validation"},
        {ExperimentKind::VarianceCurve, "variance_curve"},
        {ExperimentKind::SinrVsDoppler, "sinr_vs_doppler"},
        {ExperimentKind::SinrVsSamples, "sinr_vs_samples"},
        {ExperimentKind::RobustnessSweep, "robustness_sweep"},
        {ExperimentKind::DictionarySizeSweep, "dictionary_size_sweep"},
        {ExperimentKind::ChannelsSweep, "channels_sweep"},
    };
    return names;
}

std::vector<double> default_doppler_grid() {
    std::vector<double> g;
    for (int k = 0; k < 40; ++k) g.push_back(-0.5 + k / 40.0);
    return g;
}

template <typename T>
T read(const YAML::Node& n, const std::string& key) {
    try {
        return n.as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

template <typename T>
void set_if(const YAML::Node& parent, const char* key, T& target, const std::string& path) {
    if (const auto n = parent[key]) target = read<T>(n, path + "." + key);
}

void set_deg(const YAML::Node& parent, const char* key, double& target_rad, const std::string& path) {
    if (const auto n = parent[key]) target_rad = read<double>(n, path + "." + key) * kDeg;
}

// A grid is either a list or {start, stop, count} (inclusive endpoints).
std::vector<double> read_grid(const YAML::Node& n, const std::string& key) {
    if (n.IsSequence()) return read<std::vector<double>>(n, key);
    if (n.IsMap()) {
        const double start = read<double>(n["start"], key + ".start");
        const double stop = read<double>(n["stop"], key + ".stop");
        const int count = read<int>(n["count"], key + ".count");
        if (count < 1) throw ConfigError(key + ".count must be >= 1");
        std::vector<double> g;
        for (int i = 0; i < count; ++i)
            g.push_back(count == 1 ? start : start + (stop - start) * i / (count - 1));
        return g;
    }
    throw ConfigError("config key '" + key + "' must be a list or {start, stop, count}");
}

ArraySpec read_array(const YAML::Node& n, ArraySpec a, const std::string& path) {
    if (const auto t = n["type"]) {
        const auto s = read<std::string>(t, path + ".type");
        if (s == "coprime") a.coprime = true;
        else if (s == "uniform") a.coprime = false;
        else throw ConfigError(path + ".type must be 'coprime' or 'uniform'");
    }
    set_if(n, "n1", a.n1, path);
    set_if(n, "n2", a.n2, path);
    set_if(n, "n", a.n, path);
    set_if(n, "d0", a.d0, path);
    return a;
}

void check_known_keys(const YAML::Node& n, const std::set<std::string>& allowed, const std::string& path) {
    if (!n.IsMap()) throw ConfigError("section '" + path + "' must be a mapping");
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) throw ConfigError("unknown config key '" + path + "." + key + "'");
    }
}

void fnv_mix(std::uint64_t& h, const std::string& s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
}

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string to_string(ExperimentKind k) {
    for (const auto& [kind, name] : kind_names())
        if (kind == k) return name;
    return "unknown";
}

ExperimentKind parse_kind(const std::string& s) {
    for (const auto& [kind, name] : kind_names())
        if (name == s) return kind;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

ArrayGeometry ArraySpec::build() const {
    return coprime ? coprime_positions(n1, n2, d0) : uniform_positions(n, d0);
}

RadarScenario ExperimentConfig::resolved_scenario() const {
    RadarScenario s = scenario;
    s.geom = array.build();
    if (beta) s.set_beta(*beta);
    return s;
}

PriorKnowledge ExperimentConfig::resolved_prior(const RadarScenario& s) const {
    PriorKnowledge p = prior;
    if (angle_factor > 0.0) {
        const int nv = difference_coarray(s.geom).n_v();
        p.n_angles = std::max(1, static_cast<int>(std::lround(angle_factor * nv)));
    }
    return p;
}

void ExperimentConfig::validate() const {
    if (!seed) throw ConfigError("experiment.seed is required");
    if (trials < 0) throw ConfigError("trials must be >= 0");
    if (m_bins < 1 || m_bins % 2 == 0) throw ConfigError("processing.channels must be odd and >= 1");
    if (n_samples < 1) throw ConfigError("experiment.samples must be >= 1");
    if (scenario.m_pulses < 1) throw ConfigError("radar.pulses must be >= 1");
    if (scenario.n_clutter < 1) throw ConfigError("radar.clutter_patches must be >= 1");
    if (!(scenario.lambda > 0.0) || !(scenario.t_r > 0.0)) throw ConfigError("wavelength and PRI must be > 0");
    if (!std::isfinite(scenario.cnr_db)) throw ConfigError("radar.cnr_db must be finite");
    array.build();
    prior.validate();
    const auto need = [&](bool ok, const char* what) {
        if (!ok) throw ConfigError(std::string("experiment kind ") + to_string(kind) + " needs sweep." + what);
    };
    switch (kind) {
        case ExperimentKind::RankValidation: need(!beta_grid.empty(), "beta"); break;
        case ExperimentKind::VarianceCurve:
            need(!sample_grid.empty(), "samples");
            need(!cnr_grid.empty(), "cnr_db");
            break;
        case ExperimentKind::SinrVsDoppler: need(!doppler_grid.empty(), "doppler"); break;
        case ExperimentKind::SinrVsSamples: need(!sample_grid.empty(), "samples"); break;
        case ExperimentKind::RobustnessSweep: need(!ratio_grid.empty(), "ratios"); break;
        case ExperimentKind::DictionarySizeSweep:
            need(!dictionary_factors.empty(), "dictionary_factors");
            need(!doppler_grid.empty(), "doppler");
            break;
        case ExperimentKind::ChannelsSweep:
            need(!channel_grid.empty(), "channels");
            need(!doppler_grid.empty(), "doppler");
            for (int m : channel_grid)
                if (m < 1 || m % 2 == 0) throw ConfigError("sweep.channels entries must be odd");
            break;
    }
    for (int l : sample_grid)
        if (l < 1) throw ConfigError("sweep.samples entries must be >= 1");
    for (double f : dictionary_factors)
        if (!(f > 0.0)) throw ConfigError("sweep.dictionary_factors entries must be > 0");
    for (double r : ratio_grid)
        if (!(r >= 0.0)) throw ConfigError("sweep.ratios entries must be >= 0");
}

std::string canonical_config(const ExperimentConfig& c) {
    std::ostringstream o;
    auto arr = [&](const ArraySpec& a) {
        o << (a.coprime ? "coprime" : "uniform") << ',' << a.n1 << ',' << a.n2 << ',' << a.n << ','
          << num(a.d0) << ';';
    };
    auto list = [&](const char* key, const auto& v) {
        o << key << '=';
        for (const auto& x : v) o << num(static_cast<double>(x)) << ',';
        o << '\n';
    };
    o << "name=" << c.name << "\nkind=" << to_string(c.kind) << "\narray=";
    arr(c.array);
    const auto& s = c.scenario;
    o << "\nscenario=" << s.m_pulses << ',' << num(s.lambda) << ',' << num(s.t_r) << ',' << num(s.v_p) << ','
      << num(s.psi) << ',' << num(s.phi) << ',' << s.n_clutter << ',' << num(s.cnr_db) << ','
      << num(s.sigma_n2) << ',' << num(s.target.doppler) << ',' << num(s.target.spatial) << ','
      << num(s.target.alpha.real()) << ',' << num(s.target.alpha.imag());
    o << "\nbeta=" << (c.beta ? num(*c.beta) : std::string("none"));
    const auto& p = c.prior;
    o << "\nprior=" << num(p.v_p_measured) << ',' << num(p.psi_measured) << ',' << num(p.dv_pm) << ','
      << num(p.dpsi_m) << ',' << p.m_e << ',' << p.n_angles << ','
      << (p.bound_mode == BoundMode::Literal ? "literal" : "simplified");
    o << "\nangle_factor=" << num(c.angle_factor)
      << "\nmeasurement=" << static_cast<int>(c.measurement)
      << "\nm_bins=" << c.m_bins << "\nsubtract_noise=" << c.subtract_noise
      << "\nknown_covariance=" << c.known_covariance << "\nsamples=" << c.n_samples
      << "\ntrials=" << c.trials << "\nseed=" << (c.seed ? std::to_string(*c.seed) : "none") << '\n';
    list("doppler", c.doppler_grid);
    list("sample_grid", c.sample_grid);
    list("cnr", c.cnr_grid);
    list("channels", c.channel_grid);
    list("dict_factors", c.dictionary_factors);
    list("ratios", c.ratio_grid);
    o << "robust=" << static_cast<int>(c.robust_parameter) << '\n';
    list("beta_grid", c.beta_grid);
    list("crab_grid", c.crab_grid);
    o << "error_cases=";
    for (const auto& [dv, dp] : c.error_cases) o << num(dv) << ':' << num(dp) << ',';
    o << "\nrank_offset=" << num(c.rank_offset_fraction) << "\nrank_arrays=";
    for (const auto& a : c.rank_arrays) arr(a);
    o << "\nper_angle=" << c.per_angle << '\n';
    return o.str();
}

std::string config_hash(const ExperimentConfig& c) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    fnv_mix(h, canonical_config(c));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void apply_yaml(ExperimentConfig& c, const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (!root || root.IsNull()) return;
    check_known_keys(root, {"experiment", "array", "radar", "target", "prior", "processing", "sweep"}, "");

    if (const auto e = root["experiment"]) {
        check_known_keys(e, {"preset", "name", "kind", "trials", "seed", "samples", "known_covariance",
                             "threads", "output", "per_angle"},
                         "experiment");
        set_if(e, "name", c.name, "experiment");
        if (const auto k = e["kind"]) c.kind = parse_kind(read<std::string>(k, "experiment.kind"));
        set_if(e, "trials", c.trials, "experiment");
        if (const auto s = e["seed"]) c.seed = read<std::uint64_t>(s, "experiment.seed");
        set_if(e, "samples", c.n_samples, "experiment");
        set_if(e, "known_covariance", c.known_covariance, "experiment");
        set_if(e, "threads", c.threads, "experiment");
        set_if(e, "output", c.output, "experiment");
        set_if(e, "per_angle", c.per_angle, "experiment");
    }
    if (const auto a = root["array"]) {
        check_known_keys(a, {"type", "n1", "n2", "n", "d0"}, "array");
        c.array = read_array(a, c.array, "array");
    }
    if (const auto r = root["radar"]) {
        check_known_keys(r, {"pulses", "wavelength", "pri", "velocity", "beta", "crab_deg", "elevation_deg",
                             "clutter_patches", "cnr_db", "noise_power"},
                         "radar");
        auto& s = c.scenario;
        set_if(r, "pulses", s.m_pulses, "radar");
        set_if(r, "wavelength", s.lambda, "radar");
        set_if(r, "pri", s.t_r, "radar");
        if (const auto v = r["velocity"]) {
            s.v_p = read<double>(v, "radar.velocity");
            c.beta.reset();
        }
        if (const auto b = r["beta"]) c.beta = read<double>(b, "radar.beta");
        set_deg(r, "crab_deg", s.psi, "radar");
        set_deg(r, "elevation_deg", s.phi, "radar");
        set_if(r, "clutter_patches", s.n_clutter, "radar");
        set_if(r, "cnr_db", s.cnr_db, "radar");
        set_if(r, "noise_power", s.sigma_n2, "radar");
    }
    if (const auto t = root["target"]) {
        check_known_keys(t, {"doppler", "spatial", "amplitude"}, "target");
        set_if(t, "doppler", c.scenario.target.doppler, "target");
        set_if(t, "spatial", c.scenario.target.spatial, "target");
        if (const auto a = t["amplitude"]) c.scenario.target.alpha = read<double>(a, "target.amplitude");
    }
    if (const auto p = root["prior"]) {
        check_known_keys(p, {"velocity", "crab_deg", "velocity_error", "crab_error_deg", "doppler_points",
                             "angles", "angle_factor", "bound", "measurement"},
                         "prior");
        set_if(p, "velocity", c.prior.v_p_measured, "prior");
        set_deg(p, "crab_deg", c.prior.psi_measured, "prior");
        set_if(p, "velocity_error", c.prior.dv_pm, "prior");
        set_deg(p, "crab_error_deg", c.prior.dpsi_m, "prior");
        set_if(p, "doppler_points", c.prior.m_e, "prior");
        if (const auto n = p["angles"]) {
            c.prior.n_angles = read<int>(n, "prior.angles");
            c.angle_factor = 0.0;
        }
        set_if(p, "angle_factor", c.angle_factor, "prior");
        if (const auto b = p["bound"]) {
            const auto s = read<std::string>(b, "prior.bound");
            if (s == "literal") c.prior.bound_mode = BoundMode::Literal;
            else if (s == "simplified") c.prior.bound_mode = BoundMode::Simplified;
            else throw ConfigError("prior.bound must be 'literal' or 'simplified'");
        }
        if (const auto m = p["measurement"]) {
            const auto s = read<std::string>(m, "prior.measurement");
            if (s == "exact") c.measurement = Measurement::Exact;
            else if (s == "uniform") c.measurement = Measurement::Uniform;
            else if (s == "fixed") c.measurement = Measurement::Fixed;
            else throw ConfigError("prior.measurement must be 'exact', 'uniform' or 'fixed'");
        }
    }
    if (const auto p = root["processing"]) {
        check_known_keys(p, {"channels", "subtract_noise"}, "processing");
        set_if(p, "channels", c.m_bins, "processing");
        set_if(p, "subtract_noise", c.subtract_noise, "processing");
    }
    if (const auto s = root["sweep"]) {
        check_known_keys(s, {"doppler", "samples", "cnr_db", "channels", "dictionary_factors", "ratios",
                             "parameter", "beta", "crab_deg", "error_cases", "offset_fraction", "arrays"},
                         "sweep");
        if (const auto n = s["doppler"]) c.doppler_grid = read_grid(n, "sweep.doppler");
        if (const auto n = s["samples"]) c.sample_grid = read<std::vector<int>>(n, "sweep.samples");
        if (const auto n = s["cnr_db"]) c.cnr_grid = read_grid(n, "sweep.cnr_db");
        if (const auto n = s["channels"]) c.channel_grid = read<std::vector<int>>(n, "sweep.channels");
        if (const auto n = s["dictionary_factors"]) c.dictionary_factors = read_grid(n, "sweep.dictionary_factors");
        if (const auto n = s["ratios"]) c.ratio_grid = read_grid(n, "sweep.ratios");
        if (const auto n = s["parameter"]) {
            const auto v = read<std::string>(n, "sweep.parameter");
            if (v == "velocity") c.robust_parameter = RobustParameter::Velocity;
            else if (v == "crab") c.robust_parameter = RobustParameter::Crab;
            else if (v == "both") c.robust_parameter = RobustParameter::Both;
            else throw ConfigError("sweep.parameter must be velocity, crab or both");
        }
        if (const auto n = s["beta"]) c.beta_grid = read_grid(n, "sweep.beta");
        if (const auto n = s["crab_deg"]) {
            c.crab_grid = read_grid(n, "sweep.crab_deg");
            for (auto& v : c.crab_grid) v *= kDeg;
        }
        if (const auto n = s["error_cases"]) {
            c.error_cases.clear();
            for (const auto& e : n) {
                const auto pair = read<std::vector<double>>(e, "sweep.error_cases");
                if (pair.size() != 2) throw ConfigError("sweep.error_cases entries are [velocity, crab_deg]");
                c.error_cases.emplace_back(pair[0], pair[1] * kDeg);
            }
        }
        set_if(s, "offset_fraction", c.rank_offset_fraction, "sweep");
        if (const auto n = s["arrays"]) {
            c.rank_arrays.clear();
            for (const auto& e : n) {
                check_known_keys(e, {"type", "n1", "n2", "n", "d0"}, "sweep.arrays[]");
                c.rank_arrays.push_back(read_array(e, ArraySpec{}, "sweep.arrays[]"));
            }
        }
    }
}

ExperimentConfig parse_config(const std::string& yaml_text) {
    ExperimentConfig c;
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    if (root && root.IsMap())
        if (const auto e = root["experiment"])
            if (e.IsMap())
                if (const auto p = e["preset"]) c = preset_config(read<std::string>(p, "experiment.preset"));
    apply_yaml(c, yaml_text);
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

ExperimentConfig base_preset(const std::string& name, ExperimentKind kind) {
    ExperimentConfig c;
    c.name = name;
    c.kind = kind;
    c.scenario.target.doppler = 0.1667;
    return c;
}

}  // namespace

const std::vector<PresetInfo>& presets() {
    static const std::vector<PresetInfo> list = {
        {"fig4_rank", "clutter rank estimates for ULA and coprime arrays, beta 0.6/1, crab 0/90 deg, with and without prior errors",
         [] {
             auto c = base_preset("fig4_rank", ExperimentKind::RankValidation);
             c.scenario.m_pulses = 10;
             c.array = {true, 3, 5, 10, 0.0625};
             c.rank_arrays = {{false, 0, 0, 10, 0.0625}, {true, 3, 5, 10, 0.0625}};
             c.beta_grid = {0.6, 1.0};
             c.crab_grid = {0.0, 90.0 * kDeg};
             c.error_cases = {{0.0, 0.0}, {5.0, 4.0 * kDeg}};
             c.measurement = Measurement::Exact;
             c.trials = 1;
             return c;
         }},
        {"fig6_variance", "virtual snapshot error: Monte Carlo against the trace formula, N1=2 N2=3 M=8",
         [] {
             auto c = base_preset("fig6_variance", ExperimentKind::VarianceCurve);
             c.scenario.m_pulses = 8;
             c.cnr_grid = {10, 20, 30, 40, 50};
             c.sample_grid = {10, 20, 50, 100, 200};
             return c;
         }},
        {"fig7_robustness", "SINR at Doppler 0.1667 versus spread of the velocity and crab error bounds, L=5",
         [] {
             auto c = base_preset("fig7_robustness", ExperimentKind::RobustnessSweep);
             c.ratio_grid = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
             c.robust_parameter = RobustParameter::Both;
             return c;
         }},
        {"fig8_dictsize", "known-covariance SINR versus Doppler for M_d = 2..5 N_v M_e",
         [] {
             auto c = base_preset("fig8_dictsize", ExperimentKind::DictionarySizeSweep);
             c.known_covariance = true;
             c.dictionary_factors = {2, 3, 4, 5};
             c.doppler_grid = default_doppler_grid();
             return c;
         }},
        {"fig9_channels", "known-covariance SINR versus Doppler for m = 1, 3, 5, 7 and the virtual optimum",
         [] {
             auto c = base_preset("fig9_channels", ExperimentKind::ChannelsSweep);
             c.known_covariance = true;
             c.channel_grid = {1, 3, 5, 7};
             c.doppler_grid = default_doppler_grid();
             return c;
         }},
        {"fig10_theory", "known-covariance SINR versus Doppler: proposed, virtual optimum, element-space optimum",
         [] {
             auto c = base_preset("fig10_theory", ExperimentKind::SinrVsDoppler);
             c.known_covariance = true;
             c.doppler_grid = default_doppler_grid();
             return c;
         }},
        {"fig11_convergence", "SINR at Doppler 0.1667 versus training samples, proposed and PC",
         [] {
             auto c = base_preset("fig11_convergence", ExperimentKind::SinrVsSamples);
             c.sample_grid = {2, 5, 10, 20, 50, 100, 200};
             return c;
         }},
        {"fig12_doppler", "SINR versus Doppler with L=100 training samples, proposed and PC",
         [] {
             auto c = base_preset("fig12_doppler", ExperimentKind::SinrVsDoppler);
             c.n_samples = 100;
             c.doppler_grid = default_doppler_grid();
             return c;
         }},
    };
    return list;
}

ExperimentConfig preset_config(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p.make();
    throw ConfigError("unknown preset '" + name + "'");
}

}  // namespace cpstap
