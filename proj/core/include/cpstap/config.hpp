#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cpstap/dictionary.hpp"
#include "cpstap/signal_model.hpp"

namespace cpstap {

enum class ExperimentKind {
    RankValidation,
    VarianceCurve,
    SinrVsDoppler,
    SinrVsSamples,
    RobustnessSweep,
    DictionarySizeSweep,
    ChannelsSweep,
};

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

// How the measured platform velocity and crab angle are produced per trial:
// equal to the truth, uniform within the error bounds around the truth, or
// the values written in the prior section.
enum class Measurement { Exact, Uniform, Fixed };

enum class RobustParameter { Velocity, Crab, Both };

struct ArraySpec {
    bool coprime = true;
    int n1 = 2;
    int n2 = 3;
    int n = 10;  // uniform arrays only
    double d0 = 0.0625;

    ArrayGeometry build() const;
};

struct ExperimentConfig {
    std::string name = "custom";
    ExperimentKind kind = ExperimentKind::SinrVsDoppler;

    ArraySpec array;
    RadarScenario scenario;
    std::optional<double> beta;  // overrides velocity when set

    PriorKnowledge prior;
    double angle_factor = 5.0;  // n_angles = angle_factor * N_v when > 0
    Measurement measurement = Measurement::Uniform;

    int m_bins = 3;
    bool subtract_noise = false;
    bool known_covariance = false;
    int n_samples = 5;
    int trials = 500;
    std::optional<std::uint64_t> seed;

    // Sweep axes. Only the ones used by `kind` are read.
    std::vector<double> doppler_grid;
    std::vector<int> sample_grid;
    std::vector<double> cnr_grid;
    std::vector<int> channel_grid;
    std::vector<double> dictionary_factors;
    std::vector<double> ratio_grid;
    RobustParameter robust_parameter = RobustParameter::Velocity;
    std::vector<double> beta_grid;
    std::vector<double> crab_grid;  // rad, rank validation
    // Rank validation error cases: (velocity bound m/s, crab bound rad).
    std::vector<std::pair<double, double>> error_cases;
    // Measured values sit this fraction of the bound away from the truth.
    double rank_offset_fraction = 0.5;
    std::vector<ArraySpec> rank_arrays;  // empty = `array`

    bool per_angle = false;  // rank breakdown rows
    int threads = 0;         // 0 = hardware concurrency
    std::string output;

    // Scenario with the array and beta applied.
    RadarScenario resolved_scenario() const;
    // Prior with n_angles from angle_factor when set.
    PriorKnowledge resolved_prior(const RadarScenario& s) const;
    void validate() const;
};

// Canonical text of every field that affects results. Output path and
// thread count are excluded.
std::string canonical_config(const ExperimentConfig& c);
std::string config_hash(const ExperimentConfig& c);  // FNV-1a 64, hex

ExperimentConfig parse_config(const std::string& yaml_text);
ExperimentConfig load_config(const std::string& path);

struct PresetInfo {
    std::string name;
    std::string description;
    std::function<ExperimentConfig()> make;
};

const std::vector<PresetInfo>& presets();
ExperimentConfig preset_config(const std::string& name);

// Overlay the keys present in yaml_text onto base.
void apply_yaml(ExperimentConfig& base, const std::string& yaml_text);

}  // namespace cpstap
