#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srde/stats.hpp"

namespace srde {

struct EnsembleSettings {
    int size = 100;
    double burn_in = 0.5;
    std::uint64_t base_seed = 12345;
    Monitor monitor = Monitor::Amplitude;
    int threads = 0;
};

struct SweepSettings {
    SweepAxis axis = SweepAxis::Gamma;
    std::vector<double> grid = {0.2, 0.4, 0.6, 0.8, 1.0};
};

struct CompareSettings {
    std::vector<double> epsilons = {0.1, 0.05};
};

/// Fully resolved run description: model parameters, simulation settings,
/// ensemble controls and output paths. Presets pin the figure-reproduction
/// parameter sets; explicit fields in a scenario file override preset values.
struct Scenario {
    std::string name = "default";
    ModelKind model = ModelKind::Full;
    ModelParams params;
    SimConfig sim;
    EnsembleSettings ensemble;
    SweepSettings sweep;
    CompareSettings compare;
    std::string out_dir = "out";
};

bool is_preset(const std::string& name);
Scenario preset_scenario(const std::string& name);

/// Parse a preset name or a JSON scenario file. A file may name a "preset" to
/// start from; unknown keys and out-of-range values are rejected with a
/// field-path message. An empty file yields the all-defaults scenario.
Scenario parse_scenario(const std::string& path_or_preset);

Scenario parse_scenario_text(const std::string& text);

nlohmann::json scenario_to_json(const Scenario& s);
std::string scenario_to_text(const Scenario& s);

/// Echo the resolved scenario next to its outputs.
void write_resolved_scenario(const Scenario& s, const std::string& path);

}  // namespace srde
