#pragma once

// Sweep descriptions and their flat key = value config format:
//
//   # global keys apply to every scenario
//   temp_k = 300
//   [fig2]
//   freq_ghz = 15, 30, 100, 300
//   points = 201
//
// A section only applies when running the scenario it names.

#include "mmwent/fock.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mmwent {

enum class Scenario { fig1, fig2, fig3, fig4, link_budget, eb_thresholds };

std::string_view to_string(Scenario s);
/// Accepts the CLI spelling ("fig1", "link-budget", ...) and the section
/// spelling with underscores. Throws ConfigError.
Scenario scenario_from_string(std::string_view name);

struct Axis {
    double min = 0.0;
    double max = 1.0;
    int steps = 201;

    double at(int i) const;
};

struct SweepSpec {
    Scenario scenario = Scenario::fig2;

    /// fig1: temperature (K); fig2, fig3: tau; fig4: combined tau_a tau_b.
    Axis axis;
    /// fig1 only: squeezing (dB).
    Axis axis2;

    std::vector<double> freq_ghz;
    double temp_k = 300.0;
    /// eb-thresholds iterates over these; empty means {temp_k}.
    std::vector<double> temps_k;
    double squeeze_db = 10.0;
    double kappa = 1.0;
    std::vector<int> noon_n;
    TruncationPolicy policy;

    std::vector<double> distances_m;
    std::vector<double> apertures_m;
    double pt_dbm = 0.0;

    /// fig1 threshold lines.
    double ref_squeeze_db = 10.0;
    double ref_temp_k = 300.0;

    /// Empty selects the built-in absorption model.
    std::string absorption_table;
    std::string out;

    /// Throws ConfigError.
    void validate() const;
};

SweepSpec default_spec(Scenario s);

/// Set one key; throws ConfigError for unknown keys or unparsable values.
void apply_setting(SweepSpec& spec, std::string_view key, std::string_view value);

/// Read a config stream, applying global keys and the section matching spec.scenario.
void apply_config(SweepSpec& spec, std::istream& in);
void apply_config_file(SweepSpec& spec, const std::string& path);

/// Every key of spec in a single section; reloading reproduces spec exactly.
std::string to_config(const SweepSpec& spec);

} // namespace mmwent
