#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hkctrl/analysis.hpp"
#include "hkctrl/dde_engine.hpp"

namespace hkctrl {

struct DelayConfig {
    std::string kind = "constant";  // constant | sinusoidal | table
    double tau = 1.0;
    double base = 0.0, amplitude = 0.0, omega = 1.0;
    std::vector<double> times, values;
};

struct KernelConfig {
    std::string kind = "uniform";  // uniform | hat | table
    double height = 1.0;
    double center = 0.0, width = 0.0;
    std::vector<double> s, beta;
    std::optional<double> total_mass;  // rescales b_total when present
};

struct PolicyConfig {
    std::string kind = "zero";  // zero | consensus | steer | waypoint
    Vec target;
    std::optional<double> spacing, settle_radius, pass_radius, dwell, max_phase_duration;
};

struct InitialConfig {
    std::string kind = "section6";  // section6 | constant | sampled | random_constant
    Vec leader;                     // constant / random_constant
    std::vector<Vec> agents;        // constant
    std::vector<double> times;      // sampled
    std::vector<std::vector<double>> rows;
    int count = 0;  // random_constant
    Vec box_low, box_high;
};

struct ScenarioConfig {
    std::string name = "run";
    ModelKind model = ModelKind::pointwise;
    ModelParams params;
    DelayConfig delay;
    std::optional<KernelConfig> kernel;
    PolicyConfig policy;
    InitialConfig initial;
    double t_end = 10.0;
    IntegratorConfig integrator;
    std::uint64_t seed = 0;
};

/// Fully assembled scenario objects, ready to integrate.
struct Scenario {
    ModelParams params;
    InfluenceA influence;
    LeaderInfluencePhi phi;
    DelayLaw delay;
    std::optional<Kernel> kernel;
    History history;
    ControlPolicy policy;
};

Scenario build_scenario(const ScenarioConfig& cfg);

// ---- config file I/O (JSON; unknown keys are errors) ----

ScenarioConfig parse_config_text(const std::string& text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_text(const ScenarioConfig& cfg);

// ---- presets reproducing the published simulation set-up ----

/// 50 agents at (-1)^i i/50, leader at 0, delta=1, r=2, gamma=1, M=1,
/// Cucker-Smale phi, constant delay tau, consensus control.
ScenarioConfig fig1_config(double tau);
/// Same population driven by the waypoint controller toward x_bar = 4.
ScenarioConfig fig2_config(double tau = 1.0);

struct RunResult {
    ScenarioConfig config;
    Trajectory trajectory;
    RunReport report;
    std::vector<WaypointEvent> waypoint_events;
};

RunResult run_scenario(const ScenarioConfig& cfg);

/// Builds the report for an already-computed integration.
RunReport make_run_report(const ScenarioConfig& cfg, const Scenario& sc,
                          const IntegrationOutput& out);

/// One run per value of the swept parameter (tau | gamma | M | step | B),
/// fanned out across worker threads; results ordered like `values`.
std::vector<RunResult> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                 const std::vector<double>& values);

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, double value);

/// Certificates for a config without simulating.
Certificates emit_certificates(const ScenarioConfig& cfg);

// ---- file emission ----

/// CSV columns: t, the control (dim columns), then every agent (dim columns
/// each, leader first); 15 significant digits, LF line endings.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
void write_report_text(const RunResult& result, std::ostream& os);
/// Writes <name>_trajectory.csv and <name>_report.txt under out_dir.
void write_outputs(const RunResult& result, const std::string& out_dir);

void print_certificates(const Certificates& c, double tau_max, std::ostream& os);

}  // namespace hkctrl
