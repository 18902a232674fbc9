#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hkctrl/domain.hpp"
#include "hkctrl/integrator_config.hpp"
#include "hkctrl/trajectory.hpp"

namespace hkctrl {

// Distance at which the steering control switches off instead of chattering
// across the discontinuity at the target. Absolute, so that shifted scenarios
// make identical switching decisions.
inline constexpr double kSteerDeadband = 1e-6;

struct ZeroPolicy {};
struct ConsensusPointwisePolicy {};
struct ConsensusDistributedPolicy {};
struct SteerPolicy {
    Vec target;
};

/// Chain of intermediate targets z_0..z_L ending at the user target, with
/// consecutive spacing at most delta/4.
struct WaypointPlan {
    std::vector<Vec> points;
    double spacing = 0.0;  // realized consecutive spacing
};

WaypointPlan build_waypoint_plan(const Vec& x_star, const Vec& x_bar, double delta);

/// Hybrid controller reaching `target`: run consensus control until the group
/// is tight, then alternate finite-time leader steps along a waypoint chain
/// with zero-control settling phases.
struct WaypointPolicy {
    Vec target;                         // x_bar
    double spacing = 0.25;              // consensus-exit spread threshold (delta/4)
    double settle_radius = 0.25;        // settling spread threshold (delta/4)
    double pass_radius = 0.5;           // expected containment while steering (delta/2)
    double dwell = 1.0;                 // trailing-window length (tau_max)
    double max_phase_duration = 500.0;  // timeout diagnostic threshold
};

/// Builds a waypoint policy with the standard thresholds derived from the
/// model parameters. Throws CertificateViolation unless phi(delta/2) > 1/(2 gamma).
WaypointPolicy make_waypoint_policy(const ModelParams& params, const LeaderInfluencePhi& phi,
                                    const DelayLaw& dl, Vec target);

using ControlPolicy = std::variant<ZeroPolicy, ConsensusPointwisePolicy,
                                   ConsensusDistributedPolicy, SteerPolicy, WaypointPolicy>;

enum class WaypointPhase { consensus, steering, settling, done };

const char* to_string(WaypointPhase p);

struct ControllerState {
    WaypointPhase phase = WaypointPhase::consensus;
    double phase_entry_time = 0.0;
    int waypoint_index = 0;
    std::optional<WaypointPlan> plan;  // fixed when the consensus phase exits
    bool timed_out = false;
    std::vector<std::string> notes;
};

// ---- saturation coefficients and control laws ----

/// Saturation coefficient of the pointwise consensus control. The reference
/// agent p maximizes the current-time distance to the leader (lowest index on
/// ties); distances inside the formula use the delayed positions. An empty
/// delayed-distance sum sends the second branch to +infinity.
double alpha_pointwise(const Trajectory& traj, double t, const ModelParams& params,
                       const LeaderInfluencePhi& phi, const DelayLaw& dl);

/// Leader feedback steering toward the delayed follower barycenter, saturated
/// so that the norm never exceeds control_bound.
Vec u_consensus_pointwise(const Trajectory& traj, double t, const ModelParams& params,
                          const LeaderInfluencePhi& phi, const DelayLaw& dl);

/// Bang-bang control toward xi with norm control_bound; zero inside the
/// dead-band around the target.
Vec u_steer(std::span<const double> x0_now, std::span<const double> xi, double control_bound);

/// Discrete-time refinement of u_steer: when the target is reachable within
/// one step of length dt, the control is scaled so that the leader lands on
/// the target exactly (norm still <= control_bound).
Vec u_steer_discrete(std::span<const double> x0_now, std::span<const double> xi,
                     double control_bound, double dt);

/// Per-sample saturation coefficient of the distributed consensus control;
/// s ranges over [t - tau(t), t].
double alpha_distributed(const Trajectory& traj, double t, double s, const ModelParams& params,
                         const LeaderInfluencePhi& phi);

/// Kernel-averaged consensus feedback for the distributed model.
Vec u_consensus_distributed(const Trajectory& traj, double t, const ModelParams& params,
                            const LeaderInfluencePhi& phi, const DelayLaw& dl, const Kernel& k,
                            const IntegratorConfig& cfg);

/// One evaluation of the waypoint automaton at grid time t: returns the
/// control for [t, t+dt) and the advanced state. Phase transitions may
/// cascade within a single call; a phase exceeding max_phase_duration raises
/// a timeout note instead of blocking.
std::pair<Vec, ControllerState> waypoint_controller_step(
    const ControllerState& state, const Trajectory& traj, double t, const ModelParams& params,
    const LeaderInfluencePhi& phi, const DelayLaw& dl, const WaypointPolicy& policy,
    ModelKind model, const Kernel* kernel, const IntegratorConfig& cfg, double dt);

}  // namespace hkctrl
