#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkctrl/controllers.hpp"
#include "hkctrl/domain.hpp"
#include "hkctrl/integrator_config.hpp"
#include "hkctrl/trajectory.hpp"

namespace hkctrl {

/// Right-hand side of the pointwise-delay model at time t, reading the
/// current state and the single delayed frame from the trajectory.
/// Component 0 is u_value; follower i gets the averaged peer attraction plus
/// the leader term, both evaluated against x(t - tau(t)).
std::vector<double> rhs_pointwise(const Trajectory& traj, double t, const ModelParams& params,
                                  const InfluenceA& a, const LeaderInfluencePhi& phi,
                                  const DelayLaw& dl, std::span<const double> u_value);

/// Right-hand side of the distributed-delay model: both interaction terms are
/// kernel-weighted quadratures over [t - tau(t), t], normalized by the kernel
/// mass over the same window evaluated with the same nodes.
std::vector<double> rhs_distributed(const Trajectory& traj, double t, const ModelParams& params,
                                    const InfluenceA& a, const LeaderInfluencePhi& phi,
                                    const DelayLaw& dl, const Kernel& k,
                                    std::span<const double> u_value, const IntegratorConfig& cfg);

// Stage-level variants taking the current state explicitly (the trajectory
// still serves the delayed lookups).
void rhs_pointwise_core(std::span<const double> current, const Trajectory& traj, double t,
                        const ModelParams& params, const InfluenceA& a,
                        const LeaderInfluencePhi& phi, const DelayLaw& dl,
                        std::span<const double> u_value, std::span<double> deriv);
void rhs_distributed_core(std::span<const double> current, const Trajectory& traj, double t,
                          const ModelParams& params, const InfluenceA& a,
                          const LeaderInfluencePhi& phi, const DelayLaw& dl, const Kernel& k,
                          std::span<const double> u_value, const IntegratorConfig& cfg,
                          std::span<double> deriv);

struct WaypointEvent {
    double t;
    WaypointPhase phase;
    int waypoint_index;
};

struct IntegrationOutput {
    Trajectory trajectory;
    std::vector<WaypointEvent> waypoint_events;
    std::vector<std::string> diagnostics;
    std::optional<ControllerState> final_controller_state;
};

/// Fixed-step RK4 method of steps on [0, t_end]. The control is evaluated
/// once per accepted step at the left endpoint and held across the stages;
/// delayed stage lookups use dense interpolation of the stored trajectory,
/// extrapolating the latest segment when the lookup time passes the last
/// completed grid point (delays smaller than the step).
IntegrationOutput integrate_with_log(ModelKind model, const ControlPolicy& policy,
                                     const History& initial, double t_end,
                                     const IntegratorConfig& cfg, const ModelParams& params,
                                     const InfluenceA& a, const LeaderInfluencePhi& phi,
                                     const DelayLaw& dl, const Kernel* kernel = nullptr);

Trajectory integrate(ModelKind model, const ControlPolicy& policy, const History& initial,
                     double t_end, const IntegratorConfig& cfg, const ModelParams& params,
                     const InfluenceA& a, const LeaderInfluencePhi& phi, const DelayLaw& dl,
                     const Kernel* kernel = nullptr);

}  // namespace hkctrl
