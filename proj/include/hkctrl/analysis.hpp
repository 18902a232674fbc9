#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "hkctrl/domain.hpp"
#include "hkctrl/trajectory.hpp"

namespace hkctrl {

/// Closed-form admissibility certificates for a scenario.
struct Certificates {
    double radius_R = 0.0;       // sup norm of the initial history
    double radius_R_star = 0.0;  // enclosing-ball radius of the follower history
    double r_gamma = 0.0;        // gamma*L*R + gamma + 1
    double tau_bound_pointwise = 0.0;
    std::optional<double> tau_bound_distributed;  // needs a kernel mass B
    bool halanay_ok = false;
    double halanay_margin = 0.0;          // phi(delta/2) - 1/(2 gamma)
    double margin_tau_pointwise = 0.0;    // bound - tau_max
    std::optional<double> margin_tau_distributed;
    std::optional<std::pair<double, double>> lyap_weight_interval;  // feasible [lo, hi)
};

/// Diagnostics of one run, sampled on the trajectory grid from t = 0 on.
struct RunReport {
    std::vector<double> times;
    std::vector<double> d0_series;
    std::vector<double> control_norm_series;
    std::vector<double> lyapunov_series;  // empty when no feasible weight exists
    double lyapunov_weight = 0.0;
    double fitted_rate = 0.0;             // of d0 over the second half; 0 if not fittable
    bool rate_available = false;
    std::optional<double> consensus_time;  // first t with d0 < 1e-3 * max(1, R)
    bool oscillatory = false;              // d0 increases somewhere above noise
    Certificates certificates;
    bool waypoint_timed_out = false;
    std::vector<std::string> notes;
};

// ---- pointwise diagnostics ----

/// Largest follower distance to the leader at time t, with the argmax index
/// (1-based, lowest index on ties).
std::pair<double, int> d0_with_argmax(const Trajectory& traj, double t);
double d0(const Trajectory& traj, double t);

/// Sup over the history samples of the norm over all agents, leader included.
double radius_R(const History& history);

/// Smallest enclosing ball radius of all follower samples on [-tau0, 0].
double radius_R_star(const History& history, double tau0);

// ---- certificates ----

double tau_bound_pointwise(const ModelParams& params, const LeaderInfluencePhi& phi, double R);
double tau_bound_distributed(const ModelParams& params, const LeaderInfluencePhi& phi, double R,
                             const Kernel& k);
/// phi(delta/2) > 1/(2 gamma), with the margin phi(delta/2) - 1/(2 gamma).
std::pair<bool, double> check_halanay(const ModelParams& params, const LeaderInfluencePhi& phi);

/// Feasible interval for the pointwise Lyapunov weight; nullopt when empty.
std::optional<std::pair<double, double>> lyapunov_weight_interval_pointwise(
    const ModelParams& params, const LeaderInfluencePhi& phi, double R, double tau_max);
/// Distributed analog; the kernel mass B rescales the interval endpoints.
std::optional<std::pair<double, double>> lyapunov_weight_interval_distributed(
    const ModelParams& params, const LeaderInfluencePhi& phi, double R, double tau_max,
    double b_total);

// ---- integral diagnostics (trapezoid on the trajectory grid) ----

/// Per-grid-point integrand max_j |dx_j/ds| + |u| shared by the integral
/// diagnostics; compute once when evaluating many time points.
std::vector<double> velocity_budget_series(const Trajectory& traj);

/// Integral over [t - tau_max, t] of max_j |dx_j/ds| + |u|, follower max.
double sigma_tau(const Trajectory& traj, double t, double tau_max);

/// Kernel-weighted double integral of the same integrand, normalized by h(t).
double lambda_tau(const Trajectory& traj, double t, const Kernel& k, const DelayLaw& dl);

/// d0(t) plus the exponentially weighted double integral of the velocity
/// budget, with caller-supplied weight.
double lyapunov_pointwise(const Trajectory& traj, double t, double beta_param, double tau_max);
double lyapunov_pointwise(const Trajectory& traj, const std::vector<double>& budget, double t,
                          double beta_param, double tau_max);

/// Triple-integral distributed functional with kernel weight.
double lyapunov_distributed(const Trajectory& traj, double t, double mu_param, const Kernel& k);
double lyapunov_distributed(const Trajectory& traj, const std::vector<double>& budget, double t,
                            double mu_param, const Kernel& k);

/// Least-squares decay rate of log(series) over [window_lo, window_hi]
/// (returned positive for decaying series). Rejects non-positive samples.
double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& series,
                      double window_lo, double window_hi);

/// All closed-form certificates for a scenario (no simulation).
Certificates make_certificates(const ModelParams& params, const LeaderInfluencePhi& phi,
                               const History& history, const DelayLaw& dl,
                               const Kernel* kernel = nullptr);

// ---- smallest enclosing ball ----

/// Exact miniball of a point set in R^dim (Welzl with move-to-front); returns
/// {center, radius}.
std::pair<Vec, double> smallest_enclosing_ball(const std::vector<Vec>& points, int dim);

}  // namespace hkctrl
