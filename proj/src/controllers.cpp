#include "hkctrl/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hkctrl/analysis.hpp"

namespace hkctrl {

namespace {

// Floating point can land a few ulp above the bound at exact saturation;
// shrink until the computed norm is within it.
void cap_norm(Vec& u, double bound) {
    for (int it = 0; it < 16; ++it) {
        const double n = norm(u);
        if (n <= bound) return;
        scale(u, bound / n);
        if (norm(u) > bound) scale(u, 1.0 - 4.0 * std::numeric_limits<double>::epsilon());
    }
}

// Index (1-based) of the follower farthest from the leader at time t,
// lowest index on ties.
int argmax_distance(const Trajectory& traj, std::span<const double> now) {
    int p = 1;
    double best = -1.0;
    for (int i = 1; i <= traj.n_followers(); ++i) {
        const double di = dist(traj.agent(now, i), traj.agent(now, 0));
        if (di > best) {
            best = di;
            p = i;
        }
    }
    return p;
}

// alpha given the reference index p, the leader's current position and the
// frame supplying the (delayed or windowed) follower positions.
double alpha_from_frames(const Trajectory& traj, std::span<const double> leader_now,
                         std::span<const double> positions, int p, const ModelParams& params,
                         const LeaderInfluencePhi& phi) {
    const int N = params.n_agents;
    double dsum = 0.0;
    for (int j = 1; j <= N; ++j) dsum += dist(traj.agent(positions, j), leader_now);
    const double b1 = phi(dist(traj.agent(positions, p), leader_now)) / N;
    if (dsum > 0.0) {
        const double b2 = 2.0 * params.control_bound / (params.gamma * dsum);
        return 0.5 * std::min(b1, b2);
    }
    return 0.5 * b1;
}

}  // namespace

double alpha_pointwise(const Trajectory& traj, double t, const ModelParams& params,
                       const LeaderInfluencePhi& phi, const DelayLaw& dl) {
    const std::vector<double> now = traj.state(t);
    const std::vector<double> delayed = traj.state(t - dl(t));
    const int p = argmax_distance(traj, now);
    return alpha_from_frames(traj, traj.agent(now, 0), delayed, p, params, phi);
}

Vec u_consensus_pointwise(const Trajectory& traj, double t, const ModelParams& params,
                          const LeaderInfluencePhi& phi, const DelayLaw& dl) {
    const int d = params.dim;
    const std::vector<double> now = traj.state(t);
    const std::vector<double> delayed = traj.state(t - dl(t));
    const auto leader_now = traj.agent(now, 0);
    const int p = argmax_distance(traj, now);
    const double alpha = alpha_from_frames(traj, leader_now, delayed, p, params, phi);
    Vec u(d, 0.0);
    for (int j = 1; j <= params.n_agents; ++j) {
        const auto xj = traj.agent(delayed, j);
        add_scaled_diff(u, phi(dist(xj, leader_now)), xj, leader_now);
    }
    scale(u, params.gamma * alpha);
    cap_norm(u, params.control_bound);
    return u;
}

Vec u_steer(std::span<const double> x0_now, std::span<const double> xi, double control_bound) {
    Vec u = sub(xi, x0_now);
    const double d = norm(u);
    if (d <= kSteerDeadband) return Vec(x0_now.size(), 0.0);
    scale(u, control_bound / d);
    cap_norm(u, control_bound);
    return u;
}

Vec u_steer_discrete(std::span<const double> x0_now, std::span<const double> xi,
                     double control_bound, double dt) {
    Vec u = sub(xi, x0_now);
    const double d = norm(u);
    if (d <= kSteerDeadband) return Vec(x0_now.size(), 0.0);
    if (d <= control_bound * dt) {
        scale(u, 1.0 / dt);  // lands on the target in one step; norm = d/dt <= bound
        cap_norm(u, control_bound);
        return u;
    }
    scale(u, control_bound / d);
    cap_norm(u, control_bound);
    return u;
}

double alpha_distributed(const Trajectory& traj, double t, double s, const ModelParams& params,
                         const LeaderInfluencePhi& phi) {
    const std::vector<double> now = traj.state(t);
    const std::vector<double> at_s = traj.state(s);
    const int p = argmax_distance(traj, now);
    return alpha_from_frames(traj, traj.agent(now, 0), at_s, p, params, phi);
}

Vec u_consensus_distributed(const Trajectory& traj, double t, const ModelParams& params,
                            const LeaderInfluencePhi& phi, const DelayLaw& dl, const Kernel& k,
                            const IntegratorConfig& cfg) {
    const int d = params.dim;
    const std::size_t row = traj.row_size();
    const std::vector<double> now = traj.state(t);
    const auto leader_now = traj.agent(now, 0);
    const int p = argmax_distance(traj, now);

    const QuadratureWindow w = make_quadrature_window(t, dl(t), cfg);
    const int n = static_cast<int>(w.nodes.size());
    std::vector<double> frame(row);
    Vec acc(d, 0.0);
    double h_quad = 0.0;
    for (int m = 0; m < n; ++m) {
        const double beta = k(t - w.nodes[m]);
        const double c = w.weights[m] * beta;
        h_quad += c;
        if (c == 0.0) continue;
        traj.state_at(w.nodes[m], frame);
        const double alpha = alpha_from_frames(traj, leader_now, frame, p, params, phi);
        for (int j = 1; j <= params.n_agents; ++j) {
            const auto xj = traj.agent(frame, j);
            add_scaled_diff(acc, c * alpha * phi(dist(xj, leader_now)), xj, leader_now);
        }
    }
    if (!(h_quad > 0.0))
        throw KernelViolation("kernel mass over the delay window is not positive");
    scale(acc, params.gamma / h_quad);
    cap_norm(acc, params.control_bound);
    return acc;
}

WaypointPlan build_waypoint_plan(const Vec& x_star, const Vec& x_bar, double delta) {
    if (!(delta > 0.0)) throw ConfigError("waypoint plan requires delta > 0");
    if (x_star.size() != x_bar.size()) throw ConfigError("waypoint endpoints dimension mismatch");
    WaypointPlan plan;
    const double d = dist(x_star, x_bar);
    if (d == 0.0) {
        plan.points = {x_bar};
        plan.spacing = 0.0;
        return plan;
    }
    const int L = std::max(1, static_cast<int>(std::ceil(4.0 * d / delta - 1e-12)));
    plan.points.resize(L + 1);
    for (int k = 0; k <= L; ++k) {
        Vec z(x_star.size());
        const double w = static_cast<double>(k) / L;
        for (std::size_t q = 0; q < z.size(); ++q)
            z[q] = x_star[q] + w * (x_bar[q] - x_star[q]);
        plan.points[k] = std::move(z);
    }
    plan.points.back() = x_bar;
    plan.spacing = d / L;
    return plan;
}

WaypointPolicy make_waypoint_policy(const ModelParams& params, const LeaderInfluencePhi& phi,
                                    const DelayLaw& dl, Vec target) {
    const auto [ok, margin] = check_halanay(params, phi);
    if (!ok) {
        std::ostringstream os;
        os << "settling certificate fails: phi(delta/2) - 1/(2 gamma) = " << margin;
        throw CertificateViolation(os.str());
    }
    if (static_cast<int>(target.size()) != params.dim)
        throw ConfigError("waypoint target dimension mismatch");
    WaypointPolicy p;
    p.target = std::move(target);
    p.spacing = params.a_inner / 4.0;
    p.settle_radius = params.a_inner / 4.0;
    p.pass_radius = params.a_inner / 2.0;
    p.dwell = dl.tau_max();
    return p;
}

const char* to_string(WaypointPhase p) {
    switch (p) {
        case WaypointPhase::consensus: return "consensus";
        case WaypointPhase::steering: return "steering";
        case WaypointPhase::settling: return "settling";
        case WaypointPhase::done: return "done";
    }
    return "?";
}

namespace {

// Grid samples of [t - dwell, t]; false when the window is not yet covered.
template <class SpreadAtRow>
bool trailing_window_within(const Trajectory& traj, double t, double dwell, double threshold,
                            SpreadAtRow&& spread) {
    const double lo = t - dwell;
    if (traj.t_front() > lo + 1e-9) return false;
    const auto& times = traj.times();
    auto it = std::lower_bound(times.begin(), times.end(), lo - 1e-9);
    for (std::size_t k = static_cast<std::size_t>(it - times.begin());
         k < times.size() && times[k] <= t + 1e-9; ++k) {
        if (spread(k) > threshold) return false;
    }
    return true;
}

double spread_to_leader(const Trajectory& traj, std::size_t k) {
    const auto row = traj.state_row(k);
    const auto leader = traj.agent(row, 0);
    double m = 0.0;
    for (int i = 1; i <= traj.n_followers(); ++i)
        m = std::max(m, dist(traj.agent(row, i), leader));
    return m;
}

double spread_to_point(const Trajectory& traj, std::size_t k, const Vec& z) {
    const auto row = traj.state_row(k);
    double m = 0.0;
    for (int i = 1; i <= traj.n_followers(); ++i)
        m = std::max(m, dist(traj.agent(row, i), z));
    return m;
}

}  // namespace

std::pair<Vec, ControllerState> waypoint_controller_step(
    const ControllerState& state, const Trajectory& traj, double t, const ModelParams& params,
    const LeaderInfluencePhi& phi, const DelayLaw& dl, const WaypointPolicy& policy,
    ModelKind model, const Kernel* kernel, const IntegratorConfig& cfg, double dt) {
    const auto [ok, margin] = check_halanay(params, phi);
    if (!ok) throw CertificateViolation("settling certificate phi(delta/2) > 1/(2 gamma) fails");

    ControllerState st = state;
    const int d = params.dim;
    auto enter = [&](WaypointPhase phase, int index) {
        st.phase = phase;
        st.waypoint_index = index;
        st.phase_entry_time = t;
    };
    auto note_timeout = [&](const char* what) {
        const double over = t - st.phase_entry_time;
        if (over > policy.max_phase_duration && over - dt <= policy.max_phase_duration) {
            std::ostringstream os;
            os << what << " phase exceeded max_phase_duration at t = " << t;
            st.notes.push_back(os.str());
            st.timed_out = true;
        }
    };

    auto guard_limit = [&] {
        return 8 + 2 * (st.plan ? static_cast<int>(st.plan->points.size()) : 0);
    };
    for (int guard = 0; guard < guard_limit(); ++guard) {
        switch (st.phase) {
            case WaypointPhase::consensus: {
                const bool tight = trailing_window_within(
                    traj, t, policy.dwell, policy.spacing,
                    [&](std::size_t k) { return spread_to_leader(traj, k); });
                if (tight) {
                    const std::vector<double> now = traj.state(t);
                    const auto leader = traj.agent(now, 0);
                    st.plan = build_waypoint_plan(Vec(leader.begin(), leader.end()),
                                                  policy.target, params.a_inner);
                    if (st.plan->points.size() == 1)
                        enter(WaypointPhase::settling, 0);
                    else
                        enter(WaypointPhase::steering, 1);
                    continue;
                }
                note_timeout("consensus");
                if (model == ModelKind::pointwise)
                    return {u_consensus_pointwise(traj, t, params, phi, dl), st};
                return {u_consensus_distributed(traj, t, params, phi, dl, *kernel, cfg), st};
            }
            case WaypointPhase::steering: {
                const Vec& z = st.plan->points[st.waypoint_index];
                const std::vector<double> now = traj.state(t);
                const auto leader = traj.agent(now, 0);
                if (dist(leader, z) <= kSteerDeadband) {
                    if (spread_to_point(traj, traj.size() - 1, z) > policy.pass_radius) {
                        std::ostringstream os;
                        os << "followers outside pass_radius when reaching waypoint "
                           << st.waypoint_index << " at t = " << t;
                        st.notes.push_back(os.str());
                    }
                    enter(WaypointPhase::settling, st.waypoint_index);
                    continue;
                }
                note_timeout("steering");
                return {u_steer_discrete(leader, z, params.control_bound, dt), st};
            }
            case WaypointPhase::settling: {
                const Vec& z = st.plan->points[st.waypoint_index];
                const bool settled = trailing_window_within(
                    traj, t, policy.dwell, policy.settle_radius,
                    [&](std::size_t k) { return spread_to_point(traj, k, z); });
                if (settled) {
                    if (st.waypoint_index + 1 < static_cast<int>(st.plan->points.size()))
                        enter(WaypointPhase::steering, st.waypoint_index + 1);
                    else
                        enter(WaypointPhase::done, st.waypoint_index);
                    continue;
                }
                note_timeout("settling");
                return {Vec(d, 0.0), st};
            }
            case WaypointPhase::done:
                return {Vec(d, 0.0), st};
        }
    }
    st.notes.push_back("waypoint automaton cascaded too many transitions in one step");
    return {Vec(d, 0.0), st};
}

}  // namespace hkctrl
