#include "hkctrl/dde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>

namespace hkctrl {

QuadratureWindow make_quadrature_window(double t, double tau, const IntegratorConfig& cfg) {
    if (!(tau > 0.0))
        throw KernelViolation("quadrature window is empty: tau(t) <= 0");
    int n = std::max(cfg.quad_points_min,
                     static_cast<int>(std::ceil(tau / cfg.step - 1e-12)) + 1);
    if (cfg.quad == QuadRule::simpson && (n - 1) % 2 != 0) ++n;
    QuadratureWindow w;
    w.nodes.resize(n);
    w.weights.resize(n);
    const double h = tau / (n - 1);
    for (int i = 0; i < n; ++i) w.nodes[i] = t - tau + i * h;
    w.nodes.back() = t;
    if (cfg.quad == QuadRule::trapezoid) {
        for (int i = 0; i < n; ++i) w.weights[i] = h;
        w.weights.front() = w.weights.back() = 0.5 * h;
    } else {
        for (int i = 0; i < n; ++i)
            w.weights[i] = (i == 0 || i == n - 1) ? h / 3.0 : (i % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
    }
    return w;
}

void rhs_pointwise_core(std::span<const double> current, const Trajectory& traj, double t,
                        const ModelParams& params, const InfluenceA& a,
                        const LeaderInfluencePhi& phi, const DelayLaw& dl,
                        std::span<const double> u_value, std::span<double> deriv) {
    const int N = params.n_agents;
    const int d = params.dim;
    const std::vector<double> delayed = traj.state(t - dl(t));
    std::span<const double> del(delayed);
    std::copy(u_value.begin(), u_value.end(), deriv.begin());
    auto at = [d](std::span<const double> row, int i) {
        return row.subspan(static_cast<std::size_t>(i) * d, d);
    };
    const auto leader_del = at(del, 0);
    for (int i = 1; i <= N; ++i) {
        const auto xi = at(current, i);
        auto out = deriv.subspan(static_cast<std::size_t>(i) * d, d);
        std::fill(out.begin(), out.end(), 0.0);
        for (int j = 1; j <= N; ++j) {
            if (j == i) continue;
            const auto xj = at(del, j);
            const double w = a(dist(xj, xi));
            if (w != 0.0) add_scaled_diff(out, w / N, xj, xi);
        }
        add_scaled_diff(out, params.gamma * phi(dist(leader_del, xi)), leader_del, xi);
    }
}

void rhs_distributed_core(std::span<const double> current, const Trajectory& traj, double t,
                          const ModelParams& params, const InfluenceA& a,
                          const LeaderInfluencePhi& phi, const DelayLaw& dl, const Kernel& k,
                          std::span<const double> u_value, const IntegratorConfig& cfg,
                          std::span<double> deriv) {
    const int N = params.n_agents;
    const int d = params.dim;
    const std::size_t row = traj.row_size();
    const QuadratureWindow w = make_quadrature_window(t, dl(t), cfg);
    const int n = static_cast<int>(w.nodes.size());

    std::vector<double> frames(static_cast<std::size_t>(n) * row);
    std::vector<double> beta(n);
    double h_quad = 0.0;
    for (int m = 0; m < n; ++m) {
        traj.state_at(w.nodes[m], std::span<double>(frames.data() + m * row, row));
        beta[m] = k(t - w.nodes[m]);
        h_quad += w.weights[m] * beta[m];
    }
    if (!(h_quad > 0.0))
        throw KernelViolation("kernel mass over the delay window is not positive");

    std::copy(u_value.begin(), u_value.end(), deriv.begin());
    auto at = [d](const double* base, int i) {
        return std::span<const double>(base + static_cast<std::size_t>(i) * d, d);
    };
    std::vector<double> peer(d), lead(d);
    for (int i = 1; i <= N; ++i) {
        const auto xi = at(current.data(), i);
        std::fill(peer.begin(), peer.end(), 0.0);
        std::fill(lead.begin(), lead.end(), 0.0);
        for (int m = 0; m < n; ++m) {
            const double c = w.weights[m] * beta[m];
            if (c == 0.0) continue;
            const double* frame = frames.data() + m * row;
            for (int j = 1; j <= N; ++j) {
                if (j == i) continue;
                const auto xj = at(frame, j);
                const double aij = a(dist(xj, xi));
                if (aij != 0.0) add_scaled_diff(peer, c * aij, xj, xi);
            }
            const auto x0 = at(frame, 0);
            add_scaled_diff(lead, c * phi(dist(x0, xi)), x0, xi);
        }
        auto out = deriv.subspan(static_cast<std::size_t>(i) * d, d);
        for (int q = 0; q < d; ++q)
            out[q] = peer[q] / (N * h_quad) + params.gamma * lead[q] / h_quad;
    }
}

std::vector<double> rhs_pointwise(const Trajectory& traj, double t, const ModelParams& params,
                                  const InfluenceA& a, const LeaderInfluencePhi& phi,
                                  const DelayLaw& dl, std::span<const double> u_value) {
    std::vector<double> current = traj.state(t);
    std::vector<double> deriv(traj.row_size());
    rhs_pointwise_core(current, traj, t, params, a, phi, dl, u_value, deriv);
    return deriv;
}

std::vector<double> rhs_distributed(const Trajectory& traj, double t, const ModelParams& params,
                                    const InfluenceA& a, const LeaderInfluencePhi& phi,
                                    const DelayLaw& dl, const Kernel& k,
                                    std::span<const double> u_value, const IntegratorConfig& cfg) {
    std::vector<double> current = traj.state(t);
    std::vector<double> deriv(traj.row_size());
    rhs_distributed_core(current, traj, t, params, a, phi, dl, k, u_value, cfg, deriv);
    return deriv;
}

namespace {

Vec eval_policy(const ControlPolicy& policy, ControllerState& ctrl,
                std::vector<WaypointEvent>& events, const Trajectory& traj, double t,
                const ModelParams& params, const LeaderInfluencePhi& phi, const DelayLaw& dl,
                ModelKind model, const Kernel* kernel, const IntegratorConfig& cfg, double dt) {
    const int d = params.dim;
    if (std::holds_alternative<ZeroPolicy>(policy)) return Vec(d, 0.0);
    if (std::holds_alternative<ConsensusPointwisePolicy>(policy))
        return u_consensus_pointwise(traj, t, params, phi, dl);
    if (std::holds_alternative<ConsensusDistributedPolicy>(policy))
        return u_consensus_distributed(traj, t, params, phi, dl, *kernel, cfg);
    if (const auto* steer = std::get_if<SteerPolicy>(&policy)) {
        const std::vector<double> now = traj.state(t);
        return u_steer_discrete(traj.agent(now, 0), steer->target, params.control_bound, dt);
    }
    const auto& wp = std::get<WaypointPolicy>(policy);
    auto [u, next] =
        waypoint_controller_step(ctrl, traj, t, params, phi, dl, wp, model, kernel, cfg, dt);
    if (next.phase != ctrl.phase || next.waypoint_index != ctrl.waypoint_index)
        events.push_back({t, next.phase, next.waypoint_index});
    ctrl = std::move(next);
    return u;
}

}  // namespace

IntegrationOutput integrate_with_log(ModelKind model, const ControlPolicy& policy,
                                     const History& initial, double t_end,
                                     const IntegratorConfig& cfg, const ModelParams& params,
                                     const InfluenceA& a, const LeaderInfluencePhi& phi,
                                     const DelayLaw& dl, const Kernel* kernel) {
    cfg.validate();
    params.validate();
    if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
    if (initial.n_followers() != params.n_agents || initial.dim() != params.dim)
        throw ConfigError("history shape does not match the model parameters");
    const double tau_bar = dl.tau_max();
    if (initial.start() > -tau_bar + 1e-9)
        throw ConfigError("history must cover [-tau_max, 0]");
    if (model == ModelKind::distributed) {
        if (kernel == nullptr) throw ConfigError("distributed model requires a kernel");
        if (!(dl.tau_min() > 0.0))
            throw ConfigError("distributed model requires tau_min > 0");
        if (cfg.step > 0.5 * dl.tau_min() + 1e-12)
            throw StepSizeError("step must not exceed tau_min/2 for the distributed model");
        if (kernel->domain_end() < tau_bar - 1e-12)
            throw ConfigError("kernel domain must cover [0, tau_max]");
        check_kernel_condition(*kernel, dl);
    }
    if (std::holds_alternative<ConsensusPointwisePolicy>(policy) && model != ModelKind::pointwise)
        throw ConfigError("consensus_pointwise control requires the pointwise model");
    if (std::holds_alternative<ConsensusDistributedPolicy>(policy) &&
        model != ModelKind::distributed)
        throw ConfigError("consensus_distributed control requires the distributed model");

    const int d = params.dim;
    const std::size_t row = static_cast<std::size_t>(params.n_agents + 1) * d;

    IntegrationOutput out{Trajectory(params.n_agents, d, cfg.interp), {}, {}, {}};
    Trajectory& traj = out.trajectory;
    traj.set_history_boundary(0.0);
    traj.set_max_extrapolation(cfg.step * (1.0 + 1e-9));

    // History grid: uniform nodes plus every history sample point, so that the
    // stored record reproduces the supplied data exactly at its samples.
    std::vector<double> hist_times{-tau_bar, 0.0};
    for (int k = 1; k * cfg.step < tau_bar - 1e-12; ++k)
        hist_times.push_back(-tau_bar + k * cfg.step);
    for (double ht : initial.times())
        if (ht > -tau_bar + 1e-12 && ht < -1e-12) hist_times.push_back(ht);
    std::sort(hist_times.begin(), hist_times.end());
    hist_times.erase(std::unique(hist_times.begin(), hist_times.end(),
                                 [](double x, double y) { return y - x < 1e-12; }),
                     hist_times.end());
    if (std::abs(hist_times.back()) > 1e-12) hist_times.push_back(0.0);
    hist_times.back() = 0.0;

    std::vector<std::vector<double>> hist_rows(hist_times.size());
    for (std::size_t k = 0; k < hist_times.size(); ++k) hist_rows[k] = initial.value(hist_times[k]);
    const Vec zero_u(d, 0.0);
    std::vector<double> slope(row);
    for (std::size_t k = 0; k < hist_times.size(); ++k) {
        const std::size_t src = (k + 1 < hist_times.size()) ? k : k - 1;
        const double dt = hist_times[src + 1] - hist_times[src];
        for (std::size_t j = 0; j < row; ++j)
            slope[j] = (hist_rows[src + 1][j] - hist_rows[src][j]) / dt;
        traj.append(hist_times[k], hist_rows[k], slope, zero_u);
    }

    ControllerState ctrl;
    auto control_at = [&](double t, double dt) {
        return eval_policy(policy, ctrl, out.waypoint_events, traj, t, params, phi, dl, model,
                           kernel, cfg, dt);
    };
    auto rhs_at = [&](std::span<const double> current, double t, std::span<const double> u,
                      std::span<double> deriv) {
        if (model == ModelKind::pointwise)
            rhs_pointwise_core(current, traj, t, params, a, phi, dl, u, deriv);
        else
            rhs_distributed_core(current, traj, t, params, a, phi, dl, *kernel, u, cfg, deriv);
    };

    const std::size_t n_steps =
        static_cast<std::size_t>(std::max(1.0, std::ceil(t_end / cfg.step - 1e-9)));
    auto grid_time = [&](std::size_t k) { return (k == n_steps) ? t_end : k * cfg.step; };

    Vec u_held = control_at(0.0, grid_time(1) - 0.0);
    std::vector<double> f0(row);
    rhs_at(traj.state_row(traj.size() - 1), 0.0, u_held, f0);
    traj.restate_last(f0, u_held);

    std::vector<double> y(row), k1(row), k2(row), k3(row), k4(row), stage(row), ynext(row);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t0 = grid_time(step);
        const double t1 = grid_time(step + 1);
        const double dt = t1 - t0;
        const std::size_t last = traj.size() - 1;
        std::copy_n(traj.state_row(last).data(), row, y.data());
        std::copy_n(traj.deriv_row(last).data(), row, k1.data());

        for (std::size_t j = 0; j < row; ++j) stage[j] = y[j] + 0.5 * dt * k1[j];
        rhs_at(stage, t0 + 0.5 * dt, u_held, k2);
        for (std::size_t j = 0; j < row; ++j) stage[j] = y[j] + 0.5 * dt * k2[j];
        rhs_at(stage, t0 + 0.5 * dt, u_held, k3);
        for (std::size_t j = 0; j < row; ++j) stage[j] = y[j] + dt * k3[j];
        rhs_at(stage, t1, u_held, k4);
        for (std::size_t j = 0; j < row; ++j)
            ynext[j] = y[j] + dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        traj.append(t1, ynext, k4, u_held);
        const double dt_next = (step + 1 < n_steps) ? grid_time(step + 2) - t1 : cfg.step;
        u_held = control_at(t1, dt_next);
        rhs_at(ynext, t1, u_held, k4);
        traj.restate_last(k4, u_held);
    }

    if (std::holds_alternative<WaypointPolicy>(policy)) {
        out.final_controller_state = ctrl;
        out.diagnostics = ctrl.notes;
    }
    return out;
}

Trajectory integrate(ModelKind model, const ControlPolicy& policy, const History& initial,
                     double t_end, const IntegratorConfig& cfg, const ModelParams& params,
                     const InfluenceA& a, const LeaderInfluencePhi& phi, const DelayLaw& dl,
                     const Kernel* kernel) {
    return integrate_with_log(model, policy, initial, t_end, cfg, params, a, phi, dl, kernel)
        .trajectory;
}

}  // namespace hkctrl
