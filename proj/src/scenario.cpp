#include "hkctrl/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <random>
#include <sstream>

#include "json.hpp"

namespace hkctrl {

using nlohmann::json;

namespace {

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* k) { return key == k; }) == allowed.end())
            throw ConfigError("unknown key '" + key + "' in " + where);
    }
}

double get_num(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " is missing '" + std::string(key) + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

std::vector<double> get_vec(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " is missing '" + std::string(key) + "'");
    if (!j.at(key).is_array()) throw ConfigError(where + "." + key + " must be an array");
    return j.at(key).get<std::vector<double>>();
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_keys(j,
                 {"name", "model", "params", "delay", "kernel", "policy", "initial", "t_end",
                  "step", "integrator", "seed"},
                 "config");
    ScenarioConfig cfg;
    if (j.contains("name")) cfg.name = j.at("name").get<std::string>();
    const std::string model = j.value("model", "pointwise");
    if (model == "pointwise")
        cfg.model = ModelKind::pointwise;
    else if (model == "distributed")
        cfg.model = ModelKind::distributed;
    else
        throw ConfigError("model must be 'pointwise' or 'distributed'");

    if (j.contains("params")) {
        const json& p = j.at("params");
        require_keys(p,
                     {"n_agents", "dim", "gamma", "control_bound", "a_inner", "a_outer",
                      "lipschitz_phi"},
                     "params");
        if (p.contains("n_agents")) cfg.params.n_agents = p.at("n_agents").get<int>();
        if (p.contains("dim")) cfg.params.dim = p.at("dim").get<int>();
        if (p.contains("gamma")) cfg.params.gamma = p.at("gamma").get<double>();
        if (p.contains("control_bound"))
            cfg.params.control_bound = p.at("control_bound").get<double>();
        if (p.contains("a_inner")) cfg.params.a_inner = p.at("a_inner").get<double>();
        if (p.contains("a_outer")) cfg.params.a_outer = p.at("a_outer").get<double>();
        if (p.contains("lipschitz_phi"))
            cfg.params.lipschitz_phi = p.at("lipschitz_phi").get<double>();
        else
            cfg.params.lipschitz_phi = cucker_smale_lipschitz();
    } else {
        cfg.params.lipschitz_phi = cucker_smale_lipschitz();
    }

    if (j.contains("delay")) {
        const json& d = j.at("delay");
        require_keys(d, {"kind", "tau", "base", "amplitude", "omega", "times", "values"},
                     "delay");
        cfg.delay.kind = d.value("kind", "constant");
        if (cfg.delay.kind == "constant") {
            cfg.delay.tau = get_num(d, "tau", "delay");
        } else if (cfg.delay.kind == "sinusoidal") {
            cfg.delay.base = get_num(d, "base", "delay");
            cfg.delay.amplitude = get_num(d, "amplitude", "delay");
            cfg.delay.omega = get_num(d, "omega", "delay");
        } else if (cfg.delay.kind == "table") {
            cfg.delay.times = get_vec(d, "times", "delay");
            cfg.delay.values = get_vec(d, "values", "delay");
        } else {
            throw ConfigError("delay.kind must be constant, sinusoidal or table");
        }
    }

    if (j.contains("kernel") && !j.at("kernel").is_null()) {
        const json& k = j.at("kernel");
        require_keys(k, {"kind", "height", "center", "width", "s", "beta", "total_mass"},
                     "kernel");
        KernelConfig kc;
        kc.kind = k.value("kind", "uniform");
        if (kc.kind == "uniform") {
            kc.height = k.value("height", 1.0);
        } else if (kc.kind == "hat") {
            kc.center = get_num(k, "center", "kernel");
            kc.width = get_num(k, "width", "kernel");
        } else if (kc.kind == "table") {
            kc.s = get_vec(k, "s", "kernel");
            kc.beta = get_vec(k, "beta", "kernel");
        } else {
            throw ConfigError("kernel.kind must be uniform, hat or table");
        }
        if (k.contains("total_mass")) kc.total_mass = k.at("total_mass").get<double>();
        cfg.kernel = kc;
    }

    if (j.contains("policy")) {
        const json& p = j.at("policy");
        require_keys(p,
                     {"kind", "target", "spacing", "settle_radius", "pass_radius", "dwell",
                      "max_phase_duration"},
                     "policy");
        cfg.policy.kind = p.value("kind", "zero");
        if (p.contains("target")) cfg.policy.target = get_vec(p, "target", "policy");
        if (p.contains("spacing")) cfg.policy.spacing = p.at("spacing").get<double>();
        if (p.contains("settle_radius"))
            cfg.policy.settle_radius = p.at("settle_radius").get<double>();
        if (p.contains("pass_radius")) cfg.policy.pass_radius = p.at("pass_radius").get<double>();
        if (p.contains("dwell")) cfg.policy.dwell = p.at("dwell").get<double>();
        if (p.contains("max_phase_duration"))
            cfg.policy.max_phase_duration = p.at("max_phase_duration").get<double>();
        if (cfg.policy.kind != "zero" && cfg.policy.kind != "consensus" &&
            cfg.policy.kind != "steer" && cfg.policy.kind != "waypoint")
            throw ConfigError("policy.kind must be zero, consensus, steer or waypoint");
    }

    if (j.contains("initial")) {
        const json& i = j.at("initial");
        require_keys(i,
                     {"kind", "leader", "agents", "times", "rows", "count", "box_low",
                      "box_high"},
                     "initial");
        cfg.initial.kind = i.value("kind", "section6");
        if (cfg.initial.kind == "constant") {
            cfg.initial.leader = get_vec(i, "leader", "initial");
            if (!i.contains("agents") || !i.at("agents").is_array())
                throw ConfigError("initial.agents must be an array of vectors");
            for (const auto& a : i.at("agents"))
                cfg.initial.agents.push_back(a.get<std::vector<double>>());
        } else if (cfg.initial.kind == "sampled") {
            cfg.initial.times = get_vec(i, "times", "initial");
            for (const auto& r : i.at("rows"))
                cfg.initial.rows.push_back(r.get<std::vector<double>>());
        } else if (cfg.initial.kind == "random_constant") {
            cfg.initial.count = i.value("count", 0);
            cfg.initial.box_low = get_vec(i, "box_low", "initial");
            cfg.initial.box_high = get_vec(i, "box_high", "initial");
            if (i.contains("leader")) cfg.initial.leader = get_vec(i, "leader", "initial");
        } else if (cfg.initial.kind != "section6") {
            throw ConfigError("initial.kind must be section6, constant, sampled or random_constant");
        }
    }

    if (j.contains("t_end")) cfg.t_end = j.at("t_end").get<double>();
    if (j.contains("step")) cfg.integrator.step = j.at("step").get<double>();
    if (j.contains("integrator")) {
        const json& g = j.at("integrator");
        require_keys(g, {"step", "interp", "quad", "quad_points_min"}, "integrator");
        if (g.contains("step")) cfg.integrator.step = g.at("step").get<double>();
        const std::string interp = g.value("interp", "cubic_hermite");
        if (interp == "linear")
            cfg.integrator.interp = InterpOrder::linear;
        else if (interp == "cubic_hermite")
            cfg.integrator.interp = InterpOrder::cubic_hermite;
        else
            throw ConfigError("integrator.interp must be linear or cubic_hermite");
        const std::string quad = g.value("quad", "trapezoid");
        if (quad == "trapezoid")
            cfg.integrator.quad = QuadRule::trapezoid;
        else if (quad == "simpson")
            cfg.integrator.quad = QuadRule::simpson;
        else
            throw ConfigError("integrator.quad must be trapezoid or simpson");
        if (g.contains("quad_points_min"))
            cfg.integrator.quad_points_min = g.at("quad_points_min").get<int>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string config_to_text(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["model"] = cfg.model == ModelKind::pointwise ? "pointwise" : "distributed";
    j["params"] = {{"n_agents", cfg.params.n_agents},
                   {"dim", cfg.params.dim},
                   {"gamma", cfg.params.gamma},
                   {"control_bound", cfg.params.control_bound},
                   {"a_inner", cfg.params.a_inner},
                   {"a_outer", cfg.params.a_outer},
                   {"lipschitz_phi", cfg.params.lipschitz_phi}};
    json d{{"kind", cfg.delay.kind}};
    if (cfg.delay.kind == "constant") d["tau"] = cfg.delay.tau;
    if (cfg.delay.kind == "sinusoidal") {
        d["base"] = cfg.delay.base;
        d["amplitude"] = cfg.delay.amplitude;
        d["omega"] = cfg.delay.omega;
    }
    if (cfg.delay.kind == "table") {
        d["times"] = cfg.delay.times;
        d["values"] = cfg.delay.values;
    }
    j["delay"] = d;
    if (cfg.kernel) {
        json k{{"kind", cfg.kernel->kind}};
        if (cfg.kernel->kind == "uniform") k["height"] = cfg.kernel->height;
        if (cfg.kernel->kind == "hat") {
            k["center"] = cfg.kernel->center;
            k["width"] = cfg.kernel->width;
        }
        if (cfg.kernel->kind == "table") {
            k["s"] = cfg.kernel->s;
            k["beta"] = cfg.kernel->beta;
        }
        if (cfg.kernel->total_mass) k["total_mass"] = *cfg.kernel->total_mass;
        j["kernel"] = k;
    }
    json p{{"kind", cfg.policy.kind}};
    if (!cfg.policy.target.empty()) p["target"] = cfg.policy.target;
    if (cfg.policy.spacing) p["spacing"] = *cfg.policy.spacing;
    if (cfg.policy.settle_radius) p["settle_radius"] = *cfg.policy.settle_radius;
    if (cfg.policy.pass_radius) p["pass_radius"] = *cfg.policy.pass_radius;
    if (cfg.policy.dwell) p["dwell"] = *cfg.policy.dwell;
    if (cfg.policy.max_phase_duration) p["max_phase_duration"] = *cfg.policy.max_phase_duration;
    j["policy"] = p;
    json i{{"kind", cfg.initial.kind}};
    if (cfg.initial.kind == "constant") {
        i["leader"] = cfg.initial.leader;
        i["agents"] = cfg.initial.agents;
    }
    if (cfg.initial.kind == "sampled") {
        i["times"] = cfg.initial.times;
        i["rows"] = cfg.initial.rows;
    }
    if (cfg.initial.kind == "random_constant") {
        i["count"] = cfg.initial.count;
        i["box_low"] = cfg.initial.box_low;
        i["box_high"] = cfg.initial.box_high;
        if (!cfg.initial.leader.empty()) i["leader"] = cfg.initial.leader;
    }
    j["initial"] = i;
    j["t_end"] = cfg.t_end;
    json g;
    g["step"] = cfg.integrator.step;
    g["interp"] = cfg.integrator.interp == InterpOrder::linear ? "linear" : "cubic_hermite";
    g["quad"] = cfg.integrator.quad == QuadRule::trapezoid ? "trapezoid" : "simpson";
    g["quad_points_min"] = cfg.integrator.quad_points_min;
    j["integrator"] = g;
    j["seed"] = cfg.seed;
    return j.dump(2) + "\n";
}

namespace {

DelayLaw build_delay(const DelayConfig& d) {
    if (d.kind == "constant") return DelayLaw::constant(d.tau);
    if (d.kind == "sinusoidal") return DelayLaw::sinusoidal(d.base, d.amplitude, d.omega);
    if (d.kind == "table") return DelayLaw::table(d.times, d.values);
    throw ConfigError("unknown delay kind: " + d.kind);
}

Kernel build_kernel(const KernelConfig& k, double tau_max) {
    Kernel kern = [&]() {
        if (k.kind == "uniform") return Kernel::uniform(tau_max, k.height);
        if (k.kind == "hat") return Kernel::hat(tau_max, k.center, k.width);
        if (k.kind == "table") return Kernel::table(k.s, k.beta);
        throw ConfigError("unknown kernel kind: " + k.kind);
    }();
    if (k.total_mass) kern = kern.with_total_mass(*k.total_mass);
    return kern;
}

History build_history(const InitialConfig& i, const ModelParams& params, double tau_max,
                      std::uint64_t seed) {
    if (i.kind == "section6") {
        std::vector<Vec> agents(params.n_agents);
        for (int a = 1; a <= params.n_agents; ++a)
            agents[a - 1] = Vec{(a % 2 == 0 ? 1.0 : -1.0) * a / 50.0};
        return History::constant(Vec(params.dim, 0.0), std::move(agents), tau_max);
    }
    if (i.kind == "constant") return History::constant(i.leader, i.agents, tau_max);
    if (i.kind == "sampled") return History::sampled(i.times, i.rows, params.dim);
    if (i.kind == "random_constant") {
        if (static_cast<int>(i.box_low.size()) != params.dim ||
            static_cast<int>(i.box_high.size()) != params.dim)
            throw ConfigError("random_constant box must match dim");
        const int n = i.count > 0 ? i.count : params.n_agents;
        std::mt19937_64 rng(seed);
        auto draw = [&](int q) {
            std::uniform_real_distribution<double> u(i.box_low[q], i.box_high[q]);
            return u(rng);
        };
        std::vector<Vec> agents(n);
        for (auto& a : agents) {
            a.resize(params.dim);
            for (int q = 0; q < params.dim; ++q) a[q] = draw(q);
        }
        Vec leader = i.leader;
        if (leader.empty()) {
            leader.resize(params.dim);
            for (int q = 0; q < params.dim; ++q) leader[q] = draw(q);
        }
        return History::constant(leader, std::move(agents), tau_max);
    }
    throw ConfigError("unknown initial kind: " + i.kind);
}

}  // namespace

Scenario build_scenario(const ScenarioConfig& cfg) {
    ModelParams params = cfg.params;
    if (cfg.initial.kind == "section6") {
        params.n_agents = 50;
        params.dim = 1;
    }
    if (cfg.initial.kind == "random_constant" && cfg.initial.count > 0)
        params.n_agents = cfg.initial.count;
    params.validate();
    LeaderInfluencePhi phi = cucker_smale_phi();
    if (std::abs(params.lipschitz_phi - phi.lipschitz()) > 1e-6)
        phi = LeaderInfluencePhi([](double s) { return std::pow(1.0 + s * s, -1.5); },
                                 params.lipschitz_phi);
    DelayLaw dl = build_delay(cfg.delay);
    std::optional<Kernel> kernel;
    if (cfg.model == ModelKind::distributed) {
        if (!cfg.kernel) throw ConfigError("distributed model requires a kernel section");
        kernel = build_kernel(*cfg.kernel, dl.tau_max());
    } else if (cfg.kernel) {
        kernel = build_kernel(*cfg.kernel, dl.tau_max());
    }
    History history = build_history(cfg.initial, params, dl.tau_max(), cfg.seed);

    ControlPolicy policy = ZeroPolicy{};
    if (cfg.policy.kind == "consensus") {
        if (cfg.model == ModelKind::pointwise)
            policy = ConsensusPointwisePolicy{};
        else
            policy = ConsensusDistributedPolicy{};
    } else if (cfg.policy.kind == "steer") {
        if (static_cast<int>(cfg.policy.target.size()) != params.dim)
            throw ConfigError("steer target must have 'dim' components");
        policy = SteerPolicy{cfg.policy.target};
    } else if (cfg.policy.kind == "waypoint") {
        if (static_cast<int>(cfg.policy.target.size()) != params.dim)
            throw ConfigError("waypoint target must have 'dim' components");
        WaypointPolicy wp = make_waypoint_policy(params, phi, dl, cfg.policy.target);
        if (cfg.policy.spacing) wp.spacing = *cfg.policy.spacing;
        if (cfg.policy.settle_radius) wp.settle_radius = *cfg.policy.settle_radius;
        if (cfg.policy.pass_radius) wp.pass_radius = *cfg.policy.pass_radius;
        if (cfg.policy.dwell) wp.dwell = *cfg.policy.dwell;
        if (cfg.policy.max_phase_duration) wp.max_phase_duration = *cfg.policy.max_phase_duration;
        policy = wp;
    }

    InfluenceA influence = linear_ramp_influence(params.a_inner, params.a_outer);
    return Scenario{params,
                    std::move(influence),
                    std::move(phi),
                    std::move(dl),
                    std::move(kernel),
                    std::move(history),
                    std::move(policy)};
}

ScenarioConfig fig1_config(double tau) {
    ScenarioConfig cfg;
    cfg.name = "fig1_tau" + std::to_string(tau);
    cfg.model = ModelKind::pointwise;
    cfg.params.n_agents = 50;
    cfg.params.dim = 1;
    cfg.params.gamma = 1.0;
    cfg.params.control_bound = 1.0;
    cfg.params.a_inner = 1.0;
    cfg.params.a_outer = 2.0;
    cfg.params.lipschitz_phi = cucker_smale_lipschitz();
    cfg.delay.kind = "constant";
    cfg.delay.tau = tau;
    cfg.policy.kind = "consensus";
    cfg.initial.kind = "section6";
    cfg.integrator.step = tau >= 10.0 ? 0.05 : 0.01;
    cfg.t_end = tau >= 10.0 ? 40.0 * tau : 60.0;
    return cfg;
}

ScenarioConfig fig2_config(double tau) {
    ScenarioConfig cfg = fig1_config(tau);
    cfg.name = "fig2_tau" + std::to_string(tau);
    cfg.policy.kind = "waypoint";
    cfg.policy.target = {4.0};
    cfg.t_end = 220.0;
    return cfg;
}

RunReport make_run_report(const ScenarioConfig& cfg, const Scenario& sc,
                          const IntegrationOutput& out) {
    const Trajectory& traj = out.trajectory;
    RunReport rep;
    rep.certificates = make_certificates(sc.params, sc.phi, sc.history, sc.delay,
                                         sc.kernel ? &*sc.kernel : nullptr);
    const std::size_t k0 = traj.index_at(0.0);
    const double R = rep.certificates.radius_R;
    const double consensus_threshold = 1e-3 * std::max(1.0, R);
    const double osc_tol = 1e-7 * std::max(1.0, R);
    double prev_d0 = 0.0;
    for (std::size_t k = k0; k < traj.size(); ++k) {
        const double t = traj.times()[k];
        const double v = d0(traj, t);
        rep.times.push_back(t);
        rep.d0_series.push_back(v);
        rep.control_norm_series.push_back(norm(traj.control_row(k)));
        if (!rep.consensus_time && v < consensus_threshold) rep.consensus_time = t;
        if (k > k0 && v > prev_d0 + osc_tol) rep.oscillatory = true;
        prev_d0 = v;
    }
    // Lyapunov series along the run whenever a feasible weight exists.
    if (rep.certificates.lyap_weight_interval) {
        const auto [lo, hi] = *rep.certificates.lyap_weight_interval;
        rep.lyapunov_weight = std::isfinite(hi) ? 0.5 * (lo + hi) : lo + 1.0;
        const double tau_max = sc.delay.tau_max();
        const auto budget = velocity_budget_series(traj);
        for (std::size_t k = k0; k < traj.size(); ++k) {
            const double t = traj.times()[k];
            if (t < tau_max - 1e-12) continue;
            rep.lyapunov_series.push_back(
                cfg.model == ModelKind::distributed
                    ? lyapunov_distributed(traj, budget, t, rep.lyapunov_weight, *sc.kernel)
                    : lyapunov_pointwise(traj, budget, t, rep.lyapunov_weight, tau_max));
        }
    }
    try {
        rep.fitted_rate = fit_decay_rate(rep.times, rep.d0_series, 0.5 * cfg.t_end, cfg.t_end);
        rep.rate_available = true;
    } catch (const std::domain_error&) {
        rep.rate_available = false;
    }
    if (out.final_controller_state) rep.waypoint_timed_out = out.final_controller_state->timed_out;
    rep.notes = out.diagnostics;
    return rep;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    IntegrationOutput out =
        integrate_with_log(cfg.model, sc.policy, sc.history, cfg.t_end, cfg.integrator, sc.params,
                           sc.influence, sc.phi, sc.delay, sc.kernel ? &*sc.kernel : nullptr);
    RunReport rep = make_run_report(cfg, sc, out);
    return RunResult{cfg, std::move(out.trajectory), std::move(rep),
                     std::move(out.waypoint_events)};
}

ScenarioConfig apply_axis(const ScenarioConfig& base, const std::string& axis, double value) {
    ScenarioConfig cfg = base;
    if (axis == "tau") {
        if (cfg.delay.kind != "constant")
            throw ConfigError("tau sweep requires a constant delay law");
        cfg.delay.tau = value;
    } else if (axis == "gamma") {
        cfg.params.gamma = value;
    } else if (axis == "M" || axis == "control_bound") {
        cfg.params.control_bound = value;
    } else if (axis == "step") {
        cfg.integrator.step = value;
    } else if (axis == "B" || axis == "b_total") {
        if (!cfg.kernel) throw ConfigError("B sweep requires a kernel");
        cfg.kernel->total_mass = value;
    } else {
        throw ConfigError("unknown sweep axis: " + axis + " (tau, gamma, M, step, B)");
    }
    cfg.name = base.name + "_" + axis + std::to_string(value);
    return cfg;
}

std::vector<RunResult> run_sweep(const ScenarioConfig& base, const std::string& axis,
                                 const std::vector<double>& values) {
    std::vector<std::future<RunResult>> jobs;
    jobs.reserve(values.size());
    for (double v : values) {
        ScenarioConfig cfg = apply_axis(base, axis, v);
        jobs.push_back(std::async(std::launch::async,
                                  [cfg = std::move(cfg)]() { return run_scenario(cfg); }));
    }
    std::vector<RunResult> results;
    results.reserve(values.size());
    for (auto& job : jobs) results.push_back(job.get());
    return results;
}

Certificates emit_certificates(const ScenarioConfig& cfg) {
    const Scenario sc = build_scenario(cfg);
    return make_certificates(sc.params, sc.phi, sc.history, sc.delay,
                             sc.kernel ? &*sc.kernel : nullptr);
}

namespace {

std::string fmt15(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

}  // namespace

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    const int d = traj.dim();
    os << "t";
    auto col = [&](const std::string& base) {
        if (d == 1) {
            os << "," << base;
        } else {
            for (int q = 0; q < d; ++q) os << "," << base << "_" << q;
        }
    };
    col("u");
    for (int i = 0; i <= traj.n_followers(); ++i) col("x" + std::to_string(i));
    os << "\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        os << fmt15(traj.times()[k]);
        for (double v : traj.control_row(k)) os << "," << fmt15(v);
        for (double v : traj.state_row(k)) os << "," << fmt15(v);
        os << "\n";
    }
}

void print_certificates(const Certificates& c, double tau_max, std::ostream& os) {
    os << "radius_R: " << fmt15(c.radius_R) << "\n";
    os << "radius_R_star: " << fmt15(c.radius_R_star) << "\n";
    os << "r_gamma: " << fmt15(c.r_gamma) << "\n";
    os << "tau_max: " << fmt15(tau_max) << "\n";
    os << "tau_bound_pointwise: " << fmt15(c.tau_bound_pointwise) << "\n";
    os << "margin_tau_pointwise: " << fmt15(c.margin_tau_pointwise) << "\n";
    if (c.tau_bound_distributed) {
        os << "tau_bound_distributed: " << fmt15(*c.tau_bound_distributed) << "\n";
        os << "margin_tau_distributed: " << fmt15(*c.margin_tau_distributed) << "\n";
    }
    os << "halanay_ok: " << (c.halanay_ok ? "true" : "false") << "\n";
    os << "halanay_margin: " << fmt15(c.halanay_margin) << "\n";
    if (c.lyap_weight_interval) {
        os << "lyapunov_weight_lo: " << fmt15(c.lyap_weight_interval->first) << "\n";
        os << "lyapunov_weight_hi: " << fmt15(c.lyap_weight_interval->second) << "\n";
    } else {
        os << "lyapunov_weight_interval: empty\n";
    }
}

void write_report_text(const RunResult& result, std::ostream& os) {
    os << "name: " << result.config.name << "\n";
    os << "model: " << (result.config.model == ModelKind::pointwise ? "pointwise" : "distributed")
       << "\n";
    os << "t_end: " << fmt15(result.config.t_end) << "\n";
    os << "step: " << fmt15(result.config.integrator.step) << "\n";
    const Scenario sc = build_scenario(result.config);
    print_certificates(result.report.certificates, sc.delay.tau_max(), os);
    const auto& rep = result.report;
    os << "final_d0: " << (rep.d0_series.empty() ? "n/a" : fmt15(rep.d0_series.back())) << "\n";
    os << "consensus_time: "
       << (rep.consensus_time ? fmt15(*rep.consensus_time) : std::string("n/a")) << "\n";
    os << "oscillatory: " << (rep.oscillatory ? "true" : "false") << "\n";
    os << "fitted_rate: " << (rep.rate_available ? fmt15(rep.fitted_rate) : std::string("n/a"))
       << "\n";
    if (!rep.lyapunov_series.empty())
        os << "lyapunov_weight: " << fmt15(rep.lyapunov_weight) << "\n";
    os << "waypoint_timed_out: " << (rep.waypoint_timed_out ? "true" : "false") << "\n";
    for (const auto& ev : result.waypoint_events)
        os << "waypoint_event: t=" << fmt15(ev.t) << " phase=" << to_string(ev.phase)
           << " index=" << ev.waypoint_index << "\n";
    for (const auto& n : rep.notes) os << "note: " << n << "\n";
}

void write_outputs(const RunResult& result, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + result.config.name;
    write_trajectory_csv(result.trajectory, base + "_trajectory.csv");
    std::ofstream rep(base + "_report.txt", std::ios::binary);
    if (!rep) throw ConfigError("cannot open output file: " + base + "_report.txt");
    write_report_text(result, rep);
}

}  // namespace hkctrl
