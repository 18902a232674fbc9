#include <cmath>
#include <cstring>

#include "doctest.h"
#include "hkctrl/dde_engine.hpp"

using namespace hkctrl;

namespace {

ModelParams base_params(int n, int d) {
    ModelParams p;
    p.n_agents = n;
    p.dim = d;
    p.gamma = 1.0;
    p.control_bound = 1.0;
    p.a_inner = 1.0;
    p.a_outer = 2.0;
    p.lipschitz_phi = cucker_smale_lipschitz();
    return p;
}

// tau(t) = 0 but declared with a positive history span.
DelayLaw zero_delay(double tau_max) {
    return DelayLaw([](double) { return 0.0; }, 0.0, tau_max);
}

Trajectory from_history(const History& h, InterpOrder order = InterpOrder::linear) {
    Trajectory traj(h.n_followers(), h.dim(), order);
    const Vec u(h.dim(), 0.0);
    const std::vector<double> zero(h.row(0).size(), 0.0);
    for (std::size_t k = 0; k < h.size(); ++k)
        traj.append(h.times()[k], h.row(k), zero, u);
    return traj;
}

}  // namespace

TEST_CASE("pointwise rhs vanishes at a common rest point") {
    const auto params = base_params(3, 2);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(0.5);
    const History h = History::constant({0.7, -0.2}, {{0.7, -0.2}, {0.7, -0.2}, {0.7, -0.2}}, 0.5);
    const auto traj = from_history(h);
    const Vec u(2, 0.0);
    const auto f = rhs_pointwise(traj, 0.0, params, a, phi, dl, u);
    for (double v : f) CHECK(v == 0.0);
}

TEST_CASE("pointwise rhs single-agent leader term") {
    const auto params = base_params(1, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const History h = History::constant({1.0}, {{0.0}}, 1.0);
    const auto traj = from_history(h);
    const auto f = rhs_pointwise(traj, 0.0, params, a, phi, zero_delay(1.0), Vec{0.0});
    CHECK(f[0] == 0.0);
    CHECK(f[1] == doctest::Approx(0.35355339059327376).epsilon(1e-14));
}

TEST_CASE("pointwise rhs cut-off kills distant peers") {
    const auto params = base_params(2, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const History h = History::constant({0.0}, {{0.0}, {3.0}}, 1.0);
    const auto traj = from_history(h);
    const auto f = rhs_pointwise(traj, 0.0, params, a, phi, zero_delay(1.0), Vec{0.0});
    CHECK(f[1] == 0.0);  // peer at distance 3 ignored, leader term vanishes at 0
    const double phi3 = std::pow(10.0, -1.5);
    CHECK(f[2] == doctest::Approx(-3.0 * phi3).epsilon(1e-14));
}

TEST_CASE("distributed rhs vanishes at a common rest point") {
    const auto params = base_params(2, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(1.0);
    const Kernel k = Kernel::uniform(1.0);
    const History h = History::constant({0.4}, {{0.4}, {0.4}}, 1.0);
    const auto traj = from_history(h);
    IntegratorConfig cfg;
    const auto f = rhs_distributed(traj, 0.0, params, a, phi, dl, k, Vec{0.0}, cfg);
    for (double v : f) CHECK(v == 0.0);
}

TEST_CASE("distributed rhs equals pointwise on constant histories") {
    const auto params = base_params(1, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(1.0);
    const Kernel k = Kernel::uniform(1.0);
    const History h = History::constant({1.0}, {{0.0}}, 1.0);
    const auto traj = from_history(h);
    IntegratorConfig cfg;
    const auto fd = rhs_distributed(traj, 0.0, params, a, phi, dl, k, Vec{0.0}, cfg);
    CHECK(fd[1] == doctest::Approx(0.35355339059327376).epsilon(1e-12));
}

TEST_CASE("narrow hat kernels recover the pointwise rhs on linear trajectories") {
    const auto params = base_params(2, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    // linear motions staying inside the a == 1 plateau
    Trajectory traj(2, 1, InterpOrder::linear);
    const Vec u(1, 0.0);
    for (int k = 0; k <= 200; ++k) {
        const double t = -1.0 + 2.0 * k / 200.0;
        const double x[3] = {0.05 * t, 0.1 + 0.02 * t, -0.1 - 0.03 * t};
        const double m[3] = {0.05, 0.02, -0.03};
        traj.append(t, x, m, u);
    }
    IntegratorConfig cfg;
    cfg.quad_points_min = 2001;
    const double t_eval = 0.9;
    const DelayLaw dl_point = DelayLaw::constant(0.46);
    const auto fp = rhs_pointwise(traj, t_eval, params, a, phi, dl_point, u);
    const DelayLaw dl_dist = DelayLaw::constant(0.5);
    const Kernel hat = Kernel::hat(0.5, 0.46, 0.04);
    const auto fd = rhs_distributed(traj, t_eval, params, a, phi, dl_dist, hat, u, cfg);
    for (std::size_t j = 0; j < fp.size(); ++j)
        CHECK(fd[j] == doctest::Approx(fp[j]).epsilon(1e-5));
}

TEST_CASE("integrate keeps an equilibrium exactly") {
    const auto params = base_params(3, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(0.5);
    const History h = History::constant({0.25}, {{0.25}, {0.25}, {0.25}}, 0.5);
    IntegratorConfig cfg;
    cfg.step = 0.05;
    const auto traj =
        integrate(ModelKind::pointwise, ZeroPolicy{}, h, 2.0, cfg, params, a, phi, dl);
    for (std::size_t k = 0; k < traj.size(); ++k)
        for (double v : traj.state_row(k)) CHECK(v == 0.25);
}

TEST_CASE("integration is deterministic") {
    const auto params = base_params(4, 2);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(0.3);
    const History h =
        History::constant({0.0, 0.0}, {{0.5, 0.1}, {-0.4, 0.2}, {0.3, -0.3}, {0.1, 0.4}}, 0.3);
    IntegratorConfig cfg;
    cfg.step = 0.02;
    const auto t1 = integrate(ModelKind::pointwise, ConsensusPointwisePolicy{}, h, 3.0, cfg,
                              params, a, phi, dl);
    const auto t2 = integrate(ModelKind::pointwise, ConsensusPointwisePolicy{}, h, 3.0, cfg,
                              params, a, phi, dl);
    REQUIRE(t1.raw_states().size() == t2.raw_states().size());
    CHECK(std::memcmp(t1.raw_states().data(), t2.raw_states().data(),
                      t1.raw_states().size() * sizeof(double)) == 0);
}

TEST_CASE("self-convergence on a smooth scenario") {
    const auto params = base_params(3, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(0.4);
    const History h = History::constant({0.3}, {{0.1}, {-0.2}, {0.25}}, 0.4);

    auto terminal = [&](double step) {
        IntegratorConfig cfg;
        cfg.step = step;
        const auto traj =
            integrate(ModelKind::pointwise, ZeroPolicy{}, h, 2.0, cfg, params, a, phi, dl);
        return std::vector<double>(traj.state_row(traj.size() - 1).begin(),
                                   traj.state_row(traj.size() - 1).end());
    };
    const auto ref = terminal(0.005);
    auto err = [&](double step) {
        const auto v = terminal(step);
        double e = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) e = std::max(e, std::abs(v[j] - ref[j]));
        return e;
    };
    const double e1 = err(0.04);
    const double e2 = err(0.02);
    const double e3 = err(0.01);
    CHECK(e1 / e2 >= 3.5);
    CHECK(e2 / e3 >= 3.5);
}

TEST_CASE("distributed integration rejects incompatible steps and delays") {
    const auto params = base_params(2, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const History h = History::constant({0.0}, {{0.2}, {-0.2}}, 0.4);
    const Kernel k = Kernel::uniform(0.4);
    IntegratorConfig cfg;
    cfg.step = 0.3;  // > tau_min / 2
    CHECK_THROWS_AS(integrate(ModelKind::distributed, ZeroPolicy{}, h, 1.0, cfg, params, a, phi,
                              DelayLaw::constant(0.4), &k),
                    StepSizeError);
    cfg.step = 0.1;
    CHECK_THROWS_AS(integrate(ModelKind::distributed, ZeroPolicy{}, h, 1.0, cfg, params, a, phi,
                              zero_delay(0.4), &k),
                    ConfigError);
    CHECK_THROWS_AS(integrate(ModelKind::distributed, ZeroPolicy{}, h, 1.0, cfg, params, a, phi,
                              DelayLaw::constant(0.4), nullptr),
                    ConfigError);
}

TEST_CASE("vanishing pointwise delay integrates via segment extrapolation") {
    const auto params = base_params(1, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const History h = History::constant({1.0}, {{0.0}}, 0.5);
    IntegratorConfig cfg;
    cfg.step = 0.01;
    const auto traj = integrate(ModelKind::pointwise, ZeroPolicy{}, h, 3.0, cfg, params, a, phi,
                                zero_delay(0.5));
    // follower is pulled monotonically toward the fixed leader
    double prev = 0.0;
    for (double t = 0.0; t <= 3.0; t += 0.5) {
        const double x1 = traj.state(t)[1];
        CHECK(x1 >= prev - 1e-12);
        CHECK(x1 <= 1.0);
        prev = x1;
    }
    CHECK(traj.state(3.0)[1] > 0.5);
}

TEST_CASE("sampled histories are reproduced at their sample points") {
    const auto params = base_params(1, 1);
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const DelayLaw dl = DelayLaw::constant(0.5);
    const History h =
        History::sampled({-0.5, -0.137, 0.0}, {{1.0, 0.3}, {0.8, -0.2}, {1.0, 0.1}}, 1);
    IntegratorConfig cfg;
    cfg.step = 0.1;
    const auto traj =
        integrate(ModelKind::pointwise, ZeroPolicy{}, h, 0.5, cfg, params, a, phi, dl);
    CHECK(traj.state(-0.137)[0] == 0.8);
    CHECK(traj.state(-0.137)[1] == -0.2);
    CHECK(traj.state(-0.5)[0] == 1.0);
    CHECK(traj.state(0.0)[1] == 0.1);
}
