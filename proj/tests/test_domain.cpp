#include <cmath>

#include "doctest.h"
#include "hkctrl/domain.hpp"

using namespace hkctrl;

TEST_CASE("linear ramp influence matches the piecewise definition") {
    const InfluenceA a = linear_ramp_influence(1.0, 2.0);
    CHECK(eval_influence_a(a, 0.5) == 1.0);
    CHECK(eval_influence_a(a, 1.5) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eval_influence_a(a, 3.0) == 0.0);
    CHECK(eval_influence_a(a, 1.0) == 1.0);
    CHECK(eval_influence_a(a, 2.0) == 0.0);
    CHECK_THROWS_AS(eval_influence_a(a, -0.1), std::domain_error);
}

TEST_CASE("influence profile invariants hold on a dense sample") {
    const InfluenceA a = linear_ramp_influence(0.7, 1.9);
    double prev = 1.0;
    for (int i = 0; i <= 10000; ++i) {
        const double s = 2.5 * i / 10000.0;
        const double v = a(s);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        if (s <= 0.7) CHECK(v == 1.0);
        if (s >= 1.9) CHECK(v == 0.0);
        prev = v;
    }
}

TEST_CASE("invalid influence profiles are rejected") {
    CHECK_THROWS_AS(InfluenceA(1.0, 2.0, [](double) { return 0.5; }), ConfigError);
    CHECK_THROWS_AS(InfluenceA(1.0, 2.0,
                               [](double s) { return s < 1.5 ? 1.0 : 0.0; }),
                    ConfigError);  // discontinuous at 1.5
    CHECK_THROWS_AS(InfluenceA(2.0, 1.0, [](double) { return 1.0; }), ConfigError);
}

TEST_CASE("cucker-smale phi values") {
    const LeaderInfluencePhi phi = cucker_smale_phi();
    CHECK(eval_influence_phi(phi, 0.0) == 1.0);
    CHECK(eval_influence_phi(phi, std::sqrt(3.0)) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(eval_influence_phi(phi, 2.0) ==
          doctest::Approx(0.08944271909999159).epsilon(1e-14));
    CHECK_THROWS_AS(eval_influence_phi(phi, -1.0), std::domain_error);
}

TEST_CASE("phi Lipschitz constant is verified by sampling") {
    const LeaderInfluencePhi phi = cucker_smale_phi();
    const double L = phi.lipschitz();
    CHECK(L == doctest::Approx(0.8586501033599192).epsilon(1e-14));
    double prev = phi(0.0);
    for (int i = 1; i <= 10000; ++i) {
        const double s = 20.0 * i / 10000.0;
        const double v = phi(s);
        CHECK(std::abs(v - prev) <= L * (20.0 / 10000.0) + 1e-9);
        CHECK(v <= prev + 1e-15);
        CHECK(v > 0.0);
        prev = v;
    }
    // declaring a too-small constant must fail construction
    CHECK_THROWS_AS(LeaderInfluencePhi([](double s) { return std::pow(1.0 + s * s, -1.5); }, 0.5),
                    ConfigError);
}

TEST_CASE("delay laws expose verified bounds") {
    const DelayLaw c = DelayLaw::constant(1.0);
    CHECK(c(0.0) == 1.0);
    CHECK(c(37.5) == 1.0);
    CHECK(c.tau_min() == 1.0);
    CHECK(c.tau_max() == 1.0);

    const DelayLaw s = DelayLaw::sinusoidal(0.5, 0.25, 1.0);
    CHECK(s.tau_min() == doctest::Approx(0.25));
    CHECK(s.tau_max() == doctest::Approx(0.75));
    CHECK(s(0.0) == doctest::Approx(0.5));

    const DelayLaw t = DelayLaw::table({0.0, 1.0, 2.0}, {0.2, 0.4, 0.3});
    CHECK(t(0.5) == doctest::Approx(0.3));
    CHECK(t(10.0) == doctest::Approx(0.3));
    CHECK(t.tau_min() == doctest::Approx(0.2));

    CHECK_THROWS_AS(DelayLaw::sinusoidal(0.2, 0.5, 1.0), ConfigError);
}

TEST_CASE("kernel mass and h(t)") {
    const DelayLaw one = DelayLaw::constant(1.0);
    const Kernel flat = Kernel::uniform(1.0);
    CHECK(flat.b_total() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eval_h(flat, one, 0.0) == doctest::Approx(1.0).epsilon(1e-12));

    const Kernel linear = Kernel([](double s) { return 2.0 * s; }, 1.0);
    CHECK(eval_h(linear, one, 3.0) == doctest::Approx(1.0).epsilon(1e-9));

    const DelayLaw wobble = DelayLaw::sinusoidal(0.5, 0.25, 1.0);
    CHECK(eval_h(Kernel::uniform(0.75), wobble, 0.0) == doctest::Approx(0.5).epsilon(1e-9));

    CHECK_THROWS_AS(Kernel([](double) { return 0.0; }, 1.0), ConfigError);
}

TEST_CASE("kernel admissibility against the delay floor") {
    // mass concentrated past tau_min violates the window condition
    const Kernel late = Kernel::hat(1.0, 0.95, 0.05);
    const DelayLaw dl = DelayLaw::table({0.0, 1.0}, {0.3, 1.0});
    CHECK_THROWS_AS(check_kernel_condition(late, dl), KernelViolation);
    CHECK_THROWS_AS(eval_h(late, DelayLaw::table({0.0, 1.0}, {0.3, 0.3}), 0.0), KernelViolation);

    const Kernel early = Kernel::hat(1.0, 0.2, 0.1);
    CHECK_NOTHROW(check_kernel_condition(early, dl));
}

TEST_CASE("model params validation") {
    ModelParams p;
    p.n_agents = 50;
    p.dim = 1;
    CHECK_NOTHROW(p.validate());
    p.gamma = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.gamma = 1.0;
    p.a_outer = 0.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("rescaled kernels keep their shape") {
    const Kernel flat = Kernel::uniform(2.0);
    const Kernel scaled = flat.with_total_mass(0.5);
    CHECK(scaled.b_total() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(scaled(1.0) == doctest::Approx(0.25).epsilon(1e-12));
}
