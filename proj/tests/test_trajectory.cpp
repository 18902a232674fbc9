#include <cmath>

#include "doctest.h"
#include "hkctrl/trajectory.hpp"

using namespace hkctrl;

namespace {

// One follower, one leader, d = 1; states x0(t) = f(t), x1(t) = g(t).
Trajectory make_traj(InterpOrder order, double t0, double t1, int n,
                     double (*f)(double), double (*fd)(double)) {
    Trajectory traj(1, 1, order);
    const double u[1] = {0.0};
    for (int k = 0; k <= n; ++k) {
        const double t = t0 + (t1 - t0) * k / n;
        const double x[2] = {f(t), f(t) + 1.0};
        const double m[2] = {fd(t), fd(t)};
        traj.append(t, x, m, u);
    }
    return traj;
}

double cubic(double t) { return ((2.0 * t - 3.0) * t + 5.0) * t - 7.0; }
double cubic_d(double t) { return (6.0 * t - 6.0) * t + 5.0; }

}  // namespace

TEST_CASE("lookup is exact at grid points") {
    auto traj = make_traj(InterpOrder::cubic_hermite, 0.0, 1.0, 10, cubic, cubic_d);
    for (double t : traj.times()) {
        const auto v = traj.state(t);
        CHECK(v[0] == cubic(t));
        CHECK(v[1] == cubic(t) + 1.0);
    }
}

TEST_CASE("linear lookup midway is the arithmetic mean") {
    auto traj = make_traj(InterpOrder::linear, 0.0, 1.0, 4, cubic, cubic_d);
    const double mid = 0.125;
    const auto v = traj.state(mid);
    CHECK(v[0] == doctest::Approx(0.5 * (cubic(0.0) + cubic(0.25))).epsilon(1e-15));
}

TEST_CASE("cubic hermite reproduces cubic polynomials") {
    auto traj = make_traj(InterpOrder::cubic_hermite, 0.0, 2.0, 7, cubic, cubic_d);
    for (int i = 0; i <= 100; ++i) {
        const double t = 2.0 * i / 100.0;
        CHECK(traj.state(t)[0] == doctest::Approx(cubic(t)).epsilon(1e-12));
    }
}

TEST_CASE("out of range lookups throw") {
    auto traj = make_traj(InterpOrder::linear, -1.0, 1.0, 8, cubic, cubic_d);
    CHECK_THROWS_AS(traj.state(-1.5), HistoryUnderflow);
    CHECK_THROWS_AS(traj.state(1.5), HistoryUnderflow);
    traj.set_max_extrapolation(0.25);
    CHECK_NOTHROW(traj.state(1.2));
    CHECK_THROWS_AS(traj.state(1.3), HistoryUnderflow);
}

TEST_CASE("extrapolation continues the last segment") {
    auto traj = make_traj(InterpOrder::cubic_hermite, 0.0, 1.0, 4, cubic, cubic_d);
    traj.set_max_extrapolation(0.5);
    CHECK(traj.state(1.2)[0] == doctest::Approx(cubic(1.2)).epsilon(1e-12));
}

TEST_CASE("history region is interpolated linearly even in hermite mode") {
    Trajectory traj(1, 1, InterpOrder::cubic_hermite);
    const double u[1] = {0.0};
    // constant history with a deliberately wrong derivative at t = 0
    const double x[2] = {3.0, 3.0};
    const double m0[2] = {0.0, 0.0};
    const double m1[2] = {5.0, 5.0};
    traj.append(-1.0, x, m0, u);
    traj.append(0.0, x, m1, u);
    traj.set_history_boundary(0.0);
    CHECK(traj.state(-0.5)[0] == 3.0);
}

TEST_CASE("constant history reproduces its samples exactly") {
    const History h = History::constant({0.5}, {{1.0}, {-2.0}}, 2.0);
    CHECK(h.n_followers() == 2);
    CHECK(h.value(-2.0) == std::vector<double>{0.5, 1.0, -2.0});
    CHECK(h.value(-0.3) == std::vector<double>{0.5, 1.0, -2.0});
    CHECK_THROWS_AS(h.value(-2.5), HistoryUnderflow);
}

TEST_CASE("sampled history interpolates linearly and shifts exactly") {
    const History h = History::sampled({-1.0, -0.5, 0.0},
                                       {{0.0, 1.0}, {0.0, 2.0}, {0.0, 4.0}}, 1);
    CHECK(h.value(-0.5)[1] == 2.0);
    CHECK(h.value(-0.25)[1] == doctest::Approx(3.0).epsilon(1e-15));
    const History s = h.shifted({10.0});
    CHECK(s.value(-0.5)[1] == 12.0);
    CHECK(s.value(-0.5)[0] == 10.0);
}

TEST_CASE("trajectory rejects malformed appends") {
    Trajectory traj(1, 1, InterpOrder::linear);
    const double x[2] = {0.0, 0.0};
    const double u[1] = {0.0};
    traj.append(0.0, x, x, u);
    CHECK_THROWS_AS(traj.append(0.0, x, x, u), ConfigError);
    const double bad[1] = {0.0};
    CHECK_THROWS_AS(traj.append(1.0, bad, bad, u), ConfigError);
}
