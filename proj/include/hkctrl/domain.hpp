#pragma once

#include <functional>
#include <optional>
#include <string>

#include "hkctrl/errors.hpp"
#include "hkctrl/vec_ops.hpp"

namespace hkctrl {

/// Scalar parameters of the leader-follower opinion model.
///
/// N followers plus one leader evolve in R^dim. gamma scales the leader's
/// pull on the followers, control_bound (M) caps the leader control,
/// a_inner/a_outer (delta, r) delimit the peer cut-off band and
/// lipschitz_phi (L) is a verified Lipschitz constant of the leader
/// influence function.
struct ModelParams {
    int n_agents = 1;          // N, followers only
    int dim = 1;               // d
    double gamma = 1.0;        // leader strength
    double control_bound = 1.0;  // M
    double a_inner = 1.0;      // delta
    double a_outer = 2.0;      // r
    double lipschitz_phi = 1.0;  // L

    void validate() const;
};

/// Peer influence weight a(s): continuous, non-increasing, identically 1 on
/// [0, a_inner] and identically 0 on [a_outer, inf). Any profile satisfying
/// those constraints is accepted; the default is the linear ramp.
class InfluenceA {
public:
    InfluenceA(double a_inner, double a_outer, std::function<double(double)> profile);

    double a_inner() const { return inner_; }
    double a_outer() const { return outer_; }
    double operator()(double s) const { return profile_(s); }

private:
    double inner_;
    double outer_;
    std::function<double(double)> profile_;
};

/// Leader influence weight phi(s): positive, non-increasing, phi(0) = 1,
/// Lipschitz with verified constant `lipschitz`.
class LeaderInfluencePhi {
public:
    LeaderInfluencePhi(std::function<double(double)> profile, double lipschitz,
                       double check_horizon = 20.0);

    double lipschitz() const { return lipschitz_; }
    double operator()(double s) const { return profile_(s); }

private:
    std::function<double(double)> profile_;
    double lipschitz_;
};

/// Time-dependent delay tau(t) with verified bounds tau_min <= tau(t) <= tau_max.
/// The distributed model additionally requires tau_min > 0.
class DelayLaw {
public:
    DelayLaw(std::function<double(double)> tau_of_t, double tau_min, double tau_max,
             double check_horizon = 200.0);

    static DelayLaw constant(double tau);
    static DelayLaw sinusoidal(double base, double amplitude, double omega);
    /// Piecewise-linear tau(t) through (times[k], values[k]); clamped outside.
    static DelayLaw table(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const { return tau_of_t_(t); }
    double tau_min() const { return tau_min_; }
    double tau_max() const { return tau_max_; }

private:
    std::function<double(double)> tau_of_t_;
    double tau_min_;
    double tau_max_;
};

/// Distributed-delay weight beta on [0, tau_max] with total mass
/// b_total = integral of beta over [0, tau_max] (computed by quadrature at
/// construction; must be positive).
class Kernel {
public:
    Kernel(std::function<double(double)> beta, double domain_end);

    static Kernel uniform(double domain_end, double height = 1.0);
    /// Triangular bump of base `width` centered at `center`, unit mass before
    /// clipping to [0, domain_end].
    static Kernel hat(double domain_end, double center, double width);
    static Kernel table(std::vector<double> s, std::vector<double> beta);

    double operator()(double s) const { return beta_(s); }
    double b_total() const { return b_total_; }
    double domain_end() const { return domain_end_; }
    /// Returns a copy rescaled so that b_total equals `mass`.
    Kernel with_total_mass(double mass) const;

private:
    std::function<double(double)> beta_;
    double domain_end_;
    double b_total_;
};

// ---- factories for the concrete profiles used by the built-in scenarios ----

/// 1 on [0, inner], (outer-s)/(outer-inner) in between, 0 beyond.
InfluenceA linear_ramp_influence(double inner, double outer);

/// phi(s) = (1 + s^2)^(-3/2), the Cucker-Smale weight, with its exact
/// Lipschitz constant 3/2 * (4/5)^(5/2).
LeaderInfluencePhi cucker_smale_phi();

/// Exact Lipschitz bound of the Cucker-Smale weight (attained at s = 1/2).
double cucker_smale_lipschitz();

// ---- operations ----

double eval_influence_a(const InfluenceA& f, double s);
double eval_influence_phi(const LeaderInfluencePhi& f, double s);

/// h(t) = integral of beta over [0, tau(t)] by composite trapezoid with
/// n_points nodes. Throws KernelViolation if the result is not positive.
double eval_h(const Kernel& k, const DelayLaw& dl, double t, int n_points = 2049);

/// Verifies integral of beta over [0, tau_min] > 0 (the admissibility
/// condition pairing a kernel with a delay law). Throws KernelViolation.
void check_kernel_condition(const Kernel& k, const DelayLaw& dl);

}  // namespace hkctrl
