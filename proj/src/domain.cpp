#include "hkctrl/domain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hkctrl {

namespace {

// Composite trapezoid of f over [a, b] with n nodes (n >= 2).
double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
    if (b <= a) return 0.0;
    const double h = (b - a) / (n - 1);
    double sum = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n - 1; ++i) sum += f(a + i * h);
    return sum * h;
}

}  // namespace

void ModelParams::validate() const {
    if (n_agents < 1) throw ConfigError("n_agents must be >= 1");
    if (dim < 1) throw ConfigError("dim must be >= 1");
    if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
    if (!(control_bound > 0.0)) throw ConfigError("control_bound must be positive");
    if (!(a_inner > 0.0)) throw ConfigError("a_inner must be positive");
    if (!(a_outer > a_inner)) throw ConfigError("a_outer must exceed a_inner");
    if (!(lipschitz_phi > 0.0)) throw ConfigError("lipschitz_phi must be positive");
}

InfluenceA::InfluenceA(double a_inner, double a_outer, std::function<double(double)> profile)
    : inner_(a_inner), outer_(a_outer), profile_(std::move(profile)) {
    if (!(a_inner > 0.0) || !(a_outer > a_inner))
        throw ConfigError("influence band requires 0 < a_inner < a_outer");
    // Sampled validation: plateau values, monotonicity, continuity.
    const int n = 10000;
    const double s_max = 1.25 * outer_;
    double prev = profile_(0.0);
    if (prev != 1.0) throw ConfigError("influence a must be exactly 1 at s = 0");
    for (int i = 1; i <= n; ++i) {
        const double s = s_max * i / n;
        const double v = profile_(s);
        if (v < 0.0 || v > 1.0) throw ConfigError("influence a must map into [0, 1]");
        if (v > prev + 1e-12) throw ConfigError("influence a must be non-increasing");
        if (std::abs(v - prev) > 0.02)
            throw ConfigError("influence a must be continuous");
        if (s <= inner_ && v != 1.0) throw ConfigError("influence a must be 1 on [0, a_inner]");
        if (s >= outer_ && v != 0.0) throw ConfigError("influence a must vanish beyond a_outer");
        prev = v;
    }
}

LeaderInfluencePhi::LeaderInfluencePhi(std::function<double(double)> profile, double lipschitz,
                                       double check_horizon)
    : profile_(std::move(profile)), lipschitz_(lipschitz) {
    if (!(lipschitz > 0.0)) throw ConfigError("phi Lipschitz constant must be positive");
    if (std::abs(profile_(0.0) - 1.0) > 1e-12) throw ConfigError("phi(0) must equal 1");
    const int n = 10000;
    const double h = check_horizon / n;
    double prev = profile_(0.0);
    for (int i = 1; i <= n; ++i) {
        const double s = i * h;
        const double v = profile_(s);
        if (!(v > 0.0)) throw ConfigError("phi must be strictly positive");
        if (v > prev + 1e-12) throw ConfigError("phi must be non-increasing");
        if (std::abs(v - prev) > lipschitz_ * h + 1e-9)
            throw ConfigError("phi violates the declared Lipschitz constant");
        prev = v;
    }
}

DelayLaw::DelayLaw(std::function<double(double)> tau_of_t, double tau_min, double tau_max,
                   double check_horizon)
    : tau_of_t_(std::move(tau_of_t)), tau_min_(tau_min), tau_max_(tau_max) {
    if (tau_min < 0.0 || tau_max < tau_min || !(tau_max > 0.0))
        throw ConfigError("delay bounds require 0 <= tau_min <= tau_max, tau_max > 0");
    const int n = 4000;
    const double h = check_horizon / n;
    double prev = tau_of_t_(0.0);
    for (int i = 0; i <= n; ++i) {
        const double t = i * h;
        const double v = (i == 0) ? prev : tau_of_t_(t);
        if (v < tau_min - 1e-12 || v > tau_max + 1e-12)
            throw ConfigError("tau(t) leaves [tau_min, tau_max] on the checked horizon");
        if (std::abs(v - prev) > 20.0 * h + 1e-9)
            throw ConfigError("tau(t) is not continuous on the checked horizon");
        prev = v;
    }
}

DelayLaw DelayLaw::constant(double tau) {
    return DelayLaw([tau](double) { return tau; }, tau, tau);
}

DelayLaw DelayLaw::sinusoidal(double base, double amplitude, double omega) {
    if (amplitude < 0.0 || base - amplitude < 0.0)
        throw ConfigError("sinusoidal delay requires base >= amplitude >= 0");
    return DelayLaw([=](double t) { return base + amplitude * std::sin(omega * t); },
                    base - amplitude, base + amplitude);
}

DelayLaw DelayLaw::table(std::vector<double> times, std::vector<double> values) {
    if (times.size() != values.size() || times.size() < 2)
        throw ConfigError("delay table needs matching times/values with >= 2 samples");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ConfigError("delay table times must increase");
    const double lo = *std::min_element(values.begin(), values.end());
    const double hi = *std::max_element(values.begin(), values.end());
    auto fn = [ts = std::move(times), vs = std::move(values)](double t) {
        if (t <= ts.front()) return vs.front();
        if (t >= ts.back()) return vs.back();
        auto it = std::upper_bound(ts.begin(), ts.end(), t);
        const std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
        const double w = (t - ts[k]) / (ts[k + 1] - ts[k]);
        return vs[k] + w * (vs[k + 1] - vs[k]);
    };
    return DelayLaw(std::move(fn), lo, hi);
}

Kernel::Kernel(std::function<double(double)> beta, double domain_end)
    : beta_(std::move(beta)), domain_end_(domain_end) {
    if (!(domain_end > 0.0)) throw ConfigError("kernel domain must have positive length");
    for (int i = 0; i <= 4096; ++i) {
        if (beta_(domain_end_ * i / 4096.0) < 0.0)
            throw ConfigError("kernel weight must be non-negative");
    }
    b_total_ = trapezoid(beta_, 0.0, domain_end_, 4097);
    if (!(b_total_ > 0.0)) throw ConfigError("kernel must have positive total mass");
}

Kernel Kernel::uniform(double domain_end, double height) {
    if (!(height > 0.0)) throw ConfigError("uniform kernel height must be positive");
    return Kernel([height](double) { return height; }, domain_end);
}

Kernel Kernel::hat(double domain_end, double center, double width) {
    if (!(width > 0.0)) throw ConfigError("hat kernel width must be positive");
    const double half = 0.5 * width;
    const double peak = 2.0 / width;  // unit mass before clipping
    return Kernel(
        [center, half, peak](double s) {
            const double w = 1.0 - std::abs(s - center) / half;
            return w > 0.0 ? peak * w : 0.0;
        },
        domain_end);
}

Kernel Kernel::table(std::vector<double> s, std::vector<double> beta) {
    if (s.size() != beta.size() || s.size() < 2)
        throw ConfigError("kernel table needs matching abscissae/values with >= 2 samples");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1])) throw ConfigError("kernel table abscissae must increase");
    const double end = s.back();
    auto fn = [ss = std::move(s), vs = std::move(beta)](double x) {
        if (x <= ss.front()) return vs.front();
        if (x >= ss.back()) return vs.back();
        auto it = std::upper_bound(ss.begin(), ss.end(), x);
        const std::size_t k = static_cast<std::size_t>(it - ss.begin()) - 1;
        const double w = (x - ss[k]) / (ss[k + 1] - ss[k]);
        return vs[k] + w * (vs[k + 1] - vs[k]);
    };
    return Kernel(std::move(fn), end);
}

Kernel Kernel::with_total_mass(double mass) const {
    if (!(mass > 0.0)) throw ConfigError("kernel mass must be positive");
    const double c = mass / b_total_;
    auto base = beta_;
    return Kernel([base, c](double s) { return c * base(s); }, domain_end_);
}

InfluenceA linear_ramp_influence(double inner, double outer) {
    return InfluenceA(inner, outer, [inner, outer](double s) {
        if (s <= inner) return 1.0;
        if (s >= outer) return 0.0;
        return (outer - s) / (outer - inner);
    });
}

double cucker_smale_lipschitz() {
    return 1.5 * std::pow(0.8, 2.5);  // max of 3s(1+s^2)^(-5/2), at s = 1/2
}

LeaderInfluencePhi cucker_smale_phi() {
    return LeaderInfluencePhi([](double s) { return std::pow(1.0 + s * s, -1.5); },
                              cucker_smale_lipschitz());
}

double eval_influence_a(const InfluenceA& f, double s) {
    if (s < 0.0) throw std::domain_error("influence a is defined for s >= 0");
    return f(s);
}

double eval_influence_phi(const LeaderInfluencePhi& f, double s) {
    if (s < 0.0) throw std::domain_error("phi is defined for s >= 0");
    return f(s);
}

double eval_h(const Kernel& k, const DelayLaw& dl, double t, int n_points) {
    if (t < 0.0) throw std::domain_error("h(t) is defined for t >= 0");
    const double tau = dl(t);
    const double h = trapezoid([&k](double s) { return k(s); }, 0.0, tau, n_points);
    if (!(h > 0.0)) {
        std::ostringstream os;
        os << "kernel mass over [0, tau(t)] is not positive at t = " << t;
        throw KernelViolation(os.str());
    }
    return h;
}

void check_kernel_condition(const Kernel& k, const DelayLaw& dl) {
    const double m = trapezoid([&k](double s) { return k(s); }, 0.0, dl.tau_min(), 2049);
    if (!(m > 0.0))
        throw KernelViolation("kernel carries no mass on [0, tau_min]");
}

}  // namespace hkctrl
