#include "hkctrl/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace hkctrl {

std::pair<double, int> d0_with_argmax(const Trajectory& traj, double t) {
    const std::vector<double> row = traj.state(t);
    const auto leader = traj.agent(row, 0);
    double best = -1.0;
    int arg = 1;
    for (int i = 1; i <= traj.n_followers(); ++i) {
        const double di = dist(traj.agent(row, i), leader);
        if (di > best) {
            best = di;
            arg = i;
        }
    }
    return {best, arg};
}

double d0(const Trajectory& traj, double t) { return d0_with_argmax(traj, t).first; }

double radius_R(const History& history) {
    double r = 0.0;
    const int d = history.dim();
    for (std::size_t k = 0; k < history.size(); ++k) {
        const auto& row = history.row(k);
        for (std::size_t i = 0; i * d < row.size(); ++i)
            r = std::max(r, norm(std::span<const double>(row.data() + i * d, d)));
    }
    return r;
}

double radius_R_star(const History& history, double tau0) {
    const int d = history.dim();
    const int N = history.n_followers();
    std::vector<Vec> pts;
    auto push_row = [&](const std::vector<double>& row) {
        for (int i = 1; i <= N; ++i)
            pts.emplace_back(row.begin() + static_cast<std::size_t>(i) * d,
                             row.begin() + static_cast<std::size_t>(i + 1) * d);
    };
    const double lo = std::max(-tau0, history.start());
    push_row(history.value(lo));
    for (std::size_t k = 0; k < history.size(); ++k)
        if (history.times()[k] > lo + 1e-12) push_row(history.row(k));
    return smallest_enclosing_ball(pts, d).second;
}

double tau_bound_pointwise(const ModelParams& params, const LeaderInfluencePhi& phi, double R) {
    const double g = params.gamma;
    const double p = phi(2.0 * R);
    const double rg = g * params.lipschitz_phi * R + g + 1.0;
    return std::log1p(g * p / (g * (1.0 + 2.0 * g) * p + 4.0 * (1.0 + g) * rg));
}

double tau_bound_distributed(const ModelParams& params, const LeaderInfluencePhi& phi, double R,
                             const Kernel& k) {
    const double g = params.gamma;
    const double p = phi(2.0 * R);
    const double rg = g * params.lipschitz_phi * R + g + 1.0;
    const double B = k.b_total();
    return std::log1p(g * p / (4.0 * rg * B * (1.0 + g) + g * p * B * (1.0 + 2.0 * g)));
}

std::pair<bool, double> check_halanay(const ModelParams& params, const LeaderInfluencePhi& phi) {
    const double margin = phi(0.5 * params.a_inner) - 0.5 / params.gamma;
    return {margin > 0.0, margin};
}

std::optional<std::pair<double, double>> lyapunov_weight_interval_pointwise(
    const ModelParams& params, const LeaderInfluencePhi& phi, double R, double tau_max) {
    const double g = params.gamma;
    const double e = std::exp(-tau_max);
    const double denom_lo = e - (1.0 + 2.0 * g) * (1.0 - e);
    if (!(denom_lo > 0.0)) return std::nullopt;
    const double lo = (g * params.lipschitz_phi * R + g + 1.0) / denom_lo;
    const double hi = (1.0 - e) > 0.0
                          ? g * phi(2.0 * R) / (4.0 * (1.0 + g) * (1.0 - e))
                          : std::numeric_limits<double>::infinity();
    if (!(lo < hi)) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::optional<std::pair<double, double>> lyapunov_weight_interval_distributed(
    const ModelParams& params, const LeaderInfluencePhi& phi, double R, double tau_max,
    double b_total) {
    const double g = params.gamma;
    const double e = std::exp(-tau_max);
    const double denom_lo = e - b_total * (1.0 + 2.0 * g) * (1.0 - e);
    if (!(denom_lo > 0.0)) return std::nullopt;
    const double lo = (g * params.lipschitz_phi * R + g + 1.0) / denom_lo;
    const double hi = (1.0 - e) > 0.0
                          ? g * phi(2.0 * R) / (4.0 * b_total * (1.0 + g) * (1.0 - e))
                          : std::numeric_limits<double>::infinity();
    if (!(lo < hi)) return std::nullopt;
    return std::make_pair(lo, hi);
}

std::vector<double> velocity_budget_series(const Trajectory& traj) {
    std::vector<double> g(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto row = traj.deriv_row(k);
        double m = 0.0;
        for (int i = 1; i <= traj.n_followers(); ++i)
            m = std::max(m, norm(traj.agent(row, i)));
        g[k] = m + norm(traj.control_row(k));
    }
    return g;
}

namespace {

double pl_at(const std::vector<double>& times, const std::vector<double>& vals, double s) {
    auto it = std::upper_bound(times.begin(), times.end(), s);
    std::size_t k = (it == times.begin()) ? 0 : static_cast<std::size_t>(it - times.begin()) - 1;
    if (k + 1 >= times.size()) k = times.size() - 2;
    const double w = (s - times[k]) / (times[k + 1] - times[k]);
    return vals[k] + w * (vals[k + 1] - vals[k]);
}

// Window nodes [a, t]: the endpoints plus every grid point strictly inside,
// with the budget evaluated by its piecewise-linear interpolant.
struct WindowNodes {
    std::vector<double> s;
    std::vector<double> g;
};

WindowNodes window_nodes(const Trajectory& traj, const std::vector<double>& budget, double a,
                         double t) {
    const auto& times = traj.times();
    if (a < times.front() - 1e-9 || t > times.back() + 1e-9)
        throw std::domain_error("integration window outside the trajectory range");
    WindowNodes w;
    w.s.push_back(a);
    auto it = std::upper_bound(times.begin(), times.end(), a + 1e-12);
    for (std::size_t k = static_cast<std::size_t>(it - times.begin());
         k < times.size() && times[k] < t - 1e-12; ++k)
        w.s.push_back(times[k]);
    w.s.push_back(t);
    w.g.resize(w.s.size());
    for (std::size_t m = 0; m < w.s.size(); ++m) w.g[m] = pl_at(times, budget, w.s[m]);
    return w;
}

// G[m] = integral of the budget from s[m] to the window end (trapezoid).
std::vector<double> suffix_integrals(const WindowNodes& w) {
    std::vector<double> G(w.s.size(), 0.0);
    for (std::size_t m = w.s.size() - 1; m-- > 0;)
        G[m] = G[m + 1] + 0.5 * (w.g[m] + w.g[m + 1]) * (w.s[m + 1] - w.s[m]);
    return G;
}

}  // namespace

double sigma_tau(const Trajectory& traj, double t, double tau_max) {
    if (t < tau_max - 1e-9) throw std::domain_error("sigma_tau requires t >= tau_max");
    const auto budget = velocity_budget_series(traj);
    const auto w = window_nodes(traj, budget, t - tau_max, t);
    double I = 0.0;
    for (std::size_t m = 0; m + 1 < w.s.size(); ++m)
        I += 0.5 * (w.g[m] + w.g[m + 1]) * (w.s[m + 1] - w.s[m]);
    return I;
}

double lambda_tau(const Trajectory& traj, double t, const Kernel& k, const DelayLaw& dl) {
    const double tau_max = dl.tau_max();
    if (t < tau_max - 1e-9) throw std::domain_error("lambda_tau requires t >= tau_max");
    const auto budget = velocity_budget_series(traj);
    const auto w = window_nodes(traj, budget, t - tau_max, t);
    const auto G = suffix_integrals(w);
    double I = 0.0;
    for (std::size_t m = 0; m + 1 < w.s.size(); ++m) {
        const double f0 = k(t - w.s[m]) * G[m];
        const double f1 = k(t - w.s[m + 1]) * G[m + 1];
        I += 0.5 * (f0 + f1) * (w.s[m + 1] - w.s[m]);
    }
    return I / eval_h(k, dl, t);
}

double lyapunov_pointwise(const Trajectory& traj, double t, double beta_param, double tau_max) {
    return lyapunov_pointwise(traj, velocity_budget_series(traj), t, beta_param, tau_max);
}

double lyapunov_pointwise(const Trajectory& traj, const std::vector<double>& budget, double t,
                          double beta_param, double tau_max) {
    if (t < tau_max - 1e-9) throw std::domain_error("lyapunov_pointwise requires t >= tau_max");
    const auto w = window_nodes(traj, budget, t - tau_max, t);
    const auto G = suffix_integrals(w);
    double I = 0.0;
    for (std::size_t m = 0; m + 1 < w.s.size(); ++m) {
        const double f0 = std::exp(-(t - w.s[m])) * G[m];
        const double f1 = std::exp(-(t - w.s[m + 1])) * G[m + 1];
        I += 0.5 * (f0 + f1) * (w.s[m + 1] - w.s[m]);
    }
    return d0(traj, t) + beta_param * I;
}

double lyapunov_distributed(const Trajectory& traj, double t, double mu_param, const Kernel& k) {
    return lyapunov_distributed(traj, velocity_budget_series(traj), t, mu_param, k);
}

double lyapunov_distributed(const Trajectory& traj, const std::vector<double>& budget, double t,
                            double mu_param, const Kernel& k) {
    const double tau_max = k.domain_end();
    if (t < tau_max - 1e-9) throw std::domain_error("lyapunov_distributed requires t >= tau_max");
    const auto w = window_nodes(traj, budget, t - tau_max, t);
    const auto G = suffix_integrals(w);
    const std::size_t n = w.s.size();
    // E[m] = integral over sigma in [s_m, t] of e^{-(t-sigma)} G(sigma).
    std::vector<double> E(n, 0.0);
    for (std::size_t m = n - 1; m-- > 0;) {
        const double f0 = std::exp(-(t - w.s[m])) * G[m];
        const double f1 = std::exp(-(t - w.s[m + 1])) * G[m + 1];
        E[m] = E[m + 1] + 0.5 * (f0 + f1) * (w.s[m + 1] - w.s[m]);
    }
    // Outer integral over the kernel age s = t - sigma.
    double I = 0.0;
    for (std::size_t m = 0; m + 1 < n; ++m) {
        const double f0 = k(t - w.s[m]) * E[m];
        const double f1 = k(t - w.s[m + 1]) * E[m + 1];
        I += 0.5 * (f0 + f1) * (w.s[m + 1] - w.s[m]);
    }
    return d0(traj, t) + mu_param * I;
}

double fit_decay_rate(const std::vector<double>& times, const std::vector<double>& series,
                      double window_lo, double window_hi) {
    if (times.size() != series.size()) throw std::invalid_argument("series length mismatch");
    double st = 0.0, sy = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < window_lo - 1e-12 || times[k] > window_hi + 1e-12) continue;
        if (!(series[k] > 0.0))
            throw std::domain_error("fit_decay_rate requires positive samples in the window");
        st += times[k];
        sy += std::log(series[k]);
        ++n;
    }
    if (n < 2) throw std::domain_error("fit_decay_rate needs at least two samples in the window");
    const double tbar = st / n;
    const double ybar = sy / n;
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (times[k] < window_lo - 1e-12 || times[k] > window_hi + 1e-12) continue;
        const double dt = times[k] - tbar;
        num += dt * (std::log(series[k]) - ybar);
        den += dt * dt;
    }
    if (!(den > 0.0)) throw std::domain_error("fit_decay_rate window has no time spread");
    return -num / den;
}

Certificates make_certificates(const ModelParams& params, const LeaderInfluencePhi& phi,
                               const History& history, const DelayLaw& dl, const Kernel* kernel) {
    Certificates c;
    c.radius_R = radius_R(history);
    c.radius_R_star = radius_R_star(history, dl(0.0));
    c.r_gamma = params.gamma * params.lipschitz_phi * c.radius_R + params.gamma + 1.0;
    c.tau_bound_pointwise = tau_bound_pointwise(params, phi, c.radius_R);
    c.margin_tau_pointwise = c.tau_bound_pointwise - dl.tau_max();
    std::tie(c.halanay_ok, c.halanay_margin) = check_halanay(params, phi);
    if (kernel != nullptr) {
        c.tau_bound_distributed = tau_bound_distributed(params, phi, c.radius_R, *kernel);
        c.margin_tau_distributed = *c.tau_bound_distributed - dl.tau_max();
        c.lyap_weight_interval = lyapunov_weight_interval_distributed(
            params, phi, c.radius_R, dl.tau_max(), kernel->b_total());
    } else {
        c.lyap_weight_interval =
            lyapunov_weight_interval_pointwise(params, phi, c.radius_R, dl.tau_max());
    }
    return c;
}

// ---- smallest enclosing ball (Welzl, exact support solve) ----

namespace {

struct Ball {
    Vec c;
    double r = -1.0;  // negative: empty
};

bool contains(const Ball& b, const double* p, int d) {
    if (b.r < 0.0) return false;
    return dist(std::span<const double>(p, d), b.c) <= b.r * (1.0 + 1e-10) + 1e-12;
}

// Circumball of up to d+1 affinely independent support points.
Ball ball_from_support(const std::vector<const double*>& q, int d) {
    Ball b;
    if (q.empty()) return b;
    const int m = static_cast<int>(q.size()) - 1;
    b.c.assign(q[0], q[0] + d);
    b.r = 0.0;
    if (m == 0) return b;
    // Solve A lam = rhs with A_ij = 2 v_i . v_j, rhs_i = |v_i|^2, v_i = q_i - q_0.
    std::vector<double> A(static_cast<std::size_t>(m) * m), rhs(m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k)
                s += (q[i + 1][k] - q[0][k]) * (q[j + 1][k] - q[0][k]);
            A[static_cast<std::size_t>(i) * m + j] = 2.0 * s;
        }
        double s = 0.0;
        for (int k = 0; k < d; ++k) s += (q[i + 1][k] - q[0][k]) * (q[i + 1][k] - q[0][k]);
        rhs[i] = s;
    }
    // Gaussian elimination with partial pivoting; near-singular rows (affinely
    // dependent support) contribute nothing.
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    for (int col = 0; col < m; ++col) {
        int piv = col;
        for (int r = col + 1; r < m; ++r)
            if (std::abs(A[static_cast<std::size_t>(perm[r]) * m + col]) >
                std::abs(A[static_cast<std::size_t>(perm[piv]) * m + col]))
                piv = r;
        std::swap(perm[col], perm[piv]);
        const double p = A[static_cast<std::size_t>(perm[col]) * m + col];
        if (std::abs(p) < 1e-12) {
            A[static_cast<std::size_t>(perm[col]) * m + col] = 1.0;
            rhs[perm[col]] = 0.0;
            for (int j = col + 1; j < m; ++j) A[static_cast<std::size_t>(perm[col]) * m + j] = 0.0;
            continue;
        }
        for (int r = col + 1; r < m; ++r) {
            const double f = A[static_cast<std::size_t>(perm[r]) * m + col] / p;
            for (int j = col; j < m; ++j)
                A[static_cast<std::size_t>(perm[r]) * m + j] -=
                    f * A[static_cast<std::size_t>(perm[col]) * m + j];
            rhs[perm[r]] -= f * rhs[perm[col]];
        }
    }
    std::vector<double> lam(m);
    for (int col = m - 1; col >= 0; --col) {
        double s = rhs[perm[col]];
        for (int j = col + 1; j < m; ++j)
            s -= A[static_cast<std::size_t>(perm[col]) * m + j] * lam[j];
        lam[col] = s / A[static_cast<std::size_t>(perm[col]) * m + col];
    }
    for (int i = 0; i < m; ++i)
        for (int k = 0; k < d; ++k) b.c[k] += lam[i] * (q[i + 1][k] - q[0][k]);
    b.r = dist(std::span<const double>(q[0], d), b.c);
    return b;
}

Ball welzl(std::vector<const double*>& pts, std::size_t n, std::vector<const double*>& support,
           int d) {
    if (n == 0 || static_cast<int>(support.size()) == d + 1)
        return ball_from_support(support, d);
    const double* p = pts[n - 1];
    Ball b = welzl(pts, n - 1, support, d);
    if (contains(b, p, d)) return b;
    support.push_back(p);
    b = welzl(pts, n - 1, support, d);
    support.pop_back();
    return b;
}

}  // namespace

std::pair<Vec, double> smallest_enclosing_ball(const std::vector<Vec>& points, int dim) {
    if (points.empty()) throw std::invalid_argument("smallest_enclosing_ball of no points");
    if (dim == 1) {
        double lo = points[0][0], hi = points[0][0];
        for (const auto& p : points) {
            lo = std::min(lo, p[0]);
            hi = std::max(hi, p[0]);
        }
        return {Vec{0.5 * (lo + hi)}, 0.5 * (hi - lo)};
    }
    std::vector<const double*> pts(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) pts[k] = points[k].data();
    std::mt19937 rng(12345);
    std::shuffle(pts.begin(), pts.end(), rng);
    std::vector<const double*> support;
    const Ball b = welzl(pts, pts.size(), support, dim);
    return {b.c, std::max(b.r, 0.0)};
}

}  // namespace hkctrl
