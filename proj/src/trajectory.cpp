#include "hkctrl/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hkctrl {

History History::constant(Vec leader, std::vector<Vec> agents, double tau_max) {
    if (!(tau_max > 0.0)) throw ConfigError("history span tau_max must be positive");
    if (agents.empty()) throw ConfigError("history needs at least one follower");
    const int dim = static_cast<int>(leader.size());
    if (dim < 1) throw ConfigError("history leader vector is empty");
    History h;
    h.n_followers_ = static_cast<int>(agents.size());
    h.dim_ = dim;
    h.times_ = {-tau_max, 0.0};
    std::vector<double> row;
    row.reserve(static_cast<std::size_t>(h.n_followers_ + 1) * dim);
    row.insert(row.end(), leader.begin(), leader.end());
    for (const Vec& a : agents) {
        if (static_cast<int>(a.size()) != dim)
            throw ConfigError("history follower dimension mismatch");
        row.insert(row.end(), a.begin(), a.end());
    }
    h.rows_ = {row, row};
    return h;
}

History History::sampled(std::vector<double> times, std::vector<std::vector<double>> rows,
                         int dim) {
    if (times.size() != rows.size() || times.size() < 2)
        throw ConfigError("sampled history needs matching times/rows with >= 2 samples");
    if (std::abs(times.back()) > 1e-12) throw ConfigError("sampled history must end at t = 0");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (!(times[k] > times[k - 1])) throw ConfigError("history times must increase");
    if (dim < 1 || rows.front().size() % dim != 0 || rows.front().size() < 2u * dim)
        throw ConfigError("history rows must hold (N+1)*dim coordinates");
    for (const auto& r : rows)
        if (r.size() != rows.front().size()) throw ConfigError("history row size mismatch");
    History h;
    h.dim_ = dim;
    h.n_followers_ = static_cast<int>(rows.front().size() / dim) - 1;
    h.times_ = std::move(times);
    h.times_.back() = 0.0;
    h.rows_ = std::move(rows);
    return h;
}

std::vector<double> History::value(double s) const {
    if (s < times_.front() - 1e-12 || s > 1e-12)
        throw HistoryUnderflow("history query outside [start, 0]");
    s = std::clamp(s, times_.front(), 0.0);
    auto it = std::upper_bound(times_.begin(), times_.end(), s);
    std::size_t k = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    if (k + 1 >= times_.size()) k = times_.size() - 2;
    if (s == times_[k]) return rows_[k];
    if (s == times_[k + 1]) return rows_[k + 1];
    const double w = (s - times_[k]) / (times_[k + 1] - times_[k]);
    std::vector<double> out(rows_[k].size());
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = rows_[k][j] + w * (rows_[k + 1][j] - rows_[k][j]);
    return out;
}

History History::shifted(const Vec& offset) const {
    if (static_cast<int>(offset.size()) != dim_)
        throw ConfigError("history shift dimension mismatch");
    History h(*this);
    for (auto& row : h.rows_)
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += offset[j % dim_];
    return h;
}

Trajectory::Trajectory(int n_followers, int dim, InterpOrder interp)
    : n_followers_(n_followers), dim_(dim), interp_(interp) {
    if (n_followers < 1 || dim < 1) throw ConfigError("trajectory needs N >= 1 and dim >= 1");
}

void Trajectory::append(double t, std::span<const double> state, std::span<const double> deriv,
                        std::span<const double> control) {
    if (!times_.empty() && !(t > times_.back()))
        throw ConfigError("trajectory grid must strictly increase");
    if (state.size() != row_size() || deriv.size() != row_size() ||
        control.size() != static_cast<std::size_t>(dim_))
        throw ConfigError("trajectory row size mismatch");
    times_.push_back(t);
    states_.insert(states_.end(), state.begin(), state.end());
    derivs_.insert(derivs_.end(), deriv.begin(), deriv.end());
    controls_.insert(controls_.end(), control.begin(), control.end());
}

void Trajectory::restate_last(std::span<const double> deriv, std::span<const double> control) {
    if (times_.empty()) throw ConfigError("trajectory is empty");
    std::copy(deriv.begin(), deriv.end(), derivs_.end() - row_size());
    std::copy(control.begin(), control.end(), controls_.end() - dim_);
}

std::span<const double> Trajectory::state_row(std::size_t k) const {
    return {states_.data() + k * row_size(), row_size()};
}
std::span<const double> Trajectory::deriv_row(std::size_t k) const {
    return {derivs_.data() + k * row_size(), row_size()};
}
std::span<const double> Trajectory::control_row(std::size_t k) const {
    return {controls_.data() + k * static_cast<std::size_t>(dim_),
            static_cast<std::size_t>(dim_)};
}

std::size_t Trajectory::locate_segment(double s) const {
    // Rightmost segment [t_k, t_{k+1}] with t_k <= s; clamped to the last
    // segment for extrapolating queries.
    auto it = std::upper_bound(times_.begin(), times_.end(), s);
    std::size_t k = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    if (k + 1 >= times_.size()) k = times_.size() - 2;
    return k;
}

void Trajectory::state_at(double s, std::span<double> out) const {
    if (times_.size() < 2) throw HistoryUnderflow("trajectory has fewer than two grid points");
    if (s < times_.front() - 1e-12)
        throw HistoryUnderflow("lookup before the stored history range");
    if (s > times_.back() + max_extrapolation_ + 1e-12) {
        std::ostringstream os;
        os << "lookup at t = " << s << " beyond stored range end " << times_.back();
        throw HistoryUnderflow(os.str());
    }
    s = std::max(s, times_.front());
    const std::size_t k = locate_segment(s);
    const double t0 = times_[k];
    const double t1 = times_[k + 1];
    const double dt = t1 - t0;
    const double th = (s - t0) / dt;
    const auto x0 = state_row(k);
    const auto x1 = state_row(k + 1);
    const bool linear = interp_ == InterpOrder::linear || t1 <= history_boundary_ + 1e-12;
    if (linear) {
        if (th == 0.0) {
            std::copy(x0.begin(), x0.end(), out.begin());
        } else if (th == 1.0) {
            std::copy(x1.begin(), x1.end(), out.begin());
        } else {
            for (std::size_t j = 0; j < out.size(); ++j) out[j] = x0[j] + th * (x1[j] - x0[j]);
        }
        return;
    }
    const auto m0 = deriv_row(k);
    const auto m1 = deriv_row(k + 1);
    const double h00 = (1.0 + 2.0 * th) * (1.0 - th) * (1.0 - th);
    const double h10 = th * (1.0 - th) * (1.0 - th);
    const double h01 = th * th * (3.0 - 2.0 * th);
    const double h11 = th * th * (th - 1.0);
    for (std::size_t j = 0; j < out.size(); ++j)
        out[j] = h00 * x0[j] + h10 * dt * m0[j] + h01 * x1[j] + h11 * dt * m1[j];
}

std::vector<double> Trajectory::state(double s) const {
    std::vector<double> out(row_size());
    state_at(s, out);
    return out;
}

std::size_t Trajectory::index_at(double t, double tol) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t - tol);
    if (it == times_.end() || std::abs(*it - t) > tol)
        throw HistoryUnderflow("no grid point at the requested time");
    return static_cast<std::size_t>(it - times_.begin());
}

std::vector<double> lookup(const Trajectory& traj, double s) { return traj.state(s); }

}  // namespace hkctrl
