#pragma once

#include <limits>
#include <span>
#include <vector>

#include "hkctrl/errors.hpp"
#include "hkctrl/vec_ops.hpp"

namespace hkctrl {

enum class InterpOrder { linear, cubic_hermite };

/// Prescribed data on [-tau_max, 0]: either constant per agent or a sampled
/// curve interpolated linearly. Row layout matches Trajectory: (N+1) agents
/// of dimension d, agent 0 is the leader.
class History {
public:
    /// Constant-in-time data. `leader` and each entry of `agents` have size dim.
    static History constant(Vec leader, std::vector<Vec> agents, double tau_max);
    /// Sampled curves: times must increase and end at 0; rows[k] holds all
    /// (N+1)*dim coordinates at times[k], leader first.
    static History sampled(std::vector<double> times, std::vector<std::vector<double>> rows,
                           int dim);

    int n_followers() const { return n_followers_; }
    int dim() const { return dim_; }
    double start() const { return times_.front(); }
    const std::vector<double>& times() const { return times_; }
    const std::vector<double>& row(std::size_t k) const { return rows_[k]; }
    std::size_t size() const { return times_.size(); }

    /// Linear interpolation at s in [start, 0]; exact at sample points.
    std::vector<double> value(double s) const;
    /// Shifts every stored coordinate by `offset` (same vector for all agents).
    History shifted(const Vec& offset) const;

private:
    History() = default;
    int n_followers_ = 0;
    int dim_ = 0;
    std::vector<double> times_;
    std::vector<std::vector<double>> rows_;
};

/// Dense record of one integration: strictly increasing grid over
/// [-tau_max, t_end], per-grid-point states, derivatives and the held leader
/// control. Supports interpolated lookup anywhere in range; queries before
/// `history_boundary` always use linear interpolation (the history is
/// prescribed piecewise-linear data), queries after it use `interp`.
class Trajectory {
public:
    Trajectory(int n_followers, int dim, InterpOrder interp);

    int n_followers() const { return n_followers_; }
    int dim() const { return dim_; }
    int n_entities() const { return n_followers_ + 1; }
    std::size_t row_size() const { return static_cast<std::size_t>(n_entities()) * dim_; }
    InterpOrder interp() const { return interp_; }

    std::size_t size() const { return times_.size(); }
    const std::vector<double>& times() const { return times_; }
    double t_front() const { return times_.front(); }
    double t_back() const { return times_.back(); }

    void set_history_boundary(double t) { history_boundary_ = t; }
    double history_boundary() const { return history_boundary_; }
    /// Lookups may extrapolate up to this far beyond t_back (engine sub-stages).
    void set_max_extrapolation(double dt) { max_extrapolation_ = dt; }

    void append(double t, std::span<const double> state, std::span<const double> deriv,
                std::span<const double> control);
    /// Replaces the stored derivative/control at the last grid point.
    void restate_last(std::span<const double> deriv, std::span<const double> control);

    std::span<const double> state_row(std::size_t k) const;
    std::span<const double> deriv_row(std::size_t k) const;
    std::span<const double> control_row(std::size_t k) const;
    std::span<const double> agent(std::span<const double> row, int i) const {
        return row.subspan(static_cast<std::size_t>(i) * dim_, dim_);
    }

    /// Interpolated full state at time s, written into out (row_size doubles).
    void state_at(double s, std::span<double> out) const;
    std::vector<double> state(double s) const;

    /// Index of the grid point closest to t; throws unless |times[k]-t| <= tol.
    std::size_t index_at(double t, double tol = 1e-9) const;

    const std::vector<double>& raw_states() const { return states_; }

private:
    std::size_t locate_segment(double s) const;

    int n_followers_;
    int dim_;
    InterpOrder interp_;
    std::vector<double> times_;
    std::vector<double> states_;    // size() * row_size
    std::vector<double> derivs_;    // size() * row_size
    std::vector<double> controls_;  // size() * dim
    double history_boundary_ = -std::numeric_limits<double>::infinity();
    double max_extrapolation_ = 0.0;
};

/// Interpolated state lookup; exact at grid points.
std::vector<double> lookup(const Trajectory& traj, double s);

}  // namespace hkctrl
