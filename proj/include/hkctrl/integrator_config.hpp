#pragma once

#include <vector>

#include "hkctrl/errors.hpp"
#include "hkctrl/trajectory.hpp"

namespace hkctrl {

/// Which delayed system is integrated: single lagged readout or a
/// kernel-weighted average over the trailing window.
enum class ModelKind { pointwise, distributed };

enum class QuadRule { trapezoid, simpson };

struct IntegratorConfig {
    double step = 0.01;
    InterpOrder interp = InterpOrder::cubic_hermite;
    QuadRule quad = QuadRule::trapezoid;
    int quad_points_min = 9;

    void validate() const {
        if (!(step > 0.0)) throw StepSizeError("step must be positive");
        if (quad_points_min < 3) throw ConfigError("quad_points_min must be >= 3");
    }
};

/// Quadrature nodes/weights over [t - tau, t]. The node count is
/// max(quad_points_min, ceil(tau/step)+1), bumped to an odd count for Simpson.
struct QuadratureWindow {
    std::vector<double> nodes;    // ascending; front = t - tau, back = t
    std::vector<double> weights;  // same length
};

QuadratureWindow make_quadrature_window(double t, double tau, const IntegratorConfig& cfg);

}  // namespace hkctrl
