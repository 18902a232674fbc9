#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hkctrl {

// A point in R^d. Dimension is a runtime quantity throughout the library.
using Vec = std::vector<double>;

inline double norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

inline double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// out += c * (a - b)
inline void add_scaled_diff(std::span<double> out, double c,
                            std::span<const double> a, std::span<const double> b) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += c * (a[k] - b[k]);
}

inline void scale(std::span<double> v, double c) {
    for (double& x : v) x *= c;
}

inline Vec sub(std::span<const double> a, std::span<const double> b) {
    Vec r(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) r[k] = a[k] - b[k];
    return r;
}

}  // namespace hkctrl
