// Independent reference computations for tests. Nothing here calls the
// closed-form routines under test.
#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "isa/polarization.hpp"

namespace isa::oracle {

inline Eigen::Matrix2cd to_eigen(const DensityMatrix& rho) {
    Eigen::Matrix2cd m;
    m << rho(0, 0), rho(0, 1), rho(1, 0), rho(1, 1);
    return m;
}

/// Sum of weighted outer products built from raw (cos, sin) kets.
inline Eigen::Matrix2d brute_force_mixture(const std::vector<std::pair<double, double>>& count_and_degrees) {
    double total = 0.0;
    for (const auto& [count, deg] : count_and_degrees) {
        total += count;
    }
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    for (const auto& [count, deg] : count_and_degrees) {
        const double t = deg * std::numbers::pi / 180.0;
        const Eigen::Vector2d ket(std::cos(t), std::sin(t));
        m += (count / total) * ket * ket.transpose();
    }
    return m;
}

/// Roots of the characteristic polynomial x^2 - tr x + det, descending.
inline std::pair<double, double> characteristic_roots(const Eigen::Matrix2cd& m) {
    const double tr = (m(0, 0) + m(1, 1)).real();
    const double det = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
    const double disc = std::sqrt(std::max(tr * tr - 4.0 * det, 0.0));
    return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

/// Uniform point in the unit ball, optionally forced to the surface.
inline StokesVector random_bloch(std::mt19937_64& gen, bool on_surface = false, bool real_only = false) {
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    double x = normal(gen);
    double y = real_only ? 0.0 : normal(gen);
    double z = normal(gen);
    const double n = std::sqrt(x * x + y * y + z * z);
    const double r = on_surface ? 1.0 : std::cbrt(uniform(gen));
    return {1.0, r * x / n, r * y / n, r * z / n};
}

/// Random physical density matrix assembled entrywise from a Bloch vector.
inline DensityMatrix random_density(std::mt19937_64& gen, bool real_only = false) {
    const StokesVector s = random_bloch(gen, false, real_only);
    const Complex off(0.5 * s.s1, -0.5 * s.s2);
    return DensityMatrix(0.5 * (1.0 + s.s3), off, std::conj(off), 0.5 * (1.0 - s.s3));
}

}  // namespace isa::oracle
