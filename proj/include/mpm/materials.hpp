#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "mpm/math.hpp"

namespace mpm {

enum class MaterialKind { neo_hookean, corotational_pb };

struct Material {
    MaterialKind kind = MaterialKind::neo_hookean;
    Real mu = 0;      // Pa
    Real lambda = 0;  // Pa
    Real beta = 0;    // position-based blend factor in [0, 1]
};

inline std::pair<Real, Real> lame_from_young_poisson(Real E, Real nu) {
    if (E <= 0) throw std::invalid_argument("lame: E must be positive");
    if (nu < 0 || nu >= Real(0.5))
        throw std::invalid_argument("lame: nu must be in [0, 0.5)");
    Real mu = E / (2 * (1 + nu));
    Real lambda = E * nu / ((1 + nu) * (1 - 2 * nu));
    return {mu, lambda};
}

// Cauchy stress sigma = (1/J) [ mu (F F^T - I) + lambda ln(J) I ].
// J is clamped to 1e-6 inside the log so an isolated inverted particle does
// not poison the step; callers count inversions via det(F) separately.
// Accumulates in double: near stress-free states the result is a small
// difference of O(1) terms, and float intermediates leave noise well above
// the advertised accuracy.
inline Mat3 neo_hookean_cauchy_stress(const Mat3& F, Real mu, Real lambda) {
    double f[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) f[i][j] = double(F(i, j));
    double J = f[0][0] * (f[1][1] * f[2][2] - f[1][2] * f[2][1]) -
               f[0][1] * (f[1][0] * f[2][2] - f[1][2] * f[2][0]) +
               f[0][2] * (f[1][0] * f[2][1] - f[1][1] * f[2][0]);
    double Jc = J < 1e-6 ? 1e-6 : J;
    double d = double(lambda) * std::log(Jc);
    Mat3 s;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            // b = F F^T, left Cauchy-Green
            double b = f[i][0] * f[j][0] + f[i][1] * f[j][1] + f[i][2] * f[j][2];
            double v = double(mu) * (b - (i == j ? 1.0 : 0.0));
            if (i == j) v += d;
            s(i, j) = Real(v / Jc);
        }
    return s;
}

// Co-rotational constraint projection for the position-based solver.
// Trial F* = (I + C dt) F_prev, blended toward its rotation factor, then
// mapped back to a velocity gradient C_new = (F* F_prev^-1 - I) / dt.
inline std::optional<Mat3> corotational_project(const Mat3& F_prev,
                                                const Mat3& C_candidate,
                                                Real dt, Real beta) {
    if (dt <= 0) return std::nullopt;
    Mat3 F_trial = (Mat3::identity() + C_candidate * dt) * F_prev;
    auto polar = polar_decompose(F_trial);
    if (!polar) return std::nullopt;
    Real det_trial = mat3_det(F_trial);
    if (!(det_trial > 0)) return std::nullopt;
    Mat3 F_proj = polar->r * beta + F_trial * ((1 - beta) / det_trial);
    auto inv_prev = mat3_det_inv(F_prev);
    if (!inv_prev.invertible) return std::nullopt;
    return (F_proj * inv_prev.inv - Mat3::identity()) * (Real(1) / dt);
}

}  // namespace mpm
