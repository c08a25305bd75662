#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace mpm {

// Solver scalar type. Hot paths run in 32-bit; test oracles accumulate in
// 64-bit where conservation checks need it.
using Real = float;

struct Vec3 {
    Real x = 0, y = 0, z = 0;

    Vec3() = default;
    constexpr Vec3(Real x_, Real y_, Real z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(Real s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(Real s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    Vec3& operator*=(Real s) { x *= s; y *= s; z *= s; return *this; }

    Real dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    Real norm2() const { return dot(*this); }
    Real norm() const { return std::sqrt(norm2()); }
    Vec3 normalized() const {
        Real n = norm();
        return n > Real(0) ? *this / n : Vec3{1, 0, 0};
    }
    bool finite() const {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
    }
};

inline Vec3 operator*(Real s, const Vec3& v) { return v * s; }

struct Mat3 {
    // Row-major.
    Real m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1;
        return r;
    }
    static Mat3 zero() { return {}; }
    static Mat3 diag(Real a, Real b, Real c) {
        Mat3 r;
        r.m[0][0] = a; r.m[1][1] = b; r.m[2][2] = c;
        return r;
    }
    // a bᵀ
    static Mat3 outer(const Vec3& a, const Vec3& b) {
        Mat3 r;
        r.m[0][0] = a.x * b.x; r.m[0][1] = a.x * b.y; r.m[0][2] = a.x * b.z;
        r.m[1][0] = a.y * b.x; r.m[1][1] = a.y * b.y; r.m[1][2] = a.y * b.z;
        r.m[2][0] = a.z * b.x; r.m[2][1] = a.z * b.y; r.m[2][2] = a.z * b.z;
        return r;
    }

    Real& operator()(int r, int c) { return m[r][c]; }
    Real operator()(int r, int c) const { return m[r][c]; }

    Mat3 operator+(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] + o.m[i][j];
        return r;
    }
    Mat3 operator-(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] - o.m[i][j];
        return r;
    }
    Mat3 operator*(Real s) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[i][j] * s;
        return r;
    }
    Mat3& operator+=(const Mat3& o) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] += o.m[i][j];
        return *this;
    }
    Vec3 operator*(const Vec3& v) const {
        return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
                m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
                m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Real s = 0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    Real trace() const { return m[0][0] + m[1][1] + m[2][2]; }
    Real frobenius() const {
        Real s = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
        return std::sqrt(s);
    }
    bool finite() const {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (!std::isfinite(m[i][j])) return false;
        return true;
    }
};

inline Mat3 operator*(Real s, const Mat3& a) { return a * s; }

struct Quat {
    // (x, y, z, w), w scalar part.
    Real x = 0, y = 0, z = 0, w = 1;

    static Quat from_axis_angle(const Vec3& axis, Real angle) {
        Vec3 a = axis.normalized();
        Real h = angle * Real(0.5);
        Real s = std::sin(h);
        return {a.x * s, a.y * s, a.z * s, std::cos(h)};
    }
    Real norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }
    Quat normalized() const {
        Real n = norm();
        if (n <= Real(0)) return {};
        return {x / n, y / n, z / n, w / n};
    }
    Quat conjugate() const { return {-x, -y, -z, w}; }
    Quat operator*(const Quat& o) const {
        return {w * o.x + x * o.w + y * o.z - z * o.y,
                w * o.y - x * o.z + y * o.w + z * o.x,
                w * o.z + x * o.y - y * o.x + z * o.w,
                w * o.w - x * o.x - y * o.y - z * o.z};
    }
    Vec3 rotate(const Vec3& v) const {
        Vec3 u{x, y, z};
        Vec3 t = u.cross(v) * Real(2);
        return v + t * w + u.cross(t);
    }
    Vec3 rotate_inverse(const Vec3& v) const { return conjugate().rotate(v); }
    Mat3 to_mat3() const {
        Mat3 r;
        Real xx = x * x, yy = y * y, zz = z * z;
        Real xy = x * y, xz = x * z, yz = y * z;
        Real wx = w * x, wy = w * y, wz = w * z;
        r.m[0][0] = 1 - 2 * (yy + zz); r.m[0][1] = 2 * (xy - wz); r.m[0][2] = 2 * (xz + wy);
        r.m[1][0] = 2 * (xy + wz); r.m[1][1] = 1 - 2 * (xx + zz); r.m[1][2] = 2 * (yz - wx);
        r.m[2][0] = 2 * (xz - wy); r.m[2][1] = 2 * (yz + wx); r.m[2][2] = 1 - 2 * (xx + yy);
        return r;
    }
};

inline Quat slerp(const Quat& a, Quat b, Real t) {
    Real cos_th = a.x * b.x + a.y * b.y + a.z * b.z + a.w * b.w;
    if (cos_th < 0) {
        b = {-b.x, -b.y, -b.z, -b.w};
        cos_th = -cos_th;
    }
    if (cos_th > Real(0.9995)) {
        // Nearly parallel: lerp + renormalize.
        Quat r{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
               a.z + t * (b.z - a.z), a.w + t * (b.w - a.w)};
        return r.normalized();
    }
    Real th = std::acos(cos_th);
    Real sa = std::sin((1 - t) * th) / std::sin(th);
    Real sb = std::sin(t * th) / std::sin(th);
    return {sa * a.x + sb * b.x, sa * a.y + sb * b.y, sa * a.z + sb * b.z,
            sa * a.w + sb * b.w};
}

// Per-axis quadratic B-spline weights over the 3-node stencil.
struct SplineWeights {
    int base_node[3];   // lowest node index of the stencil, per axis
    Real w[3][3];       // [axis][offset]
    Real dw[3][3];      // [axis][offset], includes the 1/dx factor
};

// Quadratic B-spline basis N(x): 3/4 - x^2 for |x| < 1/2,
// (3/2 - |x|)^2 / 2 for 1/2 <= |x| < 3/2, else 0.
inline bool spline_in_domain(const Vec3& pos, const Vec3& origin, Real dx,
                             int dims_x, int dims_y, int dims_z) {
    const Real p[3] = {(pos.x - origin.x) / dx, (pos.y - origin.y) / dx,
                       (pos.z - origin.z) / dx};
    const int dims[3] = {dims_x, dims_y, dims_z};
    for (int a = 0; a < 3; ++a) {
        int base = static_cast<int>(std::floor(p[a] - Real(0.5)));
        if (base < 0 || base + 2 > dims[a] - 1) return false;
    }
    return true;
}

inline SplineWeights quadratic_bspline_weights(const Vec3& pos,
                                               const Vec3& origin, Real dx) {
    if (dx <= 0) throw std::invalid_argument("spline: dx must be positive");
    SplineWeights sw;
    const Real inv_dx = Real(1) / dx;
    const Real p[3] = {(pos.x - origin.x) * inv_dx, (pos.y - origin.y) * inv_dx,
                       (pos.z - origin.z) * inv_dx};
    for (int a = 0; a < 3; ++a) {
        int base = static_cast<int>(std::floor(p[a] - Real(0.5)));
        Real fx = p[a] - Real(base);  // in [0.5, 1.5)
        sw.base_node[a] = base;
        sw.w[a][0] = Real(0.5) * (Real(1.5) - fx) * (Real(1.5) - fx);
        sw.w[a][1] = Real(0.75) - (fx - Real(1)) * (fx - Real(1));
        sw.w[a][2] = Real(0.5) * (fx - Real(0.5)) * (fx - Real(0.5));
        sw.dw[a][0] = (fx - Real(1.5)) * inv_dx;
        sw.dw[a][1] = Real(-2) * (fx - Real(1)) * inv_dx;
        sw.dw[a][2] = (fx - Real(0.5)) * inv_dx;
    }
    return sw;
}

// Checked variant: rejects particles outside the valid interior band.
inline SplineWeights quadratic_bspline_weights_checked(const Vec3& pos,
                                                       const Vec3& origin,
                                                       Real dx, int dims_x,
                                                       int dims_y, int dims_z) {
    if (!spline_in_domain(pos, origin, dx, dims_x, dims_y, dims_z))
        throw std::domain_error("spline: position outside grid interior band");
    return quadratic_bspline_weights(pos, origin, dx);
}

struct DetInv {
    Real det = 0;
    Mat3 inv;
    bool invertible = false;
};

inline DetInv mat3_det_inv(const Mat3& a) {
    DetInv r;
    const Real c00 = a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1);
    const Real c01 = a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2);
    const Real c02 = a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0);
    r.det = a(0, 0) * c00 + a(0, 1) * c01 + a(0, 2) * c02;
    if (std::abs(r.det) <= Real(1e-12)) return r;
    const Real inv_det = Real(1) / r.det;
    r.inv(0, 0) = c00 * inv_det;
    r.inv(1, 0) = c01 * inv_det;
    r.inv(2, 0) = c02 * inv_det;
    r.inv(0, 1) = (a(0, 2) * a(2, 1) - a(0, 1) * a(2, 2)) * inv_det;
    r.inv(1, 1) = (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) * inv_det;
    r.inv(2, 1) = (a(0, 1) * a(2, 0) - a(0, 0) * a(2, 1)) * inv_det;
    r.inv(0, 2) = (a(0, 1) * a(1, 2) - a(0, 2) * a(1, 1)) * inv_det;
    r.inv(1, 2) = (a(0, 2) * a(1, 0) - a(0, 0) * a(1, 2)) * inv_det;
    r.inv(2, 2) = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) * inv_det;
    r.invertible = true;
    return r;
}

inline Real mat3_det(const Mat3& a) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) +
           a(0, 1) * (a(1, 2) * a(2, 0) - a(1, 0) * a(2, 2)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

struct PolarResult {
    Mat3 r;
    Mat3 u;
};

// Polar decomposition m = R U by scaled Newton iteration on R, run in
// double internally so the 1e-8 convergence tolerance is meaningful.
inline std::optional<PolarResult> polar_decompose(const Mat3& m) {
    if (!m.finite() || mat3_det(m) <= 0) return std::nullopt;

    double x[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) x[i][j] = m(i, j);

    auto det3 = [](const double a[3][3]) {
        return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) +
               a[0][1] * (a[1][2] * a[2][0] - a[1][0] * a[2][2]) +
               a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };

    for (int iter = 0; iter < 50; ++iter) {
        double d = det3(x);
        if (!(d > 0) || !std::isfinite(d)) return std::nullopt;
        double inv_t[3][3];  // inverse transpose of x
        double id = 1.0 / d;
        inv_t[0][0] = (x[1][1] * x[2][2] - x[1][2] * x[2][1]) * id;
        inv_t[0][1] = (x[1][2] * x[2][0] - x[1][0] * x[2][2]) * id;
        inv_t[0][2] = (x[1][0] * x[2][1] - x[1][1] * x[2][0]) * id;
        inv_t[1][0] = (x[0][2] * x[2][1] - x[0][1] * x[2][2]) * id;
        inv_t[1][1] = (x[0][0] * x[2][2] - x[0][2] * x[2][0]) * id;
        inv_t[1][2] = (x[0][1] * x[2][0] - x[0][0] * x[2][1]) * id;
        inv_t[2][0] = (x[0][1] * x[1][2] - x[0][2] * x[1][1]) * id;
        inv_t[2][1] = (x[0][2] * x[1][0] - x[0][0] * x[1][2]) * id;
        inv_t[2][2] = (x[0][0] * x[1][1] - x[0][1] * x[1][0]) * id;

        double nx = 0, ni = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                nx += x[i][j] * x[i][j];
                ni += inv_t[i][j] * inv_t[i][j];
            }
        double gamma = std::sqrt(std::sqrt(ni / nx));

        double delta = 0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double next = 0.5 * (gamma * x[i][j] + inv_t[i][j] / gamma);
                double diff = next - x[i][j];
                delta += diff * diff;
                x[i][j] = next;
            }
        if (std::sqrt(delta) < 1e-8) break;
    }

    PolarResult res;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) res.r(i, j) = static_cast<Real>(x[i][j]);
    Mat3 u = res.r.transposed() * m;
    // Symmetrize against round-off.
    res.u = (u + u.transposed()) * Real(0.5);
    return res;
}

// splitmix64: deterministic seeded stream for particle jitter.
struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}
    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    // Uniform in [-1, 1).
    double next_signed_unit() {
        return (next() >> 11) * (1.0 / 9007199254740992.0) * 2.0 - 1.0;
    }
};

}  // namespace mpm
