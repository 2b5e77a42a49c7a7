#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace landau {

struct Vec3 {
    double x = 0, y = 0, z = 0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }

/// <v> = sqrt(1 + |v|^2), the polynomial weight bracket.
inline double bracket(const Vec3& v) { return std::sqrt(1.0 + norm2(v)); }
inline double bracket2(const Vec3& v) { return 1.0 + norm2(v); }

/// Symmetric 3x3 matrix stored as the upper triangle.
struct SymMat3 {
    double xx = 0, xy = 0, xz = 0, yy = 0, yz = 0, zz = 0;

    static SymMat3 identity() { return {1, 0, 0, 1, 0, 1}; }
    static SymMat3 scaled_identity(double s) { return {s, 0, 0, s, 0, s}; }

    /// s * (I - u u^T / |u|^2) for u != 0; the transverse projector scaled by s.
    static SymMat3 transverse_projector(const Vec3& u, double s) {
        double n2 = norm2(u);
        double f = s / n2;
        return {s - f * u.x * u.x, -f * u.x * u.y, -f * u.x * u.z,
                s - f * u.y * u.y, -f * u.y * u.z,
                s - f * u.z * u.z};
    }

    double trace() const { return xx + yy + zz; }

    Vec3 apply(const Vec3& v) const {
        return {xx * v.x + xy * v.y + xz * v.z,
                xy * v.x + yy * v.y + yz * v.z,
                xz * v.x + yz * v.y + zz * v.z};
    }

    /// e^T A e
    double quad(const Vec3& e) const { return dot(e, apply(e)); }

    double max_abs_entry() const {
        double m = std::abs(xx);
        for (double t : {xy, xz, yy, yz, zz}) m = std::max(m, std::abs(t));
        return m;
    }

    SymMat3 operator+(const SymMat3& o) const {
        return {xx + o.xx, xy + o.xy, xz + o.xz, yy + o.yy, yz + o.yz, zz + o.zz};
    }
    SymMat3 operator-(const SymMat3& o) const {
        return {xx - o.xx, xy - o.xy, xz - o.xz, yy - o.yy, yz - o.yz, zz - o.zz};
    }
    SymMat3 operator*(double s) const { return {xx * s, xy * s, xz * s, yy * s, yz * s, zz * s}; }
};

/// A^T diag-free congruence helper: returns S * A * S for symmetric S, A.
SymMat3 sandwich(const SymMat3& s, const SymMat3& a);

/// Eigenvalues of a symmetric 3x3 matrix, ascending. Analytic (trigonometric) method.
std::array<double, 3> sym3_eigenvalues(const SymMat3& a);

/// Gauss-Legendre nodes and weights on [-1, 1].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

/// C^2 quintic step: 0 for u <= 0, 1 for u >= 1.
inline double smoothstep(double u) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// max(r, 0), the positive-part exponent that shows up in the coefficient bounds.
inline double pos_part(double r) { return r > 0.0 ? r : 0.0; }

}  // namespace landau
