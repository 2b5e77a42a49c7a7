#include "landau/geometry.hpp"

#include <algorithm>

namespace landau {

SymMat3 sandwich(const SymMat3& s, const SymMat3& a) {
    // rows of (S*A)
    double r0x = s.xx * a.xx + s.xy * a.xy + s.xz * a.xz;
    double r0y = s.xx * a.xy + s.xy * a.yy + s.xz * a.yz;
    double r0z = s.xx * a.xz + s.xy * a.yz + s.xz * a.zz;
    double r1x = s.xy * a.xx + s.yy * a.xy + s.yz * a.xz;
    double r1y = s.xy * a.xy + s.yy * a.yy + s.yz * a.yz;
    double r1z = s.xy * a.xz + s.yy * a.yz + s.yz * a.zz;
    double r2x = s.xz * a.xx + s.yz * a.xy + s.zz * a.xz;
    double r2y = s.xz * a.xy + s.yz * a.yy + s.zz * a.yz;
    double r2z = s.xz * a.xz + s.yz * a.yz + s.zz * a.zz;
    // (S*A)*S, symmetric by construction
    SymMat3 out;
    out.xx = r0x * s.xx + r0y * s.xy + r0z * s.xz;
    out.xy = r0x * s.xy + r0y * s.yy + r0z * s.yz;
    out.xz = r0x * s.xz + r0y * s.yz + r0z * s.zz;
    out.yy = r1x * s.xy + r1y * s.yy + r1z * s.yz;
    out.yz = r1x * s.xz + r1y * s.yz + r1z * s.zz;
    out.zz = r2x * s.xz + r2y * s.yz + r2z * s.zz;
    return out;
}

std::array<double, 3> sym3_eigenvalues(const SymMat3& a) {
    double p1 = a.xy * a.xy + a.xz * a.xz + a.yz * a.yz;
    if (p1 == 0.0) {
        std::array<double, 3> e{a.xx, a.yy, a.zz};
        std::sort(e.begin(), e.end());
        return e;
    }
    double q = a.trace() / 3.0;
    double dxx = a.xx - q, dyy = a.yy - q, dzz = a.zz - q;
    double p2 = dxx * dxx + dyy * dyy + dzz * dzz + 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    // B = (A - q I) / p; r = det(B)/2 clamped into [-1,1]
    double bxx = dxx / p, byy = dyy / p, bzz = dzz / p;
    double bxy = a.xy / p, bxz = a.xz / p, byz = a.yz / p;
    double det = bxx * (byy * bzz - byz * byz) - bxy * (bxy * bzz - byz * bxz) +
                 bxz * (bxy * byz - byy * bxz);
    double r = std::clamp(det / 2.0, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    double e1 = q + 2.0 * p * std::cos(phi);
    double e3 = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
    double e2 = 3.0 * q - e1 - e3;
    std::array<double, 3> e{e3, e2, e1};
    std::sort(e.begin(), e.end());
    return e;
}

Quadrature gauss_legendre(int n) {
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        q.nodes[i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return q;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 samples");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace landau
