#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "landau/coefficients.hpp"
#include "landau/geometry.hpp"
#include "landau/grid.hpp"
#include "landau/snapshot_io.hpp"

using namespace landau;

namespace {

std::vector<double> random_slice(const VelocityGrid& g, std::uint64_t seed) {
    std::vector<double> f(g.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& v : f) v = uni(rng);
    return f;
}

double scaled_component_error(const CoefficientField& a, const CoefficientField& b) {
    double worst = 0;
    auto cmp = [&](const std::vector<double>& x, const std::vector<double>& y) {
        double s = 0;
        for (double v : y) s = std::max(s, std::abs(v));
        if (s == 0) s = 1;
        for (std::size_t i = 0; i < x.size(); ++i)
            worst = std::max(worst, std::abs(x[i] - y[i]) / s);
    };
    for (int c = 0; c < 6; ++c) cmp(a.a[c], b.a[c]);
    for (int c = 0; c < 3; ++c) cmp(a.b[c], b.b[c]);
    cmp(a.c, b.c);
    return worst;
}

}  // namespace

TEST_CASE("cube average of |u|^r") {
    CHECK(cube_average_power(0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cube_average_power(2.0) == doctest::Approx(0.25).epsilon(1e-12));

    // independent route: midpoint refinement with the central cell handled by
    // one more level of the dyadic identity
    double r = -1.0;
    int n = 160;
    double h = 1.0 / n;
    double outer = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                double x = -0.5 + (i + 0.5) * h;
                double y = -0.5 + (j + 0.5) * h;
                double z = -0.5 + (k + 0.5) * h;
                if (std::abs(x) < 0.25 && std::abs(y) < 0.25 && std::abs(z) < 0.25) continue;
                outer += std::pow(x * x + y * y + z * z, 0.5 * r) * h * h * h;
            }
    double oracle = outer / (1.0 - std::pow(2.0, -(3.0 + r)));
    CHECK(cube_average_power(r) == doctest::Approx(oracle).epsilon(2e-4));
    CHECK_THROWS_AS(cube_average_power(-3.0), std::invalid_argument);
}

TEST_CASE("kernel constants") {
    auto k1 = CollisionKernel::standard(-1.0);
    CHECK(k1.a_const == 1.0);
    CHECK(k1.b_const == 2.0);
    CHECK(k1.c_const == doctest::Approx(4.0));
    auto k3 = CollisionKernel::standard(-3.0);
    CHECK(k3.c_const == doctest::Approx(8.0 * M_PI));
    CHECK_THROWS_AS(CollisionKernel::standard(0.5), std::invalid_argument);
    CHECK_THROWS_AS(CollisionKernel::standard(-3.5), std::invalid_argument);
}

TEST_CASE("zero field gives zero coefficients") {
    VelocityGrid g(8, 2.0);
    std::vector<double> zero(g.size(), 0.0);
    for (double gamma : {-3.0, -1.0}) {
        auto kernel = CollisionKernel::standard(gamma);
        auto direct = compute_coefficients_direct(zero, g, kernel);
        auto fast = compute_coefficients_fast(zero, g, kernel);
        for (const auto& field : {direct, fast}) {
            for (int c = 0; c < 6; ++c)
                for (double v : field.a[c]) CHECK(v == 0.0);
            for (double v : field.c) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("negative density and bad gamma are rejected") {
    VelocityGrid g(8, 2.0);
    std::vector<double> f(g.size(), 1.0);
    f[3] = -0.5;
    CHECK_THROWS_AS(compute_coefficients_direct(f, g, CollisionKernel::standard(-1.0)),
                    std::invalid_argument);
}

TEST_CASE("point mass gives the analytic projection coefficients at gamma = -2") {
    // |w|^{gamma+2} = 1, so a(v) = m (I - u u^T) with u = (v - v0)/|v - v0|
    VelocityGrid g(10, 2.5);
    double m = 0.7;
    std::vector<double> f(g.size(), 0.0);
    std::size_t iv0 = g.index(3, 5, 6);
    Vec3 v0 = g.velocity(iv0);
    f[iv0] = m / g.cell_volume();
    auto kernel = CollisionKernel::standard(-2.0);
    auto coeff = compute_coefficients_direct(f, g, kernel);
    for (std::size_t iv : {g.index(7, 2, 4), g.index(0, 9, 1), g.index(5, 5, 5)}) {
        Vec3 u = g.velocity(iv) - v0;
        double r2 = norm2(u);
        REQUIRE(r2 > 0);
        SymMat3 expected = SymMat3::transverse_projector(u, m);
        SymMat3 got = coeff.a_at(iv);
        CHECK(got.xx == doctest::Approx(expected.xx).epsilon(1e-12));
        CHECK(got.xy == doctest::Approx(expected.xy).epsilon(1e-12));
        CHECK(got.zz == doctest::Approx(expected.zz).epsilon(1e-12));
        // projection has unit spectral norm: |a| = m everywhere off the source
        CHECK(sym3_eigenvalues(got)[2] == doctest::Approx(m).epsilon(1e-12));
        Vec3 b_expected = u * (kernel.b_const * m * std::pow(r2, -1.0));
        Vec3 b_got = coeff.b_at(iv);
        CHECK(b_got.x == doctest::Approx(b_expected.x).epsilon(1e-12));
        CHECK(coeff.c[iv] == doctest::Approx(kernel.c_const * m / r2).epsilon(1e-12));
    }
}

TEST_CASE("maxwellian coefficients are isotropic at the origin") {
    VelocityGrid g(9, 4.5); // odd: v = 0 on the grid
    PhaseGrid pg{SpatialGrid(0, 1, 1.0), g};
    auto f = make_maxwellian(pg, 1.0, 1.0);
    auto coeff = compute_coefficients_fast(f.slice(0), g, CollisionKernel::standard(-1.0));
    std::size_t iv0 = g.index(4, 4, 4);
    SymMat3 a = coeff.a_at(iv0);
    CHECK(std::abs(a.xy) <= 1e-10 * a.xx);
    CHECK(std::abs(a.xz) <= 1e-10 * a.xx);
    CHECK(a.yy == doctest::Approx(a.xx).epsilon(1e-10));
    CHECK(a.zz == doctest::Approx(a.xx).epsilon(1e-10));
}

TEST_CASE("fast path matches the direct-summation oracle") {
    for (int n : {8, 12}) {
        VelocityGrid g(n, 3.0);
        for (double gamma : {-3.0, -2.5, -2.0, -1.0, -0.5}) {
            auto kernel = CollisionKernel::standard(gamma);
            auto table = build_kernel_table(g, kernel);
            auto f = random_slice(g, 1000 + n + static_cast<int>(gamma * 10));
            auto direct = compute_coefficients_direct(f, table);
            auto fast = compute_coefficients_fast(f, g, kernel);
            CHECK(scaled_component_error(fast, direct) <= 1e-10);
        }
    }
}

TEST_CASE("translation equivariance on interior cells") {
    VelocityGrid g(12, 3.0);
    auto kernel = CollisionKernel::standard(-1.5);
    // compactly supported blob away from the boundary
    std::vector<double> f(g.size(), 0.0);
    for (int i = 3; i < 7; ++i)
        for (int j = 3; j < 7; ++j)
            for (int k = 3; k < 7; ++k) f[g.index(i, j, k)] = 1.0 + i + 0.5 * j + 0.25 * k;
    std::vector<double> shifted(g.size(), 0.0);
    for (int i = 3; i < 7; ++i)
        for (int j = 3; j < 7; ++j)
            for (int k = 3; k < 7; ++k) shifted[g.index(i + 1, j, k)] = f[g.index(i, j, k)];
    auto c0 = compute_coefficients_fast(f, g, kernel);
    auto c1 = compute_coefficients_fast(shifted, g, kernel);
    double scale = 0;
    for (std::size_t iv = 0; iv < g.size(); ++iv) scale = std::max(scale, std::abs(c0.c[iv]));
    for (int i = 2; i < 9; ++i)
        for (int j = 2; j < 10; ++j)
            for (int k = 2; k < 10; ++k) {
                CHECK(std::abs(c1.c[g.index(i + 1, j, k)] - c0.c[g.index(i, j, k)]) <=
                      1e-12 * scale);
                CHECK(std::abs(c1.a[0][g.index(i + 1, j, k)] - c0.a[0][g.index(i, j, k)]) <=
                      1e-12 * scale);
            }
}

TEST_CASE("scaling by two commutes exactly with the quadrature") {
    VelocityGrid g(10, 3.0);
    auto kernel = CollisionKernel::standard(-2.5);
    auto f = random_slice(g, 5);
    auto doubled = f;
    for (auto& v : doubled) v *= 2.0;
    auto c0 = compute_coefficients_fast(f, g, kernel);
    auto c1 = compute_coefficients_fast(doubled, g, kernel);
    for (int c = 0; c < 6; ++c)
        for (std::size_t iv = 0; iv < g.size(); ++iv) CHECK(c1.a[c][iv] == 2.0 * c0.a[c][iv]);
    for (std::size_t iv = 0; iv < g.size(); ++iv) CHECK(c1.c[iv] == 2.0 * c0.c[iv]);
}

TEST_CASE("a-bar is positive semidefinite to round-off") {
    VelocityGrid g(10, 3.0);
    for (std::uint64_t seed : {7u, 8u, 9u}) {
        auto f = random_slice(g, seed);
        auto coeff = compute_coefficients_fast(f, g, CollisionKernel::standard(-2.0));
        auto spec = ellipticity_spectrum(coeff);
        double scale = 0;
        for (double v : spec.lambda_max) scale = std::max(scale, v);
        CHECK(spec.worst_lambda_min >= -1e-12 * scale);
        CHECK(spec.psd_violations == 0);
    }
}

TEST_CASE("divergence identity residuals") {
    SUBCASE("zero field") {
        VelocityGrid g(8, 2.0);
        std::vector<double> zero(g.size(), 0.0);
        auto coeff = compute_coefficients_direct(zero, g, CollisionKernel::standard(-1.0));
        auto res = divergence_identity_residuals(coeff);
        CHECK(res.res_b == 0.0);
        CHECK(res.res_c == 0.0);
    }
    SUBCASE("maxwellian residuals shrink at second order") {
        auto residual_at = [](int n) {
            PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(n, 4.0)};
            auto f = make_maxwellian(pg, 1.0, 1.0);
            auto coeff =
                compute_coefficients_fast(f.slice(0), pg.velocity, CollisionKernel::standard(-1.0));
            return divergence_identity_residuals(coeff);
        };
        auto coarse = residual_at(12);
        auto fine = residual_at(24);
        CHECK(coarse.res_b / fine.res_b >= 2.5);
        CHECK(coarse.res_c / fine.res_c >= 2.5);
    }
    SUBCASE("point-mass far-field residual is second order") {
        // smooth closed-form kernel away from the source; fixed physical mask
        // (four coarse-level cells) so both levels measure the same region
        const double mask = 2.0;
        auto masked_residual = [&](int n) {
            VelocityGrid g(n, 3.0);
            std::vector<double> f(g.size(), 0.0);
            std::size_t iv0 = g.index(n / 2, n / 2, n / 2);
            f[iv0] = 1.0 / g.cell_volume();
            auto coeff = compute_coefficients_direct(f, g, CollisionKernel::standard(-1.0));
            Vec3 v0 = g.velocity(iv0);
            double h = g.spacing();
            double worst = 0;
            static const int rc[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
            for (int i = 2; i < n - 2; ++i)
                for (int j = 2; j < n - 2; ++j)
                    for (int k = 2; k < n - 2; ++k) {
                        if (norm(g.velocity(i, j, k) - v0) < mask) continue;
                        std::size_t iv = g.index(i, j, k);
                        for (int row = 0; row < 3; ++row) {
                            double div_a = 0;
                            for (int ax = 0; ax < 3; ++ax) {
                                int ip = i + (ax == 0), jp = j + (ax == 1), kp = k + (ax == 2);
                                int im = i - (ax == 0), jm = j - (ax == 1), km = k - (ax == 2);
                                div_a += (coeff.a[rc[row][ax]][g.index(ip, jp, kp)] -
                                          coeff.a[rc[row][ax]][g.index(im, jm, km)]) /
                                         (2.0 * h);
                            }
                            worst = std::max(worst, std::abs(coeff.b[row][iv] + div_a));
                        }
                    }
            return worst;
        };
        double coarse = masked_residual(12);
        double fine = masked_residual(24);
        CHECK(coarse / fine >= 2.5);
        // fits under C h^2 with C from the coarse level
        double C = coarse / (0.5 * 0.5) * 1.5;
        CHECK(fine <= C * 0.25 * 0.25);
    }
}

TEST_CASE("coefficient bound report") {
    VelocityGrid g(16, 4.0);
    PhaseGrid pg{SpatialGrid(0, 1, 1.0), g};

    SUBCASE("zero field gives zero ratios") {
        std::vector<double> zero(g.size(), 0.0);
        auto coeff = compute_coefficients_direct(zero, g, CollisionKernel::standard(-1.0));
        auto rep = coefficient_bound_report(coeff, zero, 6.0);
        CHECK(rep.a_iso == 0.0);
        CHECK(rep.aniso_par == 0.0);
    }
    SUBCASE("rejects k <= gamma + 5") {
        std::vector<double> f(g.size(), 1.0);
        auto coeff = compute_coefficients_fast(f, g, CollisionKernel::standard(-1.0));
        CHECK_THROWS_AS(coefficient_bound_report(coeff, f, 4.0), std::invalid_argument);
    }
    SUBCASE("maxwellian ratios are stable under refinement") {
        auto report_at = [](int n) {
            PhaseGrid pgn{SpatialGrid(0, 1, 1.0), VelocityGrid(n, 4.0)};
            auto f = make_maxwellian(pgn, 1.0, 1.0);
            auto coeff =
                compute_coefficients_fast(f.slice(0), pgn.velocity, CollisionKernel::standard(-1.0));
            return coefficient_bound_report(coeff, f.slice(0), 6.0);
        };
        auto r16 = report_at(16);
        auto r32 = report_at(32);
        CHECK(r32.a_iso == doctest::Approx(r16.a_iso).epsilon(0.10));
        CHECK(r32.b_iso == doctest::Approx(r16.b_iso).epsilon(0.10));
        CHECK(r32.c_iso == doctest::Approx(r16.c_iso).epsilon(0.10));
        CHECK(r32.aniso_par == doctest::Approx(r16.aniso_par).epsilon(0.10));
        CHECK(r32.aniso_perp == doctest::Approx(r16.aniso_perp).epsilon(0.10));
        CHECK(r16.ell == doctest::Approx(2.0)); // gamma = -1 branch records ell = 2
    }
    SUBCASE("point mass |a| ratio is flat in |v| when the exponent vanishes") {
        // gamma = -2: (gamma+2)+ = 0 and |a(v)| = m identically
        VelocityGrid g10(10, 2.5);
        std::vector<double> f(g10.size(), 0.0);
        std::size_t iv0 = g10.index(5, 5, 5);
        f[iv0] = 1.0 / g10.cell_volume();
        auto coeff = compute_coefficients_direct(f, g10, CollisionKernel::standard(-2.0));
        double nk = weighted_sup_norm_slice(f, g10, 6.0);
        std::vector<double> ratios;
        for (std::size_t iv : {g10.index(8, 5, 5), g10.index(2, 5, 5), g10.index(5, 9, 5)}) {
            double a_norm = sym3_eigenvalues(coeff.a_at(iv))[2];
            ratios.push_back(a_norm / nk);
        }
        CHECK(ratios[1] == doctest::Approx(ratios[0]).epsilon(1e-10));
        CHECK(ratios[2] == doctest::Approx(ratios[0]).epsilon(1e-10));
    }
}

TEST_CASE("ellipticity spectrum") {
    SUBCASE("zero coefficients give zero spectrum") {
        VelocityGrid g(8, 2.0);
        CoefficientField coeff(g, -1.0);
        auto spec = ellipticity_spectrum(coeff);
        for (double v : spec.lambda_max) CHECK(v == 0.0);
    }
    SUBCASE("anisotropy exponent fits the <v>^{-2} trend") {
        PhaseGrid pg{SpatialGrid(0, 1, 1.0), VelocityGrid(32, 6.0)};
        auto f = make_maxwellian(pg, 1.0, 1.0);
        auto coeff =
            compute_coefficients_fast(f.slice(0), pg.velocity, CollisionKernel::standard(-1.0));
        auto spec = ellipticity_spectrum(coeff);
        std::vector<double> lx, ly;
        for (std::size_t iv = 0; iv < pg.velocity.size(); ++iv) {
            double s = norm(pg.velocity.velocity(iv));
            if (s < 1.0 || s > 4.0) continue;
            lx.push_back(std::log(bracket(pg.velocity.velocity(iv))));
            ly.push_back(std::log(spec.lambda_par[iv] / spec.lambda_perp[iv]));
        }
        double slope = fit_slope(lx, ly);
        CHECK(slope == doctest::Approx(-2.0).epsilon(0.15)); // fitted exponent -2 +- 0.3
    }
}

TEST_CASE("coefficient dump container") {
    VelocityGrid g(8, 2.0);
    std::vector<double> f(g.size(), 0.5);
    auto coeff = compute_coefficients_fast(f, g, CollisionKernel::standard(-1.5));
    std::string path = "test_coeff.lndc";
    write_coefficients(path, coeff);
    FILE* fp = std::fopen(path.c_str(), "rb");
    REQUIRE(fp);
    char magic[8];
    REQUIRE(std::fread(magic, 1, 8, fp) == 8);
    CHECK(std::string(magic, 8) == "LNDC0001");
    std::fseek(fp, 0, SEEK_END);
    // header + 10 components per cell
    CHECK(std::ftell(fp) == 8 + 6 * 8 + static_cast<long>(10 * g.size() * 8));
    std::fclose(fp);
    std::remove(path.c_str());
}
