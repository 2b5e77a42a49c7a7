#include <cmath>
#include <cstdio>
#include <random>

#include "doctest.h"
#include "landau/grid.hpp"
#include "landau/snapshot_io.hpp"

using namespace landau;

namespace {

PhaseGrid homogeneous(int n, double l) { return {SpatialGrid(0, 1, 1.0), VelocityGrid(n, l)}; }

DistributionField random_field(const PhaseGrid& g, std::uint64_t seed) {
    DistributionField f(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (auto& v : f.values) v = uni(rng);
    return f;
}

}  // namespace

TEST_CASE("maxwellian values at grid points") {
    // odd n puts v = 0 on a cell center
    PhaseGrid g{SpatialGrid(0, 1, 1.0), VelocityGrid(9, 4.5)};
    auto f = make_maxwellian(g, 1.0, 1.0);
    auto iv0 = g.velocity.index(4, 4, 4);
    CHECK(f.at(0, iv0) == doctest::Approx(1.0).epsilon(1e-14));

    auto f2 = make_maxwellian(g, 2.0, 0.5);
    auto iv = g.velocity.index(5, 5, 4); // v = (1,1,0), |v|^2 = 2
    CHECK(norm2(g.velocity.velocity(iv)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f2.at(0, iv) == doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
}

TEST_CASE("maxwellian discrete mass approaches the gaussian integral") {
    auto g = homogeneous(16, 4.0);
    auto f = make_maxwellian(g, 1.0, 1.0);
    double mass = weighted_lp_norm(f, 1.0, 0.0);
    CHECK(mass == doctest::Approx(std::pow(M_PI, 1.5)).epsilon(1e-5));
}

TEST_CASE("maxwellian rejects non-positive parameters") {
    auto g = homogeneous(8, 3.0);
    CHECK_THROWS_AS(make_maxwellian(g, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(make_maxwellian(g, 1.0, -2.0), std::invalid_argument);
}

TEST_CASE("grid constructors enforce invariants") {
    CHECK_THROWS_AS(VelocityGrid(3, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(VelocityGrid(8, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(SpatialGrid(2, 4, 1.0), std::invalid_argument);
}

TEST_CASE("weighted sup norm") {
    auto g = homogeneous(12, 4.0);
    DistributionField zero(g);
    CHECK(weighted_sup_norm(zero, 3.0) == 0.0);

    // weight cancels exactly when f = <v>^{-k}
    DistributionField f(g);
    double k = 5.0;
    for (std::size_t iv = 0; iv < g.velocity.size(); ++iv)
        f.at(0, iv) = std::pow(bracket2(g.velocity.velocity(iv)), -0.5 * k);
    CHECK(weighted_sup_norm(f, k) == doctest::Approx(1.0).epsilon(1e-13));

    // sup of <v>^5 e^{-|v|^2} sits at |v|^2 = 3/2 with value (5/2)^{5/2} e^{-3/2}
    auto g24 = homogeneous(24, 4.0);
    auto mx = make_maxwellian(g24, 1.0, 1.0);
    double expected = std::pow(2.5, 2.5) * std::exp(-1.5);
    CHECK(weighted_sup_norm(mx, 5.0) == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("weighted sup norm at k = 0 is the plain sup and is monotone") {
    auto g = homogeneous(8, 3.0);
    auto f = random_field(g, 1);
    CHECK(weighted_sup_norm(f, 0.0) == f.max_abs());

    auto bigger = f;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uni(0.0, 0.5);
    for (auto& v : bigger.values) v += uni(rng);
    for (double k : {0.0, 2.0, 5.0})
        CHECK(weighted_sup_norm(f, k) <= weighted_sup_norm(bigger, k));
}

TEST_CASE("weighted lp norms") {
    auto g = homogeneous(8, 2.0);
    DistributionField zero(g);
    CHECK(weighted_lp_norm(zero, 1.0, 0.0) == 0.0);

    DistributionField single(g);
    single.at(0, g.velocity.index(3, 4, 2)) = 1.0;
    CHECK(weighted_lp_norm(single, 1.0, 0.0) ==
          doctest::Approx(g.velocity.cell_volume()).epsilon(1e-14));

    auto g20 = homogeneous(20, 5.0);
    auto mx = make_maxwellian(g20, 1.0, 1.0);
    double expected = std::pow(M_PI, 1.5) * 2.5; // int (1+|v|^2) e^{-|v|^2}
    auto per_x = weighted_lp_norm_per_x(mx, 1.0, 2.0);
    CHECK(per_x.size() == 1);
    CHECK(per_x[0] == doctest::Approx(expected).epsilon(1e-4));
}

TEST_CASE("kinetic distance basics") {
    SpatialGrid sg(3, 4, 1000.0);
    PhasePoint z{0.0, {}, {}};
    CHECK(kinetic_distance(z, z, sg) == 0.0);
    PhasePoint z1{1.0, {}, {}};
    CHECK(kinetic_distance(z, z1, sg) == doctest::Approx(1.0));
    PhasePoint z2{1.0, {1.0, 0.0, 0.0}, {}};
    CHECK(kinetic_distance(z, z2, sg) == doctest::Approx(2.0)); // 1^{1/2} + 1^{1/3}
}

TEST_CASE("kinetic distance quasi-symmetry with C = 4") {
    SpatialGrid sg(3, 4, 1e9); // wrap never active for the sampled range
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(-10.0, 10.0);
    std::uniform_real_distribution<double> ut(0.0, 10.0);
    for (int trial = 0; trial < 100000; ++trial) {
        PhasePoint a{ut(rng), {uni(rng), uni(rng), uni(rng)}, {uni(rng), uni(rng), uni(rng)}};
        PhasePoint b{ut(rng), {uni(rng), uni(rng), uni(rng)}, {uni(rng), uni(rng), uni(rng)}};
        double ab = kinetic_distance(a, b, sg);
        double ba = kinetic_distance(b, a, sg);
        REQUIRE(ab <= 4.0 * ba + 1e-12);
        REQUIRE(ba <= 4.0 * ab + 1e-12);
    }
}

namespace {

// exhaustive witness search over all (x_m, v_m) grid candidates
bool brute_force_well_distributed(const DistributionField& f, const WellDistributedParams& p) {
    const auto& sg = f.grid.space;
    const auto& vg = f.grid.velocity;
    for (std::size_t ix = 0; ix < sg.cells(); ++ix) {
        bool found = false;
        for (std::size_t xm = 0; xm < sg.cells() && !found; ++xm) {
            Vec3 dxm = sg.position(xm) - sg.position(ix);
            Vec3 w{sg.wrap(dxm.x), sg.dim == 3 ? sg.wrap(dxm.y) : dxm.y,
                   sg.dim == 3 ? sg.wrap(dxm.z) : dxm.z};
            if (sg.dim > 0 && norm(w) > p.R) continue;
            for (std::size_t vm = 0; vm < vg.size() && !found; ++vm) {
                if (norm(vg.velocity(vm)) > p.R) continue;
                bool filled = true;
                for (std::size_t jx = 0; jx < sg.cells() && filled; ++jx) {
                    Vec3 dj = sg.position(jx) - sg.position(xm);
                    Vec3 wj{sg.wrap(dj.x), sg.dim == 3 ? sg.wrap(dj.y) : dj.y,
                            sg.dim == 3 ? sg.wrap(dj.z) : dj.z};
                    double dx2 = sg.dim == 0 ? 0.0 : norm2(wj);
                    if (dx2 > p.r * p.r) continue;
                    for (std::size_t jv = 0; jv < vg.size(); ++jv) {
                        if (dx2 + norm2(vg.velocity(jv) - vg.velocity(vm)) <= p.r * p.r &&
                            f.at(jx, jv) < p.delta) {
                            filled = false;
                            break;
                        }
                    }
                }
                found = filled;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("well-distributed check") {
    PhaseGrid g{SpatialGrid(1, 6, 3.0), VelocityGrid(12, 2.0)}; // h_v = 1/3
    WellDistributedParams params(1.2, 0.05, 0.7);

    SUBCASE("uniformly filled ball everywhere") {
        DistributionField f(g);
        for (std::size_t ix = 0; ix < g.space.cells(); ++ix)
            for (std::size_t iv = 0; iv < g.velocity.size(); ++iv)
                if (norm(g.velocity.velocity(iv)) < 1.2) f.at(ix, iv) = 0.05;
        auto rep = well_distributed_check(f, params);
        CHECK(rep.ok);
        REQUIRE(rep.witnesses.size() == g.space.cells());
        CHECK(norm(rep.witnesses[0].v_m) < 1.2);
        CHECK(brute_force_well_distributed(f, params));
    }

    SUBCASE("zero field fails") {
        DistributionField f(g);
        auto rep = well_distributed_check(f, params);
        CHECK_FALSE(rep.ok);
        CHECK(rep.first_failing_x == 0);
        CHECK_FALSE(brute_force_well_distributed(f, params));
    }

    SUBCASE("single localized bump fails for far x, matching brute force") {
        DistributionField f(g);
        for (std::size_t ix : {0u, 1u, 2u}) // three consecutive x cells carry the bump
            for (std::size_t iv = 0; iv < g.velocity.size(); ++iv)
                if (norm(g.velocity.velocity(iv)) < 1.5) f.at(ix, iv) = 0.1;
        auto rep = well_distributed_check(f, params);
        CHECK(rep.ok == brute_force_well_distributed(f, params));
        CHECK_FALSE(rep.ok); // R = 1.2 < half the period, far cells see nothing
    }

    SUBCASE("monotone in f") {
        DistributionField f(g);
        for (std::size_t ix = 0; ix < g.space.cells(); ++ix)
            for (std::size_t iv = 0; iv < g.velocity.size(); ++iv)
                if (norm(g.velocity.velocity(iv)) < 1.2) f.at(ix, iv) = 0.05;
        REQUIRE(well_distributed_check(f, params).ok);
        auto bigger = f;
        for (auto& v : bigger.values) v += 0.01;
        CHECK(well_distributed_check(bigger, params).ok);
    }

    SUBCASE("unresolvable ball radius is rejected") {
        DistributionField f(g);
        CHECK_THROWS_AS(well_distributed_check(f, WellDistributedParams(1.0, 0.1, 0.4)),
                        std::invalid_argument);
    }

    SUBCASE("vacuous search radius is flagged on the torus") {
        DistributionField f(g);
        for (std::size_t ix = 0; ix < g.space.cells(); ++ix)
            for (std::size_t iv = 0; iv < g.velocity.size(); ++iv)
                if (norm(g.velocity.velocity(iv)) < 1.2) f.at(ix, iv) = 0.05;
        auto rep = well_distributed_check(f, WellDistributedParams(2.0, 0.01, 0.7));
        CHECK(rep.vacuous_radius); // R = 2.0 >= period/2 = 1.5
        CHECK_FALSE(well_distributed_check(f, params).vacuous_radius);
    }
}

TEST_CASE("snapshot round trip is bit exact") {
    PhaseGrid g{SpatialGrid(1, 4, 2.0), VelocityGrid(6, 2.5)};
    auto f = random_field(g, 31);
    f.time = 0.625;
    std::string path = "test_snapshot.lndf";
    write_snapshot(path, f);
    auto back = read_snapshot(path);
    CHECK(back.time == f.time);
    CHECK(back.grid == f.grid);
    CHECK(back.values == f.values);

    // container header: magic plus six 64-bit fields
    FILE* fp = std::fopen(path.c_str(), "rb");
    REQUIRE(fp);
    char magic[8];
    REQUIRE(std::fread(magic, 1, 8, fp) == 8);
    CHECK(std::string(magic, 8) == "LNDF0001");
    std::fseek(fp, 0, SEEK_END);
    CHECK(std::ftell(fp) == 8 + 6 * 8 + static_cast<long>(f.values.size() * 8));
    std::fclose(fp);
    std::remove(path.c_str());
}

TEST_CASE("field validation rejects bad values") {
    auto g = homogeneous(8, 2.0);
    DistributionField f(g);
    f.values[10] = -1.0;
    CHECK_THROWS_AS(f.validate(), std::runtime_error);
    f.values[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(f.validate(), std::runtime_error);
}
