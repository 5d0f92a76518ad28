#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qdc/analytic.hpp"
#include "qdc/collision.hpp"

using namespace qdc;
using Catch::Approx;

namespace {

ClassifierConfig two_reservoirs(double theta1, double theta2, double g1, double g2,
                                double phi1 = 0.0, double phi2 = 0.0) {
    ClassifierConfig c;
    c.reservoirs = {ReservoirSpec({theta1, phi1}, g1), ReservoirSpec({theta2, phi2}, g2)};
    c.tau = 3.0;
    return c;
}

double steady_sz_simulated(const ClassifierConfig& c, const CollisionSettings& s = {}) {
    return expect(evolve_to_steady(c, s).steady, pauli::z());
}

}  // namespace

TEST_CASE("build_hamiltonian", "[collision]") {
    SECTION("zero coupling") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({}, 0.0)};
        CHECK(build_hamiltonian(c) == ComplexMatrix(4, 4));
    }
    SECTION("one reservoir couples |eg> and |ge> only") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({}, 0.01)};
        ComplexMatrix expected(4, 4);
        expected(1, 2) = expected(2, 1) = 0.01;
        CHECK(build_hamiltonian(c) == expected);
    }
    SECTION("two reservoirs give two exchange blocks") {
        const auto c = two_reservoirs(0, 0, 0.005, 0.007);
        const ComplexMatrix h = build_hamiltonian(c);
        REQUIRE(h.rows() == 8);
        // Index bits: target (4), ancilla 1 (2), ancilla 2 (1); excited = 0.
        // s0+ s1- : |g e x> -> |e g x>,  s0+ s2- : |g x e> -> |e x g>.
        ComplexMatrix expected(8, 8);
        expected(2, 4) = expected(4, 2) = expected(3, 5) = expected(5, 3) = 0.005;
        expected(1, 4) = expected(4, 1) = expected(3, 6) = expected(6, 3) = 0.007;
        CHECK(h == expected);
        CHECK(is_hermitian(h));
    }
    SECTION("dimension cap") {
        ClassifierConfig c;
        c.reservoirs.assign(12, ReservoirSpec({}, 0.01));
        CHECK_THROWS_AS(build_hamiltonian(c), ConfigError);
        c.reservoirs.resize(3);
        CHECK_THROWS_AS(build_hamiltonian(c, 8), ConfigError);
        CHECK_NOTHROW(build_hamiltonian(c, 16));
    }
}

TEST_CASE("collision_step", "[collision]") {
    std::mt19937_64 rng(21);

    SECTION("zero coupling is the identity channel") {
        auto c = two_reservoirs(0.3, 2.0, 0.0, 0.0, 1.0, 4.0);
        const auto u = herm_expm(build_hamiltonian(c), c.tau);
        const DensityMatrix rho = test::random_density(rng, 2);
        CHECK(max_abs_diff(collision_step(rho, c, u).matrix(), rho.matrix()) < 1e-15);
    }
    SECTION("a target equal to a population-only reservoir state is a fixed point") {
        // Exchange coupling is not a partial swap, so coherent states are not fixed.
        for (int trial = 0; trial < 20; ++trial) {
            const BlochAngles b(trial % 2 ? 0.0 : kPi, test::uniform(rng, 0, kTwoPi));
            ClassifierConfig c;
            c.reservoirs = {ReservoirSpec(b, test::uniform(rng, 0.001, 0.1))};
            const auto u = herm_expm(build_hamiltonian(c), c.tau);
            const DensityMatrix rho = bloch_density(b);
            CHECK(max_abs_diff(collision_step(rho, c, u).matrix(), rho.matrix()) < 1e-14);
        }
    }
    SECTION("|+> meeting an excited ancilla, closed form") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({0.0, 0.0}, 0.01)};
        const auto u = herm_expm(build_hamiltonian(c), 3.0);
        const DensityMatrix plus = bloch_density({kPi / 2, 0.0});
        const DensityMatrix next = collision_step(plus, c, u);
        const double s2 = std::pow(std::sin(0.03), 2);
        // Population moves toward |e> by sin^2(g tau); coherence shrinks by cos(g tau).
        CHECK(next(0, 0).real() == Approx(0.5 + 0.5 * s2).epsilon(1e-14));
        CHECK(next(1, 1).real() == Approx(0.5 - 0.5 * s2).epsilon(1e-14));
        CHECK(std::abs(next(0, 1) - Complex{0.5 * std::cos(0.03)}) < 1e-15);
    }
    SECTION("fused propagator matches the literal step; trace and positivity hold") {
        for (std::size_t n : {1u, 2u, 3u}) {
            for (int trial = 0; trial < 10; ++trial) {
                ClassifierConfig c;
                for (std::size_t i = 0; i < n; ++i) {
                    c.reservoirs.emplace_back(
                        BlochAngles(test::uniform(rng, 0, kPi), test::uniform(rng, 0, kTwoPi)),
                        test::uniform(rng, 0.0, 0.3));
                }
                c.tau = test::uniform(rng, 0.5, 5.0);
                const CollisionPropagator prop(c.reservoirs, c.tau);
                DensityMatrix rho = test::random_density(rng, 2);
                for (int step = 0; step < 20; ++step) {
                    const DensityMatrix literal = collision_step(rho, c, prop.unitary());
                    const DensityMatrix fused = prop.apply(rho);
                    CHECK(max_abs_diff(literal.matrix(), fused.matrix()) < 1e-14);
                    CHECK(std::abs(fused.matrix().trace() - Complex{1.0}) <= kTraceTol);
                    CHECK(min_eigenvalue(fused.matrix()) >= -kPositivityTol);
                    rho = fused;
                }
            }
        }
    }
    SECTION("propagator dimension mismatch") {
        const auto c = two_reservoirs(0, 1, 0.01, 0.01);
        CHECK_THROWS_AS(collision_step(DensityMatrix::maximally_mixed(2), c, ComplexMatrix::identity(4)),
                        ConfigError);
    }
}

TEST_CASE("evolve_to_steady", "[collision]") {
    SECTION("single excited reservoir homogenizes the target") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({0.0, 0.0}, 0.02)};
        const auto res = evolve_to_steady(c, {});
        CHECK(res.converged);
        CHECK(expect(res.steady, pauli::z()) == Approx(1.0).margin(1e-6));
    }
    SECTION("symmetric up/down reservoirs") {
        const auto c = two_reservoirs(0.0, kPi, 0.005, 0.005);
        CHECK(steady_sz_simulated(c) == Approx(0.0).margin(1e-6));
    }
    SECTION("g1 = 0.0025, g2 = 0.0075 gives -0.8") {
        const auto c = two_reservoirs(0.0, kPi, 0.0025, 0.0075);
        CHECK(steady_sz_simulated(c) == Approx(-0.8).margin(1e-3));
    }
    SECTION("trajectory bookkeeping") {
        const auto c = two_reservoirs(0.0, kPi, 0.01, 0.02);
        CollisionSettings s;
        s.record_stride = 250;
        const auto res = evolve_to_steady(c, s);
        REQUIRE(res.trajectory.size() >= 2);
        CHECK(res.trajectory.front().collision_index == 0);
        CHECK(res.trajectory.back().collision_index == res.collisions_used);
        for (std::size_t k = 1; k < res.trajectory.size(); ++k) {
            CHECK(res.trajectory[k].collision_index > res.trajectory[k - 1].collision_index);
        }
    }
    SECTION("non-convergence is reported, not thrown") {
        const auto c = two_reservoirs(0.0, kPi, 0.001, 0.001);
        CollisionSettings s;
        s.max_collisions = 100;
        const auto res = evolve_to_steady(c, s);
        CHECK_FALSE(res.converged);
        CHECK(res.collisions_used == 100);
    }
    SECTION("invalid settings") {
        const auto c = two_reservoirs(0.0, kPi, 0.01, 0.01);
        CollisionSettings s;
        s.steady_tol = 0.0;
        CHECK_THROWS_AS(evolve_to_steady(c, s), ConfigError);
        s = {};
        s.record_stride = 0;
        CHECK_THROWS_AS(evolve_to_steady(c, s), ConfigError);
    }
}

TEST_CASE("steady state properties", "[collision][property]") {
    std::mt19937_64 rng(1234);
    const CollisionSettings settings;

    SECTION("independent of the target's initial state") {
        std::vector<ClassifierConfig> configs = {
            two_reservoirs(0.0, kPi, 0.0025, 0.0075),
            two_reservoirs(0.0, kPi, 0.02, 0.01),
            two_reservoirs(1.0, 2.0, 0.01, 0.02, 0.5, 4.0),
        };
        for (auto c : configs) {
            c.target_init = bloch_density({kPi / 2, 0.0});
            const double from_plus = steady_sz_simulated(c, settings);
            c.target_init = bloch_density({kPi, 0.0});
            const double from_ground = steady_sz_simulated(c, settings);
            CHECK(std::abs(from_plus - from_ground) <= 10 * settings.steady_tol);
        }
    }
    SECTION("matches the closed form for population-only reservoirs") {
        // Poles carry no coherence; the closed form is exact there.
        for (int trial = 0; trial < 6; ++trial) {
            const double g1 = test::uniform(rng, 0.004, 0.05), g2 = test::uniform(rng, 0.004, 0.05);
            const double t1 = trial % 2 ? 0.0 : kPi, t2 = trial % 3 ? kPi : 0.0;
            const auto c = two_reservoirs(t1, t2, g1, g2);
            CHECK(steady_sz_simulated(c, settings) == Approx(steady_sz(c.reservoirs)).margin(1e-3));
        }
    }
    SECTION("rescaling every coupling leaves the steady magnetization unchanged") {
        for (int trial = 0; trial < 3; ++trial) {
            const double g1 = test::uniform(rng, 0.005, 0.02), g2 = test::uniform(rng, 0.005, 0.02);
            const auto c = two_reservoirs(0.0, kPi, g1, g2);
            const double base = steady_sz_simulated(c, settings);
            for (double scale : {0.5, 2.0}) {
                const auto scaled = two_reservoirs(0.0, kPi, scale * g1, scale * g2);
                const double sz = steady_sz_simulated(scaled, settings);
                CHECK(sz == Approx(base).margin(1e-3));
                CHECK(classify(sz) == classify(base));
            }
        }
    }
}

TEST_CASE("mixture mode", "[collision]") {
    auto c = two_reservoirs(0.0, kPi, 0.01, 0.02);
    CollisionSettings s;
    s.mode = CollisionMode::Mixture;
    s.max_collisions = 5000;
    s.seed = 99;
    const auto a = evolve_to_steady(c, s);
    const auto b = evolve_to_steady(c, s);
    CHECK(a.steady.matrix() == b.steady.matrix());
    CHECK(a.collisions_used == b.collisions_used);
    CHECK_NOTHROW(a.steady.validate());
    s.seed = 100;
    CHECK(evolve_to_steady(c, s).steady.matrix() != a.steady.matrix());

    c.reservoirs[0] = c.reservoirs[0].with_g(0.0);
    c.reservoirs[1] = c.reservoirs[1].with_g(0.0);
    CHECK_THROWS_AS(evolve_to_steady(c, s), ConfigError);
}

TEST_CASE("magnetization_sweep", "[collision]") {
    const auto base = two_reservoirs(0.0, kPi, 0.005, 0.005);
    const auto grid = linspace(-0.5, 0.5, 5);
    const auto points = magnetization_sweep(0.01, grid, base, {});
    REQUIRE(points.size() == 5);
    CHECK(points.front().steady_sz == Approx(1.0).margin(1e-6));
    CHECK(points.back().steady_sz == Approx(-1.0).margin(1e-6));
    CHECK(points[2].steady_sz == Approx(0.0).margin(1e-6));
    for (std::size_t k = 1; k < points.size(); ++k) {
        CHECK(points[k].steady_sz < points[k - 1].steady_sz);
    }

    const double bad[] = {0.6};
    CHECK_THROWS_AS(magnetization_sweep(0.01, bad, base, {}), ConfigError);
    ClassifierConfig one;
    one.reservoirs = {ReservoirSpec({}, 0.01)};
    CHECK_THROWS_AS(magnetization_sweep(0.01, grid, one, {}), ConfigError);
}

// Coherent reservoirs drive the target's coherence at first order in g while
// populations relax at second order, so the exact collision model does not
// settle at the g^2-weighted closed form. Kept visible as a known mismatch.
TEST_CASE("closed form for coherent reservoirs", "[collision][property][!mayfail]") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 3; ++trial) {
        const auto c = two_reservoirs(test::uniform(rng, 0.1, 3.0), test::uniform(rng, 0.1, 3.0),
                                      test::uniform(rng, 0.01, 0.05), test::uniform(rng, 0.01, 0.05),
                                      test::uniform(rng, 0, kTwoPi), test::uniform(rng, 0, kTwoPi));
        CHECK(steady_sz_simulated(c) == Approx(steady_sz(c.reservoirs)).margin(1e-3));
    }
}
