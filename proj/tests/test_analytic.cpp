#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qdc/analytic.hpp"

using namespace qdc;
using Catch::Approx;

namespace {

// Fig. 2a starting point: <sz>_1 = 0.95, <sz>_2 = -0.15.
ClassifierConfig coupling_start() {
    ClassifierConfig c;
    c.reservoirs = {ReservoirSpec({std::acos(0.95), 0.0}, 0.001),
                    ReservoirSpec({std::acos(-0.15), 0.0}, 0.06)};
    return c;
}

ClassifierConfig phase_start() {
    ClassifierConfig c;
    c.reservoirs = {ReservoirSpec(BlochAngles::from_degrees(60, 350), 0.01),
                    ReservoirSpec(BlochAngles::from_degrees(60, 340), 0.01)};
    c.r = 0.36;
    c.tau = 3.0;
    return c;
}

}  // namespace

TEST_CASE("steady_sz", "[analytic]") {
    CHECK(steady_sz(coupling_start().reservoirs) == Approx(-0.1496945292974174).epsilon(1e-14));

    const std::vector<ReservoirSpec> same = {ReservoirSpec({1.1, 0.2}, 0.03),
                                             ReservoirSpec({1.1, 5.0}, 0.07)};
    CHECK(steady_sz(same) == Approx(std::cos(1.1)).epsilon(1e-15));

    const std::vector<ReservoirSpec> endpoint = {ReservoirSpec({0.0, 0.0}, 0.01),
                                                 ReservoirSpec({kPi, 0.0}, 0.0)};
    CHECK(steady_sz(endpoint) == 1.0);

    const std::vector<ReservoirSpec> dead = {ReservoirSpec({0.0, 0.0}, 0.0)};
    CHECK_THROWS_AS(steady_sz(dead), NumericalError);
    CHECK_THROWS_AS(steady_sz(std::span<const ReservoirSpec>{}), NumericalError);
}

TEST_CASE("steady_sz properties", "[analytic][property]") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + trial % 4;
        std::vector<ReservoirSpec> res;
        double lo = 1.0, hi = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = test::uniform(rng, 0.0, kPi);
            res.emplace_back(BlochAngles(theta, test::uniform(rng, 0.0, kTwoPi)),
                             test::uniform(rng, 1e-4, 0.1));
            lo = std::min(lo, std::cos(theta));
            hi = std::max(hi, std::cos(theta));
        }
        const double sz = steady_sz(res);
        CHECK(sz >= lo - 1e-15);
        CHECK(sz <= hi + 1e-15);

        const double scale = std::exp(test::uniform(rng, -3.0, 3.0));
        std::vector<ReservoirSpec> scaled;
        for (const auto& r : res) scaled.push_back(r.with_g(scale * r.g()));
        CHECK(steady_sz(scaled) == Approx(sz).margin(1e-15));
        CHECK(classify(steady_sz(scaled)) == classify(sz));
    }
}

TEST_CASE("steady_sy", "[analytic]") {
    SECTION("phase-training starting point") {
        CHECK(steady_sy(phase_start()) == Approx(-0.008999997551829814).epsilon(1e-13));
    }
    SECTION("poles carry no coherence") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({0.0, 1.0}, 0.02), ReservoirSpec({kPi, 2.0}, 0.05)};
        CHECK(steady_sy(c) == Approx(0.0).margin(1e-17));
    }
    SECTION("zero magnetization factor") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({kPi / 3, 0.3}, 0.02), ReservoirSpec({2 * kPi / 3, 0.1}, 0.02)};
        CHECK(steady_sy(c) == Approx(0.0).margin(1e-16));
    }
    SECTION("general form equals the two-reservoir expansion") {
        std::mt19937_64 rng(5);
        for (int trial = 0; trial < 1000; ++trial) {
            ClassifierConfig c;
            const double g1 = test::uniform(rng, 1e-3, 0.1), g2 = test::uniform(rng, 1e-3, 0.1);
            const BlochAngles b1(test::uniform(rng, 0, kPi), test::uniform(rng, 0, kTwoPi));
            const BlochAngles b2(test::uniform(rng, 0, kPi), test::uniform(rng, 0, kTwoPi));
            c.reservoirs = {ReservoirSpec(b1, g1), ReservoirSpec(b2, g2)};
            c.r = test::uniform(rng, 0.1, 1.0);
            c.tau = test::uniform(rng, 0.5, 5.0);
            const double expansion = steady_sy_two_reservoirs(g1, g2, b1.theta(), b2.theta(), b1.phi(),
                                                              b2.phi(), c.r, c.tau);
            CHECK(std::abs(steady_sy(c) - expansion) <= 1e-14);
        }
    }
    SECTION("all-zero couplings") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({1.0, 0.0}, 0.0), ReservoirSpec({2.0, 0.0}, 0.0)};
        CHECK_THROWS_AS(steady_sy(c), NumericalError);
        CHECK_THROWS_AS(steady_sy_two_reservoirs(0, 0, 1, 2, 0, 0, 0.36, 3), NumericalError);
    }
}

TEST_CASE("steady_rho", "[analytic]") {
    SECTION("single excited reservoir") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({0.0, 0.0}, 0.01)};
        CHECK(steady_rho(c).matrix() == ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}});
    }
    SECTION("balanced poles") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({0.0, 0.0}, 0.01), ReservoirSpec({kPi, 0.0}, 0.01)};
        const auto rho = steady_rho(c);
        CHECK(rho(0, 0).real() == Approx(0.5));
        CHECK(rho(1, 1).real() == Approx(0.5));
        CHECK(std::abs(rho(0, 1)) < 1e-17);
    }
    SECTION("phase-training starting point") {
        const auto c = phase_start();
        const auto gamma = steady_coherence_rate(c);
        CHECK(gamma.real() == Approx(0.00899999755182981).epsilon(1e-13));
        CHECK(gamma.imag() == Approx(0.002411542075894879).epsilon(1e-13));
        const auto rho = steady_rho(c);
        CHECK(rho(0, 0).real() == Approx(0.75).epsilon(1e-15));
        CHECK(rho(1, 1).real() == Approx(0.25).epsilon(1e-15));
        CHECK(rho(0, 1).real() == Approx(-0.0012057710379474395).epsilon(1e-13));
        CHECK(rho(0, 1).imag() == Approx(0.004499998775914905).epsilon(1e-13));
    }
    SECTION("diagonal matches steady_sz, coherence matches steady_sy") {
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 300; ++trial) {
            ClassifierConfig c;
            for (int i = 0; i < 2; ++i) {
                c.reservoirs.emplace_back(
                    BlochAngles(test::uniform(rng, 0, kPi), test::uniform(rng, 0, kTwoPi)),
                    test::uniform(rng, 1e-3, 0.1));
            }
            const auto rho = steady_rho(c);
            CHECK(std::abs(expect(rho, pauli::z()) - steady_sz(c.reservoirs)) <= 1e-12);
            CHECK(std::abs(expect(rho, pauli::y()) - steady_sy(c)) <= 1e-12);
        }
    }
    SECTION("large r tau leaves the physical state space") {
        auto c = phase_start();
        c.reservoirs = {ReservoirSpec(BlochAngles::from_degrees(60, 0), 1.0),
                        ReservoirSpec(BlochAngles::from_degrees(60, 0), 1.0)};
        c.r = 10.0;
        CHECK_THROWS_AS(steady_rho(c), NumericalError);
    }
    SECTION("all-zero couplings") {
        ClassifierConfig c;
        c.reservoirs = {ReservoirSpec({1.0, 0.0}, 0.0)};
        CHECK_THROWS_AS(steady_rho(c), NumericalError);
    }
}

TEST_CASE("classify", "[analytic]") {
    CHECK(classify(0.0) == Label::Zero);
    CHECK(classify(-0.0) == Label::Zero);
    CHECK(classify(-0.1497) == Label::One);
    CHECK(classify(1.0) == Label::Zero);
    CHECK(classify(-1e-300) == Label::One);
    CHECK_THROWS_AS(classify(std::nan("")), ContractError);
    CHECK_THROWS_AS(classify(INFINITY), ContractError);

    const auto readout = steady_readout(coupling_start());
    CHECK(readout.decision == Label::One);
    const auto by_y = steady_readout(phase_start(), PauliAxis::Y);
    CHECK(by_y.sy < 0.0);
    CHECK(by_y.decision == Label::One);
}
