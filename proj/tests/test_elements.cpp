#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "ringpol/elements.hpp"
#include "ringpol/jones.hpp"

using namespace ringpol;

namespace {
double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * double(rng() >> 11) * 0x1p-53;
}
}  // namespace

TEST_CASE("plane mirror matrix") {
    SECTION("phi = 0 reduces to Z") {
        CHECK(mirror_mz(0.0).u.max_abs_diff(pauli(Axis::Z)) < 1e-15);
    }
    SECTION("phi = pi is projectively Z") {
        CHECK(projective_distance(mirror_mz(kPi).u, pauli(Axis::Z)) < 1e-12);
        // and exactly -Z entrywise
        CHECK(mirror_mz(kPi).u.max_abs_diff(cplx(-1.0) * pauli(Axis::Z)) < 1e-12);
    }
    SECTION("explicit form diag(e^{-i phi}, -e^{+i phi})") {
        double phi = 0.37;
        Mat2 m = mirror_mz(phi).u;
        CHECK(std::abs(m.a - std::polar(1.0, -phi)) < 1e-15);
        CHECK(std::abs(m.d + std::polar(1.0, phi)) < 1e-15);
        CHECK(std::abs(m.b) == 0.0);
        CHECK(std::abs(m.c) == 0.0);
    }
    SECTION("the round-trip product Z M M collects twice the phase") {
        double phi = 0.21;
        Mat2 trip = pauli(Axis::Z) * mirror_mz(phi).u * mirror_mz(phi).u;
        CHECK(trip.max_abs_diff(pauli(Axis::Z) * exp_minus_i_phi_z(2.0 * phi)) < 1e-14);
    }
    SECTION("non-finite phases are rejected") {
        CHECK_THROWS_AS(mirror_mz(std::nan("")), std::invalid_argument);
    }
}

TEST_CASE("waveplates are exact Pauli operations") {
    CHECK(waveplate(Axis::Z).u.max_abs_diff(pauli(Axis::Z)) == 0.0);
    CHECK(waveplate(Axis::X).u.max_abs_diff(pauli(Axis::X)) == 0.0);
    CHECK_THROWS_AS(waveplate(Axis::Y), std::invalid_argument);
}

TEST_CASE("soleil-babinet retarder") {
    SECTION("zero delay is the identity") {
        CHECK(soleil_babinet(NoiseDelay{0.0}).u.max_abs_diff(identity2()) < 1e-15);
    }
    SECTION("half-wave delay is projectively X") {
        Mat2 b = soleil_babinet(NoiseDelay{kPi}).u;
        CHECK(projective_distance(b, pauli(Axis::X)) < 1e-12);
        CHECK(b.max_abs_diff(cplx(0.0, -1.0) * pauli(Axis::X)) < 1e-15);
    }
    SECTION("quarter-wave delay") {
        Mat2 b = soleil_babinet(NoiseDelay{kPi / 2.0}).u;
        Mat2 expected = cplx(kInvSqrt2) * (identity2() + cplx(0.0, -1.0) * pauli(Axis::X));
        CHECK(b.max_abs_diff(expected) < 1e-15);
    }
    SECTION("delays compose additively (projectively)") {
        std::mt19937_64 rng(7);
        for (int i = 0; i < 50; ++i) {
            double t1 = uniform(rng, 0.0, 2.0 * kPi), t2 = uniform(rng, 0.0, 2.0 * kPi);
            Mat2 lhs = soleil_babinet(NoiseDelay{t1}).u * soleil_babinet(NoiseDelay{t2}).u;
            Mat2 rhs = soleil_babinet(NoiseDelay::wrapped(t1 + t2)).u;
            CHECK(projective_distance(lhs, rhs) < 1e-12);
        }
    }
}

TEST_CASE("composite noise element") {
    SECTION("zero delay leaves the bare mirror") {
        CHECK(noise_element(0.4, NoiseDelay{0.0}).u.max_abs_diff(mirror_mz(0.4).u) < 1e-15);
    }
    SECTION("zero phase leaves Z times the retarder") {
        Mat2 n = noise_element(0.0, NoiseDelay{0.8}).u;
        CHECK(n.max_abs_diff(pauli(Axis::Z) * soleil_babinet(NoiseDelay{0.8}).u) < 1e-15);
    }
    SECTION("explicit product at (0.1, 0.3)") {
        Mat2 n = noise_element(0.1, NoiseDelay{0.3}).u;
        Mat2 expected = mirror_mz(0.1).u * soleil_babinet(NoiseDelay{0.3}).u;
        CHECK(n.max_abs_diff(expected) == 0.0);
        // spot-check entries by hand: (0,0) = e^{-i 0.1} cos(0.15)
        CHECK(std::abs(n.a - std::polar(1.0, -0.1) * std::cos(0.15)) < 1e-15);
        // (0,1) = e^{-i 0.1} * (-i sin 0.15)
        CHECK(std::abs(n.b - std::polar(1.0, -0.1) * cplx(0.0, -std::sin(0.15))) < 1e-15);
    }
}

TEST_CASE("all elements are unitary for random parameters") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        double phi = uniform(rng, -10.0, 10.0);
        double theta = uniform(rng, 0.0, 2.0 * kPi);
        CHECK(mirror_mz(phi).is_unitary());
        CHECK(soleil_babinet(NoiseDelay{theta}).is_unitary());
        CHECK(noise_element(phi, NoiseDelay{theta}).is_unitary());
    }
}

TEST_CASE("commutation structure") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 100; ++i) {
        double phi = uniform(rng, -5.0, 5.0);
        double theta = uniform(rng, 0.0, 2.0 * kPi);
        Mat2 m = mirror_mz(phi).u, z = pauli(Axis::Z);
        CHECK((m * z).max_abs_diff(z * m) < 1e-14);
        Mat2 b = soleil_babinet(NoiseDelay{theta}).u, x = pauli(Axis::X);
        CHECK((b * x).max_abs_diff(x * b) < 1e-14);
    }
}

TEST_CASE("mirror dispersion model links frequency and phase width") {
    MirrorPhaseModel model{-0.2, 3.1e-14};
    CHECK(model.phase(0.0) == Catch::Approx(-0.2));
    CHECK(model.phase(1e13) == Catch::Approx(-0.2 + 0.31));
    CHECK(model.sigma_phi(2.0e12) == Catch::Approx(6.2e-2));
    // slope sign does not matter for the width
    MirrorPhaseModel neg{-0.2, -3.1e-14};
    CHECK(neg.sigma_phi(2.0e12) == Catch::Approx(6.2e-2));
}

TEST_CASE("noise delay wrapping") {
    CHECK(NoiseDelay::wrapped(2.0 * kPi + 0.3).theta == Catch::Approx(0.3).margin(1e-12));
    CHECK(NoiseDelay::wrapped(-0.3).theta == Catch::Approx(2.0 * kPi - 0.3).margin(1e-12));
    CHECK(NoiseDelay::wrapped(0.0).theta == 0.0);
}
