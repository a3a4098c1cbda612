#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <set>
#include <vector>

#include "caf/constellation.hpp"
#include "doctest.h"

using caf::BitLabel;
using caf::Complex;
using caf::Constellation;
using caf::Modulation;

namespace {

int hamming(std::uint32_t a, std::uint32_t b) { return __builtin_popcount(a ^ b); }

// count distinct points up to tolerance
std::size_t distinct_points(const std::vector<Complex>& pts, double tol = 1e-9) {
    std::vector<Complex> uniq;
    for (auto p : pts) {
        bool found = false;
        for (auto q : uniq)
            if (std::abs(p - q) < tol) found = true;
        if (!found) uniq.push_back(p);
    }
    return uniq.size();
}

}  // namespace

TEST_CASE("BitLabel bit indexing is 1-based from the LSB") {
    BitLabel l(0b110u, 3);
    CHECK(l.bit(1) == 0);
    CHECK(l.bit(2) == 1);
    CHECK(l.bit(3) == 1);
    CHECK(l.to_string() == "110");
    CHECK_THROWS_AS(l.bit(0), std::out_of_range);
    CHECK_THROWS_AS(l.bit(4), std::out_of_range);
    CHECK_THROWS_AS(BitLabel(4u, 2), std::invalid_argument);
}

TEST_CASE("xor_labels") {
    CHECK(xor_labels(BitLabel(0b01u, 2), BitLabel(0b01u, 2)) == BitLabel(0b00u, 2));
    CHECK(xor_labels(BitLabel(0b00u, 2), BitLabel(0b01u, 2)) == BitLabel(0b01u, 2));
    CHECK(xor_labels(BitLabel(0b10u, 2), BitLabel(0b11u, 2)) == BitLabel(0b01u, 2));
    CHECK_THROWS_AS(xor_labels(BitLabel(0u, 2), BitLabel(0u, 3)), std::invalid_argument);
}

TEST_CASE("BPSK maps 0 -> +1, 1 -> -1") {
    auto c = Constellation::make(Modulation::bpsk);
    CHECK(c.bits_per_symbol() == 1);
    CHECK(c.map(BitLabel(0u, 1)) == Complex(1.0, 0.0));
    CHECK(c.map(BitLabel(1u, 1)) == Complex(-1.0, 0.0));
}

TEST_CASE("QPSK Gray labeling: angular order 00,01,11,10 from pi/4") {
    auto c = Constellation::make(Modulation::qpsk);
    CHECK(c.bits_per_symbol() == 2);
    const std::uint32_t order[4] = {0b00u, 0b01u, 0b11u, 0b10u};
    for (int k = 0; k < 4; ++k) {
        Complex want = std::polar(1.0, std::numbers::pi / 4 + k * std::numbers::pi / 2);
        CHECK(std::abs(c.map(order[k]) - want) < 1e-12);
    }
}

TEST_CASE("8PSK Gray labeling: adjacent points differ in one bit") {
    auto c = Constellation::make(Modulation::psk8);
    CHECK(c.bits_per_symbol() == 3);
    const std::uint32_t order[8] = {0b000u, 0b001u, 0b011u, 0b010u,
                                    0b110u, 0b111u, 0b101u, 0b100u};
    for (int k = 0; k < 8; ++k) {
        Complex want = std::polar(1.0, k * std::numbers::pi / 4);
        CHECK(std::abs(c.map(order[k]) - want) < 1e-12);
        CHECK(hamming(order[k], order[(k + 1) % 8]) == 1);
    }
}

TEST_CASE("constellations are unit-modulus bijections with exact inverse") {
    for (auto m : {Modulation::bpsk, Modulation::qpsk, Modulation::psk8}) {
        auto c = Constellation::make(m);
        std::set<std::pair<double, double>> seen;
        for (std::uint32_t v = 0; v < c.size(); ++v) {
            Complex p = c.map(v);
            CHECK(std::abs(std::abs(p) - 1.0) < 1e-12);
            seen.insert({p.real(), p.imag()});
            auto back = c.label_of(p);
            CHECK(back.value == v);
            CHECK(back.width == c.bits_per_symbol());
        }
        CHECK(seen.size() == c.size());
        CHECK(c.peak_power() == 1.0);
    }
}

TEST_CASE("custom labelings must be bijections") {
    CHECK_NOTHROW(Constellation::make(Modulation::qpsk, {0u, 1u, 2u, 3u}));
    CHECK_THROWS_AS(Constellation::make(Modulation::qpsk, {0u, 1u, 2u, 2u}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Constellation::make(Modulation::qpsk, {0u, 1u, 2u}), std::invalid_argument);
    CHECK_THROWS_AS(Constellation::make(Modulation::qpsk, {0u, 1u, 2u, 4u}),
                    std::invalid_argument);

    // a non-Gray custom labeling still round-trips
    auto c = Constellation::make(Modulation::qpsk, {3u, 0u, 2u, 1u});
    for (std::uint32_t v = 0; v < 4; ++v) CHECK(c.label_of(c.map(v)).value == v);
}

TEST_CASE("parse/format modulation names") {
    CHECK(caf::parse_modulation("bpsk") == Modulation::bpsk);
    CHECK(caf::parse_modulation("qpsk") == Modulation::qpsk);
    CHECK(caf::parse_modulation("8psk") == Modulation::psk8);
    CHECK_THROWS_AS(caf::parse_modulation("16qam"), std::invalid_argument);
    CHECK(caf::modulation_name(Modulation::psk8) == "8psk");
}

TEST_CASE("received constellation groups match brute force M(a) + M(z^a) e^{i theta}") {
    for (auto m : {Modulation::bpsk, Modulation::qpsk, Modulation::psk8}) {
        auto c = Constellation::make(m);
        const double theta = 0.37;
        auto rc = caf::received_constellation(c, theta);
        const Complex rot = std::polar(1.0, theta);
        REQUIRE(rc.groups.size() == c.size());
        for (std::uint32_t z = 0; z < c.size(); ++z) {
            REQUIRE(rc.groups[z].size() == c.size());
            for (std::uint32_t a = 0; a < c.size(); ++a) {
                Complex want = c.map(a) + c.map(z ^ a) * rot;
                CHECK(std::abs(rc.groups[z][a] - want) < 1e-12);
            }
        }
    }
}

TEST_CASE("QPSK received constellation: 16 distinct points at pi/4, collisions at 0") {
    auto c = Constellation::make(Modulation::qpsk);

    auto all_points = [&](double theta) {
        auto rc = caf::received_constellation(c, theta);
        std::vector<Complex> pts;
        for (auto& g : rc.groups) pts.insert(pts.end(), g.begin(), g.end());
        return pts;
    };

    CHECK(distinct_points(all_points(std::numbers::pi / 4)) == 16);
    // at theta = 0 the two rotated copies coincide: 9 sum points, one (the
    // origin) reached from 4 pairs and the 4 axis points from 2 pairs each
    CHECK(distinct_points(all_points(0.0)) == 9);
}

TEST_CASE("theta=0, z=0 group is noiselessly 2 M(x_A)") {
    for (auto m : {Modulation::qpsk, Modulation::psk8}) {
        auto c = Constellation::make(m);
        auto rc = caf::received_constellation(c, 0.0);
        for (std::uint32_t a = 0; a < c.size(); ++a)
            CHECK(std::abs(rc.groups[0][a] - 2.0 * c.map(a)) < 1e-12);
    }
}
