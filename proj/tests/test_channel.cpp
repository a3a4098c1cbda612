#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "caf/channel.hpp"
#include "doctest.h"

using caf::BitLabel;
using caf::ChannelParams;
using caf::Complex;
using caf::Constellation;
using caf::Modulation;
using caf::Scheme;

namespace {

// Gauss-Legendre-free 2D integration: midpoint rule on a fine square grid,
// good enough for the normalization tolerances below.
template <class F>
double integrate2d(F f, double extent, int steps) {
    const double h = 2.0 * extent / steps;
    double total = 0.0;
    for (int i = 0; i < steps; ++i) {
        const double x = -extent + (i + 0.5) * h;
        for (int j = 0; j < steps; ++j) {
            const double y = -extent + (j + 0.5) * h;
            total += f(Complex(x, y));
        }
    }
    return total * h * h;
}

ChannelParams make_params(Modulation m, double theta, double sigma2, Scheme s) {
    ChannelParams p;
    p.constellation = Constellation::make(m);
    p.theta = theta;
    p.sigma2 = sigma2;
    p.scheme = s;
    return p;
}

}  // namespace

TEST_CASE("PSNR <-> sigma^2 for unit-peak PSK") {
    auto c = Constellation::make(Modulation::qpsk);
    CHECK(caf::psnr_to_sigma2(0.0, c) == doctest::Approx(1.0));
    CHECK(caf::psnr_to_sigma2(10.0, c) == doctest::Approx(0.1));
    CHECK(caf::psnr_to_sigma2(6.0, c) == doctest::Approx(std::pow(10.0, -0.6)));
    for (double p : {-3.0, 0.0, 4.5, 20.0})
        CHECK(caf::sigma2_to_psnr(caf::psnr_to_sigma2(p, c), c) == doctest::Approx(p));
}

TEST_CASE("complex Gaussian density values and log consistency") {
    const double s2 = 0.7;
    // at the mean: 1 / (pi sigma^2)
    CHECK(caf::gaussian_pdf(Complex(1.0, -2.0), Complex(1.0, -2.0), s2) ==
          doctest::Approx(1.0 / (std::numbers::pi * s2)).epsilon(1e-12));
    // one unit away: multiply by exp(-1/s2)
    Complex mu(0.3, 0.4);
    Complex w = mu + Complex(1.0, 0.0);
    CHECK(caf::gaussian_pdf(w, mu, s2) ==
          doctest::Approx(std::exp(-1.0 / s2) / (std::numbers::pi * s2)).epsilon(1e-12));
    CHECK(caf::log_gaussian_pdf(w, mu, s2) ==
          doctest::Approx(std::log(caf::gaussian_pdf(w, mu, s2))).epsilon(1e-12));

    // normalizes to 1 over the plane
    double mass = integrate2d([&](Complex y) { return caf::gaussian_pdf(y, mu, s2); }, 6.0, 600);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("pdf_degraded matches brute-force pair enumeration") {
    for (auto m : {Modulation::bpsk, Modulation::qpsk, Modulation::psk8}) {
        auto p = make_params(m, 0.53, 0.4, Scheme::caf_degraded);
        const auto& c = p.constellation;
        const std::size_t q = c.size();
        const Complex rot = std::polar(1.0, p.theta);
        for (Complex y : {Complex(0.1, -0.2), Complex(1.4, 0.9), Complex(-2.0, 0.3)}) {
            for (std::uint32_t z = 0; z < q; ++z) {
                double want = 0.0;
                for (std::uint32_t a = 0; a < q; ++a)
                    want += caf::gaussian_pdf(y, c.map(a) + c.map(z ^ a) * rot, p.sigma2);
                want /= static_cast<double>(q);
                BitLabel zl(z, c.bits_per_symbol());
                CHECK(caf::pdf_degraded(y, zl, p) == doctest::Approx(want).epsilon(1e-12));
                CHECK(caf::log_pdf_degraded(y, zl, p) ==
                      doctest::Approx(std::log(want)).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("pdf_single matches the direct Gaussian") {
    auto p = make_params(Modulation::psk8, 0.0, 0.25, Scheme::single_user);
    for (std::uint32_t v = 0; v < 8; ++v) {
        BitLabel x(v, 3);
        Complex y(0.4, -1.1);
        CHECK(caf::pdf_single(y, x, p) ==
              doctest::Approx(caf::gaussian_pdf(y, p.constellation.map(v), p.sigma2))
                  .epsilon(1e-12));
    }
}

TEST_CASE("conditional pdfs normalize over the plane") {
    auto p = make_params(Modulation::qpsk, std::numbers::pi / 4, 0.5, Scheme::caf_degraded);
    double mass = integrate2d(
        [&](Complex y) { return caf::pdf_degraded(y, BitLabel(0b01u, 2), p); }, 7.0, 700);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));

    auto ps = make_params(Modulation::qpsk, 0.0, 0.5, Scheme::single_user);
    double mass_s =
        integrate2d([&](Complex y) { return caf::pdf_single(y, BitLabel(0b10u, 2), ps); }, 6.0, 600);
    CHECK(mass_s == doctest::Approx(1.0).epsilon(1e-6));

    double mass_o = integrate2d([&](Complex y) { return caf::pdf_output(y, p); }, 7.0, 700);
    CHECK(mass_o == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("mixture identity: mean of p(y|z) over z equals p_Y(y)") {
    auto p = make_params(Modulation::qpsk, 0.61, 0.33, Scheme::caf_degraded);
    for (Complex y : {Complex(0.0, 0.0), Complex(1.2, -0.7), Complex(-0.4, 1.9)}) {
        double mix = 0.0;
        for (std::uint32_t z = 0; z < 4; ++z) mix += caf::pdf_degraded(y, BitLabel(z, 2), p);
        mix /= 4.0;
        CHECK(caf::pdf_output(y, p) == doctest::Approx(mix).epsilon(1e-12));
    }
}

TEST_CASE("sample_mac statistics: mean is the noiseless point, variance sigma2") {
    auto p = make_params(Modulation::qpsk, std::numbers::pi / 4, 0.8, Scheme::mac);
    BitLabel xa(0b10u, 2), xb(0b01u, 2);
    const Complex mean_want =
        p.constellation.map(xa) + p.constellation.map(xb) * std::polar(1.0, p.theta);
    caf::Rng rng(99);
    const int n = 200000;
    Complex acc(0, 0);
    double var = 0.0;
    for (int i = 0; i < n; ++i) {
        Complex y = caf::sample_mac(xa, xb, p, rng);
        acc += y;
        var += std::norm(y - mean_want);
    }
    acc /= static_cast<double>(n);
    var /= static_cast<double>(n);
    CHECK(std::abs(acc - mean_want) < 0.01);
    CHECK(var == doctest::Approx(p.sigma2).epsilon(0.02));
}

TEST_CASE("sample_degraded draws x_A uniformly within the group") {
    auto p = make_params(Modulation::qpsk, std::numbers::pi / 4, 1e-6, Scheme::caf_degraded);
    auto rc = caf::received_constellation(p.constellation, p.theta);
    BitLabel z(0b11u, 2);
    caf::Rng rng(7);
    const int n = 40000;
    std::vector<int> counts(4, 0);
    for (int i = 0; i < n; ++i) {
        Complex y = caf::sample_degraded(z, p, rng);
        int best = -1;
        double best_d = 1e9;
        for (int a = 0; a < 4; ++a) {
            double d = std::abs(y - rc.groups[z.value][a]);
            if (d < best_d) {
                best_d = d;
                best = a;
            }
        }
        REQUIRE(best_d < 0.1);  // noise nearly off: the group point is unambiguous
        ++counts[best];
    }
    // chi-squared uniformity over the 4 mixture components, 3 dof; 21.1 is
    // far beyond the 99.99th percentile
    double chi2 = 0.0;
    const double expect = n / 4.0;
    for (int a = 0; a < 4; ++a) chi2 += (counts[a] - expect) * (counts[a] - expect) / expect;
    CHECK(chi2 < 21.1);
}

TEST_CASE("sample_single recentres on the mapped symbol") {
    auto p = make_params(Modulation::bpsk, 0.0, 1e-8, Scheme::single_user);
    caf::Rng rng(3);
    CHECK(std::abs(caf::sample_single(BitLabel(1u, 1), p, rng) - Complex(-1.0, 0.0)) < 1e-3);
}

TEST_CASE("scheme names parse including the sd alias") {
    CHECK(caf::parse_scheme("single") == Scheme::single_user);
    CHECK(caf::parse_scheme("mac") == Scheme::mac);
    CHECK(caf::parse_scheme("sd") == Scheme::mac);
    CHECK(caf::parse_scheme("caf") == Scheme::caf_degraded);
    CHECK_THROWS_AS(caf::parse_scheme("relay"), std::invalid_argument);
}
