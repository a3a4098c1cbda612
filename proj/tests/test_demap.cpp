#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "caf/demap.hpp"
#include "doctest.h"

using caf::BitLabel;
using caf::ChannelParams;
using caf::Complex;
using caf::Constellation;
using caf::Modulation;
using caf::Scheme;

namespace {

ChannelParams make_params(Modulation m, double theta, double sigma2, Scheme s) {
    ChannelParams p;
    p.constellation = Constellation::make(m);
    p.theta = theta;
    p.sigma2 = sigma2;
    p.scheme = s;
    return p;
}

// brute-force bit likelihood: average of conditional pdfs over labels with
// the requested bit value
double oracle_likelihood(Complex y, int s, int u, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    double acc = 0.0;
    int count = 0;
    for (std::uint32_t v = 0; v < (1u << k); ++v) {
        BitLabel l(v, k);
        if (l.bit(s) != u) continue;
        acc += (p.scheme == Scheme::single_user) ? caf::pdf_single(y, l, p)
                                                 : caf::pdf_degraded(y, l, p);
        ++count;
    }
    return acc / count;
}

double oracle_llr(Complex y, int s, const ChannelParams& p) {
    return caf::clamp_llr(std::log(oracle_likelihood(y, s, 1, p) / oracle_likelihood(y, s, 0, p)));
}

}  // namespace

TEST_CASE("K=1 likelihoods are single conditional pdfs") {
    auto p = make_params(Modulation::bpsk, 0.0, 0.5, Scheme::single_user);
    Complex y(0.3, -0.1);
    CHECK(caf::likelihood_single(y, 1, 0, p) ==
          doctest::Approx(caf::pdf_single(y, BitLabel(0u, 1), p)).epsilon(1e-12));
    CHECK(caf::likelihood_single(y, 1, 1, p) ==
          doctest::Approx(caf::pdf_single(y, BitLabel(1u, 1), p)).epsilon(1e-12));

    auto pc = make_params(Modulation::bpsk, 0.4, 0.5, Scheme::caf_degraded);
    CHECK(caf::likelihood_caf(y, 1, 1, pc) ==
          doctest::Approx(caf::pdf_degraded(y, BitLabel(1u, 1), pc)).epsilon(1e-12));
}

TEST_CASE("partition identity: L[y|0] + L[y|1] = 2 p_Y(y)") {
    auto p = make_params(Modulation::qpsk, std::numbers::pi / 4, 0.4, Scheme::caf_degraded);
    for (Complex y : {Complex(0.2, 0.2), Complex(-1.5, 0.8), Complex(0.9, -2.2)}) {
        for (int s = 1; s <= 2; ++s) {
            double lhs = caf::likelihood_caf(y, s, 0, p) + caf::likelihood_caf(y, s, 1, p);
            CHECK(lhs == doctest::Approx(2.0 * caf::pdf_output(y, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("LLRs match the brute-force enumeration oracle") {
    std::vector<Complex> ys = {Complex(0.0, 0.01), Complex(1.1, -0.4), Complex(-0.6, 0.9),
                               Complex(2.5, 2.5)};
    for (auto m : {Modulation::qpsk, Modulation::psk8}) {
        auto ps = make_params(m, 0.0, 0.3, Scheme::single_user);
        auto pc = make_params(m, 0.47, 0.3, Scheme::caf_degraded);
        const int k = ps.constellation.bits_per_symbol();
        for (Complex y : ys) {
            for (int s = 1; s <= k; ++s) {
                CHECK(caf::llr_single(y, s, ps) == doctest::Approx(oracle_llr(y, s, ps)).epsilon(1e-9));
                CHECK(caf::llr_caf(y, s, pc) == doctest::Approx(oracle_llr(y, s, pc)).epsilon(1e-9));
                CHECK(caf::llr(y, s, ps) == doctest::Approx(caf::llr_single(y, s, ps)));
                CHECK(caf::llr(y, s, pc) == doctest::Approx(caf::llr_caf(y, s, pc)));
            }
        }
    }
}

TEST_CASE("BPSK single-user LLR has the closed form -4 Re(y) / sigma2") {
    auto p = make_params(Modulation::bpsk, 0.0, 0.6, Scheme::single_user);
    for (double re : {-1.3, -0.2, 0.0, 0.4, 2.0}) {
        Complex y(re, 0.7);
        CHECK(caf::llr_single(y, 1, p) ==
              doctest::Approx(caf::clamp_llr(-4.0 * re / p.sigma2)).epsilon(1e-12));
    }
}

TEST_CASE("LLR clamps at +-50") {
    auto p = make_params(Modulation::bpsk, 0.0, 0.01, Scheme::single_user);
    CHECK(caf::llr_single(Complex(-5.0, 0.0), 1, p) == 50.0);
    CHECK(caf::llr_single(Complex(5.0, 0.0), 1, p) == -50.0);
}

TEST_CASE("exp(llr) equals the likelihood ratio away from the clamp") {
    auto p = make_params(Modulation::psk8, std::numbers::pi / 8, 0.5, Scheme::caf_degraded);
    Complex y(0.8, -0.3);
    for (int s = 1; s <= 3; ++s) {
        double lam = caf::llr_caf(y, s, p);
        REQUIRE(std::abs(lam) < 49.0);
        double ratio = caf::likelihood_caf(y, s, 1, p) / caf::likelihood_caf(y, s, 0, p);
        CHECK(std::exp(lam) == doctest::Approx(ratio).epsilon(1e-12));
    }
}

TEST_CASE("LLR changes sign across a numerically located zero crossing") {
    // single-user QPSK, bit 1: moving y along the real axis at fixed
    // imaginary part flips the bit-1 decision somewhere; bisect the zero and
    // check the demapper is consistent on both sides
    auto p = make_params(Modulation::qpsk, 0.0, 0.35, Scheme::single_user);
    auto f = [&](double x) { return caf::llr_single(Complex(x, 0.2), 1, p); };
    double lo = -2.0, hi = 2.0;
    REQUIRE(f(lo) * f(hi) < 0.0);
    for (int i = 0; i < 80; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    double zero = 0.5 * (lo + hi);
    CHECK(std::abs(f(zero)) < 1e-9);
    CHECK(f(zero - 0.01) * f(zero + 0.01) < 0.0);
}

TEST_CASE("BPSK theta=0 CAF demapper equals the two-level mixture demapper") {
    // with BPSK and theta = 0 the degraded channel collapses to a real
    // mixture at {+-2, 0}: z=0 -> (1/2)(N(2) + N(-2)), z=1 -> N(0)
    auto p = make_params(Modulation::bpsk, 0.0, 0.45, Scheme::caf_degraded);
    for (double re : {-2.4, -0.7, 0.0, 0.3, 1.9}) {
        Complex y(re, -0.5);
        double l0 = 0.5 * (caf::gaussian_pdf(y, Complex(2, 0), p.sigma2) +
                           caf::gaussian_pdf(y, Complex(-2, 0), p.sigma2));
        double l1 = caf::gaussian_pdf(y, Complex(0, 0), p.sigma2);
        CHECK(caf::llr_caf(y, 1, p) == doctest::Approx(caf::clamp_llr(std::log(l1 / l0))).epsilon(1e-10));
    }
}

TEST_CASE("BatchDemapper agrees with the scalar demapper") {
    for (auto scheme : {Scheme::single_user, Scheme::caf_degraded}) {
        auto p = make_params(Modulation::psk8, 0.31, 0.4, scheme);
        caf::BatchDemapper bd(p);
        CHECK(bd.bits_per_symbol() == 3);
        CHECK(bd.num_hypotheses() == 8);

        caf::Rng rng(1234);
        std::vector<Complex> ys(257);
        for (auto& y : ys) {
            BitLabel z(static_cast<std::uint32_t>(rng() & 7u), 3);
            y = (scheme == Scheme::single_user) ? caf::sample_single(z, p, rng)
                                                : caf::sample_degraded(z, p, rng);
        }

        std::vector<double> out(ys.size());
        for (int s = 1; s <= 3; ++s) {
            bd.llr(ys, s, out.data());
            for (std::size_t i = 0; i < ys.size(); ++i)
                CHECK(out[i] == doctest::Approx(caf::llr(ys[i], s, p)).epsilon(1e-10));
        }

        // precomputed-matrix path matches, and the output pdf matches too
        std::vector<double> logp(bd.num_hypotheses() * ys.size());
        bd.log_hypothesis_pdfs(ys, logp.data());
        bd.llr_from(logp.data(), ys.size(), 2, out.data());
        for (std::size_t i = 0; i < ys.size(); ++i)
            CHECK(out[i] == doctest::Approx(caf::llr(ys[i], 2, p)).epsilon(1e-10));

        std::vector<double> logpy(ys.size());
        bd.log_output_pdf(logp.data(), ys.size(), logpy.data());
        for (std::size_t i = 0; i < ys.size(); ++i)
            CHECK(logpy[i] == doctest::Approx(caf::log_pdf_output(ys[i], p)).epsilon(1e-10));
    }
}
