#pragma once

#include <complex>

#include "caf/constellation.hpp"
#include "caf/rng.hpp"

namespace caf {

enum class Scheme { single_user, mac, caf_degraded };

Scheme parse_scheme(const std::string& name);  // "single" | "mac" | "caf"
std::string scheme_name(Scheme s);

struct ChannelParams {
    Constellation constellation;
    double theta = 0.0;   // phase difference between the two terminals
    double sigma2 = 1.0;  // complex noise variance (linear)
    Scheme scheme = Scheme::single_user;
};

// PSNR = 10 log10(max |r|^2 / sigma^2); unit peak power for PSK.
double psnr_to_sigma2(double psnr_db, const Constellation& c);
double sigma2_to_psnr(double sigma2, const Constellation& c);

// Circularly-symmetric complex Gaussian density (1/(pi s2)) exp(-|w-mu|^2/s2)
double gaussian_pdf(Complex w, Complex mu, double sigma2);
double log_gaussian_pdf(Complex w, Complex mu, double sigma2);

// w ~ CN(0, sigma2): Re, Im independent N(0, sigma2/2)
Complex sample_noise(double sigma2, Rng& rng);

// Y = M(x_A) + M(x_B) e^{i theta} + W
Complex sample_mac(const BitLabel& x_a, const BitLabel& x_b, const ChannelParams& p, Rng& rng);

// Degraded channel: x_A uniform, x_B = z ^ x_A
Complex sample_degraded(const BitLabel& z, const ChannelParams& p, Rng& rng);

// Single-user CAWGN: Y = M(x) + W
Complex sample_single(const BitLabel& x, const ChannelParams& p, Rng& rng);

// p_{Y|Z}(y|z): 1/2^K mixture over pairs with x_A ^ x_B = z (log-domain core)
double pdf_degraded(Complex y, const BitLabel& z, const ChannelParams& p);
double log_pdf_degraded(Complex y, const BitLabel& z, const ChannelParams& p);

// p_{Y|X}(y|x) for the single-user channel
double pdf_single(Complex y, const BitLabel& x, const ChannelParams& p);
double log_pdf_single(Complex y, const BitLabel& x, const ChannelParams& p);

// p_Y(y): uniform mixture over all 2^{2K} transmit pairs
double pdf_output(Complex y, const ChannelParams& p);
double log_pdf_output(Complex y, const ChannelParams& p);

}  // namespace caf
