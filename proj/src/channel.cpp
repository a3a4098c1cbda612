#include "caf/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace caf {

namespace {

// log-sum-exp over a small set of exponents, max-subtracted
double log_sum_exp(const double* t, std::size_t n) {
    double m = t[0];
    for (std::size_t i = 1; i < n; ++i) m = std::max(m, t[i]);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += std::exp(t[i] - m);
    return m + std::log(s);
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
    if (name == "single") return Scheme::single_user;
    if (name == "mac" || name == "sd") return Scheme::mac;
    if (name == "caf") return Scheme::caf_degraded;
    throw std::invalid_argument("unknown scheme: " + name);
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::single_user: return "single";
        case Scheme::mac: return "mac";
        case Scheme::caf_degraded: return "caf";
    }
    return "?";
}

double psnr_to_sigma2(double psnr_db, const Constellation& c) {
    return c.peak_power() * std::pow(10.0, -psnr_db / 10.0);
}

double sigma2_to_psnr(double sigma2, const Constellation& c) {
    return 10.0 * std::log10(c.peak_power() / sigma2);
}

double gaussian_pdf(Complex w, Complex mu, double sigma2) {
    return std::exp(log_gaussian_pdf(w, mu, sigma2));
}

double log_gaussian_pdf(Complex w, Complex mu, double sigma2) {
    if (sigma2 <= 0.0) throw std::invalid_argument("gaussian_pdf: sigma2 must be positive");
    return -std::norm(w - mu) / sigma2 - std::log(std::numbers::pi * sigma2);
}

Complex sample_noise(double sigma2, Rng& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(sigma2 / 2.0));
    double re = g(rng);
    double im = g(rng);
    return Complex(re, im);
}

Complex sample_mac(const BitLabel& x_a, const BitLabel& x_b, const ChannelParams& p, Rng& rng) {
    const Complex rot(std::cos(p.theta), std::sin(p.theta));
    return p.constellation.map(x_a) + p.constellation.map(x_b) * rot + sample_noise(p.sigma2, rng);
}

Complex sample_degraded(const BitLabel& z, const ChannelParams& p, Rng& rng) {
    const int k = p.constellation.bits_per_symbol();
    std::uniform_int_distribution<std::uint32_t> u(0, (1u << k) - 1);
    BitLabel x_a(u(rng), k);
    return sample_mac(x_a, xor_labels(z, x_a), p, rng);
}

Complex sample_single(const BitLabel& x, const ChannelParams& p, Rng& rng) {
    return p.constellation.map(x) + sample_noise(p.sigma2, rng);
}

double log_pdf_degraded(Complex y, const BitLabel& z, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    const std::uint32_t npts = 1u << k;
    const Complex rot(std::cos(p.theta), std::sin(p.theta));
    std::vector<double> t(npts);
    for (std::uint32_t a = 0; a < npts; ++a) {
        Complex mu = p.constellation.map(a) + p.constellation.map(z.value ^ a) * rot;
        t[a] = -std::norm(y - mu) / p.sigma2;
    }
    return log_sum_exp(t.data(), npts) - std::log(std::numbers::pi * p.sigma2) -
           k * std::numbers::ln2;
}

double pdf_degraded(Complex y, const BitLabel& z, const ChannelParams& p) {
    return std::exp(log_pdf_degraded(y, z, p));
}

double log_pdf_single(Complex y, const BitLabel& x, const ChannelParams& p) {
    return log_gaussian_pdf(y, p.constellation.map(x), p.sigma2);
}

double pdf_single(Complex y, const BitLabel& x, const ChannelParams& p) {
    return std::exp(log_pdf_single(y, x, p));
}

double log_pdf_output(Complex y, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    const std::uint32_t npts = 1u << k;
    std::vector<double> t(npts);
    for (std::uint32_t z = 0; z < npts; ++z) {
        const BitLabel l(z, k);
        t[z] = p.scheme == Scheme::single_user ? log_pdf_single(y, l, p)
                                               : log_pdf_degraded(y, l, p);
    }
    return log_sum_exp(t.data(), npts) - k * std::numbers::ln2;
}

double pdf_output(Complex y, const ChannelParams& p) {
    return std::exp(log_pdf_output(y, p));
}

}  // namespace caf
