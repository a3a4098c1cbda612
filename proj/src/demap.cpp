#include "caf/demap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "caf/kernels.hpp"

namespace caf {

namespace {

void check_bit_index(int s, int k) {
    if (s < 1 || s > k) throw std::out_of_range("demap: bit index s out of range");
}

}  // namespace

double likelihood_single(Complex y, int s, int u, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    check_bit_index(s, k);
    const std::uint32_t npts = 1u << k;
    double sum = 0.0;
    for (std::uint32_t x = 0; x < npts; ++x)
        if (((x >> (s - 1)) & 1u) == static_cast<std::uint32_t>(u))
            sum += pdf_single(y, BitLabel(x, k), p);
    return sum / static_cast<double>(npts / 2);
}

double likelihood_caf(Complex y, int s, int u, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    check_bit_index(s, k);
    const std::uint32_t npts = 1u << k;
    double sum = 0.0;
    for (std::uint32_t z = 0; z < npts; ++z)
        if (((z >> (s - 1)) & 1u) == static_cast<std::uint32_t>(u))
            sum += pdf_degraded(y, BitLabel(z, k), p);
    return sum / static_cast<double>(npts / 2);
}

double llr_single(Complex y, int s, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    check_bit_index(s, k);
    const std::uint32_t npts = 1u << k;
    // log-domain with max subtraction per class
    double m0 = -std::numeric_limits<double>::infinity(), m1 = m0;
    std::vector<double> lp(npts);
    for (std::uint32_t x = 0; x < npts; ++x) {
        lp[x] = log_pdf_single(y, BitLabel(x, k), p);
        (((x >> (s - 1)) & 1u) ? m1 : m0) = std::max(((x >> (s - 1)) & 1u) ? m1 : m0, lp[x]);
    }
    double s0 = 0.0, s1 = 0.0;
    for (std::uint32_t x = 0; x < npts; ++x) {
        if ((x >> (s - 1)) & 1u)
            s1 += std::exp(lp[x] - m1);
        else
            s0 += std::exp(lp[x] - m0);
    }
    return clamp_llr((m1 + std::log(s1)) - (m0 + std::log(s0)));
}

double llr_caf(Complex y, int s, const ChannelParams& p) {
    const int k = p.constellation.bits_per_symbol();
    check_bit_index(s, k);
    const std::uint32_t npts = 1u << k;
    double m0 = -std::numeric_limits<double>::infinity(), m1 = m0;
    std::vector<double> lp(npts);
    for (std::uint32_t z = 0; z < npts; ++z) {
        lp[z] = log_pdf_degraded(y, BitLabel(z, k), p);
        (((z >> (s - 1)) & 1u) ? m1 : m0) = std::max(((z >> (s - 1)) & 1u) ? m1 : m0, lp[z]);
    }
    double s0 = 0.0, s1 = 0.0;
    for (std::uint32_t z = 0; z < npts; ++z) {
        if ((z >> (s - 1)) & 1u)
            s1 += std::exp(lp[z] - m1);
        else
            s0 += std::exp(lp[z] - m0);
    }
    return clamp_llr((m1 + std::log(s1)) - (m0 + std::log(s0)));
}

double llr(Complex y, int s, const ChannelParams& p) {
    switch (p.scheme) {
        case Scheme::single_user: return llr_single(y, s, p);
        case Scheme::caf_degraded: return llr_caf(y, s, p);
        default: throw std::invalid_argument("llr: scheme has no bit-level demapper");
    }
}

// --- BatchDemapper ------------------------------------------------------

BatchDemapper::BatchDemapper(const ChannelParams& p)
    : k_(p.constellation.bits_per_symbol()), sigma2_(p.sigma2) {
    const std::uint32_t npts = 1u << k_;
    if (p.scheme == Scheme::single_user) {
        means_.resize(npts);
        for (std::uint32_t x = 0; x < npts; ++x) means_[x] = {p.constellation.map(x)};
    } else if (p.scheme == Scheme::caf_degraded || p.scheme == Scheme::mac) {
        ReceivedConstellation rc = received_constellation(p.constellation, p.theta);
        means_.resize(npts);
        for (std::uint32_t z = 0; z < npts; ++z) means_[z] = rc.groups[z];
    } else {
        throw std::invalid_argument("BatchDemapper: unsupported scheme");
    }
    log_const_ = -std::log(std::numbers::pi * sigma2_) -
                 std::log(static_cast<double>(means_[0].size()));
}

void BatchDemapper::log_hypothesis_pdfs(std::span<const Complex> ys, double* out) const {
    const auto& ops = kernels::active();
    const std::size_t n = ys.size();
    const std::size_t nh = means_.size();
    const std::size_t nc = means_[0].size();
    const double inv_s2 = 1.0 / sigma2_;

    std::vector<double> expo(nc * n), maxv(n), acc(n), work(n);
    for (std::size_t h = 0; h < nh; ++h) {
        for (std::size_t c = 0; c < nc; ++c) {
            const Complex mu = means_[h][c];
            double* row = expo.data() + c * n;
            for (std::size_t i = 0; i < n; ++i) {
                const double dr = ys[i].real() - mu.real();
                const double di = ys[i].imag() - mu.imag();
                row[i] = -(dr * dr + di * di) * inv_s2;
            }
        }
        double* dst = out + h * n;
        if (nc == 1) {
            for (std::size_t i = 0; i < n; ++i) dst[i] = expo[i] + log_const_;
            continue;
        }
        for (std::size_t i = 0; i < n; ++i) maxv[i] = expo[i];
        for (std::size_t c = 1; c < nc; ++c) {
            const double* row = expo.data() + c * n;
            for (std::size_t i = 0; i < n; ++i)
                if (row[i] > maxv[i]) maxv[i] = row[i];
        }
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t c = 0; c < nc; ++c) {
            const double* row = expo.data() + c * n;
            for (std::size_t i = 0; i < n; ++i) work[i] = row[i] - maxv[i];
            ops.vexp(work.data(), work.data(), n);
            ops.add(acc.data(), work.data(), n);
        }
        ops.vlog(acc.data(), dst, n);
        for (std::size_t i = 0; i < n; ++i) dst[i] += maxv[i] + log_const_;
    }
}

void BatchDemapper::llr_from(const double* logp, std::size_t n, int s, double* out) const {
    check_bit_index(s, k_);
    const auto& ops = kernels::active();
    const std::size_t nh = means_.size();
    std::vector<double> m0(n), m1(n), a0(n, 0.0), a1(n, 0.0), work(n), l0(n);
    bool init0 = false, init1 = false;
    for (std::size_t h = 0; h < nh; ++h) {
        const double* row = logp + h * n;
        auto& m = ((h >> (s - 1)) & 1u) ? m1 : m0;
        bool& init = ((h >> (s - 1)) & 1u) ? init1 : init0;
        if (!init) {
            std::copy(row, row + n, m.begin());
            init = true;
        } else {
            for (std::size_t i = 0; i < n; ++i)
                if (row[i] > m[i]) m[i] = row[i];
        }
    }
    for (std::size_t h = 0; h < nh; ++h) {
        const double* row = logp + h * n;
        const bool one = (h >> (s - 1)) & 1u;
        const double* m = (one ? m1 : m0).data();
        for (std::size_t i = 0; i < n; ++i) work[i] = row[i] - m[i];
        ops.vexp(work.data(), work.data(), n);
        ops.add((one ? a1 : a0).data(), work.data(), n);
    }
    ops.vlog(a0.data(), l0.data(), n);
    ops.vlog(a1.data(), out, n);
    for (std::size_t i = 0; i < n; ++i) out[i] = (out[i] + m1[i]) - (l0[i] + m0[i]);
    ops.clamp(out, n, kLlrClamp);
}

void BatchDemapper::llr(std::span<const Complex> ys, int s, double* out) const {
    const std::size_t n = ys.size();
    std::vector<double> logp(means_.size() * n);
    log_hypothesis_pdfs(ys, logp.data());
    llr_from(logp.data(), n, s, out);
}

void BatchDemapper::log_output_pdf(const double* logp, std::size_t n, double* out) const {
    const auto& ops = kernels::active();
    const std::size_t nh = means_.size();
    std::vector<double> m(n), acc(n, 0.0), work(n);
    std::copy(logp, logp + n, m.begin());
    for (std::size_t h = 1; h < nh; ++h) {
        const double* row = logp + h * n;
        for (std::size_t i = 0; i < n; ++i)
            if (row[i] > m[i]) m[i] = row[i];
    }
    for (std::size_t h = 0; h < nh; ++h) {
        const double* row = logp + h * n;
        for (std::size_t i = 0; i < n; ++i) work[i] = row[i] - m[i];
        ops.vexp(work.data(), work.data(), n);
        ops.add(acc.data(), work.data(), n);
    }
    ops.vlog(acc.data(), out, n);
    const double lognh = std::log(static_cast<double>(nh));
    for (std::size_t i = 0; i < n; ++i) out[i] += m[i] - lognh;
}

}  // namespace caf
