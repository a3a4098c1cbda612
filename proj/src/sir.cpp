#include "caf/sir.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "caf/kernels.hpp"

namespace caf {

namespace {

constexpr double kLog2 = std::numbers::ln2;

double log2_gauss_entropy_term(double sigma2) {
    // integral of F_c log2 F_c = -log2(pi e sigma^2)
    return -std::log2(std::numbers::pi * std::numbers::e * sigma2);
}

struct McAccum {
    double sum = 0.0;
    double sumsq = 0.0;
    std::size_t n = 0;
};

// Per-sample mutual-information contributions in bits, block by block.
// kind: 0 = caf (log2 p(y|z) - log2 pY), 1 = output entropy only (-log2 pY).
McAccum mc_blocks(const ChannelParams& p, int kind, std::size_t n_samples, std::uint64_t seed,
                  std::uint64_t stream_base) {
    const auto& ops = kernels::active();
    const int k = p.constellation.bits_per_symbol();
    const std::uint32_t npts = 1u << k;
    const Complex rot(std::cos(p.theta), std::sin(p.theta));
    BatchDemapper demap(p);

    constexpr std::size_t block = 8192;
    std::vector<Complex> ys(block);
    std::vector<std::uint32_t> zs(block);
    std::vector<double> logp(demap.num_hypotheses() * block), lpy(block), contrib(block);

    McAccum acc;
    std::uint64_t blk_idx = 0;
    std::size_t remaining = n_samples;
    while (remaining > 0) {
        const std::size_t bn = std::min(block, remaining);
        Rng rng = substream(seed, stream_base + blk_idx++);
        std::uniform_int_distribution<std::uint32_t> u(0, npts - 1);
        for (std::size_t i = 0; i < bn; ++i) {
            const std::uint32_t xa = u(rng), xb = u(rng);
            zs[i] = xa ^ xb;
            ys[i] = p.constellation.map(xa) + p.constellation.map(xb) * rot +
                    sample_noise(p.sigma2, rng);
        }
        demap.log_hypothesis_pdfs(std::span<const Complex>(ys.data(), bn), logp.data());
        demap.log_output_pdf(logp.data(), bn, lpy.data());
        if (kind == 0) {
            for (std::size_t i = 0; i < bn; ++i)
                contrib[i] = (logp[zs[i] * bn + i] - lpy[i]) / kLog2;
        } else {
            for (std::size_t i = 0; i < bn; ++i) contrib[i] = -lpy[i] / kLog2;
        }
        acc.sum += ops.sum(contrib.data(), bn);
        for (std::size_t i = 0; i < bn; ++i) contrib[i] *= contrib[i];
        acc.sumsq += ops.sum(contrib.data(), bn);
        acc.n += bn;
        remaining -= bn;
    }
    return acc;
}

// Single-user variant: y drawn from the single-user channel.
McAccum mc_blocks_single(const ChannelParams& p, std::size_t n_samples, std::uint64_t seed,
                         std::uint64_t stream_base) {
    const auto& ops = kernels::active();
    const int k = p.constellation.bits_per_symbol();
    const std::uint32_t npts = 1u << k;
    BatchDemapper demap(p);

    constexpr std::size_t block = 8192;
    std::vector<Complex> ys(block);
    std::vector<double> logp(demap.num_hypotheses() * block), lpy(block), contrib(block);

    McAccum acc;
    std::uint64_t blk_idx = 0;
    std::size_t remaining = n_samples;
    while (remaining > 0) {
        const std::size_t bn = std::min(block, remaining);
        Rng rng = substream(seed, stream_base + blk_idx++);
        std::uniform_int_distribution<std::uint32_t> u(0, npts - 1);
        for (std::size_t i = 0; i < bn; ++i)
            ys[i] = p.constellation.map(u(rng)) + sample_noise(p.sigma2, rng);
        demap.log_hypothesis_pdfs(std::span<const Complex>(ys.data(), bn), logp.data());
        demap.log_output_pdf(logp.data(), bn, lpy.data());
        for (std::size_t i = 0; i < bn; ++i) contrib[i] = -lpy[i] / kLog2;
        acc.sum += ops.sum(contrib.data(), bn);
        for (std::size_t i = 0; i < bn; ++i) contrib[i] *= contrib[i];
        acc.sumsq += ops.sum(contrib.data(), bn);
        acc.n += bn;
        remaining -= bn;
    }
    return acc;
}

McAccum mc_parallel(const ChannelParams& p, int kind, bool single_user, const SirOptions& opt) {
    const int workers = std::max(1, opt.workers);
    auto run = [&](std::size_t count, std::uint64_t stream_base) {
        return single_user ? mc_blocks_single(p, count, opt.seed, stream_base)
                           : mc_blocks(p, kind, count, opt.seed, stream_base);
    };
    if (workers == 1) return run(opt.samples, 0);
    // fixed stream partitioning keeps results independent of scheduling
    const std::size_t per = (opt.samples + workers - 1) / workers;
    std::vector<McAccum> parts(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        const std::size_t lo = static_cast<std::size_t>(w) * per;
        const std::size_t count = lo < opt.samples ? std::min(per, opt.samples - lo) : 0;
        pool.emplace_back([&, w, count] {
            parts[w] = run(count, static_cast<std::uint64_t>(w) * (1ULL << 32));
        });
    }
    for (auto& th : pool) th.join();
    McAccum total;
    for (const auto& a : parts) {
        total.sum += a.sum;
        total.sumsq += a.sumsq;
        total.n += a.n;
    }
    return total;
}

SirEstimate from_accum(const McAccum& a, double scale, double shift) {
    // value = scale * (mean + shift)
    const double mean = a.sum / static_cast<double>(a.n);
    const double var = std::max(0.0, a.sumsq / static_cast<double>(a.n) - mean * mean);
    SirEstimate est;
    est.method = SirBackend::monte_carlo;
    est.value = scale * (mean + shift);
    est.stderr_ = std::abs(scale) * std::sqrt(var / static_cast<double>(a.n));
    return est;
}

// --- quadrature backend -------------------------------------------------

// integral of q log2 r, q a uniform Gaussian mixture with the given means
template <class LogR>
double quad_cross(const std::vector<Complex>& means, double sigma2, int order, LogR&& log2_r) {
    std::vector<double> x, w;
    gauss_hermite(order, x, w);
    const double sigma = std::sqrt(sigma2);
    double total = 0.0;
    for (const Complex& mu : means) {
        double comp = 0.0;
        for (int i = 0; i < order; ++i) {
            double row = 0.0;
            for (int j = 0; j < order; ++j)
                row += w[j] * log2_r(mu + sigma * Complex(x[i], x[j]));
            comp += w[i] * row;
        }
        total += comp;
    }
    return total / (std::numbers::pi * static_cast<double>(means.size()));
}

double quad_caf_value(const ChannelParams& p, int order) {
    const int k = p.constellation.bits_per_symbol();
    const std::uint32_t npts = 1u << k;
    ReceivedConstellation rc = received_constellation(p.constellation, p.theta);
    double a = 0.0;
    for (std::uint32_t z = 0; z < npts; ++z) {
        BitLabel zl(z, k);
        a += quad_cross(rc.groups[z], p.sigma2, order,
                        [&](Complex y) { return log_pdf_degraded(y, zl, p) / kLog2; });
    }
    a /= static_cast<double>(npts);
    std::vector<Complex> all;
    for (const auto& g : rc.groups) all.insert(all.end(), g.begin(), g.end());
    const double b =
        quad_cross(all, p.sigma2, order, [&](Complex y) { return log_pdf_output(y, p) / kLog2; });
    return a - b;
}

double quad_output_entropy(const ChannelParams& p, int order, bool single_user) {
    std::vector<Complex> means;
    if (single_user) {
        for (std::uint32_t x = 0; x < p.constellation.size(); ++x)
            means.push_back(p.constellation.map(x));
        ChannelParams ps = p;
        return -quad_cross(means, p.sigma2, order, [&](Complex y) {
            // p_Y for the single-user channel: uniform mixture over labels
            const int k = ps.constellation.bits_per_symbol();
            double m = -std::numeric_limits<double>::infinity();
            std::vector<double> t(ps.constellation.size());
            for (std::uint32_t x = 0; x < ps.constellation.size(); ++x) {
                t[x] = log_pdf_single(y, BitLabel(x, k), ps);
                m = std::max(m, t[x]);
            }
            double s = 0.0;
            for (double v : t) s += std::exp(v - m);
            return (m + std::log(s) - std::log(static_cast<double>(ps.constellation.size()))) /
                   kLog2;
        });
    }
    ReceivedConstellation rc = received_constellation(p.constellation, p.theta);
    for (const auto& g : rc.groups) means.insert(means.end(), g.begin(), g.end());
    return -quad_cross(means, p.sigma2, order,
                       [&](Complex y) { return log_pdf_output(y, p) / kLog2; });
}

SirEstimate quad_estimate(double value_hi, double value_lo) {
    SirEstimate est;
    est.method = SirBackend::quadrature;
    est.value = value_hi;
    est.stderr_ = std::abs(value_hi - value_lo);
    return est;
}

}  // namespace

SirBackend parse_sir_backend(const std::string& name) {
    if (name == "mc") return SirBackend::monte_carlo;
    if (name == "quad") return SirBackend::quadrature;
    throw std::invalid_argument("unknown SIR backend: " + name);
}

SirEstimate sir_caf(const ChannelParams& p, const SirOptions& opt) {
    if (p.scheme != Scheme::caf_degraded)
        throw std::invalid_argument("sir_caf: scheme must be caf-degraded");
    if (opt.backend == SirBackend::monte_carlo) {
        return from_accum(mc_parallel(p, 0, false, opt), 1.0, 0.0);
    }
    const int lo_order = std::max(8, opt.quad_order - 8);
    return quad_estimate(quad_caf_value(p, opt.quad_order), quad_caf_value(p, lo_order));
}

SirEstimate sir_sd(const ChannelParams& p, const SirOptions& opt) {
    if (p.scheme != Scheme::mac) throw std::invalid_argument("sir_sd: scheme must be mac");
    const double hw = log2_gauss_entropy_term(p.sigma2);  // int F_c log2 F_c
    if (opt.backend == SirBackend::monte_carlo) {
        // contributions are -log2 pY; value = (hy + hw)/2
        return from_accum(mc_parallel(p, 1, false, opt), 0.5, hw);
    }
    const int lo_order = std::max(8, opt.quad_order - 8);
    const double hy = quad_output_entropy(p, opt.quad_order, false);
    const double hy_lo = quad_output_entropy(p, lo_order, false);
    return quad_estimate(0.5 * (hy + hw), 0.5 * (hy_lo + hw));
}

SirEstimate sir_single(const ChannelParams& p, const SirOptions& opt) {
    if (p.scheme != Scheme::single_user)
        throw std::invalid_argument("sir_single: scheme must be single-user");
    const double hw = log2_gauss_entropy_term(p.sigma2);
    if (opt.backend == SirBackend::monte_carlo) {
        return from_accum(mc_parallel(p, 1, true, opt), 1.0, hw);
    }
    const int lo_order = std::max(8, opt.quad_order - 8);
    const double hy = quad_output_entropy(p, opt.quad_order, true);
    const double hy_lo = quad_output_entropy(p, lo_order, true);
    return quad_estimate(hy + hw, hy_lo + hw);
}

SirEstimate sir(const ChannelParams& p, const SirOptions& opt) {
    switch (p.scheme) {
        case Scheme::caf_degraded: return sir_caf(p, opt);
        case Scheme::mac: return sir_sd(p, opt);
        case Scheme::single_user: return sir_single(p, opt);
    }
    throw std::invalid_argument("sir: unknown scheme");
}

void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    if (order < 2) throw std::invalid_argument("gauss_hermite: order must be >= 2");
    const int n = order;
    nodes.assign(static_cast<std::size_t>(n), 0.0);
    weights.assign(static_cast<std::size_t>(n), 0.0);
    const int m = (n + 1) / 2;
    const double pim4 = 0.7511255444649425;  // pi^{-1/4}
    double z = 0.0, z_prev = 0.0, z_prev2 = 0.0;
    for (int i = 0; i < m; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -1.0 / 6.0);
        else if (i == 1)
            z -= 1.14 * std::pow(n, 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * z_prev2;
        else if (i == 3)
            z = 1.91 * z - 0.91 * z_prev2;
        else
            z = 2.0 * z - z_prev2;
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pim4, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * n) * p2;
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        nodes[i] = z;
        nodes[n - 1 - i] = -z;
        weights[i] = 2.0 / (pp * pp);
        weights[n - 1 - i] = weights[i];
        z_prev2 = z_prev;
        z_prev = z;
    }
    std::reverse(nodes.begin(), nodes.end());  // ascending
    std::reverse(weights.begin(), weights.end());
}

}  // namespace caf
