#include "caf/density_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "caf/kernels.hpp"

namespace caf {

ChannelLlrSampler::ChannelLlrSampler(const ChannelParams& p)
    : p_(p), demap_(p), k_(p.constellation.bits_per_symbol()) {
    if (p.scheme == Scheme::mac)
        throw std::invalid_argument("ChannelLlrSampler: mac has no bit-level demapper");
}

double ChannelLlrSampler::sample_one(int u, Rng& rng) const {
    std::uniform_int_distribution<int> pick_s(1, k_);
    const int s = pick_s(rng);
    std::uniform_int_distribution<std::uint32_t> rest(0, (1u << k_) - 1);
    std::uint32_t label = rest(rng);
    label = (label & ~(1u << (s - 1))) | (static_cast<std::uint32_t>(u) << (s - 1));
    Complex y;
    if (p_.scheme == Scheme::single_user)
        y = sample_single(BitLabel(label, k_), p_, rng);
    else
        y = sample_degraded(BitLabel(label, k_), p_, rng);
    return llr(y, s, p_);
}

void ChannelLlrSampler::sample(int u, std::span<double> out, Rng& rng) const {
    const std::size_t n = out.size();
    // bucket by drawn bit index s so each bucket demaps as one batch
    std::vector<std::vector<Complex>> ys(static_cast<std::size_t>(k_));
    std::uniform_int_distribution<int> pick_s(1, k_);
    std::uniform_int_distribution<std::uint32_t> rest(0, (1u << k_) - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const int s = pick_s(rng);
        std::uint32_t label = rest(rng);
        label = (label & ~(1u << (s - 1))) | (static_cast<std::uint32_t>(u) << (s - 1));
        Complex y = p_.scheme == Scheme::single_user ? sample_single(BitLabel(label, k_), p_, rng)
                                                     : sample_degraded(BitLabel(label, k_), p_, rng);
        ys[s - 1].push_back(y);
    }
    std::size_t off = 0;
    for (int s = 1; s <= k_; ++s) {
        const auto& bucket = ys[s - 1];
        if (bucket.empty()) continue;
        demap_.llr(std::span<const Complex>(bucket), s, out.data() + off);
        off += bucket.size();
    }
}

Population variable_update(const Population& incoming, const ChannelLlrSampler& chan, int d_v,
                           Rng& rng) {
    const auto& ops = kernels::active();
    const std::size_t n = incoming.size();
    Population out;
    out.generation = incoming.generation + 1;
    out.cond0.resize(n);
    out.cond1.resize(n);

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> gather(n);
    for (int u = 0; u < 2; ++u) {
        const std::vector<double>& src = u ? incoming.cond1 : incoming.cond0;
        std::vector<double>& dst = u ? out.cond1 : out.cond0;
        chan.sample(u, dst, rng);
        for (int d = 0; d < d_v - 1; ++d) {
            for (std::size_t i = 0; i < n; ++i) gather[i] = src[pick(rng)];
            ops.add(dst.data(), gather.data(), n);
        }
        ops.clamp(dst.data(), n, kLlrClamp);
    }
    return out;
}

Population check_update(const Population& incoming, int d_c, Rng& rng) {
    const auto& ops = kernels::active();
    const std::size_t n = incoming.size();
    Population out;
    out.generation = incoming.generation;
    out.cond0.resize(n);
    out.cond1.resize(n);

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<double> gather(n), th(n), prod(n);
    std::vector<std::uint8_t> parity(n);

    // (-1)^(n+1) sign factor of the tanh-product rule in the "positive
    // favors bit 1" convention, n = d_c - 1 combined inputs
    const double sgn = (d_c % 2 == 0) ? 1.0 : -1.0;
    for (int u = 0; u < 2; ++u) {
        std::fill(prod.begin(), prod.end(), sgn);
        std::fill(parity.begin(), parity.end(), 0);
        for (int d = 0; d < d_c - 1; ++d) {
            const bool last = d == d_c - 2;
            for (std::size_t i = 0; i < n; ++i) {
                const int b = last ? (u ^ parity[i]) : bit(rng);
                parity[i] = static_cast<std::uint8_t>(parity[i] ^ b);
                gather[i] = (b ? incoming.cond1 : incoming.cond0)[pick(rng)];
            }
            ops.tanh_half(gather.data(), th.data(), n);
            ops.mul(prod.data(), th.data(), n);
        }
        ops.atanh2(prod.data(), (u ? out.cond1 : out.cond0).data(), n, kLlrClamp);
    }
    return out;
}

double error_probability(const Population& pop) {
    const auto& ops = kernels::active();
    std::size_t neg0, zero0, pos0, neg1, zero1, pos1;
    ops.count_signs(pop.cond0.data(), pop.cond0.size(), &neg0, &zero0, &pos0);
    ops.count_signs(pop.cond1.data(), pop.cond1.size(), &neg1, &zero1, &pos1);
    const double n0 = static_cast<double>(pop.cond0.size());
    const double n1 = static_cast<double>(pop.cond1.size());
    return 0.5 * (static_cast<double>(pos0) / n0 + static_cast<double>(neg1) / n1) +
           0.25 * (static_cast<double>(zero0) / n0 + static_cast<double>(zero1) / n1);
}

DeRun de_run(const DeParams& params, Rng& rng) {
    if (params.population < 1000) throw std::invalid_argument("de_run: population too small");
    if (params.max_iters < 1) throw std::invalid_argument("de_run: max_iters must be >= 1");
    if (params.d_v < 2 || params.d_c <= params.d_v)
        throw std::invalid_argument("de_run: bad degree pair");

    ChannelLlrSampler chan(params.channel);
    const double eps = params.stop_threshold();

    Population q;  // check-to-variable messages; all-zero before the first pass
    q.cond0.assign(params.population, 0.0);
    q.cond1.assign(params.population, 0.0);

    DeRun run;
    for (int l = 1; l <= params.max_iters; ++l) {
        Population p = variable_update(q, chan, params.d_v, rng);
        const double pe = error_probability(p);
        run.trajectory.push_back(pe);
        if (pe < eps) {
            run.success = true;
            return run;
        }
        q = check_update(p, params.d_c, rng);
    }
    run.success = false;
    return run;
}

ThresholdResult find_threshold(const DeParams& params, double psnr_lo, double psnr_hi,
                               double resolution_db, std::uint64_t seed) {
    if (!(psnr_lo < psnr_hi) || resolution_db <= 0.0)
        throw std::invalid_argument("find_threshold: bad bracket or resolution");

    auto succeeds = [&](double psnr_db, std::uint64_t stream) {
        DeParams p = params;
        p.channel.sigma2 = psnr_to_sigma2(psnr_db, p.channel.constellation);
        Rng rng = substream(seed, stream);
        return de_run(p, rng).success;
    };

    std::uint64_t stream = 0;
    if (succeeds(psnr_lo, stream++))
        throw std::invalid_argument("find_threshold: DE already succeeds at psnr_lo");
    if (!succeeds(psnr_hi, stream++))
        throw std::invalid_argument("find_threshold: DE fails at psnr_hi");

    double lo = psnr_lo, hi = psnr_hi;
    while (hi - lo > resolution_db) {
        const double mid = 0.5 * (lo + hi);
        if (succeeds(mid, stream++))
            hi = mid;
        else
            lo = mid;
    }
    return {0.5 * (lo + hi), lo, hi};
}

}  // namespace caf
