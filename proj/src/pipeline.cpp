#include "caf/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <thread>

#include "caf/demap.hpp"

namespace caf {

Interleaver sample_interleaver(int n_bits, Rng& rng) {
    if (n_bits < 1) throw std::invalid_argument("sample_interleaver: n_bits must be >= 1");
    Interleaver pi;
    pi.perm.resize(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) pi.perm[i] = i;
    for (int i = n_bits - 1; i > 0; --i) {
        std::uniform_int_distribution<int> u(0, i);
        std::swap(pi.perm[i], pi.perm[u(rng)]);
    }
    return pi;
}

TrialResult run_caf_trial(const Encoder& enc, const Interleaver& pi, const ChannelParams& p,
                          BpDecoder& dec, Rng& rng) {
    const int k = p.constellation.bits_per_symbol();
    const int n_bits = static_cast<int>(pi.perm.size());
    if (n_bits % k != 0) throw std::invalid_argument("run_caf_trial: n_bits not divisible by K");
    if (p.scheme != Scheme::caf_degraded && p.scheme != Scheme::mac)
        throw std::invalid_argument("run_caf_trial: need a relay channel scheme");

    std::uniform_int_distribution<int> bit(0, 1);
    std::vector<std::uint8_t> msg_a(enc.message_length()), msg_b(enc.message_length());
    for (auto& b : msg_a) b = static_cast<std::uint8_t>(bit(rng));
    for (auto& b : msg_b) b = static_cast<std::uint8_t>(bit(rng));
    const std::vector<std::uint8_t> x_a = enc.encode(msg_a);
    const std::vector<std::uint8_t> x_b = enc.encode(msg_b);

    std::vector<std::uint8_t> target(x_a.size());
    for (std::size_t i = 0; i < x_a.size(); ++i) target[i] = x_a[i] ^ x_b[i];

    const std::vector<std::uint8_t> ia = pi.apply(std::span<const std::uint8_t>(x_a));
    const std::vector<std::uint8_t> ib = pi.apply(std::span<const std::uint8_t>(x_b));

    // consecutive K bits form one symbol; bit s = position within the group
    const int n_sym = n_bits / k;
    std::vector<Complex> ys(static_cast<std::size_t>(n_sym));
    for (int i = 0; i < n_sym; ++i) {
        std::uint32_t la = 0, lb = 0;
        for (int s = 1; s <= k; ++s) {
            la |= static_cast<std::uint32_t>(ia[i * k + s - 1]) << (s - 1);
            lb |= static_cast<std::uint32_t>(ib[i * k + s - 1]) << (s - 1);
        }
        ys[i] = sample_mac(BitLabel(la, k), BitLabel(lb, k), p, rng);
    }

    // CAF LLRs per bit position, then de-interleave
    BatchDemapper demap(p);
    std::vector<double> logp(demap.num_hypotheses() * ys.size());
    demap.log_hypothesis_pdfs(ys, logp.data());
    std::vector<double> illr(static_cast<std::size_t>(n_bits)), col(ys.size());
    for (int s = 1; s <= k; ++s) {
        demap.llr_from(logp.data(), ys.size(), s, col.data());
        for (int i = 0; i < n_sym; ++i) illr[i * k + s - 1] = col[i];
    }
    const std::vector<double> llrs = pi.inverse_apply(std::span<const double>(illr));

    DecodeResult dr = dec.decode(llrs);

    TrialResult res;
    res.iterations = dr.iterations;
    for (std::size_t i = 0; i < target.size(); ++i)
        if (dr.bits[i] != target[i]) ++res.bit_errors;
    res.frame_error = res.bit_errors > 0;
    return res;
}

namespace {

struct Tally {
    long frames = 0, frame_errors = 0, bit_errors = 0;
};

Tally run_block(const SimConfig& cfg, long t_begin, long t_end, std::uint64_t seed,
                const ParityCheckMatrix* fixed_h, const Encoder* fixed_enc,
                const Interleaver* fixed_pi) {
    Tally out;
    for (long t = t_begin; t < t_end; ++t) {
        Rng rng = substream(seed, static_cast<std::uint64_t>(t) + 1);
        TrialResult tr;
        if (fixed_h) {
            BpDecoder dec(*fixed_h, cfg.max_iters);
            tr = run_caf_trial(*fixed_enc, *fixed_pi, cfg.channel, dec, rng);
        } else {
            ParityCheckMatrix h = sample_regular_code(cfg.code, rng);
            Encoder enc(h);
            Interleaver pi = sample_interleaver(cfg.code.n_bits, rng);
            BpDecoder dec(h, cfg.max_iters);
            tr = run_caf_trial(enc, pi, cfg.channel, dec, rng);
        }
        ++out.frames;
        if (tr.frame_error) ++out.frame_errors;
        out.bit_errors += tr.bit_errors;
    }
    return out;
}

}  // namespace

FerEstimate estimate_fer(const SimConfig& cfg, long trials, std::uint64_t seed, int workers) {
    if (trials < 1) throw std::invalid_argument("estimate_fer: trials must be >= 1");
    cfg.code.validate();

    ParityCheckMatrix fixed_h;
    std::unique_ptr<Encoder> fixed_enc;
    Interleaver fixed_pi;
    if (cfg.fixed_code) {
        Rng rng = substream(seed, 0);
        fixed_h = sample_regular_code(cfg.code, rng);
        fixed_enc = std::make_unique<Encoder>(fixed_h);
        fixed_pi = sample_interleaver(cfg.code.n_bits, rng);
    }

    std::vector<Tally> tallies;
    if (workers <= 1) {
        tallies.push_back(run_block(cfg, 0, trials, seed, cfg.fixed_code ? &fixed_h : nullptr,
                                    fixed_enc.get(), cfg.fixed_code ? &fixed_pi : nullptr));
    } else {
        const long chunk = (trials + workers - 1) / workers;
        tallies.resize(static_cast<std::size_t>(workers));
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            const long lo = w * chunk, hi = std::min(trials, (w + 1) * chunk);
            pool.emplace_back([&, w, lo, hi] {
                tallies[w] = run_block(cfg, lo, hi, seed, cfg.fixed_code ? &fixed_h : nullptr,
                                       fixed_enc.get(), cfg.fixed_code ? &fixed_pi : nullptr);
            });
        }
        for (auto& th : pool) th.join();
    }

    FerEstimate est;
    for (const auto& t : tallies) {
        est.trials += t.frames;
        est.frame_errors += t.frame_errors;
        est.bit_errors += t.bit_errors;
    }
    est.fer = static_cast<double>(est.frame_errors) / est.trials;
    est.ber = static_cast<double>(est.bit_errors) / (static_cast<double>(est.trials) * cfg.code.n_bits);
    est.stderr_fer = est.frame_errors > 0
                         ? std::sqrt(est.fer * (1.0 - est.fer) / est.trials)
                         : 3.0 / static_cast<double>(est.trials);  // rule of three
    return est;
}

}  // namespace caf
