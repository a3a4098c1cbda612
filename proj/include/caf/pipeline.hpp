#pragma once

#include <cstdint>

#include "caf/channel.hpp"
#include "caf/ldpc.hpp"

namespace caf {

struct Interleaver {
    std::vector<int> perm;  // out[i] = in[perm[i]]

    template <class T>
    std::vector<T> apply(std::span<const T> in) const {
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < perm.size(); ++i) out[i] = in[perm[i]];
        return out;
    }
    template <class T>
    std::vector<T> inverse_apply(std::span<const T> in) const {
        std::vector<T> out(in.size());
        for (std::size_t i = 0; i < perm.size(); ++i) out[perm[i]] = in[i];
        return out;
    }
};

// Uniform random permutation (Fisher-Yates).
Interleaver sample_interleaver(int n_bits, Rng& rng);

struct TrialResult {
    bool frame_error = false;
    int bit_errors = 0;
    int iterations = 0;
};

// One CAF Monte Carlo trial: encode at both terminals, interleave with the
// shared pi, modulate, pass through the MAC channel, demap with CAF LLRs,
// BP-decode and compare against the XOR codeword.
TrialResult run_caf_trial(const Encoder& enc, const Interleaver& pi, const ChannelParams& p,
                          BpDecoder& dec, Rng& rng);

struct SimConfig {
    CodeSpec code;
    ChannelParams channel;  // scheme caf_degraded
    int max_iters = 200;
    bool fixed_code = false;  // one code/interleaver for all trials
};

struct FerEstimate {
    double fer = 0.0;
    double ber = 0.0;
    double stderr_fer = 0.0;  // binomial; rule-of-three bound when no errors
    long trials = 0;
    long frame_errors = 0;
    long bit_errors = 0;
};

FerEstimate estimate_fer(const SimConfig& cfg, long trials, std::uint64_t seed, int workers = 1);

}  // namespace caf
