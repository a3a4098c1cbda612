#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "caf/demap.hpp"

namespace caf {

// Paired sample sets approximating the conditional message densities
// P(.|u=0) and P(.|u=1) of asymmetric-channel density evolution.
struct Population {
    std::vector<double> cond0;
    std::vector<double> cond1;
    int generation = 0;

    std::size_t size() const { return cond0.size(); }
};

struct DeParams {
    int d_v = 3;
    int d_c = 6;
    ChannelParams channel;
    std::size_t population = 100000;  // N
    int max_iters = 2000;             // T
    double eps_stop = 0.0;            // 0 -> default 10/N

    double stop_threshold() const {
        return eps_stop > 0.0 ? eps_stop : 10.0 / static_cast<double>(population);
    }
};

// Draws i.i.d. channel LLR samples conditioned on a transmitted bit: bit
// index s uniform in {1..K}, remaining label bits uniform, y from the
// configured channel, LLR of bit s.
class ChannelLlrSampler {
public:
    explicit ChannelLlrSampler(const ChannelParams& p);

    double sample_one(int u, Rng& rng) const;
    void sample(int u, std::span<double> out, Rng& rng) const;

    const ChannelParams& params() const { return p_; }

private:
    ChannelParams p_;
    BatchDemapper demap_;
    int k_;
};

// One variable-node generation: fresh channel LLR plus d_v - 1 draws with
// replacement from the incoming check-to-variable population, clamped.
Population variable_update(const Population& incoming, const ChannelLlrSampler& chan, int d_v,
                           Rng& rng);

// One check-node generation: d_c - 2 free uniform bits, last bit forced so
// the incoming bits XOR to u, tanh-rule combination.
Population check_update(const Population& incoming, int d_c, Rng& rng);

// (1/2)[P(m > 0 | u=0) + P(m < 0 | u=1)] with ties at zero counted half-half.
double error_probability(const Population& pop);

struct DeRun {
    std::vector<double> trajectory;  // error probability per generation
    bool success = false;
};

DeRun de_run(const DeParams& params, Rng& rng);

struct ThresholdResult {
    double threshold_psnr_db = 0.0;
    double bracket_lo = 0.0;  // highest PSNR seen to fail
    double bracket_hi = 0.0;  // lowest PSNR seen to succeed
};

// Bisection on PSNR. Requires failure at psnr_lo and success at psnr_hi;
// throws std::invalid_argument otherwise.
ThresholdResult find_threshold(const DeParams& params, double psnr_lo, double psnr_hi,
                               double resolution_db, std::uint64_t seed);

}  // namespace caf
