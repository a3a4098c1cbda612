#pragma once

#include <span>
#include <vector>

#include "caf/channel.hpp"

namespace caf {

// Natural-log LLR clamp; beyond this the BP tanh rule saturates to machine
// precision.
inline constexpr double kLlrClamp = 50.0;

inline double clamp_llr(double v) {
    return v < -kLlrClamp ? -kLlrClamp : (v > kLlrClamp ? kLlrClamp : v);
}

// Bit-level likelihoods / LLRs, convention ln L[y|1]/L[y|0] (positive favors
// bit 1). s is the 1-based bit index within a symbol label.

double likelihood_single(Complex y, int s, int u, const ChannelParams& p);
double llr_single(Complex y, int s, const ChannelParams& p);

double likelihood_caf(Complex y, int s, int u, const ChannelParams& p);
double llr_caf(Complex y, int s, const ChannelParams& p);

// Dispatches on p.scheme (single-user or caf-degraded).
double llr(Complex y, int s, const ChannelParams& p);

// Kernel-backed batch demapper. Hypotheses are the transmit label x (single
// user, one Gaussian each) or the XOR label z (caf-degraded, a 2^K-component
// mixture each). Used by the DE sampler, the Monte Carlo SIR estimator and
// the link simulator.
class BatchDemapper {
public:
    explicit BatchDemapper(const ChannelParams& p);

    int bits_per_symbol() const { return k_; }
    std::size_t num_hypotheses() const { return std::size_t{1} << k_; }

    // out[h * n + i] = log p(y_i | hypothesis h), n = ys.size()
    void log_hypothesis_pdfs(std::span<const Complex> ys, double* out) const;

    // LLR of bit s for each y, clamped to +-kLlrClamp
    void llr(std::span<const Complex> ys, int s, double* out) const;

    // log p_Y(y_i) given a precomputed hypothesis matrix (as produced above)
    void log_output_pdf(const double* logp, std::size_t n, double* out) const;

    // LLR of bit s from a precomputed hypothesis matrix
    void llr_from(const double* logp, std::size_t n, int s, double* out) const;

private:
    int k_;
    double sigma2_;
    double log_const_;                         // -log(pi s2) - log(ncomp)
    std::vector<std::vector<Complex>> means_;  // per hypothesis
};

}  // namespace caf
