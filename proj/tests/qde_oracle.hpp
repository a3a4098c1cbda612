#pragma once

// Test-only quantized-density DE oracle for symmetric binary-input AWGN
// (BPSK, all-zero codeword assumption valid). Densities live on a uniform
// LLR grid; the check-node pairwise operation uses a precomputed
// mass-splitting table. Independent of the population dynamics engine.

#include <cstddef>
#include <vector>

namespace qde {

struct Grid {
    double step = 0.05;
    int half = 600;  // values (j - half) * step, j = 0 .. 2*half

    std::size_t size() const { return static_cast<std::size_t>(2 * half + 1); }
    double value(std::size_t j) const { return (static_cast<double>(j) - half) * step; }
};

using Density = std::vector<double>;

// Gaussian LLR density discretized to the grid (tails folded into the edges).
Density gaussian_density(double mean, double variance, const Grid& g);

// Convolution of two grid densities (variable-node rule); out-of-range mass
// saturates at the grid edges.
Density convolve(const Density& a, const Density& b, const Grid& g);

// Check-node pairwise rule m = 2 atanh(tanh(a/2) tanh(b/2)), with linear
// mass splitting between adjacent bins.
class CheckOp {
public:
    explicit CheckOp(const Grid& g);
    Density combine(const Density& a, const Density& b) const;

private:
    const Grid grid_;
    std::vector<int> idx_;      // lower bin per (i, j)
    std::vector<float> frac_;   // mass fraction to the upper bin
};

double error_prob(const Density& d, const Grid& g);

// Full (d_v, d_c)-regular DE run for BPSK-AWGN with per-dimension noise
// std sigma_real (LLR mean 2/s^2, variance 4/s^2). Returns true when the
// error probability falls below eps before stalling or hitting max_iters.
bool de_bpsk_converges(double sigma_real, int d_v, int d_c, const Grid& g, int max_iters = 2000,
                       double eps = 1e-8);

// Bisection for the BP threshold sigma*.
double bpsk_threshold_sigma(int d_v, int d_c, const Grid& g, double lo = 0.8, double hi = 1.0,
                            double tol = 0.002);

}  // namespace qde
