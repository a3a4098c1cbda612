#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caf/demap.hpp"

namespace caf {

enum class SirBackend { monte_carlo, quadrature };

SirBackend parse_sir_backend(const std::string& name);  // "mc" | "quad"

struct SirOptions {
    SirBackend backend = SirBackend::monte_carlo;
    std::size_t samples = 1000000;  // MC sample budget
    int quad_order = 32;            // Gauss-Hermite order per axis
    std::uint64_t seed = 1;
    int workers = 1;
};

struct SirEstimate {
    double value = 0.0;   // bits per channel use
    double stderr_ = 0.0;  // MC standard error, or quadrature error bound
    SirBackend method = SirBackend::monte_carlo;
};

// I(Y;Z) of the CAF degraded channel (scheme caf_degraded).
SirEstimate sir_caf(const ChannelParams& p, const SirOptions& opt = {});

// (1/2) I(Y; X_A, X_B) of the SD scheme (scheme mac); the noise-entropy term
// is closed form.
SirEstimate sir_sd(const ChannelParams& p, const SirOptions& opt = {});

// I(Y; X) of the single-user CAWGN channel with uniform input.
SirEstimate sir_single(const ChannelParams& p, const SirOptions& opt = {});

SirEstimate sir(const ChannelParams& p, const SirOptions& opt = {});  // by p.scheme

// Gauss-Hermite nodes/weights for weight exp(-x^2) (Golub-Welsch via Newton).
void gauss_hermite(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace caf
