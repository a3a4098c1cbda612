#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "caf/rng.hpp"

namespace caf {

struct CodeSpec {
    int d_v = 3;            // variable node degree
    int d_c = 6;            // check node degree
    int bits_per_symbol = 1;  // K of the modulation the code is paired with
    int n_bits = 0;           // code length in bits

    // R = K (1 - d_v/d_c), bits per channel use
    double design_rate() const {
        return bits_per_symbol * (1.0 - static_cast<double>(d_v) / d_c);
    }
    void validate() const;  // throws std::invalid_argument on infeasible specs
};

// Sparse binary parity-check matrix with adjacency both ways.
struct ParityCheckMatrix {
    int n = 0;  // columns (variables)
    int m = 0;  // rows (checks)
    std::vector<std::vector<int>> var_to_checks;
    std::vector<std::vector<int>> check_to_vars;
};

// Configuration-model socket permutation; multi-edges resolved by random
// socket swaps. No girth conditioning.
ParityCheckMatrix sample_regular_code(const CodeSpec& spec, Rng& rng);

std::vector<std::uint8_t> syndrome(const ParityCheckMatrix& h, std::span<const std::uint8_t> word);

// Systematic encoder built by Gaussian elimination over F2. Rank deficiency
// is allowed; message_length() reports the true code dimension.
class Encoder {
public:
    explicit Encoder(const ParityCheckMatrix& h);

    int message_length() const { return static_cast<int>(free_cols_.size()); }
    int rank() const { return n_ - message_length(); }
    std::vector<std::uint8_t> encode(std::span<const std::uint8_t> message) const;

private:
    int n_;
    std::vector<int> free_cols_;                  // message bit positions
    std::vector<int> pivot_cols_;                 // per echelon row
    std::vector<std::vector<std::uint64_t>> rows_;  // echelon rows, bit-packed
};

struct DecodeResult {
    std::vector<std::uint8_t> bits;
    bool converged = false;
    int iterations = 0;
};

// Flooding-schedule sum-product decoder (tanh-domain check rule). One
// decoder instance per concurrent trial; the matrix itself is shareable.
class BpDecoder {
public:
    explicit BpDecoder(const ParityCheckMatrix& h, int max_iters = 200);
    DecodeResult decode(std::span<const double> channel_llrs);

private:
    const ParityCheckMatrix& h_;
    int max_iters_;
    std::vector<int> edge_var_;        // check-major edge list: variable of each edge
    std::vector<int> check_offset_;    // edge range per check
    std::vector<std::vector<int>> var_edges_;
    std::vector<double> v2c_, c2v_, tanh_buf_, prod_buf_, total_;
};

// Plain-text alist sparse-matrix exchange format.
void write_alist(std::ostream& os, const ParityCheckMatrix& h);
ParityCheckMatrix read_alist(std::istream& is);

}  // namespace caf
