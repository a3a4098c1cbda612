#pragma once

#include <complex>
#include <string>
#include <vector>

#include "caf/bits.hpp"

namespace caf {

using Complex = std::complex<double>;

enum class Modulation { bpsk, qpsk, psk8 };

Modulation parse_modulation(const std::string& name);  // "bpsk" | "qpsk" | "8psk"
std::string modulation_name(Modulation m);

// 2^K-PSK mapper: a bijection F_2^K -> unit circle.
class Constellation {
public:
    Constellation();  // BPSK with the default labeling

    // Gray labeling in angular order. BPSK points at {+1, -1}; QPSK at
    // exp(i(pi/4 + k pi/2)); 8PSK at exp(i k pi/4).
    static Constellation make(Modulation m);
    // Custom labeling: labels[k] is the bit label at the k-th angular
    // position. Throws std::invalid_argument if not a bijection on F_2^K.
    static Constellation make(Modulation m, const std::vector<std::uint32_t>& labels);

    int bits_per_symbol() const { return k_; }
    std::size_t size() const { return points_.size(); }
    Modulation modulation() const { return mod_; }

    Complex map(const BitLabel& label) const;
    Complex map(std::uint32_t label_value) const { return points_[label_value]; }

    // Exact inverse of map(); throws if y is not a constellation point.
    BitLabel label_of(Complex y, double tol = 1e-9) const;

    double peak_power() const { return 1.0; }  // unit circle by construction

private:
    Constellation(Modulation m, int k, std::vector<Complex> pts)
        : mod_(m), k_(k), points_(std::move(pts)) {}

    Modulation mod_;
    int k_;
    std::vector<Complex> points_;  // indexed by label value
};

inline Complex map_symbol(const Constellation& c, const BitLabel& label) { return c.map(label); }

// Noiseless superimposed constellation at the relay, grouped by XOR label z.
struct ReceivedConstellation {
    double theta;
    // groups[z][a] = M(a) + M(z ^ a) e^{i theta}, one point per x_A = a
    std::vector<std::vector<Complex>> groups;
};

ReceivedConstellation received_constellation(const Constellation& c, double theta);

}  // namespace caf
