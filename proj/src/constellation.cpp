#include "caf/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace caf {

namespace {

struct Geometry {
    int k;
    double angle0;
    double step;
    std::vector<std::uint32_t> gray_order;  // labels in angular order
};

Geometry geometry(Modulation m) {
    using std::numbers::pi;
    switch (m) {
        case Modulation::bpsk:
            return {1, 0.0, pi, {0b0, 0b1}};
        case Modulation::qpsk:
            return {2, pi / 4, pi / 2, {0b00, 0b01, 0b11, 0b10}};
        case Modulation::psk8:
            return {3, 0.0, pi / 4, {0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100}};
    }
    throw std::invalid_argument("unknown modulation");
}

}  // namespace

Modulation parse_modulation(const std::string& name) {
    if (name == "bpsk") return Modulation::bpsk;
    if (name == "qpsk") return Modulation::qpsk;
    if (name == "8psk" || name == "psk8") return Modulation::psk8;
    throw std::invalid_argument("unknown modulation: " + name);
}

std::string modulation_name(Modulation m) {
    switch (m) {
        case Modulation::bpsk: return "bpsk";
        case Modulation::qpsk: return "qpsk";
        case Modulation::psk8: return "8psk";
    }
    return "?";
}

Constellation::Constellation() : Constellation(make(Modulation::bpsk)) {}

Constellation Constellation::make(Modulation m) { return make(m, geometry(m).gray_order); }

Constellation Constellation::make(Modulation m, const std::vector<std::uint32_t>& labels) {
    Geometry g = geometry(m);
    const std::size_t npts = std::size_t{1} << g.k;
    if (labels.size() != npts) throw std::invalid_argument("labeling: wrong size");
    std::vector<bool> seen(npts, false);
    for (std::uint32_t v : labels) {
        if (v >= npts || seen[v]) throw std::invalid_argument("labeling: not a bijection");
        seen[v] = true;
    }
    std::vector<Complex> pts(npts);
    for (std::size_t pos = 0; pos < npts; ++pos) {
        double ang = g.angle0 + static_cast<double>(pos) * g.step;
        pts[labels[pos]] = Complex(std::cos(ang), std::sin(ang));
    }
    // keep BPSK exactly on the real axis
    if (m == Modulation::bpsk)
        for (auto& p : pts) p = Complex(std::round(p.real()), 0.0);
    return Constellation(m, g.k, std::move(pts));
}

Complex Constellation::map(const BitLabel& label) const {
    if (label.width != k_) throw std::invalid_argument("map_symbol: label width mismatch");
    return points_[label.value];
}

BitLabel Constellation::label_of(Complex y, double tol) const {
    for (std::size_t v = 0; v < points_.size(); ++v)
        if (std::abs(y - points_[v]) <= tol) return BitLabel(static_cast<std::uint32_t>(v), k_);
    throw std::invalid_argument("label_of: not a constellation point");
}

ReceivedConstellation received_constellation(const Constellation& c, double theta) {
    const std::size_t npts = c.size();
    const Complex rot(std::cos(theta), std::sin(theta));
    ReceivedConstellation rc;
    rc.theta = theta;
    rc.groups.resize(npts);
    for (std::uint32_t z = 0; z < npts; ++z) {
        rc.groups[z].resize(npts);
        for (std::uint32_t a = 0; a < npts; ++a)
            rc.groups[z][a] = c.map(a) + c.map(z ^ a) * rot;
    }
    return rc;
}

}  // namespace caf
