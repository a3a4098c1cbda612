#include <algorithm>
#include <cmath>
#include <limits>

#include "caf/kernels.hpp"

namespace caf::kernels {
namespace {

void s_vexp(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] < -708.0 ? 0.0 : std::exp(std::min(x[i], 709.0));
}

void s_vlog(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x[i] > 0.0 ? std::log(x[i]) : -std::numeric_limits<double>::infinity();
}

void s_tanh_half(const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(0.5 * x[i]);
}

void s_atanh2(const double* t, double* y, std::size_t n, double bound) {
    constexpr double tmax = 1.0 - 1e-15;
    for (std::size_t i = 0; i < n; ++i) {
        double v = std::clamp(t[i], -tmax, tmax);
        double r = std::log((1.0 + v) / (1.0 - v));
        y[i] = std::clamp(r, -bound, bound);
    }
}

void s_add(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += x[i];
}

void s_mul(double* acc, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] *= x[i];
}

void s_clamp(double* x, std::size_t n, double bound) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], -bound, bound);
}

double s_sum(const double* x, std::size_t n) {
    double s = 0.0, c = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double t = s + x[i];
        if (std::abs(s) >= std::abs(x[i]))
            c += (s - t) + x[i];
        else
            c += (x[i] - t) + s;
        s = t;
    }
    return s + c;
}

void s_count_signs(const double* x, std::size_t n, std::size_t* neg, std::size_t* zero,
                   std::size_t* pos) {
    std::size_t nn = 0, nz = 0, np = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < 0.0)
            ++nn;
        else if (x[i] > 0.0)
            ++np;
        else
            ++nz;
    }
    *neg = nn;
    *zero = nz;
    *pos = np;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{"scalar", s_vexp,  s_vlog, s_tanh_half, s_atanh2,
                         s_add,    s_mul,   s_clamp, s_sum,      s_count_signs};
    return ops;
}

}  // namespace caf::kernels
