#include "qde_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qde {

Density gaussian_density(double mean, double variance, const Grid& g) {
    const std::size_t n = g.size();
    Density d(n, 0.0);
    const double sd = std::sqrt(variance);
    auto cdf = [&](double x) { return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2)); };
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = g.value(j) - 0.5 * g.step;
        const double hi = g.value(j) + 0.5 * g.step;
        d[j] = cdf(hi) - cdf(lo);
    }
    d.front() += cdf(g.value(0) - 0.5 * g.step);
    d.back() += 1.0 - cdf(g.value(n - 1) + 0.5 * g.step);
    return d;
}

Density convolve(const Density& a, const Density& b, const Grid& g) {
    const std::size_t n = g.size();
    const int half = g.half;
    Density out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0.0) continue;
        const double ai = a[i];
        for (std::size_t j = 0; j < n; ++j) {
            long k = static_cast<long>(i) + static_cast<long>(j) - half;
            if (k < 0) k = 0;
            if (k >= static_cast<long>(n)) k = static_cast<long>(n) - 1;
            out[static_cast<std::size_t>(k)] += ai * b[j];
        }
    }
    return out;
}

CheckOp::CheckOp(const Grid& g) : grid_(g) {
    const std::size_t n = g.size();
    std::vector<double> th(n);
    for (std::size_t i = 0; i < n; ++i) th[i] = std::tanh(0.5 * g.value(i));
    idx_.resize(n * n);
    frac_.resize(n * n);
    const double vmax = g.value(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double t = th[i] * th[j];
            t = std::clamp(t, -(1.0 - 1e-15), 1.0 - 1e-15);
            double m = std::log((1.0 + t) / (1.0 - t));
            m = std::clamp(m, -vmax, vmax);
            double pos = m / g.step + g.half;
            int lo = static_cast<int>(std::floor(pos));
            double f = pos - lo;
            if (lo < 0) {
                lo = 0;
                f = 0.0;
            }
            if (lo >= static_cast<int>(n) - 1) {
                lo = static_cast<int>(n) - 1;
                f = 0.0;
            }
            idx_[i * n + j] = lo;
            frac_[i * n + j] = static_cast<float>(f);
        }
    }
}

Density CheckOp::combine(const Density& a, const Density& b) const {
    const std::size_t n = grid_.size();
    Density out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (a[i] == 0.0) continue;
        const double ai = a[i];
        const int* row_idx = idx_.data() + i * n;
        const float* row_frac = frac_.data() + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double mass = ai * b[j];
            const int lo = row_idx[j];
            const double f = row_frac[j];
            out[static_cast<std::size_t>(lo)] += mass * (1.0 - f);
            if (f > 0.0) out[static_cast<std::size_t>(lo) + 1] += mass * f;
        }
    }
    return out;
}

double error_prob(const Density& d, const Grid& g) {
    double p = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        if (g.value(j) < 0.0)
            p += d[j];
        else if (g.value(j) == 0.0)
            p += 0.5 * d[j];
    }
    return p;
}

bool de_bpsk_converges(double sigma_real, int d_v, int d_c, const Grid& g, int max_iters,
                       double eps) {
    const double s2 = sigma_real * sigma_real;
    const Density chan = gaussian_density(2.0 / s2, 4.0 / s2, g);
    const CheckOp op(g);

    Density p = chan;  // first variable pass has no incoming messages
    double prev = 1.0;
    int stall = 0;
    for (int it = 1; it <= max_iters; ++it) {
        // check node: combine d_c - 1 inputs (binary tree over a running power)
        Density q;
        {
            Density pw = p;
            int rem = d_c - 1;
            bool have = false;
            while (rem > 0) {
                if (rem & 1) {
                    q = have ? op.combine(q, pw) : pw;
                    have = true;
                }
                rem >>= 1;
                if (rem > 0) pw = op.combine(pw, pw);
            }
        }
        // variable node: channel + (d_v - 1) incoming
        Density v = chan;
        for (int d = 0; d < d_v - 1; ++d) v = convolve(v, q, g);
        p = std::move(v);
        // The update maps total mass to total^((d_v-1)(d_c-1)+1), so tiny
        // rounding drift in the total compounds exponentially; renormalize.
        double tot = 0.0;
        for (double x : p) tot += x;
        for (double& x : p) x /= tot;

        const double pe = error_prob(p, g);
        if (pe < eps) return true;
        if (pe > prev - 1e-9) {
            if (++stall >= 10 && pe > 1e-4) return false;
        } else {
            stall = 0;
        }
        prev = pe;
    }
    return false;
}

double bpsk_threshold_sigma(int d_v, int d_c, const Grid& g, double lo, double hi, double tol) {
    // lo must converge, hi must not
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (de_bpsk_converges(mid, d_v, d_c, g))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace qde
