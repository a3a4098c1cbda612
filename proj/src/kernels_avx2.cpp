// AVX2 variants of the elementwise kernels. exp/log use Cephes-style
// rational approximations (double precision, ~1 ulp on the working range);
// tanh_half and atanh2 are built on top of them. Compiled with -mavx2 -mfma
// and only dispatched to after a runtime CPU check.
#if defined(__AVX2__)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

#include "caf/kernels.hpp"

namespace caf::kernels {
namespace {

inline __m256d splat(double v) { return _mm256_set1_pd(v); }

// --- exp ---------------------------------------------------------------

// Cephes exp.c constants
const __m256d kLog2E = splat(1.4426950408889634073599);
const __m256d kC1 = splat(6.93145751953125e-1);
const __m256d kC2 = splat(1.42860682030941723212e-6);
const __m256d kExpP0 = splat(1.26177193074810590878e-4);
const __m256d kExpP1 = splat(3.02994407707441961300e-2);
const __m256d kExpP2 = splat(9.99999999999999999910e-1);
const __m256d kExpQ0 = splat(3.00198505138664455042e-6);
const __m256d kExpQ1 = splat(2.52448340349684104192e-3);
const __m256d kExpQ2 = splat(2.27265548208155028766e-1);
const __m256d kExpQ3 = splat(2.00000000000000000005e0);

inline __m256d exp_pd(__m256d x) {
    const __m256d lo = splat(-708.0);
    const __m256d hi = splat(709.0);
    __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
    x = _mm256_min_pd(_mm256_max_pd(x, lo), hi);

    // n = round(x * log2(e))
    __m256d n = _mm256_round_pd(_mm256_mul_pd(x, kLog2E),
                                _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    // r = x - n*ln2 (two-part for accuracy)
    __m256d r = _mm256_fnmadd_pd(n, kC1, x);
    r = _mm256_fnmadd_pd(n, kC2, r);

    __m256d rr = _mm256_mul_pd(r, r);
    // px = r * P(r^2)
    __m256d px = _mm256_fmadd_pd(kExpP0, rr, kExpP1);
    px = _mm256_fmadd_pd(px, rr, kExpP2);
    px = _mm256_mul_pd(px, r);
    // qx = Q(r^2)
    __m256d qx = _mm256_fmadd_pd(kExpQ0, rr, kExpQ1);
    qx = _mm256_fmadd_pd(qx, rr, kExpQ2);
    qx = _mm256_fmadd_pd(qx, rr, kExpQ3);
    // e^r = 1 + 2 px / (qx - px)
    __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
    e = _mm256_fmadd_pd(e, splat(2.0), splat(1.0));

    // scale by 2^n via exponent bits
    __m128i ni = _mm256_cvtpd_epi32(n);
    __m256i nl = _mm256_cvtepi32_epi64(ni);
    __m256i pow2n = _mm256_slli_epi64(_mm256_add_epi64(nl, _mm256_set1_epi64x(1023)), 52);
    e = _mm256_mul_pd(e, _mm256_castsi256_pd(pow2n));

    return _mm256_andnot_pd(underflow, e);
}

// --- log ---------------------------------------------------------------

// Cephes log.c coefficients
const __m256d kLogP0 = splat(1.01875663804580931796e-4);
const __m256d kLogP1 = splat(4.97494994976747001425e-1);
const __m256d kLogP2 = splat(4.70579119878881725854e0);
const __m256d kLogP3 = splat(1.44989225341610930846e1);
const __m256d kLogP4 = splat(1.79368678507819816313e1);
const __m256d kLogP5 = splat(7.70838733755885391666e0);
const __m256d kLogQ0 = splat(1.12873587189167450590e1);
const __m256d kLogQ1 = splat(4.52279145837532221105e1);
const __m256d kLogQ2 = splat(8.29875266912776603211e1);
const __m256d kLogQ3 = splat(7.11544750618563894466e1);
const __m256d kLogQ4 = splat(2.31251620126765340583e1);

inline __m256d log_pd(__m256d x) {
    const __m256d nonpos = _mm256_cmp_pd(x, _mm256_setzero_pd(), _CMP_LE_OQ);

    // normalize subnormals so the exponent-field trick below is valid
    const __m256d tiny = splat(2.2250738585072014e-308);
    __m256d sub = _mm256_cmp_pd(x, tiny, _CMP_LT_OQ);
    __m256d xs = _mm256_mul_pd(x, splat(1.8014398509481984e16));  // 2^54
    x = _mm256_blendv_pd(x, xs, sub);
    __m256d ebias = _mm256_and_pd(sub, splat(54.0));

    // frexp: m in [0.5, 1), e integer
    __m256i bits = _mm256_castpd_si256(x);
    __m256i expfield = _mm256_srli_epi64(bits, 52);
    expfield = _mm256_and_si256(expfield, _mm256_set1_epi64x(0x7ff));
    alignas(32) std::int64_t ef[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(ef), expfield);
    __m256d e = _mm256_set_pd(static_cast<double>(ef[3] - 1022), static_cast<double>(ef[2] - 1022),
                              static_cast<double>(ef[1] - 1022), static_cast<double>(ef[0] - 1022));
    e = _mm256_sub_pd(e, ebias);

    __m256i mant = _mm256_and_si256(bits, _mm256_set1_epi64x(0x000fffffffffffffLL));
    mant = _mm256_or_si256(mant, _mm256_set1_epi64x(0x3fe0000000000000LL));
    __m256d m = _mm256_castsi256_pd(mant);  // in [0.5, 1)

    // if m < sqrt(1/2): e -= 1, m = 2m
    const __m256d sqrthalf = splat(0.70710678118654752440);
    __m256d lower = _mm256_cmp_pd(m, sqrthalf, _CMP_LT_OQ);
    e = _mm256_sub_pd(e, _mm256_and_pd(lower, splat(1.0)));
    m = _mm256_add_pd(m, _mm256_and_pd(lower, m));
    m = _mm256_sub_pd(m, splat(1.0));

    __m256d z = _mm256_mul_pd(m, m);
    __m256d p = _mm256_fmadd_pd(kLogP0, m, kLogP1);
    p = _mm256_fmadd_pd(p, m, kLogP2);
    p = _mm256_fmadd_pd(p, m, kLogP3);
    p = _mm256_fmadd_pd(p, m, kLogP4);
    p = _mm256_fmadd_pd(p, m, kLogP5);
    __m256d q = _mm256_add_pd(m, kLogQ0);
    q = _mm256_fmadd_pd(q, m, kLogQ1);
    q = _mm256_fmadd_pd(q, m, kLogQ2);
    q = _mm256_fmadd_pd(q, m, kLogQ3);
    q = _mm256_fmadd_pd(q, m, kLogQ4);

    __m256d y = _mm256_mul_pd(_mm256_mul_pd(m, z), _mm256_div_pd(p, q));
    y = _mm256_fnmadd_pd(e, splat(2.121944400546905827679e-4), y);
    y = _mm256_fnmadd_pd(splat(0.5), z, y);
    __m256d out = _mm256_add_pd(m, y);
    out = _mm256_fmadd_pd(e, splat(0.693359375), out);

    const __m256d ninf = splat(-std::numeric_limits<double>::infinity());
    return _mm256_blendv_pd(out, ninf, nonpos);
}

// --- kernel entry points ----------------------------------------------

void a_vexp(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, exp_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = x[i] < -708.0 ? 0.0 : std::exp(std::min(x[i], 709.0));
}

void a_vlog(const double* x, double* y, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, log_pd(_mm256_loadu_pd(x + i)));
    for (; i < n; ++i)
        y[i] = x[i] > 0.0 ? std::log(x[i]) : -std::numeric_limits<double>::infinity();
}

// tanh(x/2) = sign(x) * (1 - e^{-|x|}) / (1 + e^{-|x|})
void a_tanh_half(const double* x, double* y, std::size_t n) {
    const __m256d signmask = splat(-0.0);
    const __m256d one = splat(1.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d sign = _mm256_and_pd(v, signmask);
        __m256d a = _mm256_andnot_pd(signmask, v);  // |x|
        __m256d t = exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), a));
        __m256d r = _mm256_div_pd(_mm256_sub_pd(one, t), _mm256_add_pd(one, t));
        _mm256_storeu_pd(y + i, _mm256_or_pd(r, sign));
    }
    for (; i < n; ++i) y[i] = std::tanh(0.5 * x[i]);
}

void a_atanh2(const double* t, double* y, std::size_t n, double bound) {
    const __m256d tmax = splat(1.0 - 1e-15);
    const __m256d one = splat(1.0);
    const __m256d b = splat(bound);
    const __m256d nb = splat(-bound);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(t + i);
        v = _mm256_min_pd(_mm256_max_pd(v, _mm256_sub_pd(_mm256_setzero_pd(), tmax)), tmax);
        __m256d r = log_pd(_mm256_div_pd(_mm256_add_pd(one, v), _mm256_sub_pd(one, v)));
        r = _mm256_min_pd(_mm256_max_pd(r, nb), b);
        _mm256_storeu_pd(y + i, r);
    }
    constexpr double stmax = 1.0 - 1e-15;
    for (; i < n; ++i) {
        double v = t[i] < -stmax ? -stmax : (t[i] > stmax ? stmax : t[i]);
        double r = std::log((1.0 + v) / (1.0 - v));
        y[i] = r < -bound ? -bound : (r > bound ? bound : r);
    }
}

void a_add(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) acc[i] += x[i];
}

void a_mul(double* acc, const double* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(acc + i, _mm256_mul_pd(_mm256_loadu_pd(acc + i), _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) acc[i] *= x[i];
}

void a_clamp(double* x, std::size_t n, double bound) {
    const __m256d b = splat(bound);
    const __m256d nb = splat(-bound);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(x + i, _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(x + i), nb), b));
    for (; i < n; ++i) x[i] = x[i] < -bound ? -bound : (x[i] > bound ? bound : x[i]);
}

double a_sum(const double* x, std::size_t n) {
    // 4-lane Neumaier, lanes combined in fixed order
    __m256d s = _mm256_setzero_pd();
    __m256d c = _mm256_setzero_pd();
    const __m256d signmask = splat(-0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        __m256d t = _mm256_add_pd(s, v);
        __m256d as = _mm256_andnot_pd(signmask, s);
        __m256d av = _mm256_andnot_pd(signmask, v);
        __m256d big_s = _mm256_cmp_pd(as, av, _CMP_GE_OQ);
        __m256d comp_s = _mm256_add_pd(_mm256_sub_pd(s, t), v);
        __m256d comp_v = _mm256_add_pd(_mm256_sub_pd(v, t), s);
        c = _mm256_add_pd(c, _mm256_blendv_pd(comp_v, comp_s, big_s));
        s = t;
    }
    alignas(32) double sl[4], cl[4];
    _mm256_store_pd(sl, s);
    _mm256_store_pd(cl, c);
    double total = 0.0, comp = 0.0;
    auto acc = [&](double v) {
        double t = total + v;
        if (std::abs(total) >= std::abs(v))
            comp += (total - t) + v;
        else
            comp += (v - t) + total;
        total = t;
    };
    for (int k = 0; k < 4; ++k) acc(sl[k]);
    for (int k = 0; k < 4; ++k) acc(cl[k]);
    for (; i < n; ++i) acc(x[i]);
    return total + comp;
}

void a_count_signs(const double* x, std::size_t n, std::size_t* neg, std::size_t* zero,
                   std::size_t* pos) {
    const __m256d zerov = _mm256_setzero_pd();
    std::size_t nn = 0, np = 0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(x + i);
        nn += static_cast<std::size_t>(
            __builtin_popcount(_mm256_movemask_pd(_mm256_cmp_pd(v, zerov, _CMP_LT_OQ))));
        np += static_cast<std::size_t>(
            __builtin_popcount(_mm256_movemask_pd(_mm256_cmp_pd(v, zerov, _CMP_GT_OQ))));
    }
    for (; i < n; ++i) {
        if (x[i] < 0.0)
            ++nn;
        else if (x[i] > 0.0)
            ++np;
    }
    *neg = nn;
    *pos = np;
    *zero = n - nn - np;
}

}  // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2")) return nullptr;
    static const Ops ops{"avx2", a_vexp,  a_vlog, a_tanh_half, a_atanh2,
                         a_add,  a_mul,   a_clamp, a_sum,      a_count_signs};
    return &ops;
}

}  // namespace caf::kernels

#else

#include "caf/kernels.hpp"

namespace caf::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace caf::kernels

#endif
