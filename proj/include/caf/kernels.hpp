#pragma once

#include <cstddef>
#include <string_view>

// Elementwise kernels behind the hot loops (population dynamics updates,
// mixture log-sum-exp demapping, BP message passing). A scalar reference
// implementation always exists; an AVX2 variant is selected at runtime when
// the CPU supports it. The two are equivalence-tested against each other.
namespace caf::kernels {

struct Ops {
    const char* name;

    // y[i] = exp(x[i]); inputs below -708 flush to 0, above +709 clamp.
    void (*vexp)(const double* x, double* y, std::size_t n);
    // y[i] = log(x[i]); x <= 0 yields -inf.
    void (*vlog)(const double* x, double* y, std::size_t n);
    // y[i] = tanh(x[i] / 2)
    void (*tanh_half)(const double* x, double* y, std::size_t n);
    // y[i] = clamp(2 * atanh(clamp(t[i], +-(1 - 1e-15))), +-bound)
    void (*atanh2)(const double* t, double* y, std::size_t n, double bound);
    // acc[i] += x[i]
    void (*add)(double* acc, const double* x, std::size_t n);
    // acc[i] *= x[i]
    void (*mul)(double* acc, const double* x, std::size_t n);
    // x[i] = clamp(x[i], +-bound)
    void (*clamp)(double* x, std::size_t n, double bound);
    // compensated (Neumaier) sum
    double (*sum)(const double* x, std::size_t n);
    // counts of negative / exactly-zero / positive entries
    void (*count_signs)(const double* x, std::size_t n, std::size_t* neg, std::size_t* zero,
                        std::size_t* pos);
};

// Currently active backend (AVX2 when available unless overridden via
// set_backend or the CAF_KERNEL_BACKEND environment variable).
const Ops& active();

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when the CPU lacks AVX2

// "scalar" or "avx2"; returns false if the backend is unavailable.
bool set_backend(std::string_view name);

}  // namespace caf::kernels
