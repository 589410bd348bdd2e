#pragma once

#include <cstddef>

namespace malbench::kern {

// Arithmetic inner loops used by every model: dense-layer products, k-NN
// distances, column statistics. Each kernel has a scalar reference
// implementation and an AVX2 variant; the active backend is picked once at
// startup from CPU capabilities and can be forced for testing.
//
// Equivalence contract, checked by the kernel test suite:
//   - elementwise kernels (axpy, relu, relu_backward) are bit-identical
//     across backends (no FMA contraction, no reordering);
//   - reduction kernels (dot, sqdist, sum, sumsq_dev) reassociate the
//     accumulation and use FMA, so they agree with the scalar reference
//     to a tight relative tolerance, not bit-exactly.
// Backend selection is deterministic per machine, so repeated runs of the
// same plan produce identical bytes either way.

enum class Backend { scalar, avx2 };

const char* backend_name(Backend backend) noexcept;
bool backend_supported(Backend backend) noexcept;
Backend active_backend() noexcept;

// Forces a specific backend (throws Error{invalid_spec} when the CPU lacks
// it). Intended for tests and the CLI's --kernel-backend override.
void set_backend(Backend backend);

// y[i] += a * x[i]
void axpy(double a, const double* x, double* y, std::size_t n);

// sum_i a[i] * b[i]
double dot(const double* a, const double* b, std::size_t n);

// sum_i (a[i] - b[i])^2
double sqdist(const double* a, const double* b, std::size_t n);

double sum(const double* x, std::size_t n);

// sum_i (x[i] - mean)^2
double sumsq_dev(const double* x, std::size_t n, double mean);

// out[i] = max(0, z[i])
void relu(const double* z, double* out, std::size_t n);

// dz[i] = z[i] > 0 ? da[i] : 0
void relu_backward(const double* z, const double* da, double* dz, std::size_t n);

// Direct entry points bound to one backend, used by the equivalence tests.
struct Ops {
    void (*axpy)(double, const double*, double*, std::size_t);
    double (*dot)(const double*, const double*, std::size_t);
    double (*sqdist)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    double (*sumsq_dev)(const double*, std::size_t, double);
    void (*relu)(const double*, double*, std::size_t);
    void (*relu_backward)(const double*, const double*, double*, std::size_t);
};

const Ops& ops(Backend backend);

}  // namespace malbench::kern
