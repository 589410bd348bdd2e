#include "malbench/kernels.hpp"

#include "malbench/error.hpp"

namespace malbench::kern {

namespace scalar {
void axpy(double, const double*, double*, std::size_t);
double dot(const double*, const double*, std::size_t);
double sqdist(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
double sumsq_dev(const double*, std::size_t, double);
void relu(const double*, double*, std::size_t);
void relu_backward(const double*, const double*, double*, std::size_t);
}  // namespace scalar

namespace avx2 {
const Ops* get_ops();
}

namespace {

const Ops& scalar_ops() {
    static const Ops table = {&scalar::axpy,   &scalar::dot,  &scalar::sqdist,
                              &scalar::sum,    &scalar::sumsq_dev,
                              &scalar::relu,   &scalar::relu_backward};
    return table;
}

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

struct Dispatch {
    const Ops* active;
    Backend backend;

    Dispatch() {
        if (avx2::get_ops() != nullptr && cpu_has_avx2_fma()) {
            active = avx2::get_ops();
            backend = Backend::avx2;
        } else {
            active = &scalar_ops();
            backend = Backend::scalar;
        }
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

const char* backend_name(Backend backend) noexcept {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

bool backend_supported(Backend backend) noexcept {
    if (backend == Backend::scalar) return true;
    return avx2::get_ops() != nullptr && cpu_has_avx2_fma();
}

Backend active_backend() noexcept { return dispatch().backend; }

void set_backend(Backend backend) {
    if (!backend_supported(backend))
        fail(ErrorKind::invalid_spec,
             std::string("kernel backend not supported on this CPU: ") + backend_name(backend));
    dispatch().active = backend == Backend::avx2 ? avx2::get_ops() : &scalar_ops();
    dispatch().backend = backend;
}

const Ops& ops(Backend backend) {
    if (backend == Backend::scalar) return scalar_ops();
    const Ops* table = avx2::get_ops();
    if (table == nullptr || !cpu_has_avx2_fma())
        fail(ErrorKind::invalid_spec, "avx2 kernels unavailable on this CPU/build");
    return *table;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    dispatch().active->axpy(a, x, y, n);
}

double dot(const double* a, const double* b, std::size_t n) {
    return dispatch().active->dot(a, b, n);
}

double sqdist(const double* a, const double* b, std::size_t n) {
    return dispatch().active->sqdist(a, b, n);
}

double sum(const double* x, std::size_t n) { return dispatch().active->sum(x, n); }

double sumsq_dev(const double* x, std::size_t n, double mean) {
    return dispatch().active->sumsq_dev(x, n, mean);
}

void relu(const double* z, double* out, std::size_t n) {
    dispatch().active->relu(z, out, n);
}

void relu_backward(const double* z, const double* da, double* dz, std::size_t n) {
    dispatch().active->relu_backward(z, da, dz, n);
}

}  // namespace malbench::kern
