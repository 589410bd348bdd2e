#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include "malbench/kernels.hpp"
#include "malbench/rng.hpp"

using namespace malbench;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng, double lo = -10.0, double hi = 10.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

const std::vector<std::size_t> kSizes = {0, 1, 2, 3, 4, 5, 7, 8, 9, 16, 31, 64, 100, 257, 1024};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("dispatch reports a supported backend and can be forced") {
    CHECK(kern::backend_supported(kern::Backend::scalar));
    const kern::Backend initial = kern::active_backend();
    kern::set_backend(kern::Backend::scalar);
    CHECK(kern::active_backend() == kern::Backend::scalar);
    if (kern::backend_supported(kern::Backend::avx2)) {
        kern::set_backend(kern::Backend::avx2);
        CHECK(kern::active_backend() == kern::Backend::avx2);
    }
    kern::set_backend(initial);
    CHECK(std::string(kern::backend_name(kern::Backend::scalar)) == "scalar");
    CHECK(std::string(kern::backend_name(kern::Backend::avx2)) == "avx2");
}

TEST_CASE("elementwise kernels are bit-identical across backends") {
    if (!kern::backend_supported(kern::Backend::avx2)) return;
    const auto& scalar = kern::ops(kern::Backend::scalar);
    const auto& avx2 = kern::ops(kern::Backend::avx2);
    Rng rng(42);
    for (std::size_t n : kSizes) {
        std::vector<double> x = random_vec(n, rng);
        std::vector<double> z = random_vec(n, rng);
        if (n > 2) {
            z[0] = 0.0;
            z[1] = -0.0;  // signed-zero lanes must agree too
        }
        const double a = rng.uniform(-3.0, 3.0);

        std::vector<double> y1 = random_vec(n, rng);
        std::vector<double> y2 = y1;
        scalar.axpy(a, x.data(), y1.data(), n);
        avx2.axpy(a, x.data(), y2.data(), n);
        CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

        std::vector<double> r1(n), r2(n);
        scalar.relu(z.data(), r1.data(), n);
        avx2.relu(z.data(), r2.data(), n);
        CHECK(std::memcmp(r1.data(), r2.data(), n * sizeof(double)) == 0);

        std::vector<double> d1(n), d2(n);
        scalar.relu_backward(z.data(), x.data(), d1.data(), n);
        avx2.relu_backward(z.data(), x.data(), d2.data(), n);
        CHECK(std::memcmp(d1.data(), d2.data(), n * sizeof(double)) == 0);
    }
}

TEST_CASE("reduction kernels match a long-double reference on both backends") {
    Rng rng(7);
    for (std::size_t n : kSizes) {
        std::vector<double> a = random_vec(n, rng);
        std::vector<double> b = random_vec(n, rng);
        const double mean = rng.uniform(-2.0, 2.0);

        long double dot_ref = 0.0L, sqd_ref = 0.0L, sum_ref = 0.0L, dev_ref = 0.0L;
        long double dot_mag = 0.0L, sum_mag = 0.0L;
        for (std::size_t i = 0; i < n; ++i) {
            dot_ref += static_cast<long double>(a[i]) * b[i];
            dot_mag += fabsl(static_cast<long double>(a[i]) * b[i]);
            const long double d = static_cast<long double>(a[i]) - b[i];
            sqd_ref += d * d;
            sum_ref += a[i];
            sum_mag += fabsl(a[i]);
            const long double dv = static_cast<long double>(a[i]) - mean;
            dev_ref += dv * dv;
        }

        for (kern::Backend backend : {kern::Backend::scalar, kern::Backend::avx2}) {
            if (!kern::backend_supported(backend)) continue;
            const auto& ops = kern::ops(backend);
            CHECK(std::fabs(ops.dot(a.data(), b.data(), n) - static_cast<double>(dot_ref)) <=
                  1e-12 * (static_cast<double>(dot_mag) + 1.0));
            CHECK(std::fabs(ops.sqdist(a.data(), b.data(), n) - static_cast<double>(sqd_ref)) <=
                  1e-12 * (static_cast<double>(sqd_ref) + 1.0));
            CHECK(std::fabs(ops.sum(a.data(), n) - static_cast<double>(sum_ref)) <=
                  1e-12 * (static_cast<double>(sum_mag) + 1.0));
            CHECK(std::fabs(ops.sumsq_dev(a.data(), n, mean) - static_cast<double>(dev_ref)) <=
                  1e-12 * (static_cast<double>(dev_ref) + 1.0));
        }
    }
}

TEST_CASE("reductions on empty input are zero") {
    for (kern::Backend backend : {kern::Backend::scalar, kern::Backend::avx2}) {
        if (!kern::backend_supported(backend)) continue;
        const auto& ops = kern::ops(backend);
        CHECK(ops.dot(nullptr, nullptr, 0) == 0.0);
        CHECK(ops.sum(nullptr, 0) == 0.0);
        CHECK(ops.sqdist(nullptr, nullptr, 0) == 0.0);
    }
}

TEST_CASE("dot is exact on small integer-valued inputs") {
    // integer sums below 2^53 are exact in double, so the backends must agree
    // exactly, reassociation or not
    std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13};
    std::vector<double> b = {2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14};
    double expected = 0;
    for (std::size_t i = 0; i < a.size(); ++i) expected += a[i] * b[i];
    for (kern::Backend backend : {kern::Backend::scalar, kern::Backend::avx2}) {
        if (!kern::backend_supported(backend)) continue;
        CHECK(kern::ops(backend).dot(a.data(), b.data(), a.size()) == expected);
    }
}

}  // TEST_SUITE
