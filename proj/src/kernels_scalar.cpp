#include "rankaudit/kernels.hpp"

#include <cmath>

// Reference kernels. The 4-accumulator blocking mirrors one 256-bit register
// of doubles; SIMD variants must reproduce these results bit for bit.

namespace rankaudit::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    double r = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (std::size_t i = k; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum(const double* a, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc[0] += a[i];
        acc[1] += a[i + 1];
        acc[2] += a[i + 2];
        acc[3] += a[i + 3];
    }
    double r = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (std::size_t i = k; i < n; ++i) r += a[i];
    return r;
}

double l1_diff(const double* a, const double* b, std::size_t n) {
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc[0] += std::fabs(a[i] - b[i]);
        acc[1] += std::fabs(a[i + 1] - b[i + 1]);
        acc[2] += std::fabs(a[i + 2] - b[i + 2]);
        acc[3] += std::fabs(a[i + 3] - b[i + 3]);
    }
    double r = (acc[0] + acc[2]) + (acc[1] + acc[3]);
    for (std::size_t i = k; i < n; ++i) r += std::fabs(a[i] - b[i]);
    return r;
}

double max_abs(const double* a, std::size_t n) {
    double m[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        m[0] = std::fmax(m[0], std::fabs(a[i]));
        m[1] = std::fmax(m[1], std::fabs(a[i + 1]));
        m[2] = std::fmax(m[2], std::fabs(a[i + 2]));
        m[3] = std::fmax(m[3], std::fabs(a[i + 3]));
    }
    double r = std::fmax(std::fmax(m[0], m[2]), std::fmax(m[1], m[3]));
    for (std::size_t i = k; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

void axpy(double* y, double s, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += s * x[i];
}

void scale(double* a, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

}  // namespace rankaudit::kernels::scalar
