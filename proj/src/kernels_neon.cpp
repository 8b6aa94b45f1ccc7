#include "rankaudit/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

// NEON variants. Two float64x2 accumulators stand in for the 4 virtual lanes;
// the combine (acc0+acc2)+(acc1+acc3) matches the scalar reference exactly.

namespace rankaudit::kernels::neon {

double dot(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc01 = vaddq_f64(acc01, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
        acc23 = vaddq_f64(acc23, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    }
    const float64x2_t s = vaddq_f64(acc01, acc23);  // [acc0+acc2, acc1+acc3]
    double r = vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
    for (std::size_t i = k; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum(const double* a, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc01 = vaddq_f64(acc01, vld1q_f64(a + i));
        acc23 = vaddq_f64(acc23, vld1q_f64(a + i + 2));
    }
    const float64x2_t s = vaddq_f64(acc01, acc23);
    double r = vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
    for (std::size_t i = k; i < n; ++i) r += a[i];
    return r;
}

double l1_diff(const double* a, const double* b, std::size_t n) {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc01 = vaddq_f64(acc01, vabsq_f64(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
        acc23 = vaddq_f64(acc23, vabsq_f64(vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2))));
    }
    const float64x2_t s = vaddq_f64(acc01, acc23);
    double r = vgetq_lane_f64(s, 0) + vgetq_lane_f64(s, 1);
    for (std::size_t i = k; i < n; ++i) r += std::fabs(a[i] - b[i]);
    return r;
}

double max_abs(const double* a, std::size_t n) {
    float64x2_t m01 = vdupq_n_f64(0.0);
    float64x2_t m23 = vdupq_n_f64(0.0);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        m01 = vmaxq_f64(m01, vabsq_f64(vld1q_f64(a + i)));
        m23 = vmaxq_f64(m23, vabsq_f64(vld1q_f64(a + i + 2)));
    }
    const float64x2_t s = vmaxq_f64(m01, m23);
    double r = std::fmax(vgetq_lane_f64(s, 0), vgetq_lane_f64(s, 1));
    for (std::size_t i = k; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

void axpy(double* y, double s, const double* x, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vs, vld1q_f64(x + i))));
        vst1q_f64(y + i + 2, vaddq_f64(vld1q_f64(y + i + 2), vmulq_f64(vs, vld1q_f64(x + i + 2))));
    }
    for (std::size_t i = k; i < n; ++i) y[i] += s * x[i];
}

void scale(double* a, double s, std::size_t n) {
    const float64x2_t vs = vdupq_n_f64(s);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        vst1q_f64(a + i, vmulq_f64(vld1q_f64(a + i), vs));
        vst1q_f64(a + i + 2, vmulq_f64(vld1q_f64(a + i + 2), vs));
    }
    for (std::size_t i = k; i < n; ++i) a[i] *= s;
}

}  // namespace rankaudit::kernels::neon

#endif  // aarch64
