#include "rankaudit/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

// AVX2 variants. No FMA: multiply-then-add keeps per-lane rounding identical
// to the scalar reference, so results match bit for bit.

namespace rankaudit::kernels::avx2 {

namespace {
inline double reduce_add(__m256d v) {
    // (acc0+acc2) + (acc1+acc3), same combine order as the scalar reference.
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(s) + _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}
inline double reduce_max(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_max_pd(lo, hi);
    return std::fmax(_mm_cvtsd_f64(s), _mm_cvtsd_f64(_mm_unpackhi_pd(s, s)));
}
const __m256d kAbsMask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7FFFFFFFFFFFFFFFLL));
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        const __m256d va = _mm256_loadu_pd(a + i);
        const __m256d vb = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, vb));
    }
    double r = reduce_add(acc);
    for (std::size_t i = k; i < n; ++i) r += a[i] * b[i];
    return r;
}

double sum(const double* a, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
    }
    double r = reduce_add(acc);
    for (std::size_t i = k; i < n; ++i) r += a[i];
    return r;
}

double l1_diff(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_and_pd(d, kAbsMask));
    }
    double r = reduce_add(acc);
    for (std::size_t i = k; i < n; ++i) r += std::fabs(a[i] - b[i]);
    return r;
}

double max_abs(const double* a, std::size_t n) {
    __m256d m = _mm256_setzero_pd();
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(a + i), kAbsMask));
    }
    double r = reduce_max(m);
    for (std::size_t i = k; i < n; ++i) r = std::fmax(r, std::fabs(a[i]));
    return r;
}

void axpy(double* y, double s, const double* x, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        const __m256d vy = _mm256_loadu_pd(y + i);
        const __m256d vx = _mm256_loadu_pd(x + i);
        _mm256_storeu_pd(y + i, _mm256_add_pd(vy, _mm256_mul_pd(vs, vx)));
    }
    for (std::size_t i = k; i < n; ++i) y[i] += s * x[i];
}

void scale(double* a, double s, std::size_t n) {
    const __m256d vs = _mm256_set1_pd(s);
    const std::size_t k = n & ~std::size_t{3};
    for (std::size_t i = 0; i < k; i += 4) {
        _mm256_storeu_pd(a + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), vs));
    }
    for (std::size_t i = k; i < n; ++i) a[i] *= s;
}

}  // namespace rankaudit::kernels::avx2

#endif  // x86-64
