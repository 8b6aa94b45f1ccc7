#include "rankaudit/kernels.hpp"

#include <cstdlib>
#include <string>

namespace rankaudit::kernels {

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double dot(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
double l1_diff(const double*, const double*, std::size_t);
double max_abs(const double*, std::size_t);
void axpy(double*, double, const double*, std::size_t);
void scale(double*, double, std::size_t);
}  // namespace avx2
#endif

#if defined(__aarch64__)
namespace neon {
double dot(const double*, const double*, std::size_t);
double sum(const double*, std::size_t);
double l1_diff(const double*, const double*, std::size_t);
double max_abs(const double*, std::size_t);
void axpy(double*, double, const double*, std::size_t);
void scale(double*, double, std::size_t);
}  // namespace neon
#endif

namespace {

Backend pick_backend() {
    const char* env = std::getenv("RANKAUDIT_KERNEL");
    const std::string want = env ? env : "auto";
    if (want == "scalar") return Backend::scalar;
#if defined(__x86_64__) || defined(_M_X64)
    if (want == "avx2") return Backend::avx2;
    if (want == "auto" && __builtin_cpu_supports("avx2")) return Backend::avx2;
#endif
#if defined(__aarch64__)
    if (want == "neon" || want == "auto") return Backend::neon;
#endif
    return Backend::scalar;
}

const Backend g_backend = pick_backend();

}  // namespace

Backend active_backend() { return g_backend; }

std::string backend_name() {
    switch (g_backend) {
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
        default: return "scalar";
    }
}

#if defined(__x86_64__) || defined(_M_X64)
#define RANKAUDIT_DISPATCH(fn, ...)                                  \
    if (g_backend == Backend::avx2) return avx2::fn(__VA_ARGS__);    \
    return scalar::fn(__VA_ARGS__)
#elif defined(__aarch64__)
#define RANKAUDIT_DISPATCH(fn, ...)                                  \
    if (g_backend == Backend::neon) return neon::fn(__VA_ARGS__);    \
    return scalar::fn(__VA_ARGS__)
#else
#define RANKAUDIT_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { RANKAUDIT_DISPATCH(dot, a, b, n); }
double sum(const double* a, std::size_t n) { RANKAUDIT_DISPATCH(sum, a, n); }
double l1_diff(const double* a, const double* b, std::size_t n) { RANKAUDIT_DISPATCH(l1_diff, a, b, n); }
double max_abs(const double* a, std::size_t n) { RANKAUDIT_DISPATCH(max_abs, a, n); }
void axpy(double* y, double s, const double* x, std::size_t n) { RANKAUDIT_DISPATCH(axpy, y, s, x, n); }
void scale(double* a, double s, std::size_t n) { RANKAUDIT_DISPATCH(scale, a, s, n); }

#undef RANKAUDIT_DISPATCH

}  // namespace rankaudit::kernels
