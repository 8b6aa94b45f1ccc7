#pragma once

#include <cstddef>
#include <string>

namespace rankaudit::kernels {

// Dense double-precision kernels behind the ranking and statistics code.
//
// Every kernel has a scalar reference implementation and, where the ISA is
// available, an AVX2 (x86-64) or NEON (aarch64) variant selected at runtime.
// All variants follow the same fixed blocking contract (4 virtual lanes,
// multiply-then-add, combine (acc0+acc2)+(acc1+acc3), sequential tail) so the
// results are bit-identical regardless of which backend runs. Equivalence is
// enforced by tests, and ledgers stay byte-stable across hosts.

enum class Backend { scalar, avx2, neon };

// Active backend after env override (RANKAUDIT_KERNEL=scalar|avx2|neon|auto).
Backend active_backend();
std::string backend_name();

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double l1_diff(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
// y += s * x
void axpy(double* y, double s, const double* x, std::size_t n);
void scale(double* a, double s, std::size_t n);

// Scalar reference paths, always available; used by the equivalence tests.
namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* a, std::size_t n);
double l1_diff(const double* a, const double* b, std::size_t n);
double max_abs(const double* a, std::size_t n);
void axpy(double* y, double s, const double* x, std::size_t n);
void scale(double* a, double s, std::size_t n);
}  // namespace scalar

}  // namespace rankaudit::kernels
