#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <vector>

#include "rankaudit/kernels.hpp"
#include "rankaudit/rng.hpp"

using namespace rankaudit;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = -10.0, double hi = 10.0) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

bool bits_equal(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("dispatched kernels match the scalar reference bit for bit") {
    Rng rng(42);
    // Lengths cover empty, sub-block, exact blocks and ragged tails.
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 16u, 33u, 100u, 1024u, 1037u}) {
        const auto a = random_vector(rng, n);
        const auto b = random_vector(rng, n);
        CAPTURE(n);
        CHECK(bits_equal(kernels::dot(a.data(), b.data(), n),
                         kernels::scalar::dot(a.data(), b.data(), n)));
        CHECK(bits_equal(kernels::sum(a.data(), n), kernels::scalar::sum(a.data(), n)));
        CHECK(bits_equal(kernels::l1_diff(a.data(), b.data(), n),
                         kernels::scalar::l1_diff(a.data(), b.data(), n)));
        CHECK(bits_equal(kernels::max_abs(a.data(), n), kernels::scalar::max_abs(a.data(), n)));

        auto y1 = random_vector(rng, n);
        auto y2 = y1;
        kernels::axpy(y1.data(), 1.75, a.data(), n);
        kernels::scalar::axpy(y2.data(), 1.75, a.data(), n);
        CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);

        auto s1 = a;
        auto s2 = a;
        kernels::scale(s1.data(), -0.37, n);
        kernels::scalar::scale(s2.data(), -0.37, n);
        CHECK(std::memcmp(s1.data(), s2.data(), n * sizeof(double)) == 0);
    }
}

TEST_CASE("kernel results are numerically sane") {
    std::vector<double> a{1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> b{2.0, 2.0, 2.0, 2.0, 2.0};
    CHECK(kernels::dot(a.data(), b.data(), 5) == doctest::Approx(30.0));
    CHECK(kernels::sum(a.data(), 5) == doctest::Approx(15.0));
    CHECK(kernels::l1_diff(a.data(), b.data(), 5) == doctest::Approx(1.0 + 0.0 + 1.0 + 2.0 + 3.0));
    CHECK(kernels::max_abs(a.data(), 5) == doctest::Approx(5.0));
    kernels::axpy(a.data(), 2.0, b.data(), 5);
    CHECK(a[0] == doctest::Approx(5.0));
    CHECK(a[4] == doctest::Approx(9.0));
}

TEST_CASE("active backend is reported") {
    const std::string name = kernels::backend_name();
    CHECK((name == "scalar" || name == "avx2" || name == "neon"));
}
