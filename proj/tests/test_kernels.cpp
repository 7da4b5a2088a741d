#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "tsf/kernels.hpp"
#include "tsf/rng.hpp"

using namespace tsf;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-2.0, 2.0);
    return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b,
                 double tol = 1e-12) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
        CHECK(std::abs(a[i] - b[i]) <= tol * scale);
    }
}

}  // namespace

TEST_CASE("matmul_nn matches hand arithmetic") {
    const auto& ops = kernels::scalar_ops();
    const std::vector<double> a{1, 2, 3, 4};
    const std::vector<double> b{5, 6};
    std::vector<double> c(2);
    ops.matmul_nn(a.data(), b.data(), c.data(), 2, 2, 1, false);
    CHECK(c[0] == 17.0);
    CHECK(c[1] == 39.0);
}

TEST_CASE("matmul_nn identity leaves the matrix unchanged") {
    const auto& ops = kernels::active();
    const std::vector<double> eye{1, 0, 0, 1};
    const std::vector<double> m{3.5, -1.25, 2.0, 0.75};
    std::vector<double> c(4);
    ops.matmul_nn(eye.data(), m.data(), c.data(), 2, 2, 2, false);
    check_close(c, m, 0.0);
}

TEST_CASE("matmul accumulate adds into the output") {
    const auto& ops = kernels::active();
    const std::vector<double> a{1};
    const std::vector<double> b{2, 3};
    std::vector<double> c{10, 20};
    ops.matmul_nn(a.data(), b.data(), c.data(), 1, 1, 2, true);
    CHECK(c[0] == 12.0);
    CHECK(c[1] == 23.0);
}

TEST_CASE("nt and tn variants agree with explicit transposition through nn") {
    Rng rng(11);
    const auto& ops = kernels::scalar_ops();
    for (int iter = 0; iter < 20; ++iter) {
        const std::size_t m = 1 + rng.below(6), p = 1 + rng.below(6),
                          n = 1 + rng.below(6);
        const auto a = random_vec(m * p, rng);
        const auto b = random_vec(p * n, rng);

        std::vector<double> want(m * n);
        ops.matmul_nn(a.data(), b.data(), want.data(), m, p, n, false);

        std::vector<double> bt(n * p);
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < n; ++j) bt[j * p + i] = b[i * n + j];
        std::vector<double> got(m * n);
        ops.matmul_nt(a.data(), bt.data(), got.data(), m, p, n, false);
        check_close(got, want);

        std::vector<double> at(p * m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < p; ++j) at[j * m + i] = a[i * p + j];
        ops.matmul_tn(at.data(), b.data(), got.data(), m, p, n, false);
        check_close(got, want);
    }
}

TEST_CASE("avx2 kernels match the scalar reference") {
    if (!kernels::avx2_supported()) return;
    const auto& simd = kernels::avx2_ops();
    const auto& ref = kernels::scalar_ops();
    Rng rng(42);

    // Sizes straddle the 4-lane boundary to cover remainder handling.
    for (const std::size_t m : {1u, 3u, 4u, 7u}) {
        for (const std::size_t p : {1u, 5u, 8u, 13u}) {
            for (const std::size_t n : {1u, 2u, 4u, 9u}) {
                const auto a = random_vec(m * p, rng);
                const auto b_nn = random_vec(p * n, rng);
                const auto b_nt = random_vec(n * p, rng);
                const auto a_tn = random_vec(p * m, rng);
                std::vector<double> want(m * n), got(m * n);

                ref.matmul_nn(a.data(), b_nn.data(), want.data(), m, p, n, false);
                simd.matmul_nn(a.data(), b_nn.data(), got.data(), m, p, n, false);
                check_close(got, want);

                ref.matmul_nt(a.data(), b_nt.data(), want.data(), m, p, n, false);
                simd.matmul_nt(a.data(), b_nt.data(), got.data(), m, p, n, false);
                check_close(got, want);

                ref.matmul_tn(a_tn.data(), b_nn.data(), want.data(), m, p, n, false);
                simd.matmul_tn(a_tn.data(), b_nn.data(), got.data(), m, p, n, false);
                check_close(got, want);
            }
        }
    }

    for (const std::size_t n : {1u, 2u, 3u, 4u, 5u, 8u, 17u, 64u, 1001u}) {
        const auto x = random_vec(n, rng);
        const auto y = random_vec(n, rng);
        std::vector<double> want(n), got(n);

        ref.add(x.data(), y.data(), want.data(), n);
        simd.add(x.data(), y.data(), got.data(), n);
        check_close(got, want, 0.0);

        ref.sub(x.data(), y.data(), want.data(), n);
        simd.sub(x.data(), y.data(), got.data(), n);
        check_close(got, want, 0.0);

        ref.mul(x.data(), y.data(), want.data(), n);
        simd.mul(x.data(), y.data(), got.data(), n);
        check_close(got, want, 0.0);

        ref.scale(x.data(), 1.7, want.data(), n);
        simd.scale(x.data(), 1.7, got.data(), n);
        check_close(got, want, 0.0);

        want = y;
        got = y;
        ref.axpy(0.3, x.data(), want.data(), n);
        simd.axpy(0.3, x.data(), got.data(), n);
        check_close(got, want);
    }
}

TEST_CASE("accumulating avx2 matmul matches scalar accumulation") {
    if (!kernels::avx2_supported()) return;
    Rng rng(5);
    const std::size_t m = 5, p = 7, n = 6;
    const auto a = random_vec(m * p, rng);
    const auto b = random_vec(p * n, rng);
    const auto base = random_vec(m * n, rng);
    auto want = base, got = base;
    kernels::scalar_ops().matmul_nn(a.data(), b.data(), want.data(), m, p, n, true);
    kernels::avx2_ops().matmul_nn(a.data(), b.data(), got.data(), m, p, n, true);
    check_close(got, want);
}

TEST_CASE("transcendental helpers") {
    const std::vector<double> x{0.0, 1.0, -1.0};
    std::vector<double> t(3), s(3);
    kernels::tanh_v(x.data(), t.data(), 3);
    kernels::sigmoid_v(x.data(), s.data(), 3);
    CHECK(t[0] == 0.0);
    CHECK(t[1] == doctest::Approx(std::tanh(1.0)).epsilon(1e-15));
    CHECK(s[0] == 0.5);
    CHECK(s[2] == doctest::Approx(1.0 / (1.0 + std::exp(1.0))).epsilon(1e-15));
}

TEST_CASE("active dispatch picks a valid backend") {
    const auto& ops = kernels::active();
    const std::string name = ops.name;
    CHECK((name == "scalar" || name == "avx2"));
    if (name == "avx2") CHECK(kernels::avx2_supported());
}
