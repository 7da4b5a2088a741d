// AVX2/FMA variants of the dense kernels. Built with -mavx2 -mfma and only
// ever invoked after a runtime cpuid check (see dispatch.cpp).

#include "tsf/kernels.hpp"

#include <algorithm>
#include <immintrin.h>

namespace tsf::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d shuf = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

void matmul_nn_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t p, std::size_t n, bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * p;
        double* crow = c + i * n;
        for (std::size_t k = 0; k < p; ++k) {
            const __m256d aik = _mm256_set1_pd(arow[k]);
            const double* brow = b + k * n;
            std::size_t j = 0;
            for (; j < n4; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(aik, _mm256_loadu_pd(brow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            const double aiks = arow[k];
            for (; j < n; ++j) crow[j] += aiks * brow[j];
        }
    }
}

void matmul_nt_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t p, std::size_t n, bool accumulate) {
    const std::size_t p4 = p & ~std::size_t{3};
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * p;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * p;
            __m256d acc = _mm256_setzero_pd();
            std::size_t k = 0;
            for (; k < p4; k += 4) {
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + k),
                                      _mm256_loadu_pd(brow + k), acc);
            }
            double s = hsum(acc);
            for (; k < p; ++k) s += arow[k] * brow[k];
            crow[j] = accumulate ? crow[j] + s : s;
        }
    }
}

void matmul_tn_avx2(const double* a, const double* b, double* c,
                    std::size_t m, std::size_t p, std::size_t n, bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    const std::size_t n4 = n & ~std::size_t{3};
    for (std::size_t k = 0; k < p; ++k) {
        const double* arow = a + k * m;
        const double* brow = b + k * n;
        for (std::size_t i = 0; i < m; ++i) {
            const __m256d aki = _mm256_set1_pd(arow[i]);
            double* crow = c + i * n;
            std::size_t j = 0;
            for (; j < n4; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(aki, _mm256_loadu_pd(brow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            const double akis = arow[i];
            for (; j < n; ++j) crow[j] += akis * brow[j];
        }
    }
}

void add_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_avx2(const double* a, const double* b, double* out, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d av = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d yi = _mm256_loadu_pd(y + i);
        yi = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yi);
        _mm256_storeu_pd(y + i, yi);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(const double* a, double c, double* out, std::size_t n) {
    const __m256d cv = _mm256_set1_pd(c);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_mul_pd(cv, _mm256_loadu_pd(a + i)));
    for (; i < n; ++i) out[i] = c * a[i];
}

}  // namespace

const Ops& avx2_ops() {
    static const Ops ops{
        "avx2",
        matmul_nn_avx2, matmul_nt_avx2, matmul_tn_avx2,
        add_avx2, sub_avx2, mul_avx2,
        axpy_avx2, scale_avx2,
    };
    return ops;
}

}  // namespace tsf::kernels
