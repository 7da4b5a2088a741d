#include "tsf/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace tsf::kernels {
namespace {

void matmul_nn_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t p, std::size_t n, bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * p;
        double* crow = c + i * n;
        for (std::size_t k = 0; k < p; ++k) {
            const double aik = arow[k];
            const double* brow = b + k * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
        }
    }
}

void matmul_nt_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t p, std::size_t n, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * p;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * p;
            double acc = 0.0;
            for (std::size_t k = 0; k < p; ++k) acc += arow[k] * brow[k];
            crow[j] = accumulate ? crow[j] + acc : acc;
        }
    }
}

void matmul_tn_scalar(const double* a, const double* b, double* c,
                      std::size_t m, std::size_t p, std::size_t n, bool accumulate) {
    if (!accumulate) std::fill(c, c + m * n, 0.0);
    for (std::size_t k = 0; k < p; ++k) {
        const double* arow = a + k * m;
        const double* brow = b + k * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double aki = arow[i];
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += aki * brow[j];
        }
    }
}

void add_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_scalar(const double* a, const double* b, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(const double* a, double c, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = c * a[i];
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{
        "scalar",
        matmul_nn_scalar, matmul_nt_scalar, matmul_tn_scalar,
        add_scalar, sub_scalar, mul_scalar,
        axpy_scalar, scale_scalar,
    };
    return ops;
}

void tanh_v(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::tanh(x[i]);
}

void sigmoid_v(const double* x, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 1.0 / (1.0 + std::exp(-x[i]));
}

}  // namespace tsf::kernels
