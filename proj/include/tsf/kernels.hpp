#pragma once

#include <cstddef>

namespace tsf::kernels {

// Dense row-major kernels. Every matmul variant shares one signature:
// the output C is (m x n), p is the inner dimension, and `accumulate`
// selects C += ... instead of C = ....
//
//   matmul_nn: C = A * B        A is (m x p), B is (p x n)
//   matmul_nt: C = A * B^T      A is (m x p), B is (n x p)
//   matmul_tn: C = A^T * B      A is (p x m), B is (p x n)
using MatmulFn = void (*)(const double* a, const double* b, double* c,
                          std::size_t m, std::size_t p, std::size_t n,
                          bool accumulate);
using Map2Fn = void (*)(const double* a, const double* b, double* out, std::size_t n);
using AxpyFn = void (*)(double alpha, const double* x, double* y, std::size_t n);
using ScaleFn = void (*)(const double* a, double c, double* out, std::size_t n);

struct Ops {
    const char* name;
    MatmulFn matmul_nn;
    MatmulFn matmul_nt;
    MatmulFn matmul_tn;
    Map2Fn add;
    Map2Fn sub;
    Map2Fn mul;
    AxpyFn axpy;   // y += alpha * x
    ScaleFn scale; // out = c * a
};

const Ops& scalar_ops();

bool avx2_supported();
/// Only valid to call when avx2_supported() is true.
const Ops& avx2_ops();

/// Implementation picked once at startup: the best the CPU supports,
/// or the one named by TSF_KERNELS=scalar|avx2.
const Ops& active();

// Transcendentals use one scalar path on every backend so results do not
// depend on the dispatch decision.
void tanh_v(const double* x, double* out, std::size_t n);
void sigmoid_v(const double* x, double* out, std::size_t n);

}  // namespace tsf::kernels
