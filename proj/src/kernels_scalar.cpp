#include "heston/kernels.hpp"

#include <cstddef>

namespace heston::kernels {

namespace {

void mul_add_scalar(double* y, const double* a, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * x[i];
}

void axpy_scalar(double* y, double alpha, const double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void axpby_scalar(double* out, double alpha, const double* x, double beta, const double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

constexpr KernelTable kScalar{mul_add_scalar, axpy_scalar, axpby_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace heston::kernels
