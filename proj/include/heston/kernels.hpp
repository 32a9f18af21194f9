#pragma once

#include <span>
#include <string_view>

/// Elementwise vector kernels used by every time step. Each kernel has a portable
/// scalar implementation and, on x86-64, an AVX2 implementation picked at runtime.
/// Neither variant uses fused multiply-add, so both produce bit-identical results.
namespace heston::kernels {

enum class Isa { Scalar, Avx2 };

bool isa_available(Isa isa);
/// The variant currently used by the dispatching entry points below. Defaults to the
/// best available one; HESTON_ISA=scalar in the environment forces the portable path.
Isa active_isa();
/// Throws std::invalid_argument if `isa` is not available on this machine.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa);

/// y[i] += a[i] * x[i]
void mul_add(std::span<double> y, std::span<const double> a, std::span<const double> x);
/// y[i] += alpha * x[i]
void axpy(std::span<double> y, double alpha, std::span<const double> x);
/// out[i] = alpha * x[i] + beta * y[i]
void axpby(std::span<double> out, double alpha, std::span<const double> x, double beta, std::span<const double> y);

/// Per-ISA implementations, exposed for equivalence testing.
struct KernelTable {
    void (*mul_add)(double* y, const double* a, const double* x, std::size_t n);
    void (*axpy)(double* y, double alpha, const double* x, std::size_t n);
    void (*axpby)(double* out, double alpha, const double* x, double beta, const double* y, std::size_t n);
};

const KernelTable& scalar_table();
/// Null when the library was built without AVX2 support.
const KernelTable* avx2_table();

}  // namespace heston::kernels
