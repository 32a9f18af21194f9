#include "heston/kernels.hpp"

#include "heston/error.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace heston::kernels {

#ifdef HESTON_HAVE_AVX2
const KernelTable* avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#ifdef HESTON_HAVE_AVX2
    return avx2_table_impl();
#else
    return nullptr;
#endif
}

bool isa_available(Isa isa) {
    switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(HESTON_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

namespace {

Isa initial_isa() {
    if (const char* env = std::getenv("HESTON_ISA"); env && std::string(env) == "scalar") return Isa::Scalar;
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

const KernelTable& table() {
    return current().load(std::memory_order_relaxed) == Isa::Avx2 ? *avx2_table() : scalar_table();
}

void check(std::size_t a, std::size_t b) {
    if (a != b) throw DimensionError("kernel operand lengths differ: " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_available(isa)) throw std::invalid_argument("requested ISA is not available");
    current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

void mul_add(std::span<double> y, std::span<const double> a, std::span<const double> x) {
    check(y.size(), a.size());
    check(y.size(), x.size());
    table().mul_add(y.data(), a.data(), x.data(), y.size());
}

void axpy(std::span<double> y, double alpha, std::span<const double> x) {
    check(y.size(), x.size());
    table().axpy(y.data(), alpha, x.data(), y.size());
}

void axpby(std::span<double> out, double alpha, std::span<const double> x, double beta, std::span<const double> y) {
    check(out.size(), x.size());
    check(out.size(), y.size());
    table().axpby(out.data(), alpha, x.data(), beta, y.data(), out.size());
}

}  // namespace heston::kernels
