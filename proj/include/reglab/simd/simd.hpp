#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace reglab::simd {

// Double-precision kernels backing the arithmetic inner loops (dense
// forward/backward passes, pairwise kernel sums, quadrature transforms).
// Each backend fills the same table; the scalar table is the reference
// the others are equivalence-tested against.
struct KernelTable {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i]
    double (*sum)(const double* a, std::size_t n);
    // sum_i (a[i] - b[i])^2
    double (*sq_dist)(const double* a, const double* b, std::size_t n);
    // y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // y = W x + b, W row-major rows x cols; b may be null
    void (*matvec)(const double* w, const double* x, const double* b, double* y,
                   std::size_t rows, std::size_t cols);
    // out = W^T g (length cols); out is overwritten
    void (*matvec_t)(const double* w, const double* g, double* out,
                     std::size_t rows, std::size_t cols);
    // W += g x^T (rank-1 accumulate)
    void (*ger)(double* w, const double* g, const double* x,
                std::size_t rows, std::size_t cols);
};

const KernelTable& scalar_table();

// Table selected at startup: best instruction set the CPU supports, unless
// overridden by set_active() or the REGLAB_SIMD environment variable
// ("scalar", "avx2", "neon").
const KernelTable& active();

// Force a backend by name. Returns false (and leaves the selection alone)
// if that backend is not available on this CPU.
bool set_active(std::string_view name);

// All backends usable on this CPU, scalar first.
std::vector<const KernelTable*> available();

} // namespace reglab::simd
