#if defined(__aarch64__)

#include <arm_neon.h>

#include "reglab/simd/simd.hpp"

namespace reglab::simd {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    for (; i + 2 <= n; i += 2) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double sum_neon(const double* a, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc0 = vaddq_f64(acc0, vld1q_f64(a + i));
    }
    double acc = vaddvq_f64(acc0);
    for (; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

double sq_dist_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc0 = vfmaq_f64(acc0, d, d);
    }
    double acc = vaddvq_f64(acc0);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void matvec_neon(const double* w, const double* x, const double* b, double* y,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = (b ? b[r] : 0.0) + dot_neon(w + r * cols, x, cols);
    }
}

void matvec_t_neon(const double* w, const double* g, double* out,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) {
        out[c] = 0.0;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        axpy_neon(g[r], w + r * cols, out, cols);
    }
}

void ger_neon(double* w, const double* g, const double* x,
              std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        axpy_neon(g[r], x, w + r * cols, cols);
    }
}

} // namespace

const KernelTable* neon_table() {
    static const KernelTable table{
        "neon",      dot_neon, sum_neon, sq_dist_neon,
        axpy_neon,   matvec_neon, matvec_t_neon, ger_neon,
    };
    return &table;
}

} // namespace reglab::simd

#else

#include "reglab/simd/simd.hpp"

namespace reglab::simd {
const KernelTable* neon_table() { return nullptr; }
} // namespace reglab::simd

#endif
