#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

#include "reglab/simd/simd.hpp"

#define REGLAB_TARGET_AVX2 __attribute__((target("avx2,fma")))

namespace reglab::simd {
namespace {

REGLAB_TARGET_AVX2
inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

REGLAB_TARGET_AVX2
double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

REGLAB_TARGET_AVX2
double sum_avx2(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

REGLAB_TARGET_AVX2
double sq_dist_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d, d, acc0);
    }
    double acc = hsum(acc0);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

REGLAB_TARGET_AVX2
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

REGLAB_TARGET_AVX2
void matvec_avx2(const double* w, const double* x, const double* b, double* y,
                 std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = (b ? b[r] : 0.0) + dot_avx2(w + r * cols, x, cols);
    }
}

REGLAB_TARGET_AVX2
void matvec_t_avx2(const double* w, const double* g, double* out,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) {
        out[c] = 0.0;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        axpy_avx2(g[r], w + r * cols, out, cols);
    }
}

REGLAB_TARGET_AVX2
void ger_avx2(double* w, const double* g, const double* x,
              std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        axpy_avx2(g[r], x, w + r * cols, cols);
    }
}

} // namespace

const KernelTable* avx2_table() {
    static const KernelTable table{
        "avx2",      dot_avx2, sum_avx2, sq_dist_avx2,
        axpy_avx2,   matvec_avx2, matvec_t_avx2, ger_avx2,
    };
    return &table;
}

} // namespace reglab::simd

#else

#include "reglab/simd/simd.hpp"

namespace reglab::simd {
const KernelTable* avx2_table() { return nullptr; }
} // namespace reglab::simd

#endif
