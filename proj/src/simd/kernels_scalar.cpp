#include "reglab/simd/simd.hpp"

namespace reglab::simd {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i] * b[i];
    }
    return acc;
}

double sum_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += a[i];
    }
    return acc;
}

double sq_dist_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += alpha * x[i];
    }
}

void matvec_scalar(const double* w, const double* x, const double* b, double* y,
                   std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double acc = b ? b[r] : 0.0;
        const double* row = w + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            acc += row[c] * x[c];
        }
        y[r] = acc;
    }
}

void matvec_t_scalar(const double* w, const double* g, double* out,
                     std::size_t rows, std::size_t cols) {
    for (std::size_t c = 0; c < cols; ++c) {
        out[c] = 0.0;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = w + r * cols;
        const double gr = g[r];
        for (std::size_t c = 0; c < cols; ++c) {
            out[c] += gr * row[c];
        }
    }
}

void ger_scalar(double* w, const double* g, const double* x,
                std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        double* row = w + r * cols;
        const double gr = g[r];
        for (std::size_t c = 0; c < cols; ++c) {
            row[c] += gr * x[c];
        }
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{
        "scalar",        dot_scalar, sum_scalar, sq_dist_scalar,
        axpy_scalar,     matvec_scalar, matvec_t_scalar, ger_scalar,
    };
    return table;
}

} // namespace reglab::simd
