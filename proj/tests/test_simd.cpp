#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "reglab/rng.hpp"
#include "reglab/simd/simd.hpp"

using namespace reglab;
using simd::KernelTable;

namespace {

std::vector<double> random_vec(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) {
        x = rng.uniform(-2.0, 2.0);
    }
    return v;
}

constexpr double kTol = 1e-13;

bool close(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1.0});
    return std::abs(a - b) <= kTol * scale;
}

} // namespace

TEST_CASE("every available backend matches the scalar reference") {
    const KernelTable& ref = simd::scalar_table();
    const std::vector<std::size_t> lengths{0, 1, 2, 3, 4, 5, 7, 8,
                                           9, 15, 16, 17, 31, 32, 33, 100};
    for (const KernelTable* table : simd::available()) {
        CAPTURE(table->name);
        Rng rng(42);
        for (std::size_t n : lengths) {
            const auto a = random_vec(rng, n);
            const auto b = random_vec(rng, n);
            CHECK(close(table->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n)));
            CHECK(close(table->sum(a.data(), n), ref.sum(a.data(), n)));
            CHECK(close(table->sq_dist(a.data(), b.data(), n),
                        ref.sq_dist(a.data(), b.data(), n)));

            auto y1 = random_vec(rng, n);
            auto y2 = y1;
            table->axpy(0.7, a.data(), y1.data(), n);
            ref.axpy(0.7, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(close(y1[i], y2[i]));
            }
        }
    }
}

TEST_CASE("matrix kernels match the scalar reference") {
    const KernelTable& ref = simd::scalar_table();
    const std::vector<std::size_t> sizes{1, 2, 3, 5, 8, 16, 17, 33};
    for (const KernelTable* table : simd::available()) {
        CAPTURE(table->name);
        Rng rng(7);
        for (std::size_t rows : sizes) {
            for (std::size_t cols : sizes) {
                const auto w = random_vec(rng, rows * cols);
                const auto x = random_vec(rng, cols);
                const auto b = random_vec(rng, rows);
                const auto g = random_vec(rng, rows);

                std::vector<double> y1(rows), y2(rows);
                table->matvec(w.data(), x.data(), b.data(), y1.data(), rows, cols);
                ref.matvec(w.data(), x.data(), b.data(), y2.data(), rows, cols);
                for (std::size_t i = 0; i < rows; ++i) {
                    CHECK(close(y1[i], y2[i]));
                }
                table->matvec(w.data(), x.data(), nullptr, y1.data(), rows, cols);
                ref.matvec(w.data(), x.data(), nullptr, y2.data(), rows, cols);
                for (std::size_t i = 0; i < rows; ++i) {
                    CHECK(close(y1[i], y2[i]));
                }

                std::vector<double> t1(cols), t2(cols);
                table->matvec_t(w.data(), g.data(), t1.data(), rows, cols);
                ref.matvec_t(w.data(), g.data(), t2.data(), rows, cols);
                for (std::size_t i = 0; i < cols; ++i) {
                    CHECK(close(t1[i], t2[i]));
                }

                auto w1 = w;
                auto w2 = w;
                table->ger(w1.data(), g.data(), x.data(), rows, cols);
                ref.ger(w2.data(), g.data(), x.data(), rows, cols);
                for (std::size_t i = 0; i < rows * cols; ++i) {
                    CHECK(close(w1[i], w2[i]));
                }
            }
        }
    }
}

TEST_CASE("backend selection") {
    const std::string original = simd::active().name;
    REQUIRE(simd::set_active("scalar"));
    CHECK(std::string(simd::active().name) == "scalar");
    CHECK_FALSE(simd::set_active("no-such-backend"));
    CHECK(std::string(simd::active().name) == "scalar");
    REQUIRE(simd::set_active(original));
    CHECK(std::string(simd::active().name) == original);
}

TEST_CASE("scalar kernels compute the expected values") {
    const KernelTable& k = simd::scalar_table();
    const double a[] = {1.0, 2.0, 3.0};
    const double b[] = {4.0, 5.0, 6.0};
    CHECK(k.dot(a, b, 3) == 32.0);
    CHECK(k.sum(a, 3) == 6.0);
    CHECK(k.sq_dist(a, b, 3) == 27.0);
    const double w[] = {1.0, 0.0, 0.0, 1.0}; // identity
    double y[2];
    k.matvec(w, a, nullptr, y, 2, 2);
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 2.0);
}
