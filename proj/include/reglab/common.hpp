#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace reglab {

// Invalid arguments or malformed inputs (bad dimensions, empty samples,
// out-of-range parameters). Maps to CLI exit code 2.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Non-finite values produced during iteration. Maps to CLI exit code 3.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// alpha outside the feasible ray of the normalization constraint.
struct InfeasibleAlpha : std::domain_error {
    using std::domain_error::domain_error;
};

// The normalization residual never crosses zero on the feasible ray.
struct NoFeasibleRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Grid refinement moved the root by more than the allowed multiple of tol.
struct QuadratureUnstable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Neumaier compensated accumulator. Summing a fixed sequence of values is
// independent of how callers chunk their work as long as the feed order is
// fixed, which is what the parallel Monte Carlo reductions rely on.
class CompensatedSum {
  public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace reglab
