#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "reglab/neural.hpp"
#include "reglab/rng.hpp"

namespace reglab::testutil {

inline double rel_err(double got, double want) {
    const double scale = std::max({std::abs(got), std::abs(want), 1e-12});
    return std::abs(got - want) / scale;
}

// Central finite difference of a scalar function of one coordinate.
inline double central_diff(const std::function<double(double)>& f, double at,
                           double h = 1e-5) {
    return (f(at + h) - f(at - h)) / (2.0 * h);
}

// Largest relative error between analytic parameter/input gradients of
// loss(net) and central finite differences over every parameter.
inline double max_param_grad_rel_err(Network& net,
                                     const std::function<double(const Network&)>& loss,
                                     const ParamGrads& analytic, double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        auto probe = [&](double* slot, double analytic_grad) {
            const double saved = *slot;
            *slot = saved + h;
            const double up = loss(net);
            *slot = saved - h;
            const double down = loss(net);
            *slot = saved;
            const double fd = (up - down) / (2.0 * h);
            worst = std::max(worst, rel_err(analytic_grad, fd));
        };
        for (std::size_t i = 0; i < net.layers[l].w.data.size(); ++i) {
            probe(&net.layers[l].w.data[i], analytic.dw[l].data[i]);
        }
        for (std::size_t i = 0; i < net.layers[l].b.size(); ++i) {
            probe(&net.layers[l].b[i], analytic.db[l][i]);
        }
    }
    return worst;
}

// True when every ReLU-family pre-activation stays clear of its kink, so
// central differences are trustworthy.
inline bool tape_clear_of_kinks(const Tape& tape, double margin = 1e-3) {
    for (std::size_t l = 0; l < tape.acts.size(); ++l) {
        if (tape.acts[l] == Activation::Relu || tape.acts[l] == Activation::LeakyRelu) {
            for (double pre : tape.pre[l]) {
                if (std::abs(pre) < margin) {
                    return false;
                }
            }
        }
    }
    return true;
}

} // namespace reglab::testutil
