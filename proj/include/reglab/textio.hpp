#pragma once

#include <cstdio>
#include <string>

namespace reglab {

// Shortest decimal that round-trips the double exactly; CSV and resolved
// configs rely on this for bit-identical re-runs.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) {
        for (int prec = 1; prec < 17; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lf", &back);
            if (back == v) {
                return shorter;
            }
        }
    }
    return buf;
}

} // namespace reglab
