// Deterministic text formatting for CSV/JSON outputs.
#pragma once

#include <cstdio>
#include <string>

namespace ida {

// Shortest decimal representation that round-trips the double exactly.
inline std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v) return buf;
    }
    return buf;
}

} // namespace ida
