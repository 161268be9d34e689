#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "rcs/device.hpp"
#include "rcs/errors.hpp"

namespace rcs {

using cplx = std::complex<double>;

enum class Gate1QKind : uint8_t { SX = 0, SY = 1, SW = 2 };

inline const char* gate1q_name(Gate1QKind k) {
    switch (k) {
    case Gate1QKind::SX: return "SX";
    case Gate1QKind::SY: return "SY";
    case Gate1QKind::SW: return "SW";
    }
    return "?";
}

inline Gate1QKind gate1q_from_name(const std::string& s) {
    if (s == "SX") return Gate1QKind::SX;
    if (s == "SY") return Gate1QKind::SY;
    if (s == "SW") return Gate1QKind::SW;
    throw ParseError("unknown single-qubit gate kind '" + s + "'");
}

using Mat2 = std::array<cplx, 4>;   // row-major 2x2
using Mat4 = std::array<cplx, 16>;  // row-major 4x4, basis {00,01,10,11}

// sqrt(G) = (I - iG)/sqrt(2) for G in {X, Y, W}, W = (X+Y)/sqrt(2).
inline Mat2 gate1q_matrix(Gate1QKind k) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i(0.0, 1.0);
    Mat2 g{};
    switch (k) {
    case Gate1QKind::SX:
        g = {cplx(1, 0), cplx(0, -1), cplx(0, -1), cplx(1, 0)};
        break;
    case Gate1QKind::SY:
        g = {cplx(1, 0), cplx(-1, 0), cplx(1, 0), cplx(1, 0)};
        break;
    case Gate1QKind::SW: {
        // W = [[0, (1-i)/sqrt(2)], [(1+i)/sqrt(2), 0]]
        const cplx w01 = (cplx(1, 0) - i) * s;
        const cplx w10 = (cplx(1, 0) + i) * s;
        g = {cplx(1, 0), -i * w01, -i * w10, cplx(1, 0)};
        break;
    }
    }
    for (auto& v : g) v *= s;
    return g;
}

// iSWAP-like unitary:
//   [ 1                                                            ]
//   [    e^{i(d+ + d-)} cos t      -i e^{i(d+ - doff)} sin t       ]
//   [   -i e^{i(d+ + doff)} sin t   e^{i(d+ - d-)} cos t           ]
//   [                                              e^{i(2 d+ - phi)} ]
// At (theta = pi/2, phi = 0, deltas = 0) this maps |01> -> -i|10>.
inline Mat4 gate2q_matrix(const TwoQubitParams& p) {
    const cplx i(0.0, 1.0);
    const double ct = std::cos(p.theta);
    const double st = std::sin(p.theta);
    auto ei = [&](double x) { return std::exp(i * x); };
    Mat4 u{};
    u[0 * 4 + 0] = 1.0;
    u[1 * 4 + 1] = ei(p.delta_plus + p.delta_minus) * ct;
    u[1 * 4 + 2] = -i * ei(p.delta_plus - p.delta_minus_off) * st;
    u[2 * 4 + 1] = -i * ei(p.delta_plus + p.delta_minus_off) * st;
    u[2 * 4 + 2] = ei(p.delta_plus - p.delta_minus) * ct;
    u[3 * 4 + 3] = ei(2.0 * p.delta_plus - p.phi);
    return u;
}

} // namespace rcs
