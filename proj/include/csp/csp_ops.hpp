// Licensed under the Apache License, Version 2.0 (the "License"); you
// may not use this file except in compliance with the License.  You
// may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or
// implied.  See the License for the specific language governing
// permissions and limitations under the License.

#ifndef CSP_CSP_OPS_HPP
#define CSP_CSP_OPS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "csp/digital_topology.hpp"
#include "csp/raster.hpp"

namespace csp {

/// Constants of the smooth operators: sigmoid sharpness alpha, transition
/// threshold tau, Gaussian width sigma.
struct CspParams {
    double alpha = 16.0;
    double tau = 0.5;
    double sigma = 0.2;

    void validate() const {
        if (!(alpha > 0.0)) throw std::domain_error("CspParams: alpha must be > 0");
        if (!(tau >= 0.0)) throw std::domain_error("CspParams: tau must be >= 0");
        if (!(sigma > 0.0)) throw std::domain_error("CspParams: sigma must be > 0");
    }
};

/// Scalar result with its derivative.
struct ScalarWithGrad {
    double value = 0.0;
    double d = 0.0;
};

/// Ring-level result with partials with respect to the 8 ring values.
/// The center value never enters these operators, so its partial is 0.
struct ValueWithGrad {
    double value = 0.0;
    std::array<double, 8> d_ring{};
};

/// Smooth transition detector 1/(1 + exp(-alpha*(z - tau))); equals 0.5 at
/// z = tau and is strictly increasing.
inline ScalarWithGrad smooth_delta(double z, const CspParams& params) {
    const double s = 1.0 / (1.0 + std::exp(-params.alpha * (z - params.tau)));
    return {s, params.alpha * s * (1.0 - s)};
}

/// Continuous extension of the corner mask: each corner value becomes
/// max(corner, min(edge_prev, edge_next)); edges pass through unchanged.
/// On binary rings this reproduces masked_ring exactly.
///
/// Every output depends on exactly one input (the max/min winner), so the
/// Jacobian is recorded as a routing table. Ties go to the first argument.
struct SoftMaskedRing {
    std::array<double, 8> values{};
    std::array<int, 8> source{};  // input position feeding each output
};

inline SoftMaskedRing soft_masked_ring(const RingSample& s) {
    SoftMaskedRing out;
    for (int i = 0; i < 8; ++i) {
        out.values[i] = s.ring[i];
        out.source[i] = i;
    }
    for (int corner = 0; corner < 8; corner += 2) {
        const int prev_edge = (corner + 7) & 7;
        const int next_edge = (corner + 1) & 7;
        const bool prev_wins_min = s.ring[prev_edge] <= s.ring[next_edge];
        const double edge_min = prev_wins_min ? s.ring[prev_edge] : s.ring[next_edge];
        if (s.ring[corner] >= edge_min) continue;  // corner wins the max
        out.values[corner] = edge_min;
        out.source[corner] = prev_wins_min ? prev_edge : next_edge;
    }
    return out;
}

/// Sum of smooth transition detections over consecutive ring differences,
/// the smooth counterpart of the crossing number. Value lies in (0, 8).
/// The |.| subgradient at exact ties is taken as 0.
inline ValueWithGrad smooth_crossing_number(const RingSample& s, const CspParams& params) {
    ValueWithGrad out;
    for (int i = 0; i < 8; ++i) {
        const int j = (i + 1) & 7;
        const double diff = s.ring[j] - s.ring[i];
        const ScalarWithGrad d = smooth_delta(std::abs(diff), params);
        out.value += d.value;
        const double sign = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
        out.d_ring[j] += d.d * sign;
        out.d_ring[i] -= d.d * sign;
    }
    return out;
}

/// Gaussian detector of crossing count 2 on the soft-masked ring:
/// exp(-(c/2 - 1)^2 / (2 sigma^2)). Maximal (= 1) exactly when c = 2;
/// on binary rings, thresholding at 0.5 recovers the simple-point predicate.
inline ValueWithGrad detection_operator(const RingSample& s, const CspParams& params) {
    const SoftMaskedRing masked = soft_masked_ring(s);
    const ValueWithGrad c = smooth_crossing_number(RingSample{masked.values, s.center}, params);

    const double deviation = 0.5 * c.value - 1.0;
    const double w = std::exp(-(deviation * deviation) / (2.0 * params.sigma * params.sigma));
    const double dw_dc = w * (-deviation / (2.0 * params.sigma * params.sigma));

    ValueWithGrad out;
    out.value = w;
    for (int j = 0; j < 8; ++j) {
        out.d_ring[masked.source[j]] += dw_dc * c.d_ring[j];
    }
    return out;
}

/// Hard endpoint gate: 0 when at most one neighbor exceeds 0.5 (the pixel is
/// an endpoint and protected), 1 otherwise. Piecewise constant; treated as a
/// stop-gradient in all differentiable paths.
inline double endpoint_gate(const RingSample& s, Connectivity conn = Connectivity::eight) {
    int count = 0;
    for (int i = 0; i < 8; ++i) {
        if (conn == Connectivity::four && is_corner_position(i)) continue;
        if (s.ring[i] > 0.5) ++count;
    }
    return count <= 1 ? 0.0 : 1.0;
}

}  // namespace csp

#endif  // CSP_CSP_OPS_HPP
