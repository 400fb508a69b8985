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

#ifndef CSP_SKELETONIZE_HPP
#define CSP_SKELETONIZE_HPP

#include <algorithm>
#include <bit>
#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csp/csp_ops.hpp"
#include "csp/digital_topology.hpp"
#include "csp/raster.hpp"

namespace csp {

enum class SkelMode { soft, hard };

/// Skeletonization controls. In hard mode the detector is thresholded at 0.5
/// and binary inputs stay binary; in soft mode the raw detector value
/// multiplies the raster.
struct SkelConfig {
    int iterations = 1;
    CspParams params{};
    SkelMode mode = SkelMode::soft;
    bool protect_endpoints = true;
    double convergence_tol = 0.0;
    Connectivity endpoint_connectivity = Connectivity::eight;

    void validate() const {
        if (iterations < 1) throw std::domain_error("SkelConfig: iterations must be >= 1");
        if (!(convergence_tol >= 0.0)) throw std::domain_error("SkelConfig: convergence_tol must be >= 0");
        params.validate();
    }
};

/// Iteration count sufficient for erosion to reach the medial axis from any
/// border: ceil(max(height, width) / 2).
inline int default_iterations(const GridShape& shape) {
    return (std::max(shape.height(), shape.width()) + 1) / 2;
}

struct SkeletonResult {
    ScalarRaster skeleton;
    int iterations_run = 0;
    bool converged = false;
};

struct BinarySkeletonResult {
    BinaryRaster skeleton;
    int iterations_run = 0;
    bool converged = false;
};

/// Soft-mode values decaying multiplicatively are snapped to 0 below this
/// floor so that endpoint neighbor counts stay stable.
inline constexpr double kSkeletonValueFloor = 1e-6;

/// Forward-pass record for reverse accumulation: the raster as it entered
/// each subfield pass, and the endpoint map of each outer iteration. The
/// endpoint map and the mask tie choices are constants of the forward pass.
struct SkeletonTape {
    SkelConfig config;
    GridShape shape;
    std::vector<std::vector<double>> endpoint_maps;  // per iteration; empty vector = no protection

    struct Pass {
        int iteration;
        int subfield;
        std::vector<double> input;
    };
    std::vector<Pass> passes;
};

namespace detail {

inline SkelConfig soft_config(SkelConfig cfg) {
    cfg.mode = SkelMode::soft;
    return cfg;
}

inline void subfield_origin(int subfield, int& r0, int& c0) {
    r0 = (subfield == 2 || subfield == 4) ? 1 : 0;
    c0 = (subfield == 3 || subfield == 4) ? 1 : 0;
}

inline RingSample ring_from_buffer(const std::vector<double>& v, const GridShape& shape, int r, int c) {
    RingSample s{};
    for (int i = 0; i < 8; ++i) {
        const int rr = r + kRingOffsets[i].first;
        const int cc = c + kRingOffsets[i].second;
        s.ring[i] = shape.contains(rr, cc) ? v[shape.index(rr, cc)] : 0.0;
    }
    s.center = v[shape.index(r, c)];
    return s;
}

inline void endpoint_map_from_buffer(const std::vector<double>& v, const GridShape& shape, Connectivity conn,
                                     std::vector<double>& out) {
    out.assign(v.size(), 1.0);
    for (int r = 0; r < shape.height(); ++r) {
        for (int c = 0; c < shape.width(); ++c) {
            int count = 0;
            for (int i = 0; i < 8; ++i) {
                if (conn == Connectivity::four && is_corner_position(i)) continue;
                const int rr = r + kRingOffsets[i].first;
                const int cc = c + kRingOffsets[i].second;
                if (shape.contains(rr, cc) && v[shape.index(rr, cc)] > 0.5) ++count;
            }
            if (count <= 1) out[shape.index(r, c)] = 0.0;
        }
    }
}

inline SkeletonResult cspskeletonize_impl(const ScalarRaster& input, const SkelConfig& cfg, SkeletonTape* tape) {
    cfg.validate();
    const GridShape shape = input.shape();
    const int h = shape.height();
    const int w = shape.width();
    std::vector<double> s(input.values().begin(), input.values().end());

    std::vector<double> endpoint_map;
    int iterations_run = 0;
    bool converged = false;

    for (int t = 0; t < cfg.iterations; ++t) {
        if (cfg.protect_endpoints) {
            endpoint_map_from_buffer(s, shape, cfg.endpoint_connectivity, endpoint_map);
        }
        if (tape) {
            tape->endpoint_maps.push_back(cfg.protect_endpoints ? endpoint_map : std::vector<double>{});
        }

        double max_change = 0.0;
        for (int subfield = 1; subfield <= 4; ++subfield) {
            if (tape) tape->passes.push_back({t, subfield, s});
            int r0 = 0;
            int c0 = 0;
            subfield_origin(subfield, r0, c0);
            for (int r = r0; r < h; r += 2) {
                for (int c = c0; c < w; c += 2) {
                    const std::size_t x = shape.index(r, c);
                    const double sv = s[x];
                    if (sv == 0.0) continue;
                    const double p = cfg.protect_endpoints ? endpoint_map[x] : 1.0;
                    double z = sv;
                    if (p != 0.0) {
                        const double detect = detection_operator(ring_from_buffer(s, shape, r, c), cfg.params).value;
                        const double gate = cfg.mode == SkelMode::hard ? (detect > 0.5 ? 1.0 : 0.0) : detect;
                        z = (1.0 - gate) * sv;
                    }
                    if (cfg.mode == SkelMode::soft && z < kSkeletonValueFloor) z = 0.0;
                    max_change = std::max(max_change, std::abs(z - sv));
                    s[x] = z;
                }
            }
        }

        iterations_run = t + 1;
        if (max_change == 0.0 || max_change < cfg.convergence_tol) {
            converged = true;
            break;
        }
    }
    return {ScalarRaster(shape, std::move(s)), iterations_run, converged};
}

}  // namespace detail

/// Iterative simple-point removal over the four subfields with endpoint
/// protection. The endpoint map is recomputed once per outer iteration; the
/// detector is evaluated on the evolving raster within each subfield pass.
/// Values only ever shrink, so the result is pointwise <= the input.
inline SkeletonResult cspskeletonize(const ScalarRaster& input, const SkelConfig& cfg) {
    return detail::cspskeletonize_impl(input, cfg, nullptr);
}

/// Recording variant of cspskeletonize for reverse accumulation.
/// Soft mode only: the hard gate is piecewise constant with zero gradient
/// almost everywhere, so differentiating through it is refused.
inline std::pair<SkeletonResult, SkeletonTape> cspskeletonize_traced(const ScalarRaster& input,
                                                                     const SkelConfig& cfg) {
    if (cfg.mode != SkelMode::soft) {
        throw std::domain_error("cspskeletonize_traced: gradients require soft mode");
    }
    SkeletonTape tape{cfg, input.shape(), {}, {}};
    SkeletonResult result = detail::cspskeletonize_impl(input, cfg, &tape);
    return {std::move(result), std::move(tape)};
}

/// Reverse accumulation through the recorded recurrence: given the adjoint of
/// the skeleton, returns the adjoint of the input raster. Endpoint gates and
/// mask tie choices are constants of the forward pass; pixels snapped to 0 by
/// the value floor propagate no gradient.
inline RealRaster skeleton_pullback(const SkeletonTape& tape, const RealRaster& output_adjoint) {
    if (!(output_adjoint.shape() == tape.shape)) {
        throw std::domain_error("skeleton_pullback: adjoint shape mismatch");
    }
    const GridShape& shape = tape.shape;
    std::vector<double> g(output_adjoint.values().begin(), output_adjoint.values().end());

    for (auto it = tape.passes.rbegin(); it != tape.passes.rend(); ++it) {
        const SkeletonTape::Pass& pass = *it;
        const std::vector<double>& s_in = pass.input;
        const std::vector<double>& endpoint_map = tape.endpoint_maps[static_cast<std::size_t>(pass.iteration)];
        const bool protect = !endpoint_map.empty();

        std::vector<double> g_in = g;  // identity for pixels outside the subfield
        int r0 = 0;
        int c0 = 0;
        detail::subfield_origin(pass.subfield, r0, c0);
        for (int r = r0; r < shape.height(); r += 2) {
            for (int c = c0; c < shape.width(); c += 2) {
                const std::size_t x = shape.index(r, c);
                const double sv = s_in[x];
                const double p = protect ? endpoint_map[x] : 1.0;

                if (p == 0.0) {
                    g_in[x] = sv < kSkeletonValueFloor ? 0.0 : g[x];
                    continue;
                }
                const ValueWithGrad detect = detection_operator(detail::ring_from_buffer(s_in, shape, r, c), tape.config.params);
                const double z = (1.0 - detect.value) * sv;
                if (z < kSkeletonValueFloor) {
                    g_in[x] = 0.0;  // output clamped to constant 0
                    continue;
                }
                g_in[x] = g[x] * (1.0 - detect.value);
                const double scale = -sv * g[x];
                for (int i = 0; i < 8; ++i) {
                    const int rr = r + kRingOffsets[i].first;
                    const int cc = c + kRingOffsets[i].second;
                    if (shape.contains(rr, cc)) {
                        g_in[shape.index(rr, cc)] += scale * detect.d_ring[i];
                    }
                }
            }
        }
        g = std::move(g_in);
    }
    return RealRaster(shape, std::move(g));
}

struct SkeletonGradResult {
    SkeletonResult result;
    RealRaster input_gradient;
};

/// Forward skeletonization plus the pullback of a given output adjoint
/// (the partials of a downstream scalar loss with respect to the skeleton).
inline SkeletonGradResult skeletonize_with_grad(const ScalarRaster& input, const SkelConfig& cfg,
                                                const RealRaster& output_adjoint) {
    auto [result, tape] = cspskeletonize_traced(input, cfg);
    RealRaster grad = skeleton_pullback(tape, output_adjoint);
    return {std::move(result), std::move(grad)};
}

/// Binary fast path: the crossing-number predicate is looked up per ring
/// pattern instead of evaluating the smooth detector. Produces exactly the
/// result of hard-mode cspskeletonize on the same input.
inline BinarySkeletonResult binary_skeletonize(const BinaryRaster& input, const SkelConfig& cfg) {
    cfg.validate();
    const GridShape shape = input.shape();
    const int h = shape.height();
    const int w = shape.width();
    const int stride = w + 2;  // one-pixel zero frame avoids border branches

    std::vector<std::uint8_t> buf(static_cast<std::size_t>(h + 2) * static_cast<std::size_t>(stride), 0);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            buf[static_cast<std::size_t>(r + 1) * static_cast<std::size_t>(stride) + static_cast<std::size_t>(c + 1)] =
                input.at(r, c);
        }
    }

    auto gather = [&](std::size_t x) -> std::uint8_t {
        return static_cast<std::uint8_t>(
            buf[x - stride - 1] | (buf[x - stride] << 1) | (buf[x - stride + 1] << 2) | (buf[x + 1] << 3) |
            (buf[x + stride + 1] << 4) | (buf[x + stride] << 5) | (buf[x + stride - 1] << 6) | (buf[x - 1] << 7));
    };

    const std::uint8_t neighbor_mask =
        cfg.endpoint_connectivity == Connectivity::eight ? detail::kAllPositions : detail::kEdgePositions;

    std::vector<std::uint8_t> keep;  // endpoint map of the current iteration
#ifndef NDEBUG
    std::vector<std::uint32_t> removal_stamp(buf.size(), 0);
    std::uint32_t pass_id = 0;
#endif

    int iterations_run = 0;
    bool converged = false;
    for (int t = 0; t < cfg.iterations; ++t) {
        if (cfg.protect_endpoints) {
            keep.assign(buf.size(), 1);
            for (int r = 0; r < h; ++r) {
                const std::size_t base = static_cast<std::size_t>(r + 1) * static_cast<std::size_t>(stride) + 1;
                for (int c = 0; c < w; ++c) {
                    const std::size_t x = base + static_cast<std::size_t>(c);
                    if (buf[x] && std::popcount(static_cast<std::uint8_t>(gather(x) & neighbor_mask)) <= 1) {
                        keep[x] = 0;
                    }
                }
            }
        }

        bool changed = false;
        for (int subfield = 1; subfield <= 4; ++subfield) {
            int r0 = 0;
            int c0 = 0;
            detail::subfield_origin(subfield, r0, c0);
#ifndef NDEBUG
            ++pass_id;
#endif
            for (int r = r0; r < h; r += 2) {
                const std::size_t base = static_cast<std::size_t>(r + 1) * static_cast<std::size_t>(stride) + 1;
                for (int c = c0; c < w; c += 2) {
                    const std::size_t x = base + static_cast<std::size_t>(c);
                    if (!buf[x]) continue;
                    if (cfg.protect_endpoints && !keep[x]) continue;
                    if (!kSimplePointLut[gather(x)]) continue;
                    buf[x] = 0;
                    changed = true;
#ifndef NDEBUG
                    // Pixels removed in one pass share a parity class and can
                    // never be 8-adjacent.
                    for (const auto& [dr, dc] : kRingOffsets) {
                        assert(removal_stamp[x + static_cast<std::size_t>(dr) * static_cast<std::size_t>(stride) +
                                             static_cast<std::size_t>(dc)] != pass_id);
                    }
                    removal_stamp[x] = pass_id;
#endif
                }
            }
        }

        iterations_run = t + 1;
        const double max_change = changed ? 1.0 : 0.0;
        if (max_change == 0.0 || max_change < cfg.convergence_tol) {
            converged = true;
            break;
        }
    }

    BinaryRaster out(shape);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            out.set(r, c,
                    buf[static_cast<std::size_t>(r + 1) * static_cast<std::size_t>(stride) + static_cast<std::size_t>(c + 1)]);
        }
    }
    return {std::move(out), iterations_run, converged};
}

}  // namespace csp

#endif  // CSP_SKELETONIZE_HPP
