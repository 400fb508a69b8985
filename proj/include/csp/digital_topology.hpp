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

#ifndef CSP_DIGITAL_TOPOLOGY_HPP
#define CSP_DIGITAL_TOPOLOGY_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "csp/raster.hpp"

namespace csp {

/// Grid adjacency. The convention throughout is a fixed pairing:
/// foreground 8-connected, background 4-connected.
enum class Connectivity { four, eight };

/// Component count (beta0), hole count (beta1) and Euler characteristic
/// beta0 - beta1 of a binary image.
struct TopologySummary {
    int beta0 = 0;
    int beta1 = 0;
    int euler = 0;

    friend bool operator==(const TopologySummary&, const TopologySummary&) = default;
};

/// Subset of the 8 ring positions, encoded as a bitmask (bit i = position i).
using NeighborhoodSet = std::uint8_t;

namespace detail {

// Adjacency among the 8 ring positions of a 3x3 patch, from the true 2D
// geometry: positions are 4-adjacent at Manhattan distance 1 and 8-adjacent
// at Chebyshev distance 1. Corners are not adjacent to each other; edge
// positions are mutually 8-adjacent around the center.
constexpr std::array<std::uint8_t, 8> make_ring_adjacency(bool eight) {
    std::array<std::uint8_t, 8> adj{};
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            if (i == j) continue;
            const int dr = kRingOffsets[i].first - kRingOffsets[j].first;
            const int dc = kRingOffsets[i].second - kRingOffsets[j].second;
            const int adr = dr < 0 ? -dr : dr;
            const int adc = dc < 0 ? -dc : dc;
            const bool adjacent = eight ? (adr <= 1 && adc <= 1) : (adr + adc == 1);
            if (adjacent) adj[static_cast<std::size_t>(i)] |= static_cast<std::uint8_t>(1u << j);
        }
    }
    return adj;
}

inline constexpr std::array<std::uint8_t, 8> kRingAdj4 = make_ring_adjacency(false);
inline constexpr std::array<std::uint8_t, 8> kRingAdj8 = make_ring_adjacency(true);

// Ring positions adjacent to the center pixel itself.
inline constexpr std::uint8_t kEdgePositions = 0b10101010;  // N, E, S, W
inline constexpr std::uint8_t kAllPositions = 0xFF;

// Number of connected components of a ring subset under the given
// position-to-position adjacency table.
constexpr int count_mask_components(std::uint8_t mask, const std::array<std::uint8_t, 8>& adj) {
    int components = 0;
    std::uint8_t remaining = mask;
    while (remaining != 0) {
        ++components;
        std::uint8_t frontier = static_cast<std::uint8_t>(remaining & (~remaining + 1u));  // lowest set bit
        std::uint8_t visited = 0;
        while (frontier != 0) {
            visited = static_cast<std::uint8_t>(visited | frontier);
            std::uint8_t next = 0;
            for (int i = 0; i < 8; ++i) {
                if (frontier & (1u << i)) next = static_cast<std::uint8_t>(next | adj[static_cast<std::size_t>(i)]);
            }
            frontier = static_cast<std::uint8_t>(next & mask & ~visited);
        }
        remaining = static_cast<std::uint8_t>(remaining & ~visited);
    }
    return components;
}

}  // namespace detail

/// Geodesic neighborhood of the center within the ring, of order k:
/// the ring positions of the given set reachable from the center by paths
/// of length <= k under n-adjacency that stay inside the set.
/// Supported orders: (eight, 1), (four, 1) and (four, 2).
constexpr NeighborhoodSet geodesic_neighborhood(std::uint8_t pattern, Connectivity n, int order) {
    const std::uint8_t first =
        static_cast<std::uint8_t>((n == Connectivity::four ? detail::kEdgePositions : detail::kAllPositions) & pattern);
    if (order == 1) return first;
    if (order == 2 && n == Connectivity::four) {
        std::uint8_t out = 0;
        for (int i = 0; i < 8; ++i) {
            if (first & (1u << i)) {
                out = static_cast<std::uint8_t>(out | detail::kRingAdj4[static_cast<std::size_t>(i)] | (1u << i));
            }
        }
        return static_cast<std::uint8_t>(out & pattern);
    }
    throw std::domain_error("geodesic_neighborhood: unsupported (connectivity, order) pair");
}

struct TopologicalNumbers {
    int t4 = 0;  // 4-components of the order-2 geodesic neighborhood of the background
    int t8 = 0;  // 8-components of the order-1 geodesic neighborhood of the foreground

    friend bool operator==(const TopologicalNumbers&, const TopologicalNumbers&) = default;
};

constexpr TopologicalNumbers topological_numbers(std::uint8_t pattern) {
    const std::uint8_t background = static_cast<std::uint8_t>(~pattern);
    TopologicalNumbers t;
    t.t8 = detail::count_mask_components(geodesic_neighborhood(pattern, Connectivity::eight, 1), detail::kRingAdj8);
    t.t4 = detail::count_mask_components(geodesic_neighborhood(background, Connectivity::four, 2), detail::kRingAdj4);
    return t;
}

/// True iff the punctured 8-neighborhood is homogeneous (all foreground or
/// all background).
constexpr bool is_non_boundary(std::uint8_t pattern) {
    return pattern == 0x00 || pattern == 0xFF;
}

/// A pixel is simple iff flipping it preserves the global component and
/// hole structure; equivalently t4 = t8 = 1.
constexpr bool is_simple_by_definition(std::uint8_t pattern) {
    const TopologicalNumbers t = topological_numbers(pattern);
    return t.t4 == 1 && t.t8 == 1;
}

/// Number of foreground/background transitions around the ring; the l0 norm
/// of the cyclic gradient. Always even, in [0, 8].
constexpr int crossing_number(std::uint8_t pattern) {
    const std::uint8_t rotated = static_cast<std::uint8_t>((pattern << 1) | (pattern >> 7));
    return std::popcount(static_cast<std::uint8_t>(pattern ^ rotated));
}

/// Promote each corner to foreground when both of its cyclically adjacent
/// edge positions are foreground. All four corners are decided from the
/// original ring. Edge positions are never modified.
constexpr std::uint8_t masked_ring(std::uint8_t pattern) {
    std::uint8_t out = pattern;
    for (int corner = 0; corner < 8; corner += 2) {
        const std::uint8_t prev_edge = static_cast<std::uint8_t>(1u << ((corner + 7) & 7));
        const std::uint8_t next_edge = static_cast<std::uint8_t>(1u << ((corner + 1) & 7));
        if ((pattern & prev_edge) && (pattern & next_edge)) {
            out = static_cast<std::uint8_t>(out | (1u << corner));
        }
    }
    return out;
}

/// Crossing-number characterization of simple points: the masked ring has
/// exactly two transitions.
constexpr bool is_simple_by_crossing(std::uint8_t pattern) {
    return crossing_number(masked_ring(pattern)) == 2;
}

/// Simple-point predicate for all 256 ring patterns, precomputed.
inline constexpr std::array<bool, 256> kSimplePointLut = [] {
    std::array<bool, 256> lut{};
    for (int p = 0; p < 256; ++p) {
        lut[static_cast<std::size_t>(p)] = is_simple_by_crossing(static_cast<std::uint8_t>(p));
    }
    return lut;
}();

// RingSample carriers of binary values (exactly 0 or 1 per position).

inline std::uint8_t ring_pattern(const RingSample& s) {
    std::uint8_t p = 0;
    for (int i = 0; i < 8; ++i) {
        if (s.ring[i] > 0.5) p = static_cast<std::uint8_t>(p | (1u << i));
    }
    return p;
}

inline RingSample ring_from_pattern(std::uint8_t pattern, double center = 1.0) {
    RingSample s{};
    for (int i = 0; i < 8; ++i) {
        s.ring[i] = (pattern & (1u << i)) ? 1.0 : 0.0;
    }
    s.center = center;
    return s;
}

inline TopologicalNumbers topological_numbers(const RingSample& s) { return topological_numbers(ring_pattern(s)); }
inline bool is_non_boundary(const RingSample& s) { return is_non_boundary(ring_pattern(s)); }
inline bool is_simple_by_definition(const RingSample& s) { return is_simple_by_definition(ring_pattern(s)); }
inline int crossing_number(const RingSample& s) { return crossing_number(ring_pattern(s)); }
inline RingSample masked_ring(const RingSample& s) { return ring_from_pattern(masked_ring(ring_pattern(s)), s.center); }
inline bool is_simple_by_crossing(const RingSample& s) { return is_simple_by_crossing(ring_pattern(s)); }

/// Foreground component labeling. Labels are 1..count; background is 0.
struct ComponentLabels {
    int count = 0;
    std::vector<std::int32_t> labels;
};

inline ComponentLabels connected_components(const BinaryRaster& image, Connectivity conn) {
    const GridShape& shape = image.shape();
    ComponentLabels out;
    out.labels.assign(shape.size(), 0);

    constexpr std::array<std::pair<int, int>, 8> offsets8 = kRingOffsets;
    constexpr std::array<std::pair<int, int>, 4> offsets4 = {{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};
    const int n_offsets = conn == Connectivity::eight ? 8 : 4;

    std::vector<std::size_t> stack;
    for (int r = 0; r < shape.height(); ++r) {
        for (int c = 0; c < shape.width(); ++c) {
            const std::size_t seed = shape.index(r, c);
            if (image.values()[seed] == 0 || out.labels[seed] != 0) continue;
            ++out.count;
            out.labels[seed] = out.count;
            stack.assign(1, seed);
            while (!stack.empty()) {
                const std::size_t cur = stack.back();
                stack.pop_back();
                const int cr = static_cast<int>(cur) / shape.width();
                const int cc = static_cast<int>(cur) % shape.width();
                for (int i = 0; i < n_offsets; ++i) {
                    const auto [dr, dc] = conn == Connectivity::eight ? offsets8[static_cast<std::size_t>(i)]
                                                                      : offsets4[static_cast<std::size_t>(i)];
                    const int nr = cr + dr;
                    const int nc = cc + dc;
                    if (!shape.contains(nr, nc)) continue;
                    const std::size_t ni = shape.index(nr, nc);
                    if (image.values()[ni] != 0 && out.labels[ni] == 0) {
                        out.labels[ni] = out.count;
                        stack.push_back(ni);
                    }
                }
            }
        }
    }
    return out;
}

/// beta0 = 8-connected foreground components; beta1 = bounded 4-connected
/// background components, obtained by counting background components of the
/// one-pixel zero-padded image and discarding the unbounded outer one.
inline TopologySummary topology_summary(const BinaryRaster& image) {
    TopologySummary s;
    s.beta0 = connected_components(image, Connectivity::eight).count;

    const GridShape padded(image.shape().height() + 2, image.shape().width() + 2);
    BinaryRaster background(padded);
    for (int r = 0; r < padded.height(); ++r) {
        for (int c = 0; c < padded.width(); ++c) {
            const bool inside = r >= 1 && r <= image.shape().height() && c >= 1 && c <= image.shape().width();
            const bool fg = inside && image.at(r - 1, c - 1) != 0;
            background.set(r, c, fg ? 0 : 1);
        }
    }
    s.beta1 = connected_components(background, Connectivity::four).count - 1;
    s.euler = s.beta0 - s.beta1;
    return s;
}

}  // namespace csp

#endif  // CSP_DIGITAL_TOPOLOGY_HPP
