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

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <utility>
#include <vector>

#include "csp/digital_topology.hpp"
#include "testutil.hpp"

using namespace csp;

namespace {

// ---------------------------------------------------------------------------
// Independent coordinate-level oracle. Works on the 3x3 patch around a center
// at (0, 0) with explicit cell sets, mirroring the recursive definitions
// directly. Shares nothing with the bitmask implementation under test.
// ---------------------------------------------------------------------------

using Cell = std::pair<int, int>;

std::set<Cell> pattern_cells(std::uint8_t pattern) {
    std::set<Cell> cells;
    for (int i = 0; i < 8; ++i) {
        if (pattern & (1u << i)) cells.insert({kRingOffsets[i].first, kRingOffsets[i].second});
    }
    return cells;
}

bool oracle_adjacent(const Cell& a, const Cell& b, bool four) {
    const int dr = std::abs(a.first - b.first);
    const int dc = std::abs(a.second - b.second);
    if (dr == 0 && dc == 0) return false;
    return four ? (dr + dc == 1) : (dr <= 1 && dc <= 1);
}

// Closed neighborhood of a cell (the cell and everything at distance <= 1).
std::set<Cell> oracle_neighborhood(const Cell& y, bool four) {
    std::set<Cell> out{y};
    for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
            const Cell z{y.first + dr, y.second + dc};
            if (oracle_adjacent(y, z, four)) out.insert(z);
        }
    }
    return out;
}

std::set<Cell> oracle_geodesic(const std::set<Cell>& members, bool four, int order) {
    const std::set<Cell> ring = pattern_cells(0xFF);
    const Cell center{0, 0};

    std::set<Cell> current;  // order 1: n-neighbors of the center inside the set
    for (const Cell& y : ring) {
        if (oracle_adjacent(center, y, four) && members.count(y)) current.insert(y);
    }
    for (int k = 2; k <= order; ++k) {
        std::set<Cell> next;
        for (const Cell& y : current) {
            for (const Cell& z : oracle_neighborhood(y, four)) {
                if (ring.count(z) && members.count(z)) next.insert(z);
            }
        }
        current = next;
    }
    return current;
}

int oracle_components(const std::set<Cell>& cells, bool four) {
    std::set<Cell> remaining = cells;
    int count = 0;
    while (!remaining.empty()) {
        ++count;
        std::vector<Cell> stack{*remaining.begin()};
        remaining.erase(remaining.begin());
        while (!stack.empty()) {
            const Cell cur = stack.back();
            stack.pop_back();
            for (auto it = remaining.begin(); it != remaining.end();) {
                if (oracle_adjacent(cur, *it, four)) {
                    stack.push_back(*it);
                    it = remaining.erase(it);
                } else {
                    ++it;
                }
            }
        }
    }
    return count;
}

TopologicalNumbers oracle_topological_numbers(std::uint8_t pattern) {
    const std::set<Cell> fg = pattern_cells(pattern);
    const std::set<Cell> bg = pattern_cells(static_cast<std::uint8_t>(~pattern));
    TopologicalNumbers t;
    t.t8 = oracle_components(oracle_geodesic(fg, /*four=*/false, 1), /*four=*/false);
    t.t4 = oracle_components(oracle_geodesic(bg, /*four=*/true, 2), /*four=*/true);
    return t;
}

std::uint8_t bits(const std::array<int, 8>& ring) {
    std::uint8_t p = 0;
    for (int i = 0; i < 8; ++i) {
        if (ring[static_cast<std::size_t>(i)]) p = static_cast<std::uint8_t>(p | (1u << i));
    }
    return p;
}

}  // namespace

TEST(Geodesic, FullRingOrder2ReachesAllPositions) {
    EXPECT_EQ(geodesic_neighborhood(0xFF, Connectivity::four, 2), 0xFF);
}

TEST(Geodesic, LoneCornerIsUnreachableUnder4Adjacency) {
    EXPECT_EQ(geodesic_neighborhood(0b00000001, Connectivity::four, 2), 0);
}

TEST(Geodesic, EdgeBridgesItsCorner) {
    // x2 and x3 present: x2 is a direct 4-neighbor, x3 hangs off it.
    EXPECT_EQ(geodesic_neighborhood(0b00000110, Connectivity::four, 2), 0b00000110);
}

TEST(Geodesic, UnsupportedPairsThrow) {
    EXPECT_THROW(geodesic_neighborhood(0xFF, Connectivity::eight, 2), std::domain_error);
    EXPECT_THROW(geodesic_neighborhood(0xFF, Connectivity::four, 3), std::domain_error);
}

TEST(Geodesic, MatchesOracleExhaustively) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        for (const auto& [conn, four, order] :
             {std::tuple{Connectivity::eight, false, 1}, {Connectivity::four, true, 1}, {Connectivity::four, true, 2}}) {
            const std::set<Cell> expected = oracle_geodesic(pattern_cells(pattern), four, order);
            const NeighborhoodSet got = geodesic_neighborhood(pattern, conn, order);
            ASSERT_EQ(pattern_cells(got), expected) << "pattern " << p << " order " << order;
        }
    }
}

TEST(TopologicalNumbers, OppositeEdgesSplitForegroundAndBackground) {
    // Foreground at N and S only: two foreground pieces, two background pieces.
    const std::uint8_t pattern = bits({0, 1, 0, 0, 0, 1, 0, 0});
    const TopologicalNumbers t = topological_numbers(pattern);
    EXPECT_EQ(t.t8, 2);
    EXPECT_EQ(t.t4, 2);
    EXPECT_FALSE(is_simple_by_definition(pattern));
}

TEST(TopologicalNumbers, FullRingHasNoBackground) {
    const TopologicalNumbers t = topological_numbers(0xFF);
    EXPECT_EQ(t.t8, 1);
    EXPECT_EQ(t.t4, 0);
    EXPECT_FALSE(is_simple_by_definition(0xFF));
}

TEST(TopologicalNumbers, EmptyRing) {
    const TopologicalNumbers t = topological_numbers(0);
    EXPECT_EQ(t.t8, 0);
    EXPECT_EQ(t.t4, 1);
}

TEST(TopologicalNumbers, MatchesOracleExhaustively) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        ASSERT_EQ(topological_numbers(pattern), oracle_topological_numbers(pattern)) << "pattern " << p;
    }
}

TEST(NonBoundary, HomogeneousRingsOnly) {
    EXPECT_TRUE(is_non_boundary(std::uint8_t{0x00}));
    EXPECT_TRUE(is_non_boundary(std::uint8_t{0xFF}));
    for (int i = 0; i < 8; ++i) EXPECT_FALSE(is_non_boundary(static_cast<std::uint8_t>(1u << i)));
}

TEST(CrossingNumber, Examples) {
    EXPECT_EQ(crossing_number(std::uint8_t{0x00}), 0);
    EXPECT_EQ(crossing_number(std::uint8_t{0xFF}), 0);
    EXPECT_EQ(crossing_number(bits({0, 1, 0, 1, 0, 1, 0, 1})), 8);
    EXPECT_EQ(crossing_number(bits({0, 0, 0, 1, 0, 0, 0, 0})), 2);
}

TEST(CrossingNumber, AlwaysEvenAndEqualsNonzeroCyclicGradientCount) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        const int c = crossing_number(pattern);
        EXPECT_EQ(c % 2, 0);
        EXPECT_GE(c, 0);
        EXPECT_LE(c, 8);
        int nonzero = 0;
        for (double g : cyclic_gradient(ring_from_pattern(pattern))) nonzero += g != 0.0;
        EXPECT_EQ(c, nonzero);
    }
}

TEST(MaskedRing, PromotesCornerBetweenForegroundEdges) {
    const RingSample in = ring_from_pattern(bits({0, 1, 0, 1, 0, 0, 0, 0}));
    const RingSample out = masked_ring(in);
    EXPECT_EQ(ring_pattern(out), bits({0, 1, 1, 1, 0, 0, 0, 0}));
}

TEST(MaskedRing, HomogeneousRingsUnchanged) {
    EXPECT_EQ(masked_ring(std::uint8_t{0x00}), 0x00);
    EXPECT_EQ(masked_ring(std::uint8_t{0xFF}), 0xFF);
}

TEST(MaskedRing, EdgesNeverChangeAndCornersOnlyGainForeground) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        const std::uint8_t m = masked_ring(pattern);
        EXPECT_EQ(m & detail::kEdgePositions, pattern & detail::kEdgePositions);
        EXPECT_EQ(m & pattern, pattern);  // no bit is ever cleared
    }
}

TEST(SimplePoint, Examples) {
    EXPECT_TRUE(is_simple_by_definition(bits({0, 0, 0, 1, 0, 0, 0, 0})));
    EXPECT_TRUE(is_simple_by_crossing(bits({0, 0, 0, 1, 0, 0, 0, 0})));
    EXPECT_FALSE(is_simple_by_crossing(std::uint8_t{0x00}));  // isolated center
    EXPECT_FALSE(is_simple_by_crossing(std::uint8_t{0xFF}));  // interior point
    // The corner between two foreground edges is exactly the case the mask
    // exists for: 4 raw transitions, but a simple point.
    const std::uint8_t needs_mask = bits({0, 1, 0, 1, 0, 0, 0, 0});
    EXPECT_TRUE(is_simple_by_definition(needs_mask));
    EXPECT_TRUE(is_simple_by_crossing(needs_mask));
    EXPECT_EQ(crossing_number(needs_mask), 4);
}

TEST(SimplePoint, CrossingPredicateMatchesDefinitionExhaustively) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        ASSERT_EQ(is_simple_by_crossing(pattern), is_simple_by_definition(pattern)) << "pattern " << p;
        ASSERT_EQ(kSimplePointLut[static_cast<std::size_t>(p)], is_simple_by_crossing(pattern));
    }
}

TEST(SimplePoint, T4AloneDecidesOnBoundaryRings) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        if (is_non_boundary(pattern)) continue;
        const TopologicalNumbers t = topological_numbers(pattern);
        ASSERT_EQ(t.t4 == 1 && t.t8 == 1, t.t4 == 1) << "pattern " << p;
    }
}

TEST(SimplePoint, MaskedCrossingCountsBackgroundComponents) {
    for (int p = 0; p < 256; ++p) {
        const auto pattern = static_cast<std::uint8_t>(p);
        if (is_non_boundary(pattern)) continue;
        ASSERT_EQ(crossing_number(masked_ring(pattern)), 2 * topological_numbers(pattern).t4) << "pattern " << p;
    }
}

TEST(ConnectedComponents, DiagonalPairDependsOnConnectivity) {
    BinaryRaster img(GridShape(2, 2));
    img.set(0, 0, 1);
    img.set(1, 1, 1);
    EXPECT_EQ(connected_components(img, Connectivity::eight).count, 1);
    EXPECT_EQ(connected_components(img, Connectivity::four).count, 2);
}

TEST(ConnectedComponents, EmptyAndFull) {
    BinaryRaster empty(GridShape(4, 4));
    EXPECT_EQ(connected_components(empty, Connectivity::eight).count, 0);

    BinaryRaster full(GridShape(4, 4));
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) full.set(r, c, 1);
    EXPECT_EQ(connected_components(full, Connectivity::eight).count, 1);
    EXPECT_EQ(connected_components(full, Connectivity::four).count, 1);
}

TEST(ConnectedComponents, LabelsPartitionForeground) {
    std::mt19937 rng(21);
    const csp::BinaryRaster img = csptest::random_topology_raster(rng, 12, 12);
    const ComponentLabels cc = connected_components(img, Connectivity::eight);
    for (int r = 0; r < 12; ++r) {
        for (int c = 0; c < 12; ++c) {
            const std::int32_t label = cc.labels[img.shape().index(r, c)];
            if (img.at(r, c)) {
                EXPECT_GE(label, 1);
                EXPECT_LE(label, cc.count);
            } else {
                EXPECT_EQ(label, 0);
            }
        }
    }
}

TEST(TopologySummary, Examples) {
    BinaryRaster empty(GridShape(3, 3));
    EXPECT_EQ(topology_summary(empty), (TopologySummary{0, 0, 0}));

    const csp::BinaryRaster block = csptest::binary_from_strings({"###", "###", "###"});
    EXPECT_EQ(topology_summary(block), (TopologySummary{1, 0, 1}));

    const csp::BinaryRaster donut = csptest::binary_from_strings({"###", "#.#", "###"});
    EXPECT_EQ(topology_summary(donut), (TopologySummary{1, 1, 0}));
}

TEST(TopologySummary, BorderHoleIsNotAHole) {
    // The gap touches the image border; outside the grid is background,
    // so there is no enclosed hole.
    const csp::BinaryRaster cup = csptest::binary_from_strings({"#.#", "#.#", "###"});
    EXPECT_EQ(topology_summary(cup), (TopologySummary{1, 0, 1}));
}

TEST(FlipOracle, SimplenessIsEquivalentToSummaryInvariance) {
    std::mt19937 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        csp::BinaryRaster img = csptest::random_topology_raster(rng, 16, 16);
        const TopologySummary base = topology_summary(img);
        for (int r = 0; r < 16; ++r) {
            for (int c = 0; c < 16; ++c) {
                const bool simple = is_simple_by_crossing(ring_pattern_at(img, r, c));
                const std::uint8_t original = img.at(r, c);
                img.set(r, c, original ? 0 : 1);
                const bool unchanged = topology_summary(img) == base;
                img.set(r, c, original);
                ASSERT_EQ(simple, unchanged) << "trial " << trial << " pixel (" << r << "," << c << ")";
            }
        }
    }
}
