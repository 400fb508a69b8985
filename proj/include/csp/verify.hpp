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

#ifndef CSP_VERIFY_HPP
#define CSP_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "csp/csp_ops.hpp"
#include "csp/digital_topology.hpp"

namespace csp {

/// Outcome of one exhaustive ring suite: every failing 8-neighbor pattern.
struct RingSuiteResult {
    std::string name;
    int cases = 0;
    std::vector<std::uint8_t> failures;

    bool passed() const { return failures.empty(); }
};

inline std::string pattern_bits(std::uint8_t pattern) {
    std::string s(8, '0');
    for (int i = 0; i < 8; ++i) {
        if (pattern & (1u << i)) s[static_cast<std::size_t>(i)] = '1';
    }
    return s;  // positions x1..x8, NW clockwise
}

/// The four exhaustive checks over all 256 binary ring configurations:
///  - the crossing-number predicate agrees with the component-count definition;
///  - on boundary rings, t4 = 1 alone decides simpleness;
///  - on boundary rings, the masked ring has exactly 2*t4 transitions;
///  - the smooth detector thresholded at 0.5 matches the binary predicate,
///    with a wide margin (> 0.999 at simple rings, < 1e-4 elsewhere).
///
/// `apply_mask` exists as a negative control: with it off, the corner-masking
/// step is skipped and the configurations that need it are reported.
inline std::vector<RingSuiteResult> run_ring_suites(const CspParams& params = {}, bool apply_mask = true) {
    std::vector<RingSuiteResult> suites;
    auto masked = [&](std::uint8_t p) { return apply_mask ? masked_ring(p) : p; };

    {
        RingSuiteResult s{"crossing-predicate-vs-definition", 256, {}};
        for (int p = 0; p < 256; ++p) {
            const auto pattern = static_cast<std::uint8_t>(p);
            const bool by_crossing = crossing_number(masked(pattern)) == 2;
            if (by_crossing != is_simple_by_definition(pattern)) s.failures.push_back(pattern);
        }
        suites.push_back(std::move(s));
    }
    {
        RingSuiteResult s{"t4-alone-decides-on-boundary-rings", 0, {}};
        for (int p = 0; p < 256; ++p) {
            const auto pattern = static_cast<std::uint8_t>(p);
            if (is_non_boundary(pattern)) continue;
            ++s.cases;
            const TopologicalNumbers t = topological_numbers(pattern);
            if ((t.t4 == 1 && t.t8 == 1) != (t.t4 == 1)) s.failures.push_back(pattern);
        }
        suites.push_back(std::move(s));
    }
    {
        RingSuiteResult s{"masked-crossing-equals-2*t4", 0, {}};
        for (int p = 0; p < 256; ++p) {
            const auto pattern = static_cast<std::uint8_t>(p);
            if (is_non_boundary(pattern)) continue;
            ++s.cases;
            if (crossing_number(masked(pattern)) != 2 * topological_numbers(pattern).t4) s.failures.push_back(pattern);
        }
        suites.push_back(std::move(s));
    }
    {
        RingSuiteResult s{"smooth-detector-matches-binary-predicate", 256, {}};
        for (int p = 0; p < 256; ++p) {
            const auto pattern = static_cast<std::uint8_t>(p);
            const double w = detection_operator(ring_from_pattern(pattern), params).value;
            // Under the negative control the detector (which masks internally)
            // is held against the unmasked crossing predicate.
            const bool simple = crossing_number(masked(pattern)) == 2;
            const bool ok = ((w > 0.5) == simple) && (!simple || w > 0.999) && (simple || w < 1e-4);
            if (!ok) s.failures.push_back(pattern);
        }
        suites.push_back(std::move(s));
    }
    return suites;
}

}  // namespace csp

#endif  // CSP_VERIFY_HPP
