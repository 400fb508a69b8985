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

#ifndef CSP_TESTS_TESTUTIL_HPP
#define CSP_TESTS_TESTUTIL_HPP

#include <random>
#include <string>
#include <vector>

#include "csp/raster.hpp"

namespace csptest {

/// Readable fixtures: '#' or '1' is foreground, '.' or '0' background.
inline csp::BinaryRaster binary_from_strings(const std::vector<std::string>& rows) {
    const int h = static_cast<int>(rows.size());
    const int w = static_cast<int>(rows.front().size());
    csp::BinaryRaster out(csp::GridShape(h, w));
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const char ch = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            out.set(r, c, (ch == '#' || ch == '1') ? 1 : 0);
        }
    }
    return out;
}

inline csp::ScalarRaster to_scalar(const csp::BinaryRaster& b) {
    std::vector<double> v(b.shape().size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = b.values()[i];
    return csp::ScalarRaster(b.shape(), std::move(v));
}

/// Random binary raster mixing blobs, strokes and punched holes, so that
/// component and hole counts vary across instances.
inline csp::BinaryRaster random_topology_raster(std::mt19937& rng, int h, int w) {
    std::vector<std::uint8_t> v(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0);
    auto put = [&](int r, int c, std::uint8_t value) {
        if (r >= 0 && r < h && c >= 0 && c < w) v[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)] = value;
    };
    auto disc = [&](int cr, int cc, int radius, std::uint8_t value) {
        for (int r = cr - radius; r <= cr + radius; ++r) {
            for (int c = cc - radius; c <= cc + radius; ++c) {
                if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius) put(r, c, value);
            }
        }
    };

    std::uniform_int_distribution<int> row(0, h - 1);
    std::uniform_int_distribution<int> col(0, w - 1);
    std::uniform_int_distribution<int> blob_count(1, 4);
    std::uniform_int_distribution<int> blob_radius(1, std::max(2, std::min(h, w) / 4));
    std::uniform_int_distribution<int> stroke_count(0, 3);
    std::uniform_int_distribution<int> step(-1, 1);
    std::uniform_int_distribution<int> hole_count(0, 3);
    std::uniform_int_distribution<int> hole_radius(1, std::max(1, std::min(h, w) / 8));

    const int blobs = blob_count(rng);
    for (int i = 0; i < blobs; ++i) disc(row(rng), col(rng), blob_radius(rng), 1);

    const int strokes = stroke_count(rng);
    for (int i = 0; i < strokes; ++i) {
        int r = row(rng);
        int c = col(rng);
        const int length = (h + w) / 2;
        for (int s = 0; s < length; ++s) {
            put(r, c, 1);
            r += step(rng);
            c += step(rng);
        }
    }

    const int holes = hole_count(rng);
    for (int i = 0; i < holes; ++i) disc(row(rng), col(rng), hole_radius(rng), 0);

    return csp::BinaryRaster(csp::GridShape(h, w), std::move(v));
}

/// Random smooth-ish scalar raster in [0, 1]: blurred uniform noise,
/// min-max normalized.
inline csp::ScalarRaster random_smooth_raster(std::mt19937& rng, int h, int w) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> a(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    for (double& x : a) x = uni(rng);

    // Two 3x3 box blur passes.
    std::vector<double> b(a.size());
    for (int pass = 0; pass < 2; ++pass) {
        for (int r = 0; r < h; ++r) {
            for (int c = 0; c < w; ++c) {
                double sum = 0.0;
                int n = 0;
                for (int dr = -1; dr <= 1; ++dr) {
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = r + dr;
                        const int cc = c + dc;
                        if (rr >= 0 && rr < h && cc >= 0 && cc < w) {
                            sum += a[static_cast<std::size_t>(rr) * static_cast<std::size_t>(w) + static_cast<std::size_t>(cc)];
                            ++n;
                        }
                    }
                }
                b[static_cast<std::size_t>(r) * static_cast<std::size_t>(w) + static_cast<std::size_t>(c)] = sum / n;
            }
        }
        a.swap(b);
    }

    double lo = a[0];
    double hi = a[0];
    for (double x : a) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& x : a) x = (x - lo) / span;
    return csp::ScalarRaster(csp::GridShape(h, w), std::move(a));
}

/// Raster suited to finite-difference checks of the skeleton recurrence:
/// pixels are either exactly 0 or drawn from [0.6, 0.95], which keeps every
/// intermediate value far from the endpoint-count threshold 0.5 and from the
/// small-value floor for a few iterations.
inline csp::ScalarRaster random_fd_raster(std::mt19937& rng, int h, int w, double zero_fraction = 0.25) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_real_distribution<double> value(0.6, 0.95);
    std::vector<double> v(static_cast<std::size_t>(h) * static_cast<std::size_t>(w));
    for (double& x : v) x = uni(rng) < zero_fraction ? 0.0 : value(rng);
    return csp::ScalarRaster(csp::GridShape(h, w), std::move(v));
}

}  // namespace csptest

#endif  // CSP_TESTS_TESTUTIL_HPP
