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

#ifndef CSP_RASTER_HPP
#define CSP_RASTER_HPP

#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace csp {

/// Rectangular grid of pixels. A pixel index (r, c) is valid iff
/// 0 <= r < height and 0 <= c < width; storage is row-major.
class GridShape {
public:
    GridShape(int height, int width) : height_(height), width_(width) {
        if (height < 1 || width < 1) {
            throw std::domain_error("GridShape: height and width must be >= 1");
        }
    }

    int height() const { return height_; }
    int width() const { return width_; }
    std::size_t size() const {
        return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
    }
    bool contains(int r, int c) const {
        return r >= 0 && r < height_ && c >= 0 && c < width_;
    }
    std::size_t index(int r, int c) const {
        assert(contains(r, c));
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(c);
    }

    friend bool operator==(const GridShape&, const GridShape&) = default;

private:
    int height_;
    int width_;
};

/// Binary image: every stored value is exactly 0 or 1. The foreground is
/// the set of 1-pixels; everything outside the grid counts as background.
class BinaryRaster {
public:
    explicit BinaryRaster(GridShape shape)
        : shape_(shape), values_(shape.size(), std::uint8_t{0}) {}

    BinaryRaster(GridShape shape, std::vector<std::uint8_t> values)
        : shape_(shape), values_(std::move(values)) {
        if (values_.size() != shape_.size()) {
            throw std::domain_error("BinaryRaster: value count does not match shape");
        }
        for (std::uint8_t v : values_) {
            if (v > 1) {
                throw std::domain_error("BinaryRaster: values must be 0 or 1");
            }
        }
    }

    const GridShape& shape() const { return shape_; }
    std::uint8_t at(int r, int c) const { return values_[shape_.index(r, c)]; }
    void set(int r, int c, std::uint8_t v) {
        assert(v <= 1);
        values_[shape_.index(r, c)] = v;
    }
    std::span<const std::uint8_t> values() const { return values_; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (std::uint8_t v : values_) n += v;
        return n;
    }

    friend bool operator==(const BinaryRaster&, const BinaryRaster&) = default;

private:
    GridShape shape_;
    std::vector<std::uint8_t> values_;
};

/// Continuous-valued image with every value in [0, 1].
class ScalarRaster {
public:
    explicit ScalarRaster(GridShape shape)
        : shape_(shape), values_(shape.size(), 0.0) {}

    ScalarRaster(GridShape shape, std::vector<double> values)
        : shape_(shape), values_(std::move(values)) {
        if (values_.size() != shape_.size()) {
            throw std::domain_error("ScalarRaster: value count does not match shape");
        }
        for (double v : values_) {
            if (!(v >= 0.0 && v <= 1.0)) {
                throw std::domain_error("ScalarRaster: values must lie in [0, 1]");
            }
        }
    }

    const GridShape& shape() const { return shape_; }
    double at(int r, int c) const { return values_[shape_.index(r, c)]; }
    void set(int r, int c, double v) {
        assert(v >= 0.0 && v <= 1.0);
        values_[shape_.index(r, c)] = v;
    }
    std::span<const double> values() const { return values_; }

    friend bool operator==(const ScalarRaster&, const ScalarRaster&) = default;

private:
    GridShape shape_;
    std::vector<double> values_;
};

/// Grid of unconstrained finite reals (segmentation logits, gradients).
class RealRaster {
public:
    explicit RealRaster(GridShape shape)
        : shape_(shape), values_(shape.size(), 0.0) {}

    RealRaster(GridShape shape, std::vector<double> values)
        : shape_(shape), values_(std::move(values)) {
        if (values_.size() != shape_.size()) {
            throw std::domain_error("RealRaster: value count does not match shape");
        }
        for (double v : values_) {
            if (!std::isfinite(v)) {
                throw std::domain_error("RealRaster: values must be finite");
            }
        }
    }

    const GridShape& shape() const { return shape_; }
    double at(int r, int c) const { return values_[shape_.index(r, c)]; }
    void set(int r, int c, double v) {
        assert(std::isfinite(v));
        values_[shape_.index(r, c)] = v;
    }
    std::span<const double> values() const { return values_; }

private:
    GridShape shape_;
    std::vector<double> values_;
};

/// The 8 neighbors of a pixel in fixed cyclic order, plus the center value.
///
/// Order (clockwise starting at the top-left), with row/column offsets:
///
///   index   0   1   2   3   4   5   6   7
///   place  NW   N  NE   E  SE   S  SW   W
///
/// Indices 0,2,4,6 are the corner positions and 1,3,5,7 the edge positions.
/// Index arithmetic on the ring is modulo 8.
struct RingSample {
    std::array<double, 8> ring;
    double center;
};

/// (row, column) offset of each ring position relative to the center.
inline constexpr std::array<std::pair<int, int>, 8> kRingOffsets = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1},
}};

inline constexpr bool is_corner_position(int i) { return (i & 1) == 0; }

namespace detail {

template <typename Raster>
RingSample ring_at_impl(const Raster& image, int r, int c) {
    if (!image.shape().contains(r, c)) {
        throw std::domain_error("ring_at: pixel index out of range");
    }
    RingSample s{};
    for (int i = 0; i < 8; ++i) {
        const int rr = r + kRingOffsets[i].first;
        const int cc = c + kRingOffsets[i].second;
        // Outside the grid reads as background 0.
        s.ring[i] = image.shape().contains(rr, cc) ? static_cast<double>(image.at(rr, cc)) : 0.0;
    }
    s.center = static_cast<double>(image.at(r, c));
    return s;
}

}  // namespace detail

inline RingSample ring_at(const ScalarRaster& image, int r, int c) {
    return detail::ring_at_impl(image, r, c);
}

inline RingSample ring_at(const BinaryRaster& image, int r, int c) {
    return detail::ring_at_impl(image, r, c);
}

/// 8-bit encoding of a binary ring: bit i set iff ring position i is foreground.
inline std::uint8_t ring_pattern_at(const BinaryRaster& image, int r, int c) {
    if (!image.shape().contains(r, c)) {
        throw std::domain_error("ring_pattern_at: pixel index out of range");
    }
    std::uint8_t p = 0;
    for (int i = 0; i < 8; ++i) {
        const int rr = r + kRingOffsets[i].first;
        const int cc = c + kRingOffsets[i].second;
        if (image.shape().contains(rr, cc) && image.at(rr, cc) != 0) {
            p = static_cast<std::uint8_t>(p | (1u << i));
        }
    }
    return p;
}

/// Vector of consecutive differences around the ring,
/// (u1-u2, u2-u3, ..., u8-u1). Components sum to zero.
inline std::array<double, 8> cyclic_gradient(const RingSample& s) {
    std::array<double, 8> g{};
    for (int i = 0; i < 8; ++i) {
        g[i] = s.ring[i] - s.ring[(i + 1) & 7];
    }
    return g;
}

/// One of the four parity classes that partition the grid. Two distinct
/// pixels of the same class are at Chebyshev distance >= 2, so updates
/// within one class never touch each other's neighborhoods.
enum class SubfieldId : int { m1 = 1, m2 = 2, m3 = 3, m4 = 4 };

/// Parity-based assignment: m1=(even row, even col), m2=(odd, even),
/// m3=(even, odd), m4=(odd, odd).
inline SubfieldId subfield_of(int r, int c) {
    assert(r >= 0 && c >= 0);
    return static_cast<SubfieldId>(1 + (r & 1) + 2 * (c & 1));
}

/// Binarize with a strict threshold: 1 where value > t, else 0.
inline BinaryRaster threshold(const ScalarRaster& image, double t) {
    BinaryRaster out(image.shape());
    for (int r = 0; r < image.shape().height(); ++r) {
        for (int c = 0; c < image.shape().width(); ++c) {
            out.set(r, c, image.at(r, c) > t ? 1 : 0);
        }
    }
    return out;
}

}  // namespace csp

#endif  // CSP_RASTER_HPP
