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

#ifndef CSP_TCSP_HPP
#define CSP_TCSP_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "csp/raster.hpp"
#include "csp/skeletonize.hpp"

namespace csp {

/// Unbounded segmentation scores (logits).
using ScoreField = RealRaster;

/// Weights of the refinement energy: entropy weight epsilon, topology weight
/// eta, dilation radius of the skeleton-restoration term.
struct TcspParams {
    double epsilon = 1.0;
    double eta = 4.0;
    int radius = 1;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::domain_error("TcspParams: epsilon must be > 0 (strong convexity)");
        if (!(eta >= 0.0)) throw std::domain_error("TcspParams: eta must be >= 0");
        if (radius < 1) throw std::domain_error("TcspParams: radius must be >= 1");
    }
};

namespace detail {

template <typename Raster>
Raster dilate_impl(const Raster& image, int radius) {
    if (radius < 1) throw std::domain_error("dilate: radius must be >= 1");
    const GridShape& shape = image.shape();
    Raster out(shape);
    for (int r = 0; r < shape.height(); ++r) {
        for (int c = 0; c < shape.width(); ++c) {
            auto best = image.at(r, c);
            const int r_lo = std::max(0, r - radius);
            const int r_hi = std::min(shape.height() - 1, r + radius);
            const int c_lo = std::max(0, c - radius);
            const int c_hi = std::min(shape.width() - 1, c + radius);
            for (int rr = r_lo; rr <= r_hi; ++rr) {
                for (int cc = c_lo; cc <= c_hi; ++cc) {
                    best = std::max(best, image.at(rr, cc));
                }
            }
            out.set(r, c, best);
        }
    }
    return out;
}

}  // namespace detail

/// Grayscale dilation: maximum over the square (Chebyshev) ball of the given
/// radius, with background padding outside the grid.
inline ScalarRaster dilate(const ScalarRaster& image, int radius) { return detail::dilate_impl(image, radius); }
inline BinaryRaster dilate(const BinaryRaster& image, int radius) { return detail::dilate_impl(image, radius); }

/// Keep the mass of v lying within the given radius of the skeleton support:
/// the pointwise product v * dilate(skel, radius).
inline ScalarRaster restore_components(const ScalarRaster& v, const ScalarRaster& skel, int radius) {
    if (!(v.shape() == skel.shape())) throw std::domain_error("restore_components: shape mismatch");
    const ScalarRaster grown = dilate(skel, radius);
    std::vector<double> out(v.shape().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = v.values()[i] * grown.values()[i];
    }
    return ScalarRaster(v.shape(), std::move(out));
}

namespace detail {

inline ScalarRaster restored_skeleton_term(const ScalarRaster& v, const TcspParams& params,
                                           const SkelConfig& skel_cfg) {
    const ScalarRaster skel = cspskeletonize(v, soft_config(skel_cfg)).skeleton;
    return restore_components(v, skel, params.radius);
}

}  // namespace detail

/// Refinement energy
///   sum(-o*u) + epsilon * sum(u ln u + (1-u) ln(1-u))
///             + eta * sum((1-u) * v * dilate(S(v), r)).
/// Diagnostic evaluation only: u must stay strictly inside (0, 1).
inline double energy(const ScalarRaster& u, const ScoreField& o, const ScalarRaster& v, const TcspParams& params,
                     const SkelConfig& skel_cfg) {
    params.validate();
    if (!(u.shape() == o.shape()) || !(u.shape() == v.shape())) throw std::domain_error("energy: shape mismatch");
    for (double uv : u.values()) {
        if (uv <= 0.0 || uv >= 1.0) throw std::domain_error("energy: u must lie strictly inside (0, 1)");
    }

    const ScalarRaster restored = detail::restored_skeleton_term(v, params, skel_cfg);
    double e = 0.0;
    for (std::size_t i = 0; i < u.shape().size(); ++i) {
        const double uv = std::clamp(u.values()[i], 1e-12, 1.0 - 1e-12);
        e += -o.values()[i] * u.values()[i];
        e += params.epsilon * (uv * std::log(uv) + (1.0 - uv) * std::log(1.0 - uv));
        e += params.eta * (1.0 - u.values()[i]) * restored.values()[i];
    }
    return e;
}

/// Exact minimizer of the energy over u in [0, 1]^N, elementwise
/// sigmoid((o + eta * v * dilate(S(v), r)) / epsilon).
inline ScalarRaster closed_form_solve(const ScoreField& o, const ScalarRaster& v, const TcspParams& params,
                                      const SkelConfig& skel_cfg) {
    params.validate();
    if (!(o.shape() == v.shape())) throw std::domain_error("closed_form_solve: shape mismatch");

    const ScalarRaster restored = detail::restored_skeleton_term(v, params, skel_cfg);
    std::vector<double> out(o.shape().size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double z = (o.values()[i] + params.eta * restored.values()[i]) / params.epsilon;
        out[i] = 1.0 / (1.0 + std::exp(-z));
    }
    return ScalarRaster(o.shape(), std::move(out));
}

}  // namespace csp

#endif  // CSP_TCSP_HPP
