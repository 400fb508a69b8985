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

#ifndef CSP_LOSS_HPP
#define CSP_LOSS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csp/raster.hpp"
#include "csp/skeletonize.hpp"

namespace csp {

/// Guard added to ratio denominators and to the harmonic-mean denominator so
/// that empty skeletons yield finite values instead of 0/0.
inline constexpr double kLossEps = 1e-7;

/// Clamp bound applied to predictions before the cross-entropy logs.
inline constexpr double kBceClamp = 1e-7;

inline constexpr double kDefaultLambda = 0.001;

struct LossReport {
    double t_prec = 0.0;
    double t_sens = 0.0;
    double csp_loss = 0.0;
    double bce = 0.0;
    double total = 0.0;
    double lambda = 0.0;
    bool degenerate = false;  // a skeleton had zero mass; ratios fell back to the guard
};

namespace detail {

struct LossTerms {
    double sum_skel_u = 0.0;   // sum of S(u)
    double sum_skel_ug = 0.0;  // sum of S(u) * g
    double sum_skel_g = 0.0;   // sum of S(g)
    double sum_skel_gu = 0.0;  // sum of S(g) * u
    double t_prec = 0.0;
    double t_sens = 0.0;
    double csp = 0.0;
    double bce = 0.0;
};

inline LossTerms loss_terms(const ScalarRaster& u, const BinaryRaster& g, const ScalarRaster& skel_u,
                            const BinaryRaster& skel_g) {
    LossTerms t;
    const std::size_t n = u.shape().size();
    for (std::size_t i = 0; i < n; ++i) {
        const double su = skel_u.values()[i];
        const double sg = skel_g.values()[i];
        t.sum_skel_u += su;
        t.sum_skel_ug += su * g.values()[i];
        t.sum_skel_g += sg;
        t.sum_skel_gu += sg * u.values()[i];

        const double uc = std::clamp(u.values()[i], kBceClamp, 1.0 - kBceClamp);
        t.bce -= g.values()[i] ? std::log(uc) : std::log(1.0 - uc);
    }
    t.bce /= static_cast<double>(n);
    t.t_prec = t.sum_skel_ug / (t.sum_skel_u + kLossEps);
    t.t_sens = t.sum_skel_gu / (t.sum_skel_g + kLossEps);
    t.csp = 1.0 - 2.0 * t.t_prec * t.t_sens / (t.t_prec + t.t_sens + kLossEps);
    return t;
}

}  // namespace detail

/// Skeleton-overlap loss: harmonic mean of the overlap of S(u) with g and of
/// S(g) with u, subtracted from 1, combined with mean binary cross-entropy as
/// total = bce + lambda * csp. S(u) comes from soft skeletonization of the
/// prediction; S(g) from the binary fast path and is a constant of the loss.
inline LossReport csp_loss(const ScalarRaster& u, const BinaryRaster& g, const SkelConfig& skel_cfg,
                           double lambda = kDefaultLambda) {
    if (!(u.shape() == g.shape())) throw std::domain_error("csp_loss: shape mismatch");
    if (!(lambda >= 0.0)) throw std::domain_error("csp_loss: lambda must be >= 0");

    const ScalarRaster skel_u = cspskeletonize(u, detail::soft_config(skel_cfg)).skeleton;
    const BinaryRaster skel_g = binary_skeletonize(g, skel_cfg).skeleton;
    const detail::LossTerms t = detail::loss_terms(u, g, skel_u, skel_g);

    LossReport report;
    report.t_prec = t.t_prec;
    report.t_sens = t.t_sens;
    report.csp_loss = t.csp;
    report.bce = t.bce;
    report.lambda = lambda;
    report.total = t.bce + lambda * t.csp;
    report.degenerate = t.sum_skel_u == 0.0 || t.sum_skel_g == 0.0;
    return report;
}

struct LossGradResult {
    LossReport report;
    RealRaster gradient;  // partials of total with respect to every pixel of u
};

/// Gradient of the combined loss with respect to the prediction. The
/// cross-entropy term and the t_sens term (u enters linearly) are analytic;
/// the t_prec term is pulled back through the recorded skeleton recurrence.
inline LossGradResult csp_loss_grad(const ScalarRaster& u, const BinaryRaster& g, const SkelConfig& skel_cfg,
                                    double lambda = kDefaultLambda) {
    if (!(u.shape() == g.shape())) throw std::domain_error("csp_loss_grad: shape mismatch");
    if (!(lambda >= 0.0)) throw std::domain_error("csp_loss_grad: lambda must be >= 0");
    if (skel_cfg.mode != SkelMode::soft) {
        throw std::domain_error("csp_loss_grad: gradients require a soft-mode skeleton config");
    }

    auto [skel_result, tape] = cspskeletonize_traced(u, skel_cfg);
    const ScalarRaster& skel_u = skel_result.skeleton;
    const BinaryRaster skel_g = binary_skeletonize(g, skel_cfg).skeleton;
    const detail::LossTerms t = detail::loss_terms(u, g, skel_u, skel_g);

    LossReport report;
    report.t_prec = t.t_prec;
    report.t_sens = t.t_sens;
    report.csp_loss = t.csp;
    report.bce = t.bce;
    report.lambda = lambda;
    report.total = t.bce + lambda * t.csp;
    report.degenerate = t.sum_skel_u == 0.0 || t.sum_skel_g == 0.0;

    const GridShape& shape = u.shape();
    const std::size_t n = shape.size();
    std::vector<double> grad(n, 0.0);

    // Mean cross-entropy term; the clamp passes gradient only strictly inside.
    for (std::size_t i = 0; i < n; ++i) {
        const double uv = u.values()[i];
        if (uv <= kBceClamp || uv >= 1.0 - kBceClamp) continue;
        grad[i] = (g.values()[i] ? -1.0 / uv : 1.0 / (1.0 - uv)) / static_cast<double>(n);
    }

    if (lambda > 0.0) {
        const double denom = t.t_prec + t.t_sens + kLossEps;
        const double dcsp_dprec = -2.0 * (t.t_sens * t.t_sens + t.t_sens * kLossEps) / (denom * denom);
        const double dcsp_dsens = -2.0 * (t.t_prec * t.t_prec + t.t_prec * kLossEps) / (denom * denom);

        // t_sens: u enters linearly, S(g) is constant.
        const double sens_scale = lambda * dcsp_dsens / (t.sum_skel_g + kLossEps);
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] += sens_scale * skel_g.values()[i];
        }

        // t_prec: chain through the skeleton of u.
        const double prec_den = t.sum_skel_u + kLossEps;
        std::vector<double> seed(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            seed[i] = lambda * dcsp_dprec * (g.values()[i] * prec_den - t.sum_skel_ug) / (prec_den * prec_den);
        }
        const RealRaster pulled = skeleton_pullback(tape, RealRaster(shape, std::move(seed)));
        for (std::size_t i = 0; i < n; ++i) {
            grad[i] += pulled.values()[i];
        }
    }

    return {report, RealRaster(shape, std::move(grad))};
}

}  // namespace csp

#endif  // CSP_LOSS_HPP
