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

#ifndef CSP_METRICS_HPP
#define CSP_METRICS_HPP

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "csp/digital_topology.hpp"
#include "csp/loss.hpp"
#include "csp/raster.hpp"
#include "csp/skeletonize.hpp"

namespace csp {

struct OverlapMetrics {
    double dice = 0.0;
    double iou = 0.0;
    double recall = 0.0;
};

/// Set-overlap metrics with the 0/0 -> 1 convention for empty comparisons.
inline OverlapMetrics overlap_metrics(const BinaryRaster& pred, const BinaryRaster& gt) {
    if (!(pred.shape() == gt.shape())) throw std::domain_error("overlap_metrics: shape mismatch");
    double tp = 0.0;
    double pred_sum = 0.0;
    double gt_sum = 0.0;
    for (std::size_t i = 0; i < pred.shape().size(); ++i) {
        const double p = pred.values()[i];
        const double g = gt.values()[i];
        tp += p * g;
        pred_sum += p;
        gt_sum += g;
    }
    OverlapMetrics m;
    m.dice = (pred_sum + gt_sum) == 0.0 ? 1.0 : 2.0 * tp / (pred_sum + gt_sum);
    const double union_ = pred_sum + gt_sum - tp;
    m.iou = union_ == 0.0 ? 1.0 : tp / union_;
    m.recall = gt_sum == 0.0 ? 1.0 : tp / gt_sum;
    return m;
}

/// Harmonic mean of skeleton-overlap precision and sensitivity, with both
/// skeletons extracted by the binary fast path.
inline double cl_dice(const BinaryRaster& pred, const BinaryRaster& gt, const SkelConfig& skel_cfg) {
    if (!(pred.shape() == gt.shape())) throw std::domain_error("cl_dice: shape mismatch");
    const BinaryRaster skel_pred = binary_skeletonize(pred, skel_cfg).skeleton;
    const BinaryRaster skel_gt = binary_skeletonize(gt, skel_cfg).skeleton;

    double sum_sp = 0.0, sum_sp_g = 0.0, sum_sg = 0.0, sum_sg_p = 0.0;
    for (std::size_t i = 0; i < pred.shape().size(); ++i) {
        sum_sp += skel_pred.values()[i];
        sum_sp_g += skel_pred.values()[i] * gt.values()[i];
        sum_sg += skel_gt.values()[i];
        sum_sg_p += skel_gt.values()[i] * pred.values()[i];
    }
    const double t_prec = sum_sp_g / (sum_sp + kLossEps);
    const double t_sens = sum_sg_p / (sum_sg + kLossEps);
    return 2.0 * t_prec * t_sens / (t_prec + t_sens + kLossEps);
}

struct TopologyErrors {
    int beta0_error = 0;
    int beta1_error = 0;
    int euler_error = 0;

    friend bool operator==(const TopologyErrors&, const TopologyErrors&) = default;
};

inline TopologyErrors topology_errors(const BinaryRaster& pred, const BinaryRaster& gt) {
    if (!(pred.shape() == gt.shape())) throw std::domain_error("topology_errors: shape mismatch");
    const TopologySummary a = topology_summary(pred);
    const TopologySummary b = topology_summary(gt);
    return {std::abs(a.beta0 - b.beta0), std::abs(a.beta1 - b.beta1), std::abs(a.euler - b.euler)};
}

struct MetricReport {
    double dice = 0.0;
    double iou = 0.0;
    double recall = 0.0;
    double cl_dice = 0.0;
    int beta0_error = 0;
    int beta1_error = 0;
    int euler_error = 0;
};

inline MetricReport compute_metrics(const BinaryRaster& pred, const BinaryRaster& gt, const SkelConfig& skel_cfg) {
    const OverlapMetrics overlap = overlap_metrics(pred, gt);
    const TopologyErrors topo = topology_errors(pred, gt);
    MetricReport r;
    r.dice = overlap.dice;
    r.iou = overlap.iou;
    r.recall = overlap.recall;
    r.cl_dice = cl_dice(pred, gt, skel_cfg);
    r.beta0_error = topo.beta0_error;
    r.beta1_error = topo.beta1_error;
    r.euler_error = topo.euler_error;
    return r;
}

}  // namespace csp

#endif  // CSP_METRICS_HPP
