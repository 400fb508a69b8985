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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "csp/csp_ops.hpp"
#include "csp/digital_topology.hpp"
#include "csp/loss.hpp"
#include "csp/metrics.hpp"
#include "csp/raster.hpp"
#include "csp/raster_io.hpp"
#include "csp/report.hpp"
#include "csp/skeletonize.hpp"
#include "csp/tcsp.hpp"
#include "csp/verify.hpp"

namespace fs = std::filesystem;

namespace {

enum class Kind { automatic, binary, scalar };

const std::map<std::string, Kind> kKindNames{
    {"auto", Kind::automatic}, {"binary", Kind::binary}, {"scalar", Kind::scalar}};

const std::map<std::string, csp::SkelMode> kModeNames{{"soft", csp::SkelMode::soft}, {"hard", csp::SkelMode::hard}};

std::string shape_text(const csp::GridShape& s) {
    return std::to_string(s.height()) + "x" + std::to_string(s.width());
}

using AnyRaster = std::variant<csp::BinaryRaster, csp::ScalarRaster>;

csp::RasterFormat required_format(const fs::path& path) {
    const auto fmt = csp::format_from_path(path);
    if (!fmt) throw std::invalid_argument("unrecognized raster extension on '" + path.string() + "' (use .pgm or .pfm)");
    return *fmt;
}

AnyRaster load_input(const fs::path& path, Kind kind) {
    const csp::RasterFormat fmt = required_format(path);
    if (fmt == csp::RasterFormat::pfm) {
        if (kind == Kind::binary) {
            throw std::invalid_argument("binary rasters travel as PGM; '" + path.string() + "' is PFM");
        }
        return csp::scalar_from_pfm(csp::load_pfm(path));
    }
    const csp::PgmImage img = csp::load_pgm(path);
    if (kind == Kind::binary) return csp::binary_from_pgm(img);
    if (kind == Kind::scalar) return csp::scalar_from_pgm(img);
    const bool two_level = std::all_of(img.samples.begin(), img.samples.end(),
                                       [](std::uint8_t s) { return s == 0 || s == 255; });
    if (two_level) return csp::binary_from_pgm(img);
    return csp::scalar_from_pgm(img);
}

void require_output_format(const fs::path& path, csp::RasterFormat fmt, const std::string& what) {
    if (required_format(path) != fmt) {
        const char* ext = fmt == csp::RasterFormat::pgm ? ".pgm" : ".pfm";
        throw std::invalid_argument(what + " is written as " + ext + "; got '" + path.string() + "'");
    }
}

void check_same_shape(const csp::GridShape& a, const csp::GridShape& b, const std::string& a_name,
                      const std::string& b_name) {
    if (!(a == b)) {
        throw std::invalid_argument("shape mismatch: " + a_name + " is " + shape_text(a) + ", " + b_name + " is " +
                                    shape_text(b));
    }
}

void emit_report(const csp::ReportDoc& doc, const fs::path& report_path, bool to_stdout) {
    if (to_stdout) std::cout << doc.to_text();
    if (!report_path.empty()) doc.write(report_path);
}

// ---------------------------------------------------------------------------

struct CommonSkelFlags {
    csp::CspParams params{};
    int iterations = -1;  // -1: pick from the image size
    bool protect_endpoints = true;

    void attach(CLI::App& cmd, bool with_iters = true) {
        cmd.add_option("--alpha", params.alpha, "Transition sigmoid sharpness")->capture_default_str();
        cmd.add_option("--tau", params.tau, "Transition threshold")->capture_default_str();
        cmd.add_option("--sigma", params.sigma, "Detector Gaussian width")->capture_default_str();
        if (with_iters) {
            cmd.add_option("--iters", iterations, "Skeleton iterations (default: half the longer image side)")
                ->check(CLI::PositiveNumber);
            cmd.add_flag("--protect-endpoints,!--no-protect-endpoints", protect_endpoints,
                         "Protect endpoints during skeletonization");
        }
    }

    csp::SkelConfig config(const csp::GridShape& shape, csp::SkelMode mode) const {
        csp::SkelConfig cfg;
        cfg.iterations = iterations > 0 ? iterations : csp::default_iterations(shape);
        cfg.params = params;
        cfg.mode = mode;
        cfg.protect_endpoints = protect_endpoints;
        return cfg;
    }
};

int run_simple_points(const fs::path& input, const fs::path& output, const csp::CspParams& params, Kind kind) {
    params.validate();
    const AnyRaster raster = load_input(input, kind);

    if (std::holds_alternative<csp::BinaryRaster>(raster)) {
        const auto& img = std::get<csp::BinaryRaster>(raster);
        require_output_format(output, csp::RasterFormat::pgm, "a binary simple-point mask");
        csp::BinaryRaster mask(img.shape());
        for (int r = 0; r < img.shape().height(); ++r) {
            for (int c = 0; c < img.shape().width(); ++c) {
                mask.set(r, c, csp::is_simple_by_crossing(csp::ring_pattern_at(img, r, c)) ? 1 : 0);
            }
        }
        csp::store_binary_raster(mask, output);
        return 0;
    }

    const auto& img = std::get<csp::ScalarRaster>(raster);
    require_output_format(output, csp::RasterFormat::pfm, "a detector map");
    csp::ScalarRaster w(img.shape());
    for (int r = 0; r < img.shape().height(); ++r) {
        for (int c = 0; c < img.shape().width(); ++c) {
            w.set(r, c, csp::detection_operator(csp::ring_at(img, r, c), params).value);
        }
    }
    csp::store_scalar_raster(w, output, csp::RasterFormat::pfm);
    return 0;
}

int run_skeletonize(const fs::path& input, const fs::path& output, const CommonSkelFlags& flags, csp::SkelMode mode,
                    Kind kind, const fs::path& report_path) {
    const AnyRaster raster = load_input(input, kind);
    csp::ReportDoc doc;

    if (std::holds_alternative<csp::BinaryRaster>(raster)) {
        const auto& img = std::get<csp::BinaryRaster>(raster);
        require_output_format(output, csp::RasterFormat::pgm, "a binary skeleton");
        const csp::SkelConfig cfg = flags.config(img.shape(), csp::SkelMode::hard);
        const csp::BinarySkeletonResult res = csp::binary_skeletonize(img, cfg);
        csp::store_binary_raster(res.skeleton, output);

        const csp::TopologySummary in = csp::topology_summary(img);
        const csp::TopologySummary out = csp::topology_summary(res.skeleton);
        doc.add("mode", std::string("binary"));
        doc.add("iterations", cfg.iterations);
        doc.add("iterations_run", res.iterations_run);
        doc.add("converged", res.converged);
        doc.add("beta0_in", in.beta0);
        doc.add("beta1_in", in.beta1);
        doc.add("euler_in", in.euler);
        doc.add("beta0_out", out.beta0);
        doc.add("beta1_out", out.beta1);
        doc.add("euler_out", out.euler);
    } else {
        const auto& img = std::get<csp::ScalarRaster>(raster);
        require_output_format(output, csp::RasterFormat::pfm, "a continuous skeleton");
        const csp::SkelConfig cfg = flags.config(img.shape(), mode);
        const csp::SkeletonResult res = csp::cspskeletonize(img, cfg);
        csp::store_scalar_raster(res.skeleton, output, csp::RasterFormat::pfm);

        doc.add("mode", std::string(mode == csp::SkelMode::hard ? "hard" : "soft"));
        doc.add("iterations", cfg.iterations);
        doc.add("iterations_run", res.iterations_run);
        doc.add("converged", res.converged);
    }
    emit_report(doc, report_path, /*to_stdout=*/false);
    return 0;
}

int run_loss(const fs::path& pred_path, const fs::path& gt_path, const CommonSkelFlags& flags, csp::SkelMode mode,
             double lambda, const fs::path& grad_path, const fs::path& report_path) {
    const csp::ScalarRaster pred = csp::load_scalar_raster(pred_path, required_format(pred_path));
    const csp::BinaryRaster gt = csp::load_binary_raster(gt_path);
    check_same_shape(pred.shape(), gt.shape(), "prediction", "ground truth");

    const csp::SkelConfig cfg = flags.config(pred.shape(), mode);

    csp::LossReport report;
    if (grad_path.empty()) {
        report = csp::csp_loss(pred, gt, cfg, lambda);
    } else {
        require_output_format(grad_path, csp::RasterFormat::pfm, "the loss gradient");
        const csp::LossGradResult res = csp::csp_loss_grad(pred, gt, cfg, lambda);
        report = res.report;
        csp::store_real_raster(res.gradient, grad_path);
    }

    csp::ReportDoc doc;
    doc.add("t_prec", report.t_prec);
    doc.add("t_sens", report.t_sens);
    doc.add("csp_loss", report.csp_loss);
    doc.add("bce", report.bce);
    doc.add("total", report.total);
    doc.add("lambda", report.lambda);
    doc.add("degenerate", report.degenerate);
    emit_report(doc, report_path, /*to_stdout=*/true);
    return 0;
}

int run_tcsp(const fs::path& o_path, const fs::path& v_path, const fs::path& output, const CommonSkelFlags& flags,
             const csp::TcspParams& params, const fs::path& report_path) {
    params.validate();
    require_output_format(output, csp::RasterFormat::pfm, "the refined segmentation");
    if (required_format(o_path) != csp::RasterFormat::pfm || required_format(v_path) != csp::RasterFormat::pfm) {
        throw std::invalid_argument("tcsp consumes PFM inputs: scores and topology feature");
    }
    const csp::ScoreField o = csp::load_score_field(o_path);
    const csp::ScalarRaster v = csp::scalar_from_pfm(csp::load_pfm(v_path));
    check_same_shape(o.shape(), v.shape(), "scores", "topology feature");

    const csp::SkelConfig cfg = flags.config(o.shape(), csp::SkelMode::soft);
    const csp::ScalarRaster u = csp::closed_form_solve(o, v, params, cfg);
    csp::store_scalar_raster(u, output, csp::RasterFormat::pfm);

    csp::ReportDoc doc;
    doc.add("epsilon", params.epsilon);
    doc.add("eta", params.eta);
    doc.add("radius", params.radius);
    doc.add("iterations", cfg.iterations);
    doc.add("protect_endpoints", cfg.protect_endpoints);
    emit_report(doc, report_path, /*to_stdout=*/false);
    return 0;
}

void add_metrics_rows(csp::ReportDoc& doc, double dice, double iou, double recall, double cl, double b0, double b1,
                      double chi) {
    doc.add("dice", dice);
    doc.add("iou", iou);
    doc.add("recall", recall);
    doc.add("cl_dice", cl);
    doc.add("beta0_error", b0);
    doc.add("beta1_error", b1);
    doc.add("euler_error", chi);
}

int run_metrics(const fs::path& pred_path, const fs::path& gt_path, const CommonSkelFlags& flags,
                const fs::path& report_path) {
    const bool pred_dir = fs::is_directory(pred_path);
    const bool gt_dir = fs::is_directory(gt_path);
    if (pred_dir != gt_dir) throw std::invalid_argument("metrics needs two files or two directories");

    csp::ReportDoc doc;
    if (!pred_dir) {
        const csp::BinaryRaster pred = csp::load_binary_raster(pred_path);
        const csp::BinaryRaster gt = csp::load_binary_raster(gt_path);
        check_same_shape(pred.shape(), gt.shape(), "prediction", "ground truth");
        const csp::MetricReport r = csp::compute_metrics(pred, gt, flags.config(pred.shape(), csp::SkelMode::hard));
        add_metrics_rows(doc, r.dice, r.iou, r.recall, r.cl_dice, r.beta0_error, r.beta1_error, r.euler_error);
    } else {
        std::vector<fs::path> names;
        for (const auto& entry : fs::directory_iterator(pred_path)) {
            if (entry.is_regular_file() && csp::format_from_path(entry.path()) == csp::RasterFormat::pgm) {
                names.push_back(entry.path().filename());
            }
        }
        std::sort(names.begin(), names.end());
        if (names.empty()) throw std::invalid_argument("no .pgm files in '" + pred_path.string() + "'");

        double dice = 0, iou = 0, recall = 0, cl = 0, b0 = 0, b1 = 0, chi = 0;
        for (const fs::path& name : names) {
            const fs::path gt_file = gt_path / name;
            if (!fs::exists(gt_file)) {
                throw std::invalid_argument("missing ground truth for '" + name.string() + "'");
            }
            const csp::BinaryRaster pred = csp::load_binary_raster(pred_path / name);
            const csp::BinaryRaster gt = csp::load_binary_raster(gt_file);
            check_same_shape(pred.shape(), gt.shape(), name.string(), "its ground truth");
            const csp::MetricReport r = csp::compute_metrics(pred, gt, flags.config(pred.shape(), csp::SkelMode::hard));
            dice += r.dice;
            iou += r.iou;
            recall += r.recall;
            cl += r.cl_dice;
            b0 += r.beta0_error;
            b1 += r.beta1_error;
            chi += r.euler_error;
        }
        const double n = static_cast<double>(names.size());
        add_metrics_rows(doc, dice / n, iou / n, recall / n, cl / n, b0 / n, b1 / n, chi / n);
        doc.add("n_images", static_cast<int>(names.size()));
    }
    emit_report(doc, report_path, /*to_stdout=*/true);
    return 0;
}

int run_verify(const csp::CspParams& params, bool unmasked) {
    params.validate();
    const std::vector<csp::RingSuiteResult> suites = csp::run_ring_suites(params, !unmasked);
    bool all_passed = true;
    for (const auto& suite : suites) {
        std::cout << (suite.passed() ? "PASS  " : "FAIL  ") << suite.name << " (" << suite.cases << " cases)\n";
        if (!suite.passed()) {
            all_passed = false;
            for (std::uint8_t pattern : suite.failures) {
                std::cout << "      ring x1..x8 = " << csp::pattern_bits(pattern) << "\n";
            }
        }
    }
    return all_passed ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Raster topology toolkit: simple-point detection, topology-preserving skeletons,\n"
                 "skeleton-overlap losses and closed-form segmentation refinement."};
    app.require_subcommand(1);

    // simple-points ----------------------------------------------------------
    auto* simple = app.add_subcommand("simple-points",
                                      "Mark simple points of a binary raster, or evaluate the smooth detector map "
                                      "of a continuous raster");
    fs::path sp_input, sp_output;
    Kind sp_kind = Kind::automatic;
    CommonSkelFlags sp_flags;
    simple->add_option("input", sp_input, "Input raster (.pgm or .pfm)")->required();
    simple->add_option("output", sp_output, "Output mask (.pgm) or detector map (.pfm)")->required();
    simple->add_option("--kind", sp_kind, "Input interpretation")->transform(CLI::CheckedTransformer(kKindNames));
    sp_flags.attach(*simple, /*with_iters=*/false);

    // skeletonize ------------------------------------------------------------
    auto* skel = app.add_subcommand("skeletonize", "Extract a topology-preserving skeleton");
    fs::path sk_input, sk_output, sk_report;
    Kind sk_kind = Kind::automatic;
    csp::SkelMode sk_mode = csp::SkelMode::soft;
    CommonSkelFlags sk_flags;
    skel->add_option("input", sk_input, "Input raster (.pgm or .pfm)")->required();
    skel->add_option("output", sk_output, "Output skeleton (.pgm for binary, .pfm for scalar)")->required();
    skel->add_option("--mode", sk_mode, "Detector gating for scalar inputs")
        ->transform(CLI::CheckedTransformer(kModeNames));
    skel->add_option("--kind", sk_kind, "Input interpretation")->transform(CLI::CheckedTransformer(kKindNames));
    skel->add_option("--report", sk_report, "Write a key-value run summary to this file");
    sk_flags.attach(*skel);

    // loss ---------------------------------------------------------------
    auto* loss = app.add_subcommand("loss", "Skeleton-overlap loss of a prediction against a binary ground truth");
    fs::path lo_pred, lo_gt, lo_grad, lo_report;
    double lo_lambda = csp::kDefaultLambda;
    csp::SkelMode lo_mode = csp::SkelMode::soft;
    CommonSkelFlags lo_flags;
    loss->add_option("prediction", lo_pred, "Predicted map (.pgm or .pfm)")->required();
    loss->add_option("--mode", lo_mode, "Skeleton gating (gradients need soft)")
        ->transform(CLI::CheckedTransformer(kModeNames));
    loss->add_option("ground-truth", lo_gt, "Binary ground truth (.pgm)")->required();
    loss->add_option("--lambda", lo_lambda, "Weight of the skeleton-overlap term")->capture_default_str();
    loss->add_option("--grad", lo_grad, "Also write the loss gradient to this PFM file");
    loss->add_option("--report", lo_report, "Write the report to this file as well");
    lo_flags.attach(*loss);

    // tcsp ---------------------------------------------------------------
    auto* tcsp = app.add_subcommand("tcsp", "Closed-form topological refinement of segmentation scores");
    fs::path tc_scores, tc_feature, tc_output, tc_report;
    csp::TcspParams tc_params;
    CommonSkelFlags tc_flags;
    tc_flags.protect_endpoints = false;  // keep only topologically non-removable points by default
    tcsp->add_option("scores", tc_scores, "Segmentation scores o (.pfm, unbounded)")->required();
    tcsp->add_option("feature", tc_feature, "Topology feature v (.pfm in [0,1])")->required();
    tcsp->add_option("output", tc_output, "Refined segmentation (.pfm)")->required();
    tcsp->add_option("--epsilon", tc_params.epsilon, "Entropy weight")->capture_default_str();
    tcsp->add_option("--eta", tc_params.eta, "Topology weight")->capture_default_str();
    tcsp->add_option("--radius", tc_params.radius, "Dilation radius of the restoration term")->capture_default_str();
    tcsp->add_option("--report", tc_report, "Write a key-value run summary to this file");
    tc_flags.attach(*tcsp);

    // metrics --------------------------------------------------------------
    auto* metrics = app.add_subcommand("metrics", "Overlap and topology metrics (two files or two directories)");
    fs::path me_pred, me_gt, me_report;
    CommonSkelFlags me_flags;
    metrics->add_option("prediction", me_pred, "Binary prediction (.pgm) or directory")->required();
    metrics->add_option("ground-truth", me_gt, "Binary ground truth (.pgm) or directory")->required();
    metrics->add_option("--report", me_report, "Write the report to this file as well");
    me_flags.attach(*metrics);

    // verify ---------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "Run the exhaustive 256-ring verification suites");
    bool ve_unmasked = false;
    CommonSkelFlags ve_flags;
    ve_flags.attach(*verify, /*with_iters=*/false);
    verify->add_flag("--unmasked", ve_unmasked, "Skip the corner mask (negative control)")->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(simple)) return run_simple_points(sp_input, sp_output, sp_flags.params, sp_kind);
        if (app.got_subcommand(skel)) return run_skeletonize(sk_input, sk_output, sk_flags, sk_mode, sk_kind, sk_report);
        if (app.got_subcommand(loss)) {
            return run_loss(lo_pred, lo_gt, lo_flags, lo_mode, lo_lambda, lo_grad, lo_report);
        }
        if (app.got_subcommand(tcsp)) return run_tcsp(tc_scores, tc_feature, tc_output, tc_flags, tc_params, tc_report);
        if (app.got_subcommand(metrics)) return run_metrics(me_pred, me_gt, me_flags, me_report);
        if (app.got_subcommand(verify)) return run_verify(ve_flags.params, ve_unmasked);
    } catch (const csp::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
