#pragma once

// Command-line front end: segment, evaluate, synth.
// Exit status: 0 success, 1 usage error, 2 runtime error.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

#include "ogseg/ogseg.hpp"

namespace ogseg::cli {

enum ExitStatus : int { exit_ok = 0, exit_usage = 1, exit_runtime = 2 };

namespace detail {

struct SegmentFlags {
    SegmentationConfig cfg;
    std::vector<double> rho{1.0, 1.0, 1.0, 1.0};
    bool early_stop = false;

    void attach(CLI::App& cmd) {
        cmd.add_option("--lambda1", cfg.solver.lambda1, "l1 weight on the sparse layer")->capture_default_str();
        cmd.add_option("--lambda2", cfg.solver.lambda2, "row/column group weight")->capture_default_str();
        cmd.add_option("--rho", rho, "penalties rho1,rho2,rho3,rho4")->delimiter(',')->expected(4);
        cmd.add_option("--iters", cfg.solver.max_iters, "ADMM iterations")->capture_default_str();
        cmd.add_option("--block", cfg.block_size, "block side N")->capture_default_str();
        cmd.add_option("--k", cfg.k_bases, "number of DCT basis functions")->capture_default_str();
        cmd.add_option("--fg-threshold", cfg.fg_threshold, "|s| above this is foreground")->capture_default_str();
        cmd.add_option("--threads", cfg.threads, "worker threads, 0 = all cores")->capture_default_str();
        cmd.add_flag("--early-stop", early_stop, "stop once all residuals fall below 1e-6");
    }

    SegmentationConfig resolve() {
        cfg.solver.rho1 = rho[0];
        cfg.solver.rho2 = rho[1];
        cfg.solver.rho3 = rho[2];
        cfg.solver.rho4 = rho[3];
        cfg.solver.early_stop = early_stop;
        cfg.validate();
        return cfg;
    }
};

inline int segment(const std::string& input, const std::string& mask_out, const std::string& fg_out,
                   const std::string& bg_out, bool verbose, SegmentationConfig cfg, std::ostream& out) {
    cfg.solver.record_residuals = verbose;
    const GrayImage img = load_gray(input);
    const ImageSegmentation seg = segment_blocks(img, cfg);

    if (verbose) {
        double worst = 0.0;
        for (std::size_t b = 0; b < seg.blocks.size(); ++b) {
            const auto& blk = seg.grid.blocks[b];
            out << "# block " << b << " origin " << blk.origin_x << ',' << blk.origin_y << '\n';
            out << "iter\tr_primal\tr_beta\tr_y\tr_z\n";
            for (const auto& r : seg.blocks[b].decomposition.history)
                out << r.iter << '\t' << r.primal << '\t' << r.beta << '\t' << r.y << '\t' << r.z << '\n';
            worst = std::max(worst, seg.blocks[b].decomposition.primal_residual);
        }
        out << "# blocks " << seg.blocks.size() << " max_primal_residual " << worst << '\n';
    }

    save_mask(seg.mask, mask_out);
    if (!fg_out.empty() || !bg_out.empty()) {
        const Layers layers = build_layers(img, seg, cfg);
        if (!fg_out.empty()) save_gray(layers.foreground, fg_out);
        if (!bg_out.empty()) save_gray(layers.background, bg_out);
    }
    return exit_ok;
}

inline int evaluate(const std::string& manifest_path, Method method, const std::string& report_path,
                    const SegmentationConfig& cfg, std::ostream& out, std::ostream& err) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const EvaluationReport report = evaluate_dataset(manifest, method, cfg);
    ogseg::detail::write_file_atomic(report_path, to_json(report).dump(2) + "\n");
    for (const auto& f : report.failures) err << "failed: " << f.path << ": " << f.message << '\n';
    out << std::fixed << std::setprecision(2) << "precision " << 100.0 * report.micro.precision << "% recall "
        << 100.0 * report.micro.recall << "% f1 " << 100.0 * report.micro.f1 << "%\n";
    return report.ok() ? exit_ok : exit_runtime;
}

}  // namespace detail

/// Entry point shared by the executable and the tests. `args` excludes the program name.
inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Foreground/background segmentation of screen-content images", "ogseg"};
    app.require_subcommand(1);

    // segment
    auto* seg_cmd = app.add_subcommand("segment", "segment an image into a foreground mask");
    std::string input, mask_out, fg_out, bg_out;
    bool verbose = false;
    detail::SegmentFlags seg_flags;
    seg_cmd->add_option("--input", input, "PGM or PPM image")->required();
    seg_cmd->add_option("--mask-out", mask_out, "output PBM mask")->required();
    seg_cmd->add_option("--fg-out", fg_out, "output PGM foreground layer");
    seg_cmd->add_option("--bg-out", bg_out, "output PGM hole-filled background layer");
    seg_cmd->add_flag("--verbose,-v", verbose, "print per-iteration residuals");
    seg_flags.attach(*seg_cmd);

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "score a segmenter against a manifest of ground-truth masks");
    std::string manifest, method_name = "proposed", report;
    detail::SegmentFlags eval_flags;
    eval_cmd->add_option("--manifest", manifest, "TSV manifest")->required();
    eval_cmd->add_option("--method", method_name, "proposed | kmeans2")
        ->check(CLI::IsMember({"proposed", "kmeans2"}))
        ->capture_default_str();
    eval_cmd->add_option("--report", report, "output JSON report")->required();
    eval_flags.attach(*eval_cmd);

    // synth
    auto* synth_cmd = app.add_subcommand("synth", "generate synthetic blocks with ground truth");
    std::string out_dir;
    int count = 0;
    std::uint64_t seed = 0;
    SynthSpec spec;
    synth_cmd->add_option("--out-dir", out_dir, "output directory")->required();
    synth_cmd->add_option("--count", count, "number of blocks")->required();
    synth_cmd->add_option("--seed", seed, "base RNG seed")->required();
    synth_cmd->add_option("--n", spec.n, "block side")->capture_default_str();
    synth_cmd->add_option("--k-true", spec.k_true, "active DCT atoms in the smooth layer")->capture_default_str();
    synth_cmd->add_option("--alpha-range", spec.alpha_range, "AC coefficient range")->capture_default_str();
    synth_cmd->add_option("--max-swing", spec.max_swing, "smooth layer stays within 128 +- this")->capture_default_str();
    synth_cmd->add_option("--strokes", spec.stroke_count, "strokes per block")->capture_default_str();
    synth_cmd->add_option("--amplitude", spec.stroke_amplitude, "stroke offset in gray levels")->capture_default_str();
    synth_cmd->add_option("--max-fg-fraction", spec.max_fg_fraction, "cap on foreground pixels")->capture_default_str();
    synth_cmd->add_flag("--diagonal", spec.diagonal_strokes, "draw diagonal strokes");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    SegmentationConfig cfg;
    try {
        if (*seg_cmd) cfg = seg_flags.resolve();
        if (*eval_cmd) cfg = eval_flags.resolve();
        if (*synth_cmd) {
            spec.validate();
            if (count < 0) throw Error(ErrorCode::invalid_argument, "--count must be nonnegative");
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (*seg_cmd) return detail::segment(input, mask_out, fg_out, bg_out, verbose, cfg, out);
        if (*eval_cmd) return detail::evaluate(manifest, *parse_method(method_name), report, cfg, out, err);
        const auto path = write_synthetic_dataset(out_dir, count, spec, seed);
        out << "wrote " << count << " blocks, manifest " << path.string() << '\n';
        return exit_ok;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_runtime;
    }
}

}  // namespace ogseg::cli
