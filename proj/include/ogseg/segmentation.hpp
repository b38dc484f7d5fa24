#pragma once

// Whole-image pipeline: tile, decompose each block, threshold the sparse
// layer into a mask, and optionally rebuild a hole-filled background.

#include <Eigen/Core>
#include <Eigen/QR>

#include <cmath>
#include <vector>

#include "ogseg/admm.hpp"
#include "ogseg/dct_basis.hpp"
#include "ogseg/detail/parallel.hpp"
#include "ogseg/error.hpp"
#include "ogseg/image_io.hpp"

namespace ogseg {

struct SegmentationConfig {
    int block_size = 64;
    int k_bases = 10;
    SolverParams solver;
    double fg_threshold = 1.0;  // gray levels; |s| above this is foreground
    unsigned threads = 1;       // 0 = hardware concurrency

    void validate() const {
        if (block_size < 2) throw Error(ErrorCode::invalid_argument, "block size must be at least 2");
        if (k_bases < 1 || static_cast<long>(k_bases) > static_cast<long>(block_size) * block_size)
            throw Error(ErrorCode::invalid_argument, "k_bases must lie in [1, block_size^2]");
        if (!(fg_threshold >= 0.0)) throw Error(ErrorCode::invalid_argument, "fg_threshold must be nonnegative");
        solver.validate();
    }
};

struct BlockSegmentation {
    BinaryMask mask;
    Decomposition decomposition;
};

struct ImageSegmentation {
    BlockGrid grid;
    std::vector<BlockSegmentation> blocks;
    BinaryMask mask;
};

struct Layers {
    GrayImage background;
    GrayImage foreground;
    BinaryMask mask;
};

inline BinaryMask threshold_sparse(const Eigen::VectorXd& s, int n, double fg_threshold) {
    BinaryMask mask(n, n);
    for (Eigen::Index i = 0; i < s.size(); ++i) mask.data[static_cast<std::size_t>(i)] = std::abs(s[i]) > fg_threshold;
    return mask;
}

inline BlockSegmentation segment_block(const Eigen::VectorXd& f, const AdmmSolver& solver, double fg_threshold) {
    BlockSegmentation out;
    out.decomposition = solver.solve(f);
    out.mask = threshold_sparse(out.decomposition.s, solver.basis().n, fg_threshold);
    return out;
}

inline BlockSegmentation segment_block(const Eigen::VectorXd& f, const BasisMatrix& basis, const SegmentationConfig& cfg) {
    if (!(cfg.fg_threshold >= 0.0)) throw Error(ErrorCode::invalid_argument, "fg_threshold must be nonnegative");
    return segment_block(f, AdmmSolver(basis, cfg.solver), cfg.fg_threshold);
}

/// Per-block results are written to their own slots, so the output does not depend on scheduling.
inline ImageSegmentation segment_blocks(const GrayImage& img, const SegmentationConfig& cfg) {
    cfg.validate();
    const BasisMatrix basis = build_basis(cfg.block_size, cfg.k_bases);
    const AdmmSolver solver(basis, cfg.solver);
    ImageSegmentation out;
    out.grid = tile(img, cfg.block_size);
    out.blocks.resize(out.grid.blocks.size());
    detail::parallel_for(out.blocks.size(), cfg.threads, [&](std::size_t i) {
        out.blocks[i] = segment_block(out.grid.blocks[i].pixels, solver, cfg.fg_threshold);
    });
    std::vector<BinaryMask> masks;
    masks.reserve(out.blocks.size());
    for (const auto& b : out.blocks) masks.push_back(b.mask);
    out.mask = stitch(out.grid, masks);
    return out;
}

inline BinaryMask segment_image(const GrayImage& img, const SegmentationConfig& cfg) {
    return segment_blocks(img, cfg).mask;
}

/// Replaces foreground pixels with the least-squares smooth fit to the background pixels.
/// Background pixels pass through untouched.
inline Eigen::VectorXd fill_background(const Eigen::VectorXd& f, const BinaryMask& mask, const BasisMatrix& basis) {
    const Eigen::Index len = static_cast<Eigen::Index>(basis.n) * basis.n;
    if (f.size() != len || mask.width != basis.n || mask.height != basis.n)
        throw Error(ErrorCode::dimension_mismatch, "signal and mask must match the basis block size");
    const std::size_t holes = count_set(mask);
    if (holes == 0) return f;
    const auto samples = static_cast<Eigen::Index>(mask.size() - holes);
    if (samples < basis.k) throw Error(ErrorCode::rank_deficient, "fewer background pixels than basis functions");

    Eigen::MatrixXd design(samples, basis.k);
    Eigen::VectorXd target(samples);
    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < len; ++i) {
        if (mask.data[static_cast<std::size_t>(i)]) continue;
        design.row(row) = basis.columns.row(i);
        target[row] = f[i];
        ++row;
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < basis.k) throw Error(ErrorCode::rank_deficient, "background pixels do not determine the smooth model");
    const Eigen::VectorXd coeffs = qr.solve(target);

    Eigen::VectorXd out = f;
    for (Eigen::Index i = 0; i < len; ++i) {
        if (mask.data[static_cast<std::size_t>(i)]) out[i] = basis.columns.row(i).dot(coeffs);
    }
    return out;
}

/// Background with holes filled block by block; foreground is img under the mask and 0 elsewhere.
inline Layers build_layers(const GrayImage& img, const ImageSegmentation& seg, const SegmentationConfig& cfg) {
    const BasisMatrix basis = build_basis(cfg.block_size, cfg.k_bases);
    std::vector<GrayImage> filled(seg.blocks.size());
    detail::parallel_for(filled.size(), cfg.threads, [&](std::size_t i) {
        filled[i] = block_to_image(fill_background(seg.grid.blocks[i].pixels, seg.blocks[i].mask, basis), cfg.block_size);
    });
    Layers out;
    out.background = stitch(seg.grid, filled);
    out.mask = seg.mask;
    out.foreground = GrayImage(img.width, img.height, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (out.mask.data[i]) out.foreground.data[i] = img.data[i];
    }
    return out;
}

inline Layers reconstruct_layers(const GrayImage& img, const SegmentationConfig& cfg) {
    return build_layers(img, segment_blocks(img, cfg), cfg);
}

}  // namespace ogseg
