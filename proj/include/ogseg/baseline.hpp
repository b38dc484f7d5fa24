#pragma once

// Single-level two-cluster k-means segmenter, a simplified DjVu-style
// baseline. The minority cluster is reported as foreground.

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <vector>

#include "ogseg/detail/parallel.hpp"
#include "ogseg/image_io.hpp"
#include "ogseg/segmentation.hpp"

namespace ogseg {

/// Lloyd's algorithm on scalar intensities with centers seeded at min and max.
/// `seed` is part of the interface; the min/max start makes the result independent of it.
inline BinaryMask kmeans2_block(const Eigen::VectorXd& f, [[maybe_unused]] std::uint64_t seed = 0) {
    const int n = detail::block_side(f.size());
    BinaryMask mask(n, n);
    if (f.size() == 0) return mask;
    double lo = f.minCoeff();
    double hi = f.maxCoeff();
    if (lo == hi) return mask;

    std::vector<bool> high(static_cast<std::size_t>(f.size()), false);  // assignment to the max-seeded cluster
    constexpr int max_iters = 100;
    for (int it = 0; it < max_iters; ++it) {
        bool changed = it == 0;
        double sum_lo = 0.0, sum_hi = 0.0;
        long cnt_lo = 0, cnt_hi = 0;
        for (Eigen::Index i = 0; i < f.size(); ++i) {
            // Equidistant samples stay with the low cluster.
            const bool h = std::abs(f[i] - hi) < std::abs(f[i] - lo);
            if (h != high[static_cast<std::size_t>(i)]) changed = true;
            high[static_cast<std::size_t>(i)] = h;
            if (h) {
                sum_hi += f[i];
                ++cnt_hi;
            } else {
                sum_lo += f[i];
                ++cnt_lo;
            }
        }
        if (!changed) break;
        if (cnt_lo > 0) lo = sum_lo / static_cast<double>(cnt_lo);
        if (cnt_hi > 0) hi = sum_hi / static_cast<double>(cnt_hi);
    }

    long cnt_hi = 0;
    for (bool h : high) cnt_hi += h ? 1 : 0;
    const long cnt_lo = static_cast<long>(high.size()) - cnt_hi;
    // Minority cluster is foreground; on a tie the brighter cluster wins.
    const bool fg_is_high = cnt_hi <= cnt_lo;
    for (std::size_t i = 0; i < high.size(); ++i) mask.data[i] = high[i] == fg_is_high;
    return mask;
}

inline BinaryMask kmeans2_image(const GrayImage& img, int block_size, unsigned threads = 1) {
    const BlockGrid grid = tile(img, block_size);
    std::vector<BinaryMask> masks(grid.blocks.size());
    detail::parallel_for(masks.size(), threads, [&](std::size_t i) { masks[i] = kmeans2_block(grid.blocks[i].pixels); });
    return stitch(grid, masks);
}

}  // namespace ogseg
