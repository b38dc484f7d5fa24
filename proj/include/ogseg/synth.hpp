#pragma once

// Synthetic blocks with known ground truth: a smooth layer drawn from the
// first k_true zig-zag DCT atoms plus thin strokes offset by a fixed amplitude.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <random>
#include <sstream>
#include <string>

#include "ogseg/dct_basis.hpp"
#include "ogseg/error.hpp"
#include "ogseg/image_io.hpp"

namespace ogseg {

struct SynthSpec {
    int n = 64;
    int k_true = 6;
    double alpha_range = 500.0;     // AC coefficients drawn from [-alpha_range, alpha_range]
    double max_swing = 60.0;        // smooth layer kept within 128 +- max_swing
    int stroke_count = 5;
    double stroke_amplitude = 100.0;
    double max_fg_fraction = 0.1;
    bool diagonal_strokes = false;
    std::uint64_t seed = 0;

    void validate() const {
        if (n < 4) throw Error(ErrorCode::invalid_argument, "synthetic block side must be at least 4");
        if (k_true < 1 || static_cast<long>(k_true) > static_cast<long>(n) * n)
            throw Error(ErrorCode::invalid_argument, "k_true must lie in [1, n*n]");
        if (!(alpha_range >= 0.0) || !(max_swing >= 0.0) || max_swing > 127.0)
            throw Error(ErrorCode::invalid_argument, "alpha_range must be nonnegative and max_swing in [0, 127]");
        if (stroke_count < 0) throw Error(ErrorCode::invalid_argument, "stroke_count must be nonnegative");
        if (!(stroke_amplitude > 0.0) || stroke_amplitude > 255.0)
            throw Error(ErrorCode::invalid_argument, "stroke_amplitude must lie in (0, 255]");
        if (!(max_fg_fraction >= 0.0) || max_fg_fraction > 1.0)
            throw Error(ErrorCode::invalid_argument, "max_fg_fraction must lie in [0, 1]");
        if (stroke_count > 0 && per_stroke_budget() < 4)
            throw Error(ErrorCode::invalid_argument, "stroke budget exceeds max_fg_fraction");
    }

    /// Pixels each stroke may cover so that all strokes together respect max_fg_fraction.
    long per_stroke_budget() const {
        if (stroke_count == 0) return 0;
        const auto cap = static_cast<long>(std::floor(max_fg_fraction * n * n));
        return cap / stroke_count;
    }
};

struct SynthBlock {
    Eigen::VectorXd f;
    BinaryMask truth;
    Eigen::VectorXd smooth_truth;
    Eigen::VectorXd alpha_true;  // coefficients on the first k_true zig-zag atoms
};

inline SynthBlock gen_block(const SynthSpec& spec) {
    spec.validate();
    const int n = spec.n;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> coeff(-spec.alpha_range, spec.alpha_range);

    const BasisMatrix basis = build_basis(n, spec.k_true);
    SynthBlock out;
    out.alpha_true = Eigen::VectorXd::Zero(spec.k_true);
    for (int j = 1; j < spec.k_true; ++j) out.alpha_true[j] = coeff(rng);
    Eigen::VectorXd ac = basis.columns * out.alpha_true;
    const double peak = ac.cwiseAbs().maxCoeff();
    if (peak > spec.max_swing) {
        out.alpha_true *= spec.max_swing / peak;
        ac *= spec.max_swing / peak;
    }
    // The DC atom is 1/n everywhere, so a coefficient of 128 n gives a mean of 128.
    out.alpha_true[0] = 128.0 * n;
    out.smooth_truth = ac.array() + 128.0;
    out.f = out.smooth_truth;
    out.truth = BinaryMask(n, n);

    const long budget = spec.per_stroke_budget();
    const int longest = std::max(4, 2 * n / 3);
    std::uniform_int_distribution<int> coin(0, 1);
    for (int stroke = 0; stroke < spec.stroke_count; ++stroke) {
        int thickness = coin(rng) + 1;
        if (budget / thickness < 4) thickness = 1;
        const int max_len = static_cast<int>(std::min<long>(longest, budget / thickness));
        const int length = std::uniform_int_distribution<int>(4, max_len)(rng);
        const bool vertical = coin(rng) == 1;

        std::vector<std::pair<int, int>> pixels;  // (x, y)
        if (spec.diagonal_strokes) {
            const int x0 = std::uniform_int_distribution<int>(0, n - length - thickness + 1)(rng);
            const int y0 = std::uniform_int_distribution<int>(0, n - length)(rng);
            for (int t = 0; t < length; ++t) {
                for (int w = 0; w < thickness; ++w) {
                    const int x = vertical ? x0 + t + w : x0 + (length - 1 - t) + w;  // down-right or down-left
                    pixels.emplace_back(x, y0 + t);
                }
            }
        } else {
            const int along = std::uniform_int_distribution<int>(0, n - length)(rng);
            const int across = std::uniform_int_distribution<int>(0, n - thickness)(rng);
            for (int t = 0; t < length; ++t) {
                for (int w = 0; w < thickness; ++w) {
                    pixels.push_back(vertical ? std::pair{across + w, along + t} : std::pair{along + t, across + w});
                }
            }
        }

        double brightest = 0.0;
        for (auto [x, y] : pixels) brightest = std::max(brightest, out.smooth_truth[static_cast<Eigen::Index>(y) * n + x]);
        const double offset = brightest + spec.stroke_amplitude <= 255.0 ? spec.stroke_amplitude : -spec.stroke_amplitude;
        for (auto [x, y] : pixels) {
            const auto i = static_cast<Eigen::Index>(y) * n + x;
            out.truth.at(x, y) = true;
            out.f[i] = std::clamp(out.smooth_truth[i] + offset, 0.0, 255.0);
        }
    }
    return out;
}

/// Seed used for item `index` of a dataset generated from `base_seed`.
inline std::uint64_t item_seed(std::uint64_t base_seed, int index) {
    std::seed_seq seq{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32),
                      static_cast<std::uint32_t>(index)};
    std::uint32_t words[2];
    seq.generate(words, words + 2);
    return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

/// Writes `count` PGM/PBM pairs plus manifest.tsv (paths relative to the directory).
/// Returns the manifest path.
inline std::filesystem::path write_synthetic_dataset(const std::filesystem::path& dir, int count, SynthSpec spec,
                                                     std::uint64_t base_seed) {
    if (count < 0) throw Error(ErrorCode::invalid_argument, "count must be nonnegative");
    spec.validate();
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw Error(ErrorCode::io, "cannot create directory " + dir.string());

    std::ostringstream manifest;
    manifest << "# image\tmask\tlabel\n";
    for (int i = 0; i < count; ++i) {
        spec.seed = item_seed(base_seed, i);
        const SynthBlock block = gen_block(spec);
        std::ostringstream stem;
        stem << "synth_" << std::setw(4) << std::setfill('0') << i;
        save_gray(block_to_image(block.f, spec.n), dir / (stem.str() + ".pgm"));
        save_mask(block.truth, dir / (stem.str() + ".pbm"));
        manifest << stem.str() << ".pgm\t" << stem.str() << ".pbm\t" << stem.str() << '\n';
    }
    const auto path = dir / "manifest.tsv";
    detail::write_file_atomic(path, manifest.str());
    return path;
}

}  // namespace ogseg
