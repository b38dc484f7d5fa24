#pragma once

#include <Eigen/Core>

#include <cmath>
#include <numbers>
#include <vector>

#include "ogseg/error.hpp"

namespace ogseg {

/// Frequency pair of a 2D DCT atom: u is the vertical (row) frequency, v the horizontal one.
struct FreqPair {
    int u = 0;
    int v = 0;
    friend bool operator==(const FreqPair&, const FreqPair&) = default;
};

/// The n*n x k matrix whose columns are vectorized DCT atoms, low frequencies first.
struct BasisMatrix {
    int n = 0;
    int k = 0;
    Eigen::MatrixXd columns;
    std::vector<FreqPair> freq_pairs;
};

/// First k pairs of the JPEG zig-zag scan over an n x n frequency plane.
inline std::vector<FreqPair> zigzag_order(int n, int k) {
    if (n < 1 || k < 1 || static_cast<long>(k) > static_cast<long>(n) * n)
        throw Error(ErrorCode::invalid_argument, "zig-zag count must lie in [1, n*n]");
    std::vector<FreqPair> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int d = 0; d <= 2 * (n - 1) && static_cast<int>(out.size()) < k; ++d) {
        const int lo = std::max(0, d - (n - 1));
        const int hi = std::min(d, n - 1);
        // Odd diagonals run down-left (row increasing), even ones up-right.
        if (d % 2 == 1) {
            for (int u = lo; u <= hi && static_cast<int>(out.size()) < k; ++u) out.push_back({u, d - u});
        } else {
            for (int u = hi; u >= lo && static_cast<int>(out.size()) < k; --u) out.push_back({u, d - u});
        }
    }
    return out;
}

/// Orthonormal DCT-II atom, row-major: entry (row, col) = c(u) c(v) cos(pi u (2 row + 1) / 2n) cos(pi v (2 col + 1) / 2n).
inline Eigen::VectorXd dct_atom(int u, int v, int n) {
    if (n < 1 || u < 0 || v < 0 || u >= n || v >= n) throw Error(ErrorCode::invalid_argument, "DCT frequency out of range");
    const double pi = std::numbers::pi;
    const auto scale = [n](int f) { return f == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n); };
    Eigen::VectorXd rows(n), cols(n);
    for (int i = 0; i < n; ++i) {
        rows[i] = scale(u) * std::cos(pi * u * (2 * i + 1) / (2.0 * n));
        cols[i] = scale(v) * std::cos(pi * v * (2 * i + 1) / (2.0 * n));
    }
    Eigen::VectorXd atom(static_cast<Eigen::Index>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) atom[static_cast<Eigen::Index>(r) * n + c] = rows[r] * cols[c];
    return atom;
}

inline BasisMatrix build_basis(int n, int k) {
    BasisMatrix basis;
    basis.n = n;
    basis.k = k;
    basis.freq_pairs = zigzag_order(n, k);
    basis.columns.resize(static_cast<Eigen::Index>(n) * n, k);
    for (int j = 0; j < k; ++j) basis.columns.col(j) = dct_atom(basis.freq_pairs[j].u, basis.freq_pairs[j].v, n);
    return basis;
}

}  // namespace ogseg
