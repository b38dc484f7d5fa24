#pragma once

// ADMM for the smooth + sparse block decomposition
//
//   minimize   |alpha|_1 + lambda1 |s|_1 + lambda2 (sum_rows |s_r|_2 + sum_cols |s_c|_2)
//   subject to f = P alpha + s
//
// split as alpha = beta, s = y (row groups), s = z (column groups). The flat
// n*n vector s is laid out row-major, so row group i is s[i*n, i*n + n) and
// column group j is every n-th entry starting at j.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <optional>
#include <vector>

#include "ogseg/dct_basis.hpp"
#include "ogseg/error.hpp"
#include "ogseg/operators.hpp"

namespace ogseg {

enum class AlphaUpdate {
    factorized,   // solve with a cached factorization of rho1 P^T P + rho2 I
    orthonormal,  // P^T P = I, so the system is diagonal: divide by rho1 + rho2
};

struct SolverParams {
    double lambda1 = 100.0;
    double lambda2 = 2.0;
    double rho1 = 1.0;
    double rho2 = 1.0;
    double rho3 = 1.0;
    double rho4 = 1.0;
    int max_iters = 50;
    bool record_residuals = false;
    // Stop once every residual is below early_stop_tol (absolute). Off by default.
    bool early_stop = false;
    double early_stop_tol = 1e-6;
    AlphaUpdate alpha_update = AlphaUpdate::factorized;

    void validate() const {
        for (double v : {lambda1, lambda2, rho1, rho2, rho3, rho4}) {
            if (!(v > 0.0) || !std::isfinite(v))
                throw Error(ErrorCode::invalid_argument, "weights and penalties must be positive and finite");
        }
        if (max_iters < 1) throw Error(ErrorCode::invalid_argument, "max_iters must be at least 1");
        if (early_stop && !(early_stop_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "early_stop_tol must be positive");
    }
};

struct SolverState {
    Eigen::VectorXd alpha, beta;       // k
    Eigen::VectorXd s, y, z;           // n*n
    Eigen::VectorXd w1, w2, v1, v2;    // duals of f = P alpha + s, alpha = beta, s = y, s = z
};

struct IterationResiduals {
    int iter = 0;
    double primal = 0.0;  // |f - P alpha - s|_2 / |f|_2 (absolute when f = 0)
    double beta = 0.0;    // |alpha - beta|_2
    double y = 0.0;       // |s - y|_2
    double z = 0.0;       // |s - z|_2
};

struct Decomposition {
    Eigen::VectorXd alpha;
    Eigen::VectorXd s;
    double primal_residual = 0.0;
    double split_alpha_beta = 0.0;
    double split_s_y = 0.0;
    double split_s_z = 0.0;
    int iters_run = 0;
    double objective = 0.0;
    std::vector<IterationResiduals> history;  // filled when record_residuals is set
};

namespace detail {

using RowMajorView = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorView = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline int block_side(Eigen::Index len) {
    const auto n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(len))));
    if (static_cast<Eigen::Index>(n) * n != len) throw Error(ErrorCode::dimension_mismatch, "vector length is not a square");
    return n;
}

}  // namespace detail

/// Sum of l2 norms over the n rows and n columns of s viewed as an n x n block.
inline double group_penalty(const Eigen::VectorXd& s) {
    const int n = detail::block_side(s.size());
    const detail::ConstRowMajorView m(s.data(), n, n);
    return m.rowwise().norm().sum() + m.colwise().norm().sum();
}

inline double objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& s, const SolverParams& params) {
    return alpha.lpNorm<1>() + params.lambda1 * s.lpNorm<1>() + params.lambda2 * group_penalty(s);
}

/// One basis and one parameter set; A = rho1 P^T P + rho2 I is factorized once here.
class AdmmSolver {
public:
    AdmmSolver(const BasisMatrix& basis, SolverParams params) : basis_(&basis), params_(params) {
        params_.validate();
        if (basis.columns.rows() != static_cast<Eigen::Index>(basis.n) * basis.n || basis.columns.cols() != basis.k)
            throw Error(ErrorCode::dimension_mismatch, "basis matrix shape disagrees with (n, k)");
        const Eigen::MatrixXd a = params_.rho1 * basis.columns.transpose() * basis.columns +
                                  params_.rho2 * Eigen::MatrixXd::Identity(basis.k, basis.k);
        factor_.compute(a);
        if (factor_.info() != Eigen::Success) throw Error(ErrorCode::rank_deficient, "alpha system is not positive definite");
    }

    const BasisMatrix& basis() const noexcept { return *basis_; }
    const SolverParams& params() const noexcept { return params_; }

    SolverState init_state(const Eigen::VectorXd& f) const {
        check_signal(f);
        const Eigen::Index len = f.size();
        const Eigen::Index k = basis_->k;
        SolverState st;
        st.alpha = st.beta = st.w2 = Eigen::VectorXd::Zero(k);
        st.s = st.y = st.z = st.w1 = st.v1 = st.v2 = Eigen::VectorXd::Zero(len);
        return st;
    }

    /// One full pass of the update sequence: alpha, beta, s, y, z, then the four dual ascents.
    void step(SolverState& st, const Eigen::VectorXd& f) const {
        check_signal(f);
        const Eigen::MatrixXd& p = basis_->columns;
        const int n = basis_->n;
        const double l1 = params_.lambda1, l2 = params_.lambda2;
        const double r1 = params_.rho1, r2 = params_.rho2, r3 = params_.rho3, r4 = params_.rho4;

        const Eigen::VectorXd rhs = p.transpose() * st.w1 - st.w2 + r2 * st.beta + r1 * (p.transpose() * (f - st.s));
        if (params_.alpha_update == AlphaUpdate::orthonormal) {
            st.alpha = rhs / (r1 + r2);
        } else {
            st.alpha = factor_.solve(rhs);
        }

        st.beta = soft(st.alpha + st.w2 / r2, 1.0 / r2);

        const Eigen::VectorXd smooth = p * st.alpha;
        const Eigen::VectorXd c = st.w1 - st.v1 - st.v2 + r1 * (f - smooth) + r3 * st.y + r4 * st.z;
        st.s = soft(c, l1) / (r1 + r3 + r4);

        st.y = st.s + st.v1 / r3;
        detail::RowMajorView ym(st.y.data(), n, n);
        for (int i = 0; i < n; ++i) block_soft_inplace(ym.row(i), l2 / r3);

        st.z = st.s + st.v2 / r4;
        detail::RowMajorView zm(st.z.data(), n, n);
        for (int j = 0; j < n; ++j) block_soft_inplace(zm.col(j), l2 / r4);

        st.w1 += r1 * (f - smooth - st.s);
        st.w2 += r2 * (st.alpha - st.beta);
        st.v1 += r3 * (st.s - st.y);
        st.v2 += r4 * (st.s - st.z);
    }

    IterationResiduals residuals(const SolverState& st, const Eigen::VectorXd& f, int iter) const {
        IterationResiduals r;
        r.iter = iter;
        const double fn = f.norm();
        const double primal = (f - basis_->columns * st.alpha - st.s).norm();
        r.primal = fn > 0.0 ? primal / fn : primal;
        r.beta = (st.alpha - st.beta).norm();
        r.y = (st.s - st.y).norm();
        r.z = (st.s - st.z).norm();
        return r;
    }

    /// Runs max_iters steps from the zero state (fewer if early_stop fires).
    Decomposition solve(const Eigen::VectorXd& f) const {
        SolverState st = init_state(f);
        Decomposition out;
        const double fn = f.norm();
        for (int it = 1; it <= params_.max_iters; ++it) {
            step(st, f);
            if (!all_finite(st)) throw Error(ErrorCode::non_finite, "solver state diverged at iteration " + std::to_string(it));
            out.iters_run = it;
            if (!params_.record_residuals && !params_.early_stop) continue;
            const IterationResiduals r = residuals(st, f, it);
            if (params_.record_residuals) out.history.push_back(r);
            if (params_.early_stop) {
                const double tol = params_.early_stop_tol;
                const double primal_abs = fn > 0.0 ? r.primal * fn : r.primal;
                if (primal_abs < tol && r.beta < tol && r.y < tol && r.z < tol) break;
            }
        }
        const IterationResiduals last = residuals(st, f, out.iters_run);
        out.primal_residual = last.primal;
        out.split_alpha_beta = last.beta;
        out.split_s_y = last.y;
        out.split_s_z = last.z;
        out.objective = objective(st.alpha, st.s, params_);
        out.alpha = std::move(st.alpha);
        out.s = std::move(st.s);
        return out;
    }

private:
    void check_signal(const Eigen::VectorXd& f) const {
        if (f.size() != static_cast<Eigen::Index>(basis_->n) * basis_->n)
            throw Error(ErrorCode::dimension_mismatch, "signal length must equal n*n of the basis");
    }

    static bool all_finite(const SolverState& st) {
        return st.alpha.allFinite() && st.beta.allFinite() && st.s.allFinite() && st.y.allFinite() &&
               st.z.allFinite() && st.w1.allFinite() && st.w2.allFinite() && st.v1.allFinite() && st.v2.allFinite();
    }

    const BasisMatrix* basis_;
    SolverParams params_;
    Eigen::LDLT<Eigen::MatrixXd> factor_;
};

inline SolverState init_state(const Eigen::VectorXd& f, const BasisMatrix& basis) {
    return AdmmSolver(basis, SolverParams{}).init_state(f);
}

/// Single step with a throwaway solver; loops should hold an AdmmSolver instead.
inline SolverState admm_step(SolverState state, const Eigen::VectorXd& f, const BasisMatrix& basis,
                             const SolverParams& params) {
    AdmmSolver(basis, params).step(state, f);
    return state;
}

inline Decomposition solve(const Eigen::VectorXd& f, const BasisMatrix& basis, const SolverParams& params) {
    return AdmmSolver(basis, params).solve(f);
}

}  // namespace ogseg
