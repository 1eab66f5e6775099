#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "icsdet/model.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// Stacked measurement operators and null-space projection.
//
// Over a horizon T the measurements y(1..T) of a linear system
//   x(k+1) = A x(k) + B_u u(k) + B_a u_a(k) + w(k),  y(k) = C x(k) + v(k)
// stack into
//   Y = O x(0) + F_u U + F_a U_a + F_w W + V
// with O = [CA; CA^2; ...; CA^T] and block lower-triangular convolution maps
// whose (k, j) block is C A^{k-1-j} times the input matrix.
//
// A detector that cannot know x(0) (and, locally, the neighbor states driving
// the unknown-input channel) projects Y onto the left null space of the
// corresponding columns. The projected signal N F_a U_a and covariance
// N Cov(noise) N^T fully determine the detector's operating characteristics.
// ============================================================================

namespace icsdet {

/// Stacked operators of one detector's measurement equation.
struct StackedOperators {
    Index horizon = 0;
    Matrix observability;  // (r T) x n
    Matrix attack_map;     // (r T) x (m T)
    Matrix unknown_map;    // (r T) x (d T); d = 0 when every input is known
    Matrix noise_map;      // (r T) x (n T)
    Matrix Sigma_w;        // n x n per-step process noise covariance
    Matrix Sigma_v;        // r x r per-step measurement noise covariance

    /// Covariance of the stacked noise F_w W + V.
    Matrix noise_covariance() const {
        const Index T = horizon;
        const Index rT = noise_map.rows();
        const Index n = Sigma_w.rows();
        Matrix cov = Matrix::Zero(rT, rT);
        // noise_map * (I_T kron Sigma_w) * noise_map^T accumulated blockwise.
        for (Index t = 0; t < T; ++t) {
            const Matrix cols = noise_map.middleCols(t * n, n);
            cov.noalias() += cols * Sigma_w * cols.transpose();
        }
        const Index r = Sigma_v.rows();
        for (Index t = 0; t < T; ++t) {
            cov.block(t * r, t * r, r, r) += Sigma_v;
        }
        return cov;
    }
};

namespace detail {

/// Fill the block lower-triangular convolution map with (k, j) block
/// C A^{k-1-j} B for 0 <= j < k <= T (diagonal block C B).
inline Matrix convolution_map(const Matrix& A, const Matrix& B, const Matrix& C, Index T) {
    const Index r = C.rows();
    const Index m = B.cols();
    Matrix F = Matrix::Zero(r * T, m * T);
    // Power column: blocks C A^d B for d = 0..T-1, reused along diagonals.
    Matrix power = B;
    for (Index d = 0; d < T; ++d) {
        const Matrix block = C * power;
        for (Index k = d; k < T; ++k) {
            F.block(k * r, (k - d) * m, r, m) = block;
        }
        power = A * power;
    }
    return F;
}

inline Matrix observability_map(const Matrix& A, const Matrix& C, Index T) {
    const Index r = C.rows();
    const Index n = A.rows();
    Matrix O(r * T, n);
    Matrix power = A;
    for (Index k = 0; k < T; ++k) {
        O.middleRows(k * r, r).noalias() = C * power;
        power = A * power;
    }
    return O;
}

inline void check_horizon(Index T) {
    if (T < 1) throw ValidationError("stacking: horizon must be >= 1");
    if (T > 10'000'000) throw ValidationError("stacking: horizon is implausibly large");
}

}  // namespace detail

/// Stacked operators of the local detector at position k: the unknown-input
/// channel carries the neighbor states entering through declared couplings.
inline StackedOperators stack_local(const InterconnectedModel& model, int k, Index T) {
    detail::check_horizon(T);
    const Subsystem& s = model.subsystem(k);
    const Matrix B_u = model.interconnection_input(k);
    StackedOperators out;
    out.horizon = T;
    out.observability = detail::observability_map(s.A, s.C, T);
    out.attack_map = detail::convolution_map(s.A, s.B_attack, s.C, T);
    out.unknown_map = detail::convolution_map(s.A, B_u, s.C, T);
    out.noise_map =
        detail::convolution_map(s.A, Matrix::Identity(s.state_dim(), s.state_dim()), s.C, T);
    out.Sigma_w = s.Sigma_w;
    out.Sigma_v = s.Sigma_v;
    return out;
}

/// Stacked operators of the centralized detector: full dynamics, every input
/// known except the attack, so the unknown-input channel is empty.
inline StackedOperators stack_global(const InterconnectedModel& model, Index T) {
    detail::check_horizon(T);
    const Matrix A = model.global_A();
    const Matrix C = model.global_C();
    StackedOperators out;
    out.horizon = T;
    out.observability = detail::observability_map(A, C, T);
    out.attack_map = detail::convolution_map(A, model.global_B_attack(), C, T);
    out.unknown_map = Matrix(C.rows() * T, 0);
    out.noise_map =
        detail::convolution_map(A, Matrix::Identity(A.rows(), A.rows()), C, T);
    out.Sigma_w = model.global_Sigma_w();
    out.Sigma_v = model.global_Sigma_v();
    return out;
}

/// Orthonormal basis of the left null space of M, returned as rows: the
/// maximal N with N M = 0 and N N^T = I. Rank is decided against the SVD
/// tolerance max(rows, cols) * eps * sigma_max.
inline Matrix left_null_basis(const Matrix& M) {
    if (M.cols() == 0) return Matrix::Identity(M.rows(), M.rows());
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU);
    const double tol = static_cast<double>(std::max(M.rows(), M.cols())) *
                       std::numeric_limits<double>::epsilon() *
                       (svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0);
    Index rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
        if (svd.singularValues()(i) > tol) ++rank;
    }
    return svd.matrixU().rightCols(M.rows() - rank).transpose();
}

/// Everything the statistical layer needs about one projected detector.
struct ProcessedStats {
    Matrix basis;        // N, q x (r T)
    Matrix signal_map;   // N F_a, q x (m T)
    Matrix sigma;        // N Cov N^T, q x q, positive definite
    Matrix info;         // (N F_a)^T Sigma^{-1} (N F_a), (m T) x (m T)
    Eigen::LLT<Matrix> sigma_llt;  // factored once, reused for whitening
    Index residual_dim = 0;        // q, the chi-squared degrees of freedom

    /// Noncentrality produced by a stacked attack input: U^T info U.
    double noncentrality(const Vector& attack) const {
        if (attack.size() != info.rows()) {
            throw ValidationError("stacking: attack input has wrong length");
        }
        return attack.dot(info * attack);
    }

    /// Mean of the projected measurement under the attack: N F_a U.
    Vector signal_mean(const Vector& attack) const {
        if (attack.size() != signal_map.cols()) {
            throw ValidationError("stacking: attack input has wrong length");
        }
        return signal_map * attack;
    }

    /// Quadratic detection statistic of one projected measurement.
    double statistic(const Vector& projected) const {
        if (projected.size() != residual_dim) {
            throw ValidationError("stacking: projected measurement has wrong length");
        }
        return projected.dot(sigma_llt.solve(projected));
    }
};

/// Assemble the projected statistics for a given basis (rows spanning a
/// subspace that annihilates the unknown columns). The basis need not be
/// orthonormal; any row basis of the same space yields identical info,
/// residual_dim, and statistic values.
inline ProcessedStats processed_from_basis(const Matrix& basis, const StackedOperators& ops) {
    if (basis.cols() != ops.attack_map.rows()) {
        throw ValidationError("stacking: basis width does not match stacked measurement size");
    }
    ProcessedStats out;
    out.basis = basis;
    out.residual_dim = basis.rows();
    if (out.residual_dim == 0) {
        throw BlindDetectorError("stacking: projection leaves no residual dimensions");
    }
    out.signal_map.noalias() = basis * ops.attack_map;
    const Matrix cov = ops.noise_covariance();
    out.sigma.noalias() = basis * cov * basis.transpose();
    out.sigma = 0.5 * (out.sigma + out.sigma.transpose());
    out.sigma_llt.compute(out.sigma);
    if (out.sigma_llt.info() != Eigen::Success) {
        throw NumericalError("stacking: projected covariance is not positive definite");
    }
    out.info.noalias() = out.signal_map.transpose() * out.sigma_llt.solve(out.signal_map);
    out.info = 0.5 * (out.info + out.info.transpose());
    return out;
}

/// Local detector at position k: project out both the initial state and the
/// unknown interconnection inputs. Throws BlindDetectorError when nothing is
/// left to monitor (q = 0).
inline ProcessedStats process_local(const InterconnectedModel& model, int k, Index T) {
    const StackedOperators ops = stack_local(model, k, T);
    Matrix unknown(ops.observability.rows(),
                   ops.observability.cols() + ops.unknown_map.cols());
    unknown << ops.observability, ops.unknown_map;
    return processed_from_basis(left_null_basis(unknown), ops);
}

/// Centralized detector: only the initial state is unknown.
inline ProcessedStats process_global(const InterconnectedModel& model, Index T) {
    const StackedOperators ops = stack_global(model, T);
    return processed_from_basis(left_null_basis(ops.observability), ops);
}

/// 0/1 selector with Y_local = selector * Y_global: picks subsystem k's rows
/// out of the time-major global measurement stack.
inline Matrix output_selector(const InterconnectedModel& model, int k, Index T) {
    detail::check_horizon(T);
    const Index r = model.output_dim();
    const Index rk = model.subsystem(k).output_dim();
    const Index off = model.output_offset(k);
    Matrix S = Matrix::Zero(rk * T, r * T);
    for (Index t = 0; t < T; ++t) {
        for (Index l = 0; l < rk; ++l) {
            S(t * rk + l, t * r + off + l) = 1.0;
        }
    }
    return S;
}

/// 0/1 selector with U_a_local = selector * U_a_global for the time-major
/// stacked attack input.
inline Matrix attack_selector(const InterconnectedModel& model, int k, Index T) {
    detail::check_horizon(T);
    const Index m = model.attack_dim();
    const Index mk = model.subsystem(k).attack_dim();
    const Index off = model.attack_offset(k);
    Matrix S = Matrix::Zero(mk * T, m * T);
    for (Index t = 0; t < T; ++t) {
        for (Index l = 0; l < mk; ++l) {
            S(t * mk + l, t * m + off + l) = 1.0;
        }
    }
    return S;
}

/// Information matrix of the bank of local detectors against the global
/// stacked attack input: sum_i P_i^T info_i P_i with P_i the attack selector.
/// Blind local detectors contribute nothing.
inline Matrix decentralized_info(const InterconnectedModel& model, Index T,
                                 std::vector<int>* blind = nullptr) {
    const Index mT = model.attack_dim() * T;
    Matrix info = Matrix::Zero(mT, mT);
    for (int k = 0; k < model.count(); ++k) {
        try {
            const ProcessedStats stats = process_local(model, k, T);
            const Matrix P = attack_selector(model, k, T);
            info.noalias() += P.transpose() * stats.info * P;
        } catch (const BlindDetectorError&) {
            if (blind) blind->push_back(k);
        }
    }
    return info;
}

}  // namespace icsdet
