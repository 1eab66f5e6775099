#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "icsdet/stacking.hpp"
#include "icsdet/types.hpp"

// ============================================================================
// Optimal stealthy attack synthesis.
//
// Over a horizon T the attacked state trajectory stacks into
//   X = SA x(0) + SB U,   SA = [A; A^2; ...; A^T],
// with SB block lower-triangular, block (k, j) = A^{k-1-j} B_a. The attacker
// maximizes the state energy J(U) = ||X||^2 subject to a stealth budget
// U^T M U <= budget, where M is the detector information matrix. J is convex,
// so the maximum sits on the constraint boundary and the KKT system
//   (G - gamma M) U + b = 0,  U^T M U = budget,  gamma I >= G on range(M)
// (G = SB^T SB, b = SB^T SA x(0)) has the multiplier on the branch at or
// above the largest generalized eigenvalue of (G, M). After whitening by M
// on its range the multiplier solves a scalar secular equation; when the
// top-eigenvector coefficient of b vanishes the classic hard case applies
// and the leftover budget rides the top eigenvector itself.
// ============================================================================

namespace icsdet {

/// Stacked state-transition map [A; A^2; ...; A^T].
inline Matrix state_stack_map(const Matrix& A, Index T) {
    detail::check_horizon(T);
    return detail::observability_map(A, Matrix::Identity(A.rows(), A.cols()), T);
}

/// Stacked input-to-state map: block (k, j) = A^{k-1-j} B for j < k, B on
/// the diagonal.
inline Matrix input_stack_map(const Matrix& A, const Matrix& B, Index T) {
    detail::check_horizon(T);
    return detail::convolution_map(A, B, Matrix::Identity(A.rows(), A.rows()), T);
}

/// Largest generalized Rayleigh quotient v^T G v / v^T M v over range(M),
/// with the maximizing direction (unit M-norm). Used both by the solver and
/// as the closed-form optimum J* = budget * rho_max when x(0) = 0.
struct RayleighMax {
    double value = 0;
    Vector direction;
};

namespace detail {

/// Eigendecomposition of a PSD matrix split at the relative rank tolerance.
struct PsdSplit {
    Matrix range_basis;   // columns spanning range(M)
    Vector range_eigs;    // matching eigenvalues, all > tol
    Matrix null_basis;    // columns spanning null(M)
};

inline PsdSplit split_psd(const Matrix& M) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (M + M.transpose()));
    if (eig.info() != Eigen::Success) {
        throw NumericalError("attack: eigendecomposition of the budget matrix failed");
    }
    const Vector& vals = eig.eigenvalues();  // ascending
    const double max_eig = std::max(0.0, vals.maxCoeff());
    const double tol = static_cast<double>(M.rows()) *
                       std::numeric_limits<double>::epsilon() * std::max(max_eig, 1e-300);
    if (vals.minCoeff() < -tol * 1e3) {
        throw ValidationError("attack: budget matrix must be positive semidefinite");
    }
    PsdSplit out;
    Index rank = 0;
    for (Index i = 0; i < vals.size(); ++i) {
        if (vals(i) > tol) ++rank;
    }
    out.range_basis = eig.eigenvectors().rightCols(rank);
    out.range_eigs = vals.tail(rank);
    out.null_basis = eig.eigenvectors().leftCols(vals.size() - rank);
    return out;
}

/// Flip the sign so the first component of significant magnitude is
/// positive; makes direction outputs deterministic where the optimum is
/// sign-symmetric.
inline void fix_sign(Vector& v) {
    const double scale = v.cwiseAbs().maxCoeff();
    if (scale == 0.0) return;
    for (Index i = 0; i < v.size(); ++i) {
        if (std::abs(v(i)) > 1e-12 * scale) {
            if (v(i) < 0.0) v = -v;
            return;
        }
    }
}

}  // namespace detail

/// Largest eigenvalue and eigenvector of the pencil (G, M) restricted to
/// range(M). Throws InfeasibleError when G acts on null(M), i.e. the
/// Rayleigh quotient is unbounded.
inline RayleighMax generalized_rayleigh_max(const Matrix& G, const Matrix& M) {
    if (G.rows() != G.cols() || M.rows() != M.cols() || G.rows() != M.rows()) {
        throw ValidationError("attack: pencil matrices must be square and equally sized");
    }
    const auto split = detail::split_psd(M);
    if (split.range_eigs.size() == 0) {
        throw InfeasibleError("attack: budget matrix is zero; the budget constrains nothing");
    }
    const double g_scale = std::max(G.cwiseAbs().maxCoeff(), 1e-300);
    for (Index i = 0; i < split.null_basis.cols(); ++i) {
        const Vector v = split.null_basis.col(i);
        if (v.dot(G * v) > 1e-9 * g_scale) {
            throw InfeasibleError(
                "attack: cost grows along a budget-free direction; the optimum is unbounded");
        }
    }
    const Vector inv_sqrt = split.range_eigs.cwiseSqrt().cwiseInverse();
    const Matrix W = split.range_basis * inv_sqrt.asDiagonal();  // M-whitening map
    const Matrix G_hat = W.transpose() * G * W;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (G_hat + G_hat.transpose()));
    if (eig.info() != Eigen::Success) {
        throw NumericalError("attack: eigendecomposition of the whitened pencil failed");
    }
    RayleighMax out;
    out.value = eig.eigenvalues().maxCoeff();
    out.direction = W * eig.eigenvectors().col(eig.eigenvalues().size() - 1);
    detail::fix_sign(out.direction);
    return out;
}

/// Scale a stacked attack direction so that its noncentrality under `info`
/// equals `theta` exactly: U = sqrt(theta / (d^T info d)) * d. An empty
/// direction defaults to all ones. Throws InfeasibleError when the direction
/// is invisible to the detector (d^T info d = 0).
inline Vector attack_with_noncentrality(const Matrix& info, double theta,
                                        Vector direction = Vector()) {
    if (info.rows() != info.cols()) {
        throw ValidationError("attack: info matrix must be square");
    }
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw ValidationError("attack: noncentrality target must be finite and >= 0");
    }
    if (direction.size() == 0) direction = Vector::Ones(info.rows());
    if (direction.size() != info.rows()) {
        throw ValidationError("attack: direction has wrong length");
    }
    const double quad = direction.dot(info * direction);
    const double scale = info.cwiseAbs().maxCoeff() * direction.squaredNorm();
    if (quad <= 1e-14 * std::max(scale, 1e-300)) {
        if (theta == 0.0) return Vector::Zero(info.rows());
        throw InfeasibleError(
            "attack: direction is invisible to the detector; no scaling reaches the target");
    }
    return std::sqrt(theta / quad) * direction;
}

/// Result of one synthesis run.
struct AttackSynthesis {
    Vector input;            // optimal stacked attack U*
    double cost = 0;         // J(U*) = ||SA x0 + SB U*||^2
    double multiplier = 0;   // KKT multiplier gamma
    double budget_used = 0;  // U*^T M U*
    double rayleigh_max = 0; // rho_max(G, M) on range(M)
    bool hard_case = false;
};

/// Maximize ||SA x0 + SB U||^2 subject to U^T info U <= budget.
///
/// `info` must be symmetric PSD of size (m T). The problem is declared
/// unbounded (InfeasibleError) when the cost grows along null(info).
inline AttackSynthesis synthesize_attack(const Matrix& A, const Matrix& B_attack, Index T,
                                         const Vector& x0, const Matrix& info,
                                         double budget) {
    const Index n = A.rows();
    if (A.cols() != n || B_attack.rows() != n) {
        throw ValidationError("attack: A must be square and B_attack must match its rows");
    }
    if (x0.size() != n) throw ValidationError("attack: x0 has wrong length");
    const Index mT = B_attack.cols() * T;
    if (info.rows() != mT || info.cols() != mT) {
        throw ValidationError("attack: info matrix must be (m T) x (m T)");
    }
    if (!(budget >= 0.0) || !std::isfinite(budget)) {
        throw ValidationError("attack: budget must be finite and >= 0");
    }

    const Matrix SA = state_stack_map(A, T);
    const Matrix SB = input_stack_map(A, B_attack, T);
    const Matrix G = SB.transpose() * SB;
    const Vector b = SB.transpose() * (SA * x0);

    AttackSynthesis out;
    if (budget == 0.0) {
        // Degenerate budget: the only feasible influence is none at all. No
        // finite multiplier exists, so it is reported as infinite.
        out.input = Vector::Zero(mT);
        out.cost = (SA * x0).squaredNorm();
        out.rayleigh_max = generalized_rayleigh_max(G, info).value;
        out.multiplier = std::numeric_limits<double>::infinity();
        return out;
    }

    // Whiten by M on its range; directions in null(M) are cost-free (the
    // unboundedness check inside generalized_rayleigh_max rejects the rest)
    // and b is orthogonal to them, so they are fixed to zero.
    const auto rayleigh = generalized_rayleigh_max(G, info);
    const auto split = detail::split_psd(info);
    const Vector inv_sqrt = split.range_eigs.cwiseSqrt().cwiseInverse();
    const Matrix W = split.range_basis * inv_sqrt.asDiagonal();
    const Matrix G_hat = W.transpose() * G * W;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (G_hat + G_hat.transpose()));
    if (eig.info() != Eigen::Success) {
        throw NumericalError("attack: eigendecomposition of the whitened pencil failed");
    }
    const Vector s = eig.eigenvalues();  // ascending
    const Matrix V = eig.eigenvectors();
    const Index k = s.size();
    const double s_max = s(k - 1);
    const Vector c = V.transpose() * (W.transpose() * b);

    // Secular equation: sum_k c_k^2 / (gamma - s_k)^2 = budget on the branch
    // gamma > s_max, where the solution y_k = c_k / (gamma - s_k) is the
    // global maximizer. phi is strictly decreasing there.
    const auto phi = [&](double gamma) {
        double total = 0.0;
        for (Index i = 0; i < k; ++i) {
            const double d = gamma - s(i);
            total += (c(i) / d) * (c(i) / d);
        }
        return total;
    };

    const double scale = std::max(1.0, std::abs(s_max));
    const double lo0 = s_max + 1e-13 * scale;
    const double c_norm = c.norm();
    Vector y(k);
    double gamma = 0.0;

    if (c_norm > 0.0 && phi(lo0) > budget) {
        // Regular case: bracket [lo0, hi] with phi(hi) <= budget.
        double hi = s_max + c_norm / std::sqrt(budget);
        double lo = lo0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (phi(mid) > budget) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        gamma = 0.5 * (lo + hi);
        for (Index i = 0; i < k; ++i) y(i) = c(i) / (gamma - s(i));
    } else {
        // Hard case: gamma sits at s_max, the components below the top
        // eigenvalue take their limit values, and the leftover budget rides
        // the top eigenvector.
        out.hard_case = true;
        gamma = s_max;
        const double top_tol = 1e-10 * scale;
        double used = 0.0;
        Index top = k - 1;  // top group occupies the tail of the spectrum
        while (top > 0 && s_max - s(top - 1) <= top_tol) --top;
        for (Index i = 0; i < k; ++i) {
            if (i >= top) {
                y(i) = 0.0;
            } else {
                y(i) = c(i) / (s_max - s(i));
                used += y(i) * y(i);
            }
        }
        const double leftover = budget - used;
        if (leftover > 0.0) {
            const double t = std::sqrt(leftover);
            // Align with the residual linear term when it is nonzero;
            // otherwise the sign is free and fixed later.
            const Index lead = k - 1;
            y(lead) = (c(lead) < 0.0) ? -t : t;
        }
    }

    out.input = W * (V * y);
    if (c_norm == 0.0) detail::fix_sign(out.input);
    out.cost = (SA * x0 + SB * out.input).squaredNorm();
    out.multiplier = gamma;
    out.budget_used = out.input.dot(info * out.input);
    out.rayleigh_max = rayleigh.value;
    return out;
}

}  // namespace icsdet
