#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "icsdet/types.hpp"

// ============================================================================
// Interconnected stochastic LTI model.
//
// The plant is a collection of subsystems with linear dynamics
//   x_i(k+1) = A_ii x_i(k) + sum_j A_ij x_j(k) + B_i^a u_i^a(k) + w_i(k)
//   y_i(k)   = C_i x_i(k) + v_i(k)
// where the sum runs over declared coupling blocks, u_i^a is an attack input,
// and w_i, v_i are zero-mean Gaussian with covariances Sigma_w_i, Sigma_v_i.
// ============================================================================

namespace icsdet {

/// One subsystem: local dynamics, measurements, attack channel, noise.
struct Subsystem {
    int id = 0;       // declared identifier; files and coupling entries use it
    Matrix A;         // n x n local state transition
    Matrix C;         // r x n measurement map
    Matrix B_attack;  // n x m attack input channel
    Matrix Sigma_w;   // n x n process noise covariance, symmetric PD
    Matrix Sigma_v;   // r x r measurement noise covariance, symmetric PD

    Index state_dim() const { return A.rows(); }
    Index output_dim() const { return C.rows(); }
    Index attack_dim() const { return B_attack.cols(); }
};

/// Directed coupling blocks keyed by {to, from}: block A_ij drives subsystem
/// i with the state of subsystem j. Undeclared pairs are zero.
using CouplingMap = std::map<std::pair<int, int>, Matrix>;

namespace detail {

/// Relative spectral tolerance under which a covariance counts as singular.
inline constexpr double kPdTol = 1e-12;
/// Relative tolerance for the symmetry check on covariance inputs.
inline constexpr double kSymTol = 1e-10;

inline void check_covariance(const Matrix& S, Index dim, const std::string& what) {
    if (S.rows() != dim || S.cols() != dim) {
        throw ValidationError("model: " + what + " must be " + std::to_string(dim) + "x" +
                              std::to_string(dim));
    }
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if ((S - S.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale) {
        throw ValidationError("model: " + what + " must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (S + S.transpose()),
                                              Eigen::EigenvaluesOnly);
    const double max_eig = eig.eigenvalues().maxCoeff();
    const double min_eig = eig.eigenvalues().minCoeff();
    if (!(max_eig > 0.0) || min_eig <= kPdTol * max_eig) {
        throw ValidationError("model: " + what + " must be positive definite");
    }
}

}  // namespace detail

/// The assembled interconnected model. Subsystems are held in ascending id
/// order; all position arguments below are 0-based positions in that order.
class InterconnectedModel {
public:
    InterconnectedModel(std::vector<Subsystem> subsystems, CouplingMap coupling)
        : subsystems_(std::move(subsystems)), coupling_(std::move(coupling)) {
        std::sort(subsystems_.begin(), subsystems_.end(),
                  [](const Subsystem& a, const Subsystem& b) { return a.id < b.id; });
        validate();
    }

    int count() const { return static_cast<int>(subsystems_.size()); }
    const std::vector<Subsystem>& subsystems() const { return subsystems_; }
    const Subsystem& subsystem(int k) const { return subsystems_.at(k); }
    const CouplingMap& coupling() const { return coupling_; }

    Index state_dim() const { return offset_sum(&Subsystem::state_dim); }
    Index output_dim() const { return offset_sum(&Subsystem::output_dim); }
    Index attack_dim() const { return offset_sum(&Subsystem::attack_dim); }

    Index state_offset(int k) const { return prefix_sum(&Subsystem::state_dim, k); }
    Index output_offset(int k) const { return prefix_sum(&Subsystem::output_dim, k); }
    Index attack_offset(int k) const { return prefix_sum(&Subsystem::attack_dim, k); }

    int position_of(int id) const {
        for (int k = 0; k < count(); ++k) {
            if (subsystems_[k].id == id) return k;
        }
        throw ValidationError("model: unknown subsystem id " + std::to_string(id));
    }

    /// Full state transition with coupling blocks placed off the diagonal.
    Matrix global_A() const {
        Matrix A = Matrix::Zero(state_dim(), state_dim());
        for (int i = 0; i < count(); ++i) {
            A.block(state_offset(i), state_offset(i), subsystems_[i].state_dim(),
                    subsystems_[i].state_dim()) = subsystems_[i].A;
        }
        for (const auto& [pair, block] : coupling_) {
            const int i = position_of(pair.first);
            const int j = position_of(pair.second);
            A.block(state_offset(i), state_offset(j), subsystems_[i].state_dim(),
                    subsystems_[j].state_dim()) = block;
        }
        return A;
    }

    Matrix global_C() const { return block_diagonal(&Subsystem::C); }
    Matrix global_B_attack() const { return block_diagonal(&Subsystem::B_attack); }
    Matrix global_Sigma_w() const { return block_diagonal(&Subsystem::Sigma_w); }
    Matrix global_Sigma_v() const { return block_diagonal(&Subsystem::Sigma_v); }

    /// Channel through which neighbor states enter subsystem k: the declared
    /// coupling blocks of row k concatenated in ascending neighbor position.
    /// Empty (n_k x 0) when subsystem k has no incoming couplings.
    Matrix interconnection_input(int k) const {
        const int id = subsystems_.at(k).id;
        Index cols = 0;
        for (const auto& [pair, block] : coupling_) {
            if (pair.first == id) cols += block.cols();
        }
        Matrix B(subsystems_[k].state_dim(), cols);
        Index at = 0;
        for (const auto& [pair, block] : coupling_) {  // map order: ascending j
            if (pair.first != id) continue;
            B.middleCols(at, block.cols()) = block;
            at += block.cols();
        }
        return B;
    }

private:
    template <typename Fn>
    Index offset_sum(Fn dim) const {
        Index total = 0;
        for (const auto& s : subsystems_) total += (s.*dim)();
        return total;
    }

    template <typename Fn>
    Index prefix_sum(Fn dim, int k) const {
        if (k < 0 || k >= count()) {
            throw ValidationError("model: subsystem position out of range");
        }
        Index total = 0;
        for (int i = 0; i < k; ++i) total += (subsystems_[i].*dim)();
        return total;
    }

    template <typename Member>
    Matrix block_diagonal(Member member) const {
        Index rows = 0;
        Index cols = 0;
        for (const auto& s : subsystems_) {
            rows += (s.*member).rows();
            cols += (s.*member).cols();
        }
        Matrix M = Matrix::Zero(rows, cols);
        Index r = 0;
        Index c = 0;
        for (const auto& s : subsystems_) {
            M.block(r, c, (s.*member).rows(), (s.*member).cols()) = s.*member;
            r += (s.*member).rows();
            c += (s.*member).cols();
        }
        return M;
    }

    void validate() {
        if (subsystems_.empty()) {
            throw ValidationError("model: at least one subsystem is required");
        }
        for (std::size_t k = 1; k < subsystems_.size(); ++k) {
            if (subsystems_[k].id == subsystems_[k - 1].id) {
                throw ValidationError("model: duplicate subsystem id " +
                                      std::to_string(subsystems_[k].id));
            }
        }
        for (const auto& s : subsystems_) {
            const std::string tag = "subsystem " + std::to_string(s.id) + " ";
            const Index n = s.A.rows();
            if (n < 1 || s.A.cols() != n) {
                throw ValidationError("model: " + tag + "A must be square and nonempty");
            }
            if (s.C.rows() < 1 || s.C.cols() != n) {
                throw ValidationError("model: " + tag + "C must have " + std::to_string(n) +
                                      " columns and at least one row");
            }
            if (s.B_attack.rows() != n || s.B_attack.cols() < 1) {
                throw ValidationError("model: " + tag + "B_attack must have " +
                                      std::to_string(n) + " rows and at least one column");
            }
            if (!s.A.allFinite() || !s.C.allFinite() || !s.B_attack.allFinite() ||
                !s.Sigma_w.allFinite() || !s.Sigma_v.allFinite()) {
                throw ValidationError("model: " + tag + "contains non-finite entries");
            }
            detail::check_covariance(s.Sigma_w, n, tag + "Sigma_w");
            detail::check_covariance(s.Sigma_v, s.C.rows(), tag + "Sigma_v");
        }
        for (const auto& [pair, block] : coupling_) {
            const std::string tag = "coupling (" + std::to_string(pair.first) + ", " +
                                    std::to_string(pair.second) + ")";
            if (pair.first == pair.second) {
                throw ValidationError("model: " + tag + " may not be a self-loop");
            }
            const auto& to = subsystems_[position_of(pair.first)];
            const auto& from = subsystems_[position_of(pair.second)];
            if (block.rows() != to.state_dim() || block.cols() != from.state_dim()) {
                throw ValidationError("model: " + tag + " block must be " +
                                      std::to_string(to.state_dim()) + "x" +
                                      std::to_string(from.state_dim()));
            }
            if (!block.allFinite()) {
                throw ValidationError("model: " + tag + " contains non-finite entries");
            }
        }
    }

    std::vector<Subsystem> subsystems_;
    CouplingMap coupling_;
};

}  // namespace icsdet
