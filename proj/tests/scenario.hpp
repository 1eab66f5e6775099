#pragma once

// Randomized model builders shared across the test suite. Couplings are
// rank-one per receiving subsystem (every incoming block shares one
// injection column), which keeps the unknown-input channel thin enough that
// local detectors retain residual dimensions at the horizons used in tests.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "icsdet/model.hpp"

namespace testutil {

using icsdet::CouplingMap;
using icsdet::Index;
using icsdet::InterconnectedModel;
using icsdet::Matrix;
using icsdet::Subsystem;
using icsdet::Vector;

struct ScenarioSpec {
    int count = 3;
    Index state_dim = 2;
    Index output_dim = 2;
    Index attack_dim = 1;
    double spectral_radius = 0.8;  // per-subsystem A_ii scaling target
    double coupling_scale = 0.3;
    bool ring = false;  // chain 1 <-> 2 <-> ... <-> N, closed when true
};

inline Matrix random_matrix(std::mt19937_64& engine, Index rows, Index cols) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix M(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) M(r, c) = u(engine);
    }
    return M;
}

inline Matrix random_spd(std::mt19937_64& engine, Index dim, double ridge = 0.3) {
    const Matrix R = random_matrix(engine, dim, dim);
    return R * R.transpose() + ridge * Matrix::Identity(dim, dim);
}

inline Matrix scaled_to_radius(Matrix A, double radius) {
    const double rho = Eigen::EigenSolver<Matrix>(A, false).eigenvalues().cwiseAbs().maxCoeff();
    if (rho > 1e-12) A *= radius / rho;
    return A;
}

/// Random interconnected model on a chain (or ring) topology.
inline InterconnectedModel random_model(const ScenarioSpec& spec, std::uint64_t seed) {
    std::mt19937_64 engine(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Subsystem> subsystems;
    std::vector<Vector> injection;  // shared incoming column per subsystem
    for (int k = 0; k < spec.count; ++k) {
        Subsystem s;
        s.id = k + 1;
        s.A = scaled_to_radius(random_matrix(engine, spec.state_dim, spec.state_dim),
                               spec.spectral_radius);
        s.C = random_matrix(engine, spec.output_dim, spec.state_dim);
        s.B_attack = random_matrix(engine, spec.state_dim, spec.attack_dim);
        s.Sigma_w = random_spd(engine, spec.state_dim);
        s.Sigma_v = random_spd(engine, spec.output_dim);
        subsystems.push_back(std::move(s));
        Vector b(spec.state_dim);
        for (Index i = 0; i < spec.state_dim; ++i) b(i) = u(engine);
        injection.push_back(b.normalized());
    }
    CouplingMap coupling;
    const auto couple = [&](int to, int from) {
        Vector row(spec.state_dim);
        for (Index i = 0; i < spec.state_dim; ++i) row(i) = u(engine);
        coupling[{to + 1, from + 1}] =
            spec.coupling_scale * injection[to] * row.transpose();
    };
    for (int k = 0; k + 1 < spec.count; ++k) {
        couple(k, k + 1);
        couple(k + 1, k);
    }
    if (spec.ring && spec.count > 2) {
        couple(0, spec.count - 1);
        couple(spec.count - 1, 0);
    }
    return InterconnectedModel(std::move(subsystems), std::move(coupling));
}

}  // namespace testutil
