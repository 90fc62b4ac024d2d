#pragma once

#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bosrec/density_matrix.hpp"
#include "bosrec/two_mode.hpp"

namespace bosrec {

/// Dense operator on the truncated two-mode product basis, mode-1-major
/// (flat index n1*dim2 + n2). dim2 = 1 degenerates to a single mode.
struct FockOperator {
    int dim1 = 1;
    int dim2 = 1;
    Eigen::MatrixXcd entries;
};

/// Lowering operator of the given mode (1 or 2) on the product basis.
FockOperator lowering_operator(int dim1, int dim2, int mode);

/// System Hamiltonian w1 a1^dag a1 + w2 a2^dag a2 + g a1^dag a2 + g* a2^dag a1
/// and the jump operators sqrt(k1) a1, sqrt(k2) a2 of the zero-temperature
/// master equation. Complex g is allowed here.
std::pair<FockOperator, std::vector<FockOperator>> build_system(const ModelParams& params,
                                                                int dim1, int dim2);

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;

    // {times: [...], states: [DensityMatrix...]}
    nlohmann::json to_json() const;
};

/// Fixed-step RK4 integration of
///   drho/dt = -i[H, rho] + sum_j (L_j rho L_j^dag - 1/2 {L_j^dag L_j, rho}),
/// snapshotting at the grid times (which must be integer multiples of dt,
/// with dt no larger than the smallest grid spacing). The Hermitian part
/// is enforced after every step. Trace drift beyond 1e-5 aborts with a
/// step-size diagnostic.
Trajectory integrate(const FockOperator& hamiltonian, const std::vector<FockOperator>& jumps,
                     const DensityMatrix& rho0, const std::vector<double>& t_grid, double dt);

}  // namespace bosrec
