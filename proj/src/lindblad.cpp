#include "bosrec/lindblad.hpp"

#include <Eigen/SparseCore>
#include <cmath>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "bosrec/reconstruction.hpp"

namespace bosrec {

FockOperator lowering_operator(int dim1, int dim2, int mode) {
    if (dim1 < 1 || dim2 < 1) {
        throw std::invalid_argument("lowering_operator: dims must be >= 1");
    }
    if (mode != 1 && mode != 2) {
        throw std::invalid_argument("lowering_operator: mode must be 1 or 2");
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(dim1) * dim2;
    FockOperator op{dim1, dim2, Eigen::MatrixXcd::Zero(dim, dim)};
    // <n-1|a|n> = sqrt(n) on the selected factor of the product basis.
    for (int n1 = 0; n1 < dim1; ++n1) {
        for (int n2 = 0; n2 < dim2; ++n2) {
            const Eigen::Index col = static_cast<Eigen::Index>(n1) * dim2 + n2;
            if (mode == 1 && n1 > 0) {
                op.entries(col - dim2, col) = std::sqrt(double(n1));
            } else if (mode == 2 && n2 > 0) {
                op.entries(col - 1, col) = std::sqrt(double(n2));
            }
        }
    }
    return op;
}

std::pair<FockOperator, std::vector<FockOperator>> build_system(const ModelParams& params,
                                                                int dim1, int dim2) {
    params.validate();
    const FockOperator a1 = lowering_operator(dim1, dim2, 1);
    const FockOperator a2 = lowering_operator(dim1, dim2, 2);

    FockOperator h{dim1, dim2, Eigen::MatrixXcd()};
    h.entries = params.omega1 * (a1.entries.adjoint() * a1.entries) +
                params.omega2 * (a2.entries.adjoint() * a2.entries) +
                params.g * (a1.entries.adjoint() * a2.entries) +
                std::conj(params.g) * (a2.entries.adjoint() * a1.entries);

    std::vector<FockOperator> jumps;
    jumps.push_back({dim1, dim2, std::sqrt(params.kappa1) * a1.entries});
    jumps.push_back({dim1, dim2, std::sqrt(params.kappa2) * a2.entries});
    return {std::move(h), std::move(jumps)};
}

nlohmann::json Trajectory::to_json() const {
    nlohmann::json j;
    j["times"] = times;
    nlohmann::json st = nlohmann::json::array();
    for (const auto& s : states) st.push_back(s.to_json());
    j["states"] = std::move(st);
    return j;
}

Trajectory integrate(const FockOperator& hamiltonian, const std::vector<FockOperator>& jumps,
                     const DensityMatrix& rho0, const std::vector<double>& t_grid, double dt) {
    const Eigen::Index dim = hamiltonian.entries.rows();
    if (hamiltonian.entries.cols() != dim || rho0.dim() != dim) {
        throw std::invalid_argument("integrate: dimension mismatch between H and rho0");
    }
    if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be > 0");
    if (t_grid.empty()) throw std::invalid_argument("integrate: empty time grid");

    // Grid times must sit on the step lattice.
    std::vector<long> grid_steps(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        const double t = t_grid[i];
        if (t < 0.0 || (i > 0 && t <= t_grid[i - 1])) {
            throw std::invalid_argument("integrate: grid times must be increasing and >= 0");
        }
        if (i > 0 && dt > (t - t_grid[i - 1]) * (1.0 + 1e-12)) {
            throw std::invalid_argument("integrate: dt exceeds the smallest grid spacing");
        }
        const double steps = t / dt;
        const long rounded = std::lround(steps);
        if (std::abs(steps - rounded) > 1e-6 * std::max(1.0, steps)) {
            throw std::invalid_argument("integrate: grid time " + std::to_string(t) +
                                        " is not an integer multiple of dt");
        }
        grid_steps[i] = rounded;
    }

    using Sparse = Eigen::SparseMatrix<Complex>;
    const Complex im(0.0, 1.0);

    // Non-Hermitian drift G = -iH - 1/2 sum_j L_j^dag L_j; the Lindblad
    // right-hand side becomes G rho + rho G^dag + sum_j L_j rho L_j^dag.
    Eigen::MatrixXcd drift_dense = -im * hamiltonian.entries;
    std::vector<Sparse> jump_ops, jump_ops_adj;
    for (const auto& j : jumps) {
        if (j.entries.rows() != dim || j.entries.cols() != dim) {
            throw std::invalid_argument("integrate: jump operator dimension mismatch");
        }
        if (j.entries.cwiseAbs().maxCoeff() == 0.0) continue;
        drift_dense -= 0.5 * (j.entries.adjoint() * j.entries);
        jump_ops.emplace_back(j.entries.sparseView());
        jump_ops_adj.emplace_back(Sparse(j.entries.adjoint().sparseView()));
    }
    const Sparse drift = drift_dense.sparseView();
    const Sparse drift_adj = Sparse(drift_dense.adjoint().sparseView());

    Eigen::MatrixXcd work(dim, dim);
    auto rhs = [&](const Eigen::MatrixXcd& r, Eigen::MatrixXcd& out) {
        out.noalias() = drift * r;
        out.noalias() += r * drift_adj;
        for (std::size_t j = 0; j < jump_ops.size(); ++j) {
            work.noalias() = jump_ops[j] * r;
            out.noalias() += work * jump_ops_adj[j];
        }
    };

    Eigen::MatrixXcd rho = rho0.matrix();
    Eigen::MatrixXcd k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);
    const double trace0 = rho.trace().real();

    Trajectory traj;
    const std::vector<int> snapshot_cutoffs = rho0.cutoffs();
    auto snapshot = [&](double t) {
        DensityMatrix dm(snapshot_cutoffs);
        dm.matrix() = rho;
        dm.set_eps_trunc(std::max(0.0, 1.0 - dm.trace().real()));
        traj.times.push_back(t);
        traj.states.push_back(std::move(dm));
    };

    std::size_t next = 0;
    const long total_steps = grid_steps.back();
    for (long step = 0; step <= total_steps; ++step) {
        if (next < grid_steps.size() && grid_steps[next] == step) {
            snapshot(t_grid[next]);
            ++next;
        }
        if (step == total_steps) break;

        rhs(rho, k1);
        stage = rho + (0.5 * dt) * k1;
        rhs(stage, k2);
        stage = rho + (0.5 * dt) * k2;
        rhs(stage, k3);
        stage = rho + dt * k3;
        rhs(stage, k4);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        rho = 0.5 * (rho + rho.adjoint()).eval();

        const double drift_err = std::abs(rho.trace().real() - trace0);
        if (!(drift_err <= 1e-5)) {  // also catches NaN from a blown-up step
            throw TruncationError("integrate: trace drift " + std::to_string(drift_err) +
                                      " at t=" + std::to_string((step + 1) * dt) +
                                      "; reduce dt",
                                  drift_err);
        }
    }
    return traj;
}

}  // namespace bosrec
