#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bosrec/multi_index.hpp"

namespace bosrec {

using Complex = std::complex<double>;

/// Dense density matrix over a truncated Fock product basis.
/// Rows and columns are flattened multi-indices in mode-1-major order
/// (two modes: flat = n1 * cutoff2 + n2). The cutoff is exclusive per
/// mode. eps_trunc records the estimated probability weight lost to the
/// truncation (1 - trace for a reconstruction).
class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(std::vector<int> cutoffs);

    int mode_count() const { return static_cast<int>(cutoffs_.size()); }
    const std::vector<int>& cutoffs() const { return cutoffs_; }
    Eigen::Index dim() const { return entries_.rows(); }

    Complex at(const MultiIndex& n, const MultiIndex& m) const {
        return entries_(flatten(n), flatten(m));
    }
    Complex& at(const MultiIndex& n, const MultiIndex& m) {
        return entries_(flatten(n), flatten(m));
    }

    const Eigen::MatrixXcd& matrix() const { return entries_; }
    Eigen::MatrixXcd& matrix() { return entries_; }

    Complex trace() const { return entries_.trace(); }

    double eps_trunc() const { return eps_trunc_; }
    void set_eps_trunc(double e) { eps_trunc_ = e; }

    Eigen::Index flatten(const MultiIndex& idx) const;
    MultiIndex unflatten(Eigen::Index flat) const;

    // Physicality probes (used by the validation suites).
    double hermiticity_error() const;  // max |rho - rho^dagger|
    double min_eigenvalue() const;     // smallest eigenvalue of the Hermitian part

    /// Elements whose value was dominated by cancellation between large
    /// partial sums during reconstruction; diagnostic only, not serialized.
    const std::vector<std::pair<MultiIndex, MultiIndex>>& cancellation_flags() const {
        return cancellation_flags_;
    }
    void flag_cancellation(MultiIndex n, MultiIndex m) {
        cancellation_flags_.emplace_back(std::move(n), std::move(m));
    }

    // JSON schema: {mode_count, cutoffs, entries:[{n, m, re, im}], trace, eps_trunc}.
    // Entries with magnitude below 1e-15 are omitted.
    nlohmann::json to_json() const;
    static DensityMatrix from_json(const nlohmann::json& j);

private:
    std::vector<int> cutoffs_;
    std::vector<Eigen::Index> strides_;
    Eigen::MatrixXcd entries_;
    double eps_trunc_ = 0.0;
    std::vector<std::pair<MultiIndex, MultiIndex>> cancellation_flags_;
};

/// rho_a (x) rho_b on the concatenated mode list.
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

double purity(const DensityMatrix& rho);

/// Uhlmann fidelity [tr sqrt(sqrt(rho) sigma sqrt(rho))]^2 for Hermitian
/// PSD inputs; tiny negative eigenvalues from roundoff are clamped to zero.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

}  // namespace bosrec
