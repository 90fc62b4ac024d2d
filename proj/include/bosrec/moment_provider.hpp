#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>

#include "bosrec/density_matrix.hpp"
#include "bosrec/multi_index.hpp"

namespace bosrec {

/// Source of normally-ordered moments <prod_j (a_j^dag)^{u_j} a_j^{v_j}>.
/// Contract: moment(0,0) = 1 (unit trace), moment(u,v) = conj(moment(v,u)),
/// and if support_bound() returns S then the moment vanishes whenever any
/// exponent exceeds S. Implementations must be safe for concurrent reads.
class MomentProvider {
public:
    virtual ~MomentProvider() = default;

    virtual Complex moment(const MultiIndex& u, const MultiIndex& v) const = 0;

    /// Largest Fock index with support, or nullopt for unbounded states.
    virtual std::optional<int> support_bound() const = 0;

    virtual int mode_count() const = 0;
};

/// Single-mode Fock state |n><n|: moment(u,v) = delta_{u,v} n!/(n-u)!.
class FockMomentProvider final : public MomentProvider {
public:
    explicit FockMomentProvider(int n);
    Complex moment(const MultiIndex& u, const MultiIndex& v) const override;
    std::optional<int> support_bound() const override { return n_; }
    int mode_count() const override { return 1; }

private:
    int n_;
};

/// Single-mode coherent state |alpha><alpha|: moment(u,v) = conj(a)^u a^v.
class CoherentMomentProvider final : public MomentProvider {
public:
    explicit CoherentMomentProvider(Complex alpha) : alpha_(alpha) {}
    Complex moment(const MultiIndex& u, const MultiIndex& v) const override;
    std::optional<int> support_bound() const override { return std::nullopt; }
    int mode_count() const override { return 1; }

private:
    Complex alpha_;
};

/// Single-mode thermal state: moment(u,u) = u! nbar^u with
/// nbar = 1/(e^beta - 1); off-diagonal moments vanish.
class ThermalMomentProvider final : public MomentProvider {
public:
    explicit ThermalMomentProvider(double beta);
    Complex moment(const MultiIndex& u, const MultiIndex& v) const override;
    std::optional<int> support_bound() const override { return std::nullopt; }
    int mode_count() const override { return 1; }

private:
    double nbar_;
};

/// Moments of an explicit truncated density matrix, evaluated as the
/// exact trace sum tr[rho (a^dag)^u a^v] over the stored basis. Exact
/// for states whose support fits the matrix.
class MatrixMomentProvider final : public MomentProvider {
public:
    explicit MatrixMomentProvider(DensityMatrix rho);
    Complex moment(const MultiIndex& u, const MultiIndex& v) const override;
    std::optional<int> support_bound() const override { return support_; }
    int mode_count() const override { return rho_.mode_count(); }

private:
    DensityMatrix rho_;
    int support_;
};

/// Product state built from independent single-mode providers; the joint
/// moment factorizes.
class ProductMomentProvider final : public MomentProvider {
public:
    ProductMomentProvider(std::vector<std::shared_ptr<const MomentProvider>> factors);
    Complex moment(const MultiIndex& u, const MultiIndex& v) const override;
    std::optional<int> support_bound() const override { return support_; }
    int mode_count() const override { return static_cast<int>(factors_.size()); }

private:
    std::vector<std::shared_ptr<const MomentProvider>> factors_;
    std::optional<int> support_;
};

/// Memoizing wrapper; the q-sums of the reconstruction re-request the
/// same moments heavily. Internally synchronized.
class MemoizedMomentProvider final : public MomentProvider {
public:
    explicit MemoizedMomentProvider(const MomentProvider& inner) : inner_(inner) {}
    Complex moment(const MultiIndex& u, const MultiIndex& v) const override;
    std::optional<int> support_bound() const override { return inner_.support_bound(); }
    int mode_count() const override { return inner_.mode_count(); }

private:
    const MomentProvider& inner_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::pair<std::vector<int>, std::vector<int>>, Complex,
                               MultiIndexPairHash>
        cache_;
};

}  // namespace bosrec
