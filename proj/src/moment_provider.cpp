#include "bosrec/moment_provider.hpp"

#include <cmath>
#include <stdexcept>

#include "bosrec/numerics.hpp"

namespace bosrec {

namespace {

void require_single_mode(const MultiIndex& u, const MultiIndex& v, const char* who) {
    if (u.modes() != 1 || v.modes() != 1) {
        throw std::invalid_argument(std::string(who) + ": expects single-mode indices");
    }
}

}  // namespace

FockMomentProvider::FockMomentProvider(int n) : n_(n) {
    if (n < 0) throw std::invalid_argument("FockMomentProvider: n must be >= 0");
}

Complex FockMomentProvider::moment(const MultiIndex& u, const MultiIndex& v) const {
    require_single_mode(u, v, "FockMomentProvider");
    if (u[0] != v[0] || u[0] > n_) return 0.0;
    // <n|(a^dag)^u a^u|n> = n!/(n-u)!
    return std::exp(log_factorial(n_) - log_factorial(n_ - u[0]));
}

Complex CoherentMomentProvider::moment(const MultiIndex& u, const MultiIndex& v) const {
    require_single_mode(u, v, "CoherentMomentProvider");
    return ipow(std::conj(alpha_), u[0]) * ipow(alpha_, v[0]);
}

ThermalMomentProvider::ThermalMomentProvider(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("ThermalMomentProvider: beta must be > 0");
    nbar_ = 1.0 / std::expm1(beta);
}

Complex ThermalMomentProvider::moment(const MultiIndex& u, const MultiIndex& v) const {
    require_single_mode(u, v, "ThermalMomentProvider");
    if (u[0] != v[0]) return 0.0;
    return std::exp(log_factorial(u[0]) + u[0] * std::log(nbar_));
}

MatrixMomentProvider::MatrixMomentProvider(DensityMatrix rho) : rho_(std::move(rho)) {
    if (rho_.mode_count() != 1) {
        throw std::invalid_argument("MatrixMomentProvider: single-mode matrices only");
    }
    support_ = 0;
    const Eigen::Index d = rho_.dim();
    for (Eigen::Index r = 0; r < d; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            if (std::abs(rho_.matrix()(r, c)) > 0.0) {
                support_ = std::max<int>(support_, static_cast<int>(std::max(r, c)));
            }
        }
    }
}

Complex MatrixMomentProvider::moment(const MultiIndex& u, const MultiIndex& v) const {
    require_single_mode(u, v, "MatrixMomentProvider");
    const int uu = u[0], vv = v[0];
    // tr[rho (a^dag)^u a^v] = sum_a rho_{a, a-v+u} sqrt(a!/(a-v)!) sqrt((a-v+u)!/(a-v)!)
    const Eigen::Index d = rho_.dim();
    Complex sum = 0.0;
    for (int a = vv; a < d; ++a) {
        const int b = a - vv + uu;
        if (b >= d) break;
        const Complex entry = rho_.matrix()(a, b);
        if (entry == Complex(0.0)) continue;
        double w;
        if (std::max(a, b) <= kMaxDoubleFactorial) {
            w = std::sqrt(factorial(a)) / factorial(a - vv) * std::sqrt(factorial(b));
        } else {
            w = std::exp(0.5 * (log_factorial(a) + log_factorial(b)) - log_factorial(a - vv));
        }
        sum += entry * w;
    }
    return sum;
}

ProductMomentProvider::ProductMomentProvider(
    std::vector<std::shared_ptr<const MomentProvider>> factors)
    : factors_(std::move(factors)) {
    if (factors_.empty()) {
        throw std::invalid_argument("ProductMomentProvider: needs at least one factor");
    }
    support_ = 0;
    for (const auto& f : factors_) {
        if (f->mode_count() != 1) {
            throw std::invalid_argument("ProductMomentProvider: factors must be single-mode");
        }
        const auto s = f->support_bound();
        if (!s) {
            support_ = std::nullopt;
            break;
        }
        support_ = std::max(*support_, *s);
    }
}

Complex ProductMomentProvider::moment(const MultiIndex& u, const MultiIndex& v) const {
    if (u.modes() != mode_count() || v.modes() != mode_count()) {
        throw std::invalid_argument("ProductMomentProvider: index mode count mismatch");
    }
    Complex prod = 1.0;
    for (int j = 0; j < mode_count(); ++j) {
        prod *= factors_[static_cast<std::size_t>(j)]->moment(MultiIndex{u[j]}, MultiIndex{v[j]});
        if (prod == Complex(0.0)) return 0.0;
    }
    return prod;
}

Complex MemoizedMomentProvider::moment(const MultiIndex& u, const MultiIndex& v) const {
    const auto key = std::make_pair(u.values(), v.values());
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    const Complex value = inner_.moment(u, v);
    std::lock_guard<std::mutex> lock(mutex_);
    cache_.emplace(key, value);
    return value;
}

}  // namespace bosrec
