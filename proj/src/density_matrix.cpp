#include "bosrec/density_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace bosrec {

DensityMatrix::DensityMatrix(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
    if (cutoffs_.empty()) throw std::invalid_argument("DensityMatrix: needs at least one mode");
    Eigen::Index dim = 1;
    for (int c : cutoffs_) {
        if (c < 1) throw std::invalid_argument("DensityMatrix: cutoffs must be >= 1");
        dim *= c;
    }
    strides_.resize(cutoffs_.size());
    Eigen::Index s = 1;
    for (int j = static_cast<int>(cutoffs_.size()) - 1; j >= 0; --j) {
        strides_[static_cast<std::size_t>(j)] = s;
        s *= cutoffs_[static_cast<std::size_t>(j)];
    }
    entries_ = Eigen::MatrixXcd::Zero(dim, dim);
}

Eigen::Index DensityMatrix::flatten(const MultiIndex& idx) const {
    if (idx.modes() != mode_count()) {
        throw std::invalid_argument("DensityMatrix: index mode count mismatch");
    }
    Eigen::Index flat = 0;
    for (int j = 0; j < mode_count(); ++j) {
        if (idx[j] >= cutoffs_[static_cast<std::size_t>(j)]) {
            throw std::out_of_range("DensityMatrix: index exceeds cutoff");
        }
        flat += idx[j] * strides_[static_cast<std::size_t>(j)];
    }
    return flat;
}

MultiIndex DensityMatrix::unflatten(Eigen::Index flat) const {
    std::vector<int> v(cutoffs_.size());
    for (std::size_t j = 0; j < cutoffs_.size(); ++j) {
        v[j] = static_cast<int>(flat / strides_[j]);
        flat %= strides_[j];
    }
    return MultiIndex(std::move(v));
}

double DensityMatrix::hermiticity_error() const {
    return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    const Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

nlohmann::json DensityMatrix::to_json() const {
    nlohmann::json j;
    j["mode_count"] = mode_count();
    j["cutoffs"] = cutoffs_;
    nlohmann::json entries = nlohmann::json::array();
    for (Eigen::Index r = 0; r < dim(); ++r) {
        for (Eigen::Index c = 0; c < dim(); ++c) {
            const Complex v = entries_(r, c);
            if (std::abs(v) < 1e-15) continue;
            nlohmann::json e;
            e["n"] = unflatten(r).values();
            e["m"] = unflatten(c).values();
            e["re"] = v.real();
            e["im"] = v.imag();
            entries.push_back(std::move(e));
        }
    }
    j["entries"] = std::move(entries);
    j["trace"] = trace().real();
    j["eps_trunc"] = eps_trunc_;
    return j;
}

DensityMatrix DensityMatrix::from_json(const nlohmann::json& j) {
    DensityMatrix rho(j.at("cutoffs").get<std::vector<int>>());
    if (j.at("mode_count").get<int>() != rho.mode_count()) {
        throw std::invalid_argument("DensityMatrix: mode_count does not match cutoffs");
    }
    for (const auto& e : j.at("entries")) {
        const MultiIndex n(e.at("n").get<std::vector<int>>());
        const MultiIndex m(e.at("m").get<std::vector<int>>());
        rho.at(n, m) = Complex(e.at("re").get<double>(), e.at("im").get<double>());
    }
    rho.set_eps_trunc(j.value("eps_trunc", 0.0));
    return rho;
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
    std::vector<int> cutoffs = a.cutoffs();
    cutoffs.insert(cutoffs.end(), b.cutoffs().begin(), b.cutoffs().end());
    DensityMatrix out(std::move(cutoffs));
    const Eigen::Index db = b.dim();
    for (Eigen::Index ra = 0; ra < a.dim(); ++ra) {
        for (Eigen::Index ca = 0; ca < a.dim(); ++ca) {
            out.matrix().block(ra * db, ca * db, db, db) = a.matrix()(ra, ca) * b.matrix();
        }
    }
    out.set_eps_trunc(a.eps_trunc() + b.eps_trunc());
    return out;
}

double purity(const DensityMatrix& rho) {
    return (rho.matrix() * rho.matrix()).trace().real();
}

namespace {

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Eigen::VectorXd vals = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) {
        throw std::invalid_argument("fidelity: dimension mismatch");
    }
    const Eigen::MatrixXcd sr = hermitian_sqrt(0.5 * (rho.matrix() + rho.matrix().adjoint()));
    const Eigen::MatrixXcd inner = sr * 0.5 * (sigma.matrix() + sigma.matrix().adjoint()) * sr;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

}  // namespace bosrec
