#include "bosrec/states.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "bosrec/numerics.hpp"

namespace bosrec {

DensityMatrix fock_state(int n, int cutoff) {
    if (n < 0 || n >= cutoff) {
        throw std::invalid_argument("fock_state: need 0 <= n < cutoff");
    }
    DensityMatrix rho({cutoff});
    rho.matrix()(n, n) = 1.0;
    return rho;
}

DensityMatrix coherent_state(Complex alpha, int cutoff) {
    DensityMatrix rho({cutoff});
    // amplitudes c_n = e^{-|a|^2/2} a^n / sqrt(n!)
    Eigen::VectorXcd amp(cutoff);
    const double norm = std::exp(-0.5 * std::norm(alpha));
    Complex pow_a = 1.0;
    for (int n = 0; n < cutoff; ++n) {
        amp(n) = norm * pow_a * std::exp(-0.5 * log_factorial(n));
        pow_a *= alpha;
    }
    rho.matrix() = amp * amp.adjoint();
    rho.set_eps_trunc(std::max(0.0, 1.0 - rho.trace().real()));
    return rho;
}

DensityMatrix thermal_state(double beta, int cutoff) {
    if (!(beta > 0.0)) throw std::invalid_argument("thermal_state: beta must be > 0");
    DensityMatrix rho({cutoff});
    const double w = std::exp(-beta);
    double p = 1.0 - w;
    for (int n = 0; n < cutoff; ++n) {
        rho.matrix()(n, n) = p;
        p *= w;
    }
    rho.set_eps_trunc(std::max(0.0, 1.0 - rho.trace().real()));
    return rho;
}

DensityMatrix random_density_matrix(int support, unsigned seed, int cutoff) {
    if (support < 0) throw std::invalid_argument("random_density_matrix: support must be >= 0");
    const int d = support + 1;
    if (cutoff < 0) cutoff = d;
    if (cutoff < d) throw std::invalid_argument("random_density_matrix: cutoff below support");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXcd g(d, d);
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            g(r, c) = Complex(gauss(rng), gauss(rng));
        }
    }
    Eigen::MatrixXcd m = g * g.adjoint();
    m /= m.trace().real();

    DensityMatrix rho({cutoff});
    rho.matrix().topLeftCorner(d, d) = m;
    return rho;
}

}  // namespace bosrec
