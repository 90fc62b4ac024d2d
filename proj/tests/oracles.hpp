#pragma once

// Independent reference computations for the test suites. Everything in
// here deliberately avoids the library's own evaluation paths: exact
// big-integer and rational arithmetic, term-by-term series, and the
// textbook single damped oscillator element.

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <vector>

#include "bosrec/density_matrix.hpp"

namespace oracles {

namespace mp = boost::multiprecision;

inline mp::cpp_int big_factorial(int n) {
    mp::cpp_int f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

/// ln(n!) from the exact big integer, via its bit length and leading bits.
inline double exact_log_factorial(int n) {
    const mp::cpp_int f = big_factorial(n);
    const unsigned bits = static_cast<unsigned>(mp::msb(f));  // floor(log2 f)
    // Scale down so the leading part fits a double exactly.
    const unsigned shift = bits > 52 ? bits - 52 : 0;
    const double lead = static_cast<double>(mp::cpp_int(f >> shift));
    return std::log(lead) + shift * std::log(2.0);
}

/// Terminating hypergeometric series 2F1(-m,-n;-n-m-q;1) summed term by
/// term in exact rational arithmetic:
///   term_j = (-1)^j m! n! (n+m+q-j)! / [(m-j)! (n-j)! (n+m+q)! j!].
inline double hyp2f1_series(int m, int n, int q) {
    mp::cpp_rational sum = 0;
    const int jmax = std::min(m, n);
    for (int j = 0; j <= jmax; ++j) {
        mp::cpp_int num = big_factorial(m) * big_factorial(n) * big_factorial(n + m + q - j);
        mp::cpp_int den = big_factorial(m - j) * big_factorial(n - j) *
                          big_factorial(n + m + q) * big_factorial(j);
        mp::cpp_rational term(num, den);
        if (j % 2 != 0) term = -term;
        sum += term;
    }
    return static_cast<double>(sum);
}

/// Single damped harmonic oscillator element at time t:
///   rho_{n,m}(t) = e^{-(n+m) kappa t/2} e^{-i(n-m) omega t} / sqrt(n!m!)
///     * sum_k rho_{n+k,m+k}(0) sqrt((n+k)!(m+k)!)/k! (1 - e^{-kappa t})^k.
inline std::complex<double> single_oscillator_element(const bosrec::DensityMatrix& rho0, int n,
                                                      int m, double omega, double kappa,
                                                      double t) {
    using namespace std::complex_literals;
    auto fact = [](int v) {
        long double f = 1.0L;
        for (int i = 2; i <= v; ++i) f *= i;
        return f;
    };
    const std::complex<double> pref =
        std::exp(-0.5 * (n + m) * kappa * t) * std::exp(-1i * (double(n - m)) * omega * t) /
        static_cast<double>(sqrtl(fact(n) * fact(m)));
    const double w = -std::expm1(-kappa * t);  // 1 - e^{-kappa t}
    std::complex<double> sum = 0.0;
    for (int k = 0; n + k < rho0.dim() && m + k < rho0.dim(); ++k) {
        double weight = static_cast<double>(sqrtl(fact(n + k) * fact(m + k)) / fact(k));
        if (k > 0) weight *= std::pow(w, k);
        sum += rho0.matrix()(n + k, m + k) * weight;
    }
    return pref * sum;
}

}  // namespace oracles
