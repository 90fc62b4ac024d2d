#include "bosrec/two_mode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bosrec/numerics.hpp"

namespace bosrec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// exponent * log(base) for base >= 0 with 0^0 = 1 (log contribution 0).
double pow_log(double base, int exponent) {
    if (exponent == 0) return 0.0;
    return exponent * std::log(base);
}

}  // namespace

void ModelParams::validate() const {
    if (!(omega1 > 0.0) || !(omega2 > 0.0)) {
        throw std::invalid_argument("ModelParams: omega1 and omega2 must be > 0");
    }
    if (kappa1 < 0.0 || kappa2 < 0.0) {
        throw std::invalid_argument("ModelParams: kappa1 and kappa2 must be >= 0");
    }
}

double ModelParams::real_coupling() const {
    if (g.imag() != 0.0 || g.real() < 0.0) {
        throw std::invalid_argument(
            "ModelParams: the closed-form solution requires real coupling g >= 0; "
            "complex g is supported only by the master-equation integrator");
    }
    return g.real();
}

LambdaPair lambdas(const ModelParams& params) {
    params.validate();
    return {Complex(0.25 * (params.kappa1 + params.kappa2), 0.5 * (params.omega1 + params.omega2)),
            Complex(0.25 * (params.kappa1 - params.kappa2), 0.5 * (params.omega1 - params.omega2))};
}

namespace detail {

Envelopes envelopes_branch(const ModelParams& params, double t, bool flip_root) {
    params.validate();
    const double g = params.real_coupling();
    if (t < 0.0) throw std::invalid_argument("envelopes: t must be >= 0");

    const LambdaPair lp = lambdas(params);
    const Complex x2 = lp.minus * lp.minus - g * g;
    Complex x = std::sqrt(x2);
    if (flip_root) x = -x;

    Envelopes env;
    env.t = t;
    if (std::abs(x) * t < 1e-4) {
        // Degenerate branch: even Taylor series in (x t)^2, accurate to
        // (x t)^6 which is below double precision at this threshold.
        const Complex z2 = x2 * (t * t);
        const Complex ch = 1.0 + z2 / 2.0 + z2 * z2 / 24.0;
        const Complex sh_over_x = t * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
        const Complex decay = std::exp(-lp.plus * t);
        env.f1 = decay * (ch - lp.minus * sh_over_x);
        env.f2 = decay * Complex(0.0, -1.0) * g * sh_over_x;
        return env;
    }

    // e^{-l+ t} cosh(x t) and e^{-l+ t} sinh(x t) assembled from the two
    // decay exponentials e^{-(l+ -+ x) t}; both exponents have
    // non-positive real part for a passive system, so nothing overflows.
    const Complex ep = std::exp((x - lp.plus) * t);
    const Complex em = std::exp((-x - lp.plus) * t);
    const Complex ch = 0.5 * (ep + em);
    const Complex sh_over_x = 0.5 * (ep - em) / x;
    env.f1 = ch - lp.minus * sh_over_x;
    env.f2 = Complex(0.0, -1.0) * g * sh_over_x;
    return env;
}

}  // namespace detail

Envelopes envelopes(const ModelParams& params, double t) {
    return detail::envelopes_branch(params, t, false);
}

ModelParams envelopes_mode2_swap(const ModelParams& params) {
    ModelParams swapped = params;
    std::swap(swapped.omega1, swapped.omega2);
    std::swap(swapped.kappa1, swapped.kappa2);
    return swapped;
}

InitialState InitialState::from_matrix(DensityMatrix rho) {
    if (rho.mode_count() != 1) {
        throw std::invalid_argument("InitialState: initial matrix must be single-mode");
    }
    if (rho.hermiticity_error() > 1e-10) {
        throw std::invalid_argument("InitialState: initial matrix is not Hermitian");
    }
    const double tr = rho.trace().real();
    if (std::abs(tr - 1.0) > rho.eps_trunc() + 1e-9) {
        throw std::invalid_argument("InitialState: initial matrix trace deviates from one by " +
                                    std::to_string(std::abs(tr - 1.0)));
    }
    InitialState s;
    int support = 0;
    for (Eigen::Index r = 0; r < rho.dim(); ++r) {
        for (Eigen::Index c = 0; c < rho.dim(); ++c) {
            if (std::abs(rho.matrix()(r, c)) > 0.0) {
                support = std::max<int>(support, static_cast<int>(std::max(r, c)));
            }
        }
    }
    s.support_ = support;
    s.state_ = std::move(rho);
    return s;
}

InitialState InitialState::coherent(Complex alpha0) {
    InitialState s;
    s.state_ = Coherent{alpha0};
    return s;
}

InitialState InitialState::thermal(double beta0) {
    if (!(beta0 > 0.0)) {
        throw std::invalid_argument("InitialState: thermal beta0 must be > 0");
    }
    InitialState s;
    s.state_ = Thermal{beta0};
    return s;
}

Complex InitialState::entry(int a, int b) const {
    if (a < 0 || b < 0) return 0.0;
    if (const auto* rho = std::get_if<DensityMatrix>(&state_)) {
        if (a >= rho->dim() || b >= rho->dim()) return 0.0;
        return rho->matrix()(a, b);
    }
    if (const auto* c = std::get_if<Coherent>(&state_)) {
        return ipow(c->alpha0, a) * ipow(std::conj(c->alpha0), b) *
               std::exp(-std::norm(c->alpha0) - 0.5 * (log_factorial(a) + log_factorial(b)));
    }
    const auto& th = std::get<Thermal>(state_);
    if (a != b) return 0.0;
    return -std::expm1(-th.beta0) * std::exp(-th.beta0 * a);
}

namespace {

// Shared k-sum driver: accumulates entry(a0+k, b0+k) * weight(k) from
// k = k_lo, terminating exactly at the support bound when there is one
// and by the consecutive-small-terms rule otherwise.
template <typename Weight>
Complex initial_state_ksum(const InitialState& init, int a0, int b0, int k_lo,
                           const TruncationPolicy& policy, Weight&& weight) {
    Complex acc = 0.0, comp = 0.0;
    auto add = [&](const Complex& term) {
        const Complex y = term - comp;
        const Complex s = acc + y;
        comp = (s - acc) - y;
        acc = s;
    };

    if (const auto support = init.support_bound()) {
        const int k_hi = *support - std::max(a0, b0);
        for (int k = k_lo; k <= k_hi; ++k) {
            const Complex entry = init.entry(a0 + k, b0 + k);
            if (entry == Complex(0.0)) continue;
            add(entry * weight(k));
        }
        return acc;
    }

    double running_max = 0.0, last = 0.0;
    int consecutive_small = 0;
    for (int k = k_lo; k < k_lo + policy.max_series_depth; ++k) {
        const Complex entry = init.entry(a0 + k, b0 + k);
        const Complex term = entry * weight(k);
        add(term);
        last = std::abs(term);
        running_max = std::max(running_max, last);
        if (last <= policy.term_tolerance * running_max) {
            if (++consecutive_small >= 3) return acc;
        } else {
            consecutive_small = 0;
        }
    }
    if (last > policy.term_tolerance * running_max) {
        throw TruncationError("initial-state k-sum not converged after " +
                                  std::to_string(policy.max_series_depth) +
                                  " terms; last term magnitude " + std::to_string(last),
                              last);
    }
    return acc;
}

}  // namespace

Complex joint_element(const Envelopes& env, const InitialState& init, int n1, int m1, int n2,
                      int m2, const TruncationPolicy& policy) {
    policy.validate();
    if (n1 < 0 || m1 < 0 || n2 < 0 || m2 < 0) {
        throw std::invalid_argument("joint_element: indices must be non-negative");
    }

    const Complex pref = ipow(env.f1, n1) * ipow(std::conj(env.f1), m1) * ipow(env.f2, n2) *
                         ipow(std::conj(env.f2), m2);
    if (pref == Complex(0.0)) return 0.0;

    // 1 - |f|^2 is mathematically >= 0; roundoff can push it barely below.
    const double a_base = std::max(0.0, 1.0 - std::norm(env.f1));
    const double b_base = std::max(0.0, 1.0 - std::norm(env.f2));
    const int a0 = n1 + n2, b0 = m1 + m2;
    const bool small_indices = std::max({n1, m1, n2, m2}) <= kMaxDoubleFactorial;
    const double sqrt_nm =
        small_indices ? std::sqrt(factorial(n1)) * std::sqrt(factorial(m1)) *
                            std::sqrt(factorial(n2)) * std::sqrt(factorial(m2))
                      : 0.0;

    const Complex sum = initial_state_ksum(
        init, a0, b0, -std::min(n1, m2), policy, [&](int k) -> double {
            // sqrt((a0+k)!(b0+k)!) (n1+m2+k)! / [(m2+k)!(n1+k)! sqrt(n1!m1!n2!m2!)]
            //   * A^{m2+k} B^{n1+k}
            if (small_indices &&
                std::max({a0 + k, b0 + k, n1 + m2 + k}) <= kMaxDoubleFactorial) {
                double r = std::sqrt(factorial(a0 + k)) / factorial(n1 + k);
                r *= std::sqrt(factorial(b0 + k)) / factorial(m2 + k);
                r *= factorial(n1 + m2 + k) / sqrt_nm;
                return r * std::pow(a_base, m2 + k) * std::pow(b_base, n1 + k);
            }
            const double log_nm = 0.5 * (log_factorial(n1) + log_factorial(m1) +
                                         log_factorial(n2) + log_factorial(m2));
            return std::exp(0.5 * (log_factorial(a0 + k) + log_factorial(b0 + k)) +
                            log_factorial(n1 + m2 + k) - log_factorial(m2 + k) -
                            log_factorial(n1 + k) + pow_log(a_base, m2 + k) +
                            pow_log(b_base, n1 + k) - log_nm);
        });
    return pref * sum;
}

Complex joint_element(const ModelParams& params, const InitialState& init, int n1, int m1,
                      int n2, int m2, double t, const TruncationPolicy& policy) {
    return joint_element(envelopes(params, t), init, n1, m1, n2, m2, policy);
}

DensityMatrix joint_density(const ModelParams& params, const InitialState& init, int cutoff1,
                            int cutoff2, double t, const TruncationPolicy& policy) {
    if (cutoff1 < 1 || cutoff2 < 1) {
        throw std::invalid_argument("joint_density: cutoffs must be >= 1");
    }
    const Envelopes env = envelopes(params, t);
    DensityMatrix rho({cutoff1, cutoff2});
    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        const int n1 = static_cast<int>(i) / cutoff2;
        const int n2 = static_cast<int>(i) % cutoff2;
        for (Eigen::Index j = 0; j <= i; ++j) {
            const int m1 = static_cast<int>(j) / cutoff2;
            const int m2 = static_cast<int>(j) % cutoff2;
            const Complex v = joint_element(env, init, n1, m1, n2, m2, policy);
            rho.matrix()(i, j) = v;
            rho.matrix()(j, i) = std::conj(v);
        }
    }
    rho.set_eps_trunc(std::max(0.0, 1.0 - rho.trace().real()));
    return rho;
}

DensityMatrix reduced_density(const ModelParams& params, const InitialState& init, int mode,
                              int cutoff, double t, const TruncationPolicy& policy) {
    policy.validate();
    if (mode != 1 && mode != 2) {
        throw std::invalid_argument("reduced_density: mode must be 1 or 2");
    }
    if (cutoff < 1) throw std::invalid_argument("reduced_density: cutoff must be >= 1");

    const Envelopes env = envelopes(params, t);
    const Complex f = (mode == 1) ? env.f1 : env.f2;
    const double c_base = std::max(0.0, 1.0 - std::norm(f));

    DensityMatrix rho({cutoff});
    for (int n = 0; n < cutoff; ++n) {
        for (int m = 0; m <= n; ++m) {
            const Complex pref = ipow(f, n) * ipow(std::conj(f), m);
            Complex v = 0.0;
            if (pref != Complex(0.0)) {
                const bool small_indices = std::max(n, m) <= kMaxDoubleFactorial;
                const double sqrt_nm =
                    small_indices ? std::sqrt(factorial(n)) * std::sqrt(factorial(m)) : 0.0;
                v = pref * initial_state_ksum(init, n, m, 0, policy, [&](int k) -> double {
                        // sqrt((n+k)!(m+k)!) / (k! sqrt(n!m!)) * C^k
                        if (small_indices && std::max(n, m) + k <= kMaxDoubleFactorial) {
                            return std::sqrt(factorial(n + k)) * std::sqrt(factorial(m + k)) /
                                   factorial(k) / sqrt_nm * std::pow(c_base, k);
                        }
                        return std::exp(0.5 * (log_factorial(n + k) + log_factorial(m + k) -
                                               log_factorial(n) - log_factorial(m)) -
                                        log_factorial(k) + pow_log(c_base, k));
                    });
            }
            rho.matrix()(n, m) = v;
            rho.matrix()(m, n) = std::conj(v);
        }
    }
    rho.set_eps_trunc(std::max(0.0, 1.0 - rho.trace().real()));
    return rho;
}

std::pair<Complex, Complex> coherent_amplitudes(const ModelParams& params, Complex alpha0,
                                                double t) {
    const Envelopes env = envelopes(params, t);
    return {env.f1 * alpha0, env.f2 * alpha0};
}

std::pair<double, double> thermal_betas(const ModelParams& params, double beta0, double t) {
    if (!(beta0 > 0.0)) throw std::invalid_argument("thermal_betas: beta0 must be > 0");
    const Envelopes env = envelopes(params, t);
    const double excess = std::expm1(beta0);  // e^beta0 - 1 > 0
    auto beta_of = [excess](double f_sq) {
        if (f_sq <= 0.0) return kInf;  // mode in vacuum, zero temperature
        return std::log1p(excess / f_sq);
    };
    return {beta_of(std::norm(env.f1)), beta_of(std::norm(env.f2))};
}

}  // namespace bosrec
