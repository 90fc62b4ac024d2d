#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "bosrec/density_matrix.hpp"
#include "bosrec/reconstruction.hpp"

namespace bosrec {

/// Physical parameters of the two bilinearly coupled damped oscillators.
/// The coupling g is stored complex for the master-equation integrator;
/// the closed-form solutions require real g >= 0 and reject anything else.
struct ModelParams {
    double omega1 = 1.0;
    double omega2 = 1.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    Complex g = 0.0;

    void validate() const;
    // Throws unless g is real and non-negative; returns it as a double.
    double real_coupling() const;
};

/// lambda_pm = (kappa1 +- kappa2)/4 + i (omega1 +- omega2)/2.
struct LambdaPair {
    Complex plus;
    Complex minus;
};

/// The envelope pair carrying the entire dynamical content of the
/// closed-form solution: f1 multiplies a1(0) in a1(t), f2 multiplies
/// a1(0) in a2(t). |f1|^2 + |f2|^2 <= 1, with equality for kappa = 0.
struct Envelopes {
    Complex f1;
    Complex f2;
    double t = 0.0;
};

LambdaPair lambdas(const ModelParams& params);

/// f1 = e^{-l+ t} [cosh(x t) - (l-/x) sinh(x t)],
/// f2 = -i g e^{-l+ t} sinh(x t)/x,  x = sqrt(l-^2 - g^2).
/// Near the exceptional point (|x| t < 1e-4) cosh and sinh/x switch to
/// their even Taylor series in (x t)^2, which removes the branch choice.
Envelopes envelopes(const ModelParams& params, double t);

/// Parameters with the roles of the two modes exchanged; the symmetric
/// solution for mode 2 reuses the same envelope formula on the swapped set.
ModelParams envelopes_mode2_swap(const ModelParams& params);

namespace detail {
/// Envelope evaluation with an explicitly flipped square-root branch;
/// exists so tests can verify the branch choice cancels.
Envelopes envelopes_branch(const ModelParams& params, double t, bool flip_root);
}  // namespace detail

/// Initial single-mode state of M1 (M2 and both baths start in vacuum).
class InitialState {
public:
    struct Coherent {
        Complex alpha0;
    };
    struct Thermal {
        double beta0;
    };

    static InitialState from_matrix(DensityMatrix rho);
    static InitialState coherent(Complex alpha0);
    static InitialState thermal(double beta0);

    bool is_matrix() const { return std::holds_alternative<DensityMatrix>(state_); }
    bool is_coherent() const { return std::holds_alternative<Coherent>(state_); }
    bool is_thermal() const { return std::holds_alternative<Thermal>(state_); }

    /// rho^(1)_{a,b}(0); out-of-support indices give zero.
    Complex entry(int a, int b) const;

    /// Largest populated Fock index for matrix states, nullopt otherwise.
    std::optional<int> support_bound() const { return support_; }

    const DensityMatrix& matrix() const { return std::get<DensityMatrix>(state_); }
    Complex alpha0() const { return std::get<Coherent>(state_).alpha0; }
    double beta0() const { return std::get<Thermal>(state_).beta0; }

private:
    InitialState() = default;
    std::variant<DensityMatrix, Coherent, Thermal> state_{Coherent{0.0}};
    std::optional<int> support_;
};

/// Joint two-mode density matrix element at time t,
///   rho_{n1,m1,n2,m2}(t) = f1^n1 f1*^m1 f2^n2 f2*^m2 / sqrt(n1!m1!n2!m2!)
///     * sum_{k >= -min(n1,m2)} rho^(1)_{n1+n2+k, m1+m2+k}(0)
///       * sqrt((n1+n2+k)!(m1+m2+k)!) (n1+m2+k)! / [(m2+k)!(n1+k)!]
///       * [1-|f1|^2]^{m2+k} [1-|f2|^2]^{n1+k},
/// with 0^0 = 1. The k-sum terminates at the support bound for matrix
/// initial states and is tolerance-truncated for coherent/thermal ones.
Complex joint_element(const ModelParams& params, const InitialState& init, int n1, int m1,
                      int n2, int m2, double t, const TruncationPolicy& policy = {});

/// Same, with the envelopes precomputed (one evaluation per time point).
Complex joint_element(const Envelopes& env, const InitialState& init, int n1, int m1, int n2,
                      int m2, const TruncationPolicy& policy = {});

/// Full joint matrix over the given cutoffs, Hermitian by mirroring.
DensityMatrix joint_density(const ModelParams& params, const InitialState& init, int cutoff1,
                            int cutoff2, double t, const TruncationPolicy& policy = {});

/// Reduced state of one mode from the closed form
///   rho^(j)_{n,m}(t) = f_j^n f_j*^m / sqrt(n!m!)
///     * sum_{k>=0} rho^(1)_{n+k,m+k}(0) sqrt((n+k)!(m+k)!)/k! [1-|f_j|^2]^k,
/// evaluated directly rather than by tracing the joint matrix.
DensityMatrix reduced_density(const ModelParams& params, const InitialState& init, int mode,
                              int cutoff, double t, const TruncationPolicy& policy = {});

/// A coherent initial state stays coherent: amplitudes (f1 a0, f2 a0).
std::pair<Complex, Complex> coherent_amplitudes(const ModelParams& params, Complex alpha0,
                                                double t);

/// A thermal initial state stays thermal with scaled inverse temperatures
/// beta_j(t) = ln[(|f_j|^2 + e^{beta0} - 1)/|f_j|^2]; +infinity (vacuum)
/// when f_j = 0.
std::pair<double, double> thermal_betas(const ModelParams& params, double beta0, double t);

}  // namespace bosrec
