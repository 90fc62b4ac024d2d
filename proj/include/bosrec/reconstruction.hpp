#pragma once

#include <stdexcept>
#include <string>

#include "bosrec/density_matrix.hpp"
#include "bosrec/moment_provider.hpp"
#include "bosrec/multi_index.hpp"

namespace bosrec {

/// Controls the truncation of the infinite q-sums when the moment
/// provider has unbounded support. Bounded providers terminate exactly
/// and never consult these limits.
struct TruncationPolicy {
    int max_series_depth = 64;
    double term_tolerance = 1e-14;

    void validate() const {
        if (max_series_depth < 1) {
            throw std::invalid_argument("TruncationPolicy: max_series_depth must be >= 1");
        }
        if (!(term_tolerance > 0.0)) {
            throw std::invalid_argument("TruncationPolicy: term_tolerance must be > 0");
        }
    }
};

/// A series was cut off while its terms were still above tolerance, or an
/// integration drifted beyond its accuracy budget.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& msg, double last_term)
        : std::runtime_error(msg), last_term_(last_term) {}

    double last_term_magnitude() const { return last_term_; }

private:
    double last_term_;
};

/// Per-element accumulation diagnostics. The alternating factorial sums
/// can cancel almost completely; ratio well below one means the result
/// carries few significant digits.
struct ElementDiagnostics {
    double peak_magnitude = 0.0;  // largest partial-sum magnitude seen
    double result_magnitude = 0.0;

    bool cancellation_dominated() const {
        return peak_magnitude > 0.0 && result_magnitude < 1e-10 * peak_magnitude;
    }
};

/// Expansion coefficient <c_{k1,l1,...}> of the density operator in
/// normally-ordered products: for each mode the alternating series
///   sum_q (-1)^q (k+l+q)!/[k! l! (k+q)! (l+q)!] <(a^dag)^{l+q} a^{k+q}>,
/// with the multi-mode sum taken jointly over the provider's moments.
/// For a provider with finite support S the q-range is exactly
/// [-min(k,l), S - max(k,l)] per mode; otherwise the policy truncates.
Complex moment_coefficient(const MultiIndex& k, const MultiIndex& l,
                           const MomentProvider& provider, const TruncationPolicy& policy,
                           ElementDiagnostics* diag = nullptr);

/// Density matrix element in the number basis,
///   rho_{n,m} = sum_{k <= min(n,m)} prod_j sqrt(n_j! m_j!)/k_j!
///               * <c_{n-k, m-k}>.
Complex density_matrix_element(const MultiIndex& n, const MultiIndex& m,
                               const MomentProvider& provider, const TruncationPolicy& policy,
                               ElementDiagnostics* diag = nullptr);

/// Full reconstruction over the given cutoffs. Only the lexicographic
/// upper triangle is computed; the rest is mirrored by conjugation, so
/// the output is Hermitian by construction. eps_trunc records 1 - trace.
/// Elements whose accumulation was cancellation-dominated are flagged on
/// the returned matrix.
DensityMatrix reconstruct(const MomentProvider& provider, const MultiIndex& cutoffs,
                          const TruncationPolicy& policy = {});

/// Coefficient of (a^dag)^{k+s} a^{l+s} in the expansion of the
/// projector |k><l|: (-1)^s / (s! sqrt(k! l!)). Used by the test suite
/// to cross-validate moment_coefficient on single modes.
double projector_expansion_coefficient(int k, int l, int s);

}  // namespace bosrec
