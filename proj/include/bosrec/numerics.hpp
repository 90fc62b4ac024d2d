#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace bosrec {

/// base^e for non-negative integer e, with the 0^0 = 1 convention the
/// closed forms rely on at t = 0.
inline std::complex<double> ipow(std::complex<double> base, int e) {
    std::complex<double> r = 1.0;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

/// Precomputed table of ln(n!), accumulated in extended precision.
/// Every factorial-heavy sum in the library goes through this table so
/// that ratios like (k+l+q)!/[k!l!(k+q)!(l+q)!] can be formed in log
/// space without overflow.
class LogFactorialTable {
public:
    static constexpr int kDefaultSize = 512;

    explicit LogFactorialTable(int n_max = kDefaultSize);

    // ln(n!); throws std::out_of_range naming the required table size.
    double operator()(int n) const;

    int max_index() const { return static_cast<int>(values_.size()) - 1; }

private:
    std::vector<double> values_;
};

/// ln(n!) from a shared immutable table of size LogFactorialTable::kDefaultSize.
double log_factorial(int n);

/// Largest n for which n! is representable as a double.
constexpr int kMaxDoubleFactorial = 170;

/// n! as a double, correctly rounded from extended precision; n <= 170.
/// Factorial ratios assembled from these lose only a few ulp, unlike
/// exp(log) round trips whose error grows with the log magnitude.
double factorial(int n);

namespace detail {

/// Largest n served by the extended-precision factorial table.
constexpr int kMaxExtendedFactorial = 512;

/// n! in extended precision for the internal series evaluations; the
/// alternating reconstruction sums cancel by many orders of magnitude,
/// so their terms are formed and accumulated beyond double precision.
long double factorial_ext(int n);

}  // namespace detail

/// Exact fraction with canonical (gcd-reduced, positive-denominator) form.
/// Sized for the Vandermonde check: numerators/denominators stay within
/// 64 bits for factorial arguments up to 20; intermediates use 128 bits.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d);

    Rational& operator+=(const Rational& other);
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
};

/// Both sides of the convolution identity
///   sum_{c=0..d} 1/[c!(d-c)!(b-c)!(a-d-(b-c))!] = a!/[b!d!(a-b)!(a-d)!]
/// evaluated in exact rational arithmetic. Terms whose factorial argument
/// is negative count as zero. Returned as (lhs, rhs) for equality testing.
std::pair<Rational, Rational> vandermonde_check(int a, int b, int d);

/// (n+q)!(m+q)!/[q!(n+m+q)!] for non-negative integers, evaluated in log
/// space. This is the closed form of the terminating series
/// 2F1(-m,-n;-n-m-q;1) used to collapse the projector double sums.
double hyp2f1_negint(int m, int n, int q);

struct SignedLogTerm {
    int sign;              // +1 or -1
    double log_magnitude;  // -inf encodes an exactly-zero term
};

/// sum_i sign_i * exp(log_magnitude_i), computed with a max-shift and
/// compensated accumulation. Empty input gives exactly zero.
double signed_logsum(std::span<const SignedLogTerm> terms);

}  // namespace bosrec
