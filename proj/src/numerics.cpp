#include "bosrec/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bosrec {

LogFactorialTable::LogFactorialTable(int n_max) {
    if (n_max < 0) {
        throw std::invalid_argument("LogFactorialTable: size must be non-negative");
    }
    values_.resize(static_cast<std::size_t>(n_max) + 1);
    long double acc = 0.0L;
    values_[0] = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        acc += std::log(static_cast<long double>(n));
        values_[static_cast<std::size_t>(n)] = static_cast<double>(acc);
    }
}

double LogFactorialTable::operator()(int n) const {
    if (n < 0) {
        throw std::invalid_argument("log_factorial: negative argument " + std::to_string(n));
    }
    if (n >= static_cast<int>(values_.size())) {
        throw std::out_of_range(
            "log_factorial: n=" + std::to_string(n) + " exceeds table size " +
            std::to_string(values_.size() - 1) + "; construct a LogFactorialTable of at least " +
            std::to_string(n));
    }
    return values_[static_cast<std::size_t>(n)];
}

double log_factorial(int n) {
    static const LogFactorialTable table;
    return table(n);
}

double factorial(int n) {
    static const std::vector<double> table = [] {
        std::vector<double> t(kMaxDoubleFactorial + 1);
        long double acc = 1.0L;
        t[0] = 1.0;
        for (int i = 1; i <= kMaxDoubleFactorial; ++i) {
            acc *= i;
            t[static_cast<std::size_t>(i)] = static_cast<double>(acc);
        }
        return t;
    }();
    if (n < 0) {
        throw std::invalid_argument("factorial: negative argument " + std::to_string(n));
    }
    if (n > kMaxDoubleFactorial) {
        throw std::out_of_range("factorial: " + std::to_string(n) +
                                "! exceeds the double range; use log_factorial");
    }
    return table[static_cast<std::size_t>(n)];
}

long double detail::factorial_ext(int n) {
    static const std::vector<long double> table = [] {
        std::vector<long double> t(detail::kMaxExtendedFactorial + 1);
        long double acc = 1.0L;
        t[0] = 1.0L;
        for (int i = 1; i <= detail::kMaxExtendedFactorial; ++i) {
            acc *= i;
            t[static_cast<std::size_t>(i)] = acc;
        }
        return t;
    }();
    if (n < 0 || n > detail::kMaxExtendedFactorial) {
        throw std::out_of_range("factorial_ext: argument " + std::to_string(n) +
                                " outside table range");
    }
    return table[static_cast<std::size_t>(n)];
}

namespace {

std::int64_t checked_narrow(__int128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min()) {
        throw std::overflow_error(std::string("Rational: overflow in ") + what);
    }
    return static_cast<std::int64_t>(v);
}

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

// n! as a 64-bit integer; valid for n <= 20.
std::int64_t factorial_i64(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (den == 0) throw std::invalid_argument("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
}

Rational& Rational::operator+=(const Rational& other) {
    // lcm-based addition keeps the common denominator minimal.
    const __int128 g = gcd128(den, other.den);
    const __int128 lcm = (__int128)den / g * other.den;
    __int128 n = (__int128)num * (lcm / den) + (__int128)other.num * (lcm / other.den);
    const __int128 g2 = gcd128(n, lcm);
    if (g2 > 1) {
        n /= g2;
        num = checked_narrow(n, "numerator");
        den = checked_narrow(lcm / g2, "denominator");
    } else {
        num = checked_narrow(n, "numerator");
        den = checked_narrow(lcm, "denominator");
    }
    return *this;
}

std::pair<Rational, Rational> vandermonde_check(int a, int b, int d) {
    if (a < 0 || b < 0 || d < 0) {
        throw std::invalid_argument("vandermonde_check: arguments must be non-negative");
    }
    if (a > 20) {
        throw std::invalid_argument("vandermonde_check: a must be <= 20 for exact 64-bit arithmetic");
    }
    if (d > a || b > a) {
        throw std::invalid_argument("vandermonde_check: requires b <= a and d <= a");
    }

    // Each term 1/[c!(d-c)!(b-c)!(a-d-(b-c))!] is a multinomial coefficient
    // divided by a!, so the sum is assembled over the common denominator a!.
    const std::int64_t a_fact = factorial_i64(a);
    Rational lhs(0, 1);
    for (int c = 0; c <= d; ++c) {
        const int e1 = c, e2 = d - c, e3 = b - c, e4 = a - d - (b - c);
        if (e2 < 0 || e3 < 0 || e4 < 0) continue;  // zero by convention
        std::int64_t denom = factorial_i64(e1) * factorial_i64(e2);
        denom *= factorial_i64(e3);
        // e1+e2+e3+e4 == a, so a!/(e1!e2!e3!e4!) is an exact integer.
        std::int64_t multinomial = a_fact / denom / factorial_i64(e4);
        lhs += Rational(multinomial, a_fact);
    }

    // rhs = a!/[b!d!(a-b)!(a-d)!] = C(a,b)*C(a,d)/a!
    const std::int64_t cab = a_fact / factorial_i64(b) / factorial_i64(a - b);
    const std::int64_t cad = a_fact / factorial_i64(d) / factorial_i64(a - d);
    Rational rhs(checked_narrow((__int128)cab * cad, "rhs numerator"), a_fact);

    return {lhs, rhs};
}

double hyp2f1_negint(int m, int n, int q) {
    if (m < 0 || n < 0 || q < 0) {
        throw std::invalid_argument("hyp2f1_negint: arguments must be non-negative");
    }
    return std::exp(log_factorial(n + q) + log_factorial(m + q) - log_factorial(q) -
                    log_factorial(n + m + q));
}

double signed_logsum(std::span<const SignedLogTerm> terms) {
    if (terms.empty()) return 0.0;
    double shift = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) shift = std::max(shift, t.log_magnitude);
    if (!(shift > -std::numeric_limits<double>::infinity())) return 0.0;

    // Kahan accumulation of the shifted terms.
    double sum = 0.0, comp = 0.0;
    for (const auto& t : terms) {
        const double v = static_cast<double>(t.sign) * std::exp(t.log_magnitude - shift);
        const double y = v - comp;
        const double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum * std::exp(shift);
}

}  // namespace bosrec
