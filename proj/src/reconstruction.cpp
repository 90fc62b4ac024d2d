#include "bosrec/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "bosrec/numerics.hpp"

namespace bosrec {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct SeriesTerm {
    int sign;           // sign of the combinatorial coefficient
    long double coeff;  // coefficient magnitude in extended precision
    Complex moment;     // provider moment attached to this term
};

// Compensated reduction of the alternating series in extended precision,
// with signs tracked explicitly. The largest partial-sum magnitude is
// recorded in emission order for the cancellation diagnostic.
Complex reduce_series(const std::vector<SeriesTerm>& terms, ElementDiagnostics* diag) {
    long double re_sum = 0.0L, re_comp = 0.0L, im_sum = 0.0L, im_comp = 0.0L;
    long double peak = 0.0L;
    auto add = [](long double& sum, long double& comp, long double v) {
        const long double y = v - comp;
        const long double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    };
    for (const auto& t : terms) {
        const long double signed_coeff = t.sign * t.coeff;
        add(re_sum, re_comp, signed_coeff * static_cast<long double>(t.moment.real()));
        add(im_sum, im_comp, signed_coeff * static_cast<long double>(t.moment.imag()));
        if (diag != nullptr) {
            peak = std::max(peak, sqrtl(re_sum * re_sum + im_sum * im_sum));
        }
    }
    const Complex result(static_cast<double>(re_sum), static_cast<double>(im_sum));
    if (diag != nullptr) {
        diag->peak_magnitude = static_cast<double>(peak);
        diag->result_magnitude = std::abs(result);
    }
    return result;
}

// (k+l+q)-style factorial ratio factors in extended precision; falls back
// to the log table (which enforces the configured size limit) beyond it.
long double ext_factorial_or_throw(int n) {
    if (n <= detail::kMaxExtendedFactorial) return detail::factorial_ext(n);
    return expl(static_cast<long double>(log_factorial(n)));
}

}  // namespace

Complex moment_coefficient(const MultiIndex& k, const MultiIndex& l,
                           const MomentProvider& provider, const TruncationPolicy& policy,
                           ElementDiagnostics* diag) {
    policy.validate();
    const int modes = provider.mode_count();
    if (k.modes() != modes || l.modes() != modes) {
        throw std::invalid_argument("moment_coefficient: mode count mismatch with provider");
    }

    std::vector<int> qmin(static_cast<std::size_t>(modes));
    for (int j = 0; j < modes; ++j) qmin[static_cast<std::size_t>(j)] = -std::min(k[j], l[j]);

    // Per-mode series coefficient (-1)^q (k+l+q)!/[k! l! (k+q)! (l+q)!],
    // assembled from extended-precision factorial ratios; the sequential
    // divisions keep every intermediate below the largest single factorial.
    auto mode_coeff = [&](int j, int q, int& sign, long double& value) {
        sign = (q % 2 != 0) ? -1 : 1;
        long double r = ext_factorial_or_throw(k[j] + l[j] + q);
        r /= ext_factorial_or_throw(k[j] + q);
        r /= ext_factorial_or_throw(l[j] + q);
        r /= ext_factorial_or_throw(k[j]);
        r /= ext_factorial_or_throw(l[j]);
        value = r;
    };

    auto emit = [&](const std::vector<int>& q, std::vector<SeriesTerm>& out) -> double {
        int sign = 1;
        long double coeff = 1.0L;
        std::vector<int> u(static_cast<std::size_t>(modes)), v(static_cast<std::size_t>(modes));
        for (int j = 0; j < modes; ++j) {
            int s;
            long double c;
            mode_coeff(j, q[static_cast<std::size_t>(j)], s, c);
            sign *= s;
            coeff *= c;
            u[static_cast<std::size_t>(j)] = l[j] + q[static_cast<std::size_t>(j)];
            v[static_cast<std::size_t>(j)] = k[j] + q[static_cast<std::size_t>(j)];
        }
        const Complex m = provider.moment(MultiIndex(std::move(u)), MultiIndex(std::move(v)));
        const double magnitude = static_cast<double>(coeff * std::abs(m));
        if (!std::isfinite(magnitude)) {
            throw TruncationError("moment_coefficient: series term overflow",
                                  static_cast<double>(coeff));
        }
        out.push_back({sign, coeff, m});
        return magnitude;
    };

    std::vector<SeriesTerm> terms;

    const auto support = provider.support_bound();
    if (support) {
        // Moments vanish beyond the support, so the sum terminates exactly.
        std::vector<int> qmax(static_cast<std::size_t>(modes));
        for (int j = 0; j < modes; ++j) {
            qmax[static_cast<std::size_t>(j)] = *support - std::max(k[j], l[j]);
        }
        for_each_in_box(qmin, qmax, [&](const std::vector<int>& q) { emit(q, terms); });
        return reduce_series(terms, diag);
    }

    // Unbounded support: walk shells of constant total offset from the
    // lower corner and stop once three consecutive shells fall below
    // tolerance relative to the largest term seen.
    double running_max = 0.0;
    double last_peak = 0.0;
    int consecutive_small = 0;
    bool converged = false;
    for (int shell = 0; shell < policy.max_series_depth; ++shell) {
        double shell_peak = 0.0;
        std::vector<int> q(qmin);
        // Enumerate all offsets of total weight `shell` over the modes.
        std::vector<int> offset(static_cast<std::size_t>(modes), 0);
        offset[0] = shell;
        while (true) {
            for (int j = 0; j < modes; ++j) {
                q[static_cast<std::size_t>(j)] =
                    qmin[static_cast<std::size_t>(j)] + offset[static_cast<std::size_t>(j)];
            }
            shell_peak = std::max(shell_peak, emit(q, terms));
            // next composition of `shell` into `modes` parts
            if (modes == 1) break;
            int j = 0;
            while (j < modes - 1 && offset[static_cast<std::size_t>(j)] == 0) ++j;
            if (j == modes - 1) break;
            --offset[static_cast<std::size_t>(j)];
            offset[static_cast<std::size_t>(j + 1)] += 1;
            if (j > 0) {
                offset[0] = offset[static_cast<std::size_t>(j)];
                offset[static_cast<std::size_t>(j)] = 0;
            }
        }
        last_peak = shell_peak;
        running_max = std::max(running_max, shell_peak);
        if (shell_peak <= policy.term_tolerance * running_max) {
            if (++consecutive_small >= 3) {
                converged = true;
                break;
            }
        } else {
            consecutive_small = 0;
        }
    }
    if (!converged && last_peak > policy.term_tolerance * running_max) {
        throw TruncationError(
            "moment_coefficient: series not converged after " +
                std::to_string(policy.max_series_depth) +
                " shells; last term magnitude " + std::to_string(last_peak),
            last_peak);
    }
    return reduce_series(terms, diag);
}

Complex density_matrix_element(const MultiIndex& n, const MultiIndex& m,
                               const MomentProvider& provider, const TruncationPolicy& policy,
                               ElementDiagnostics* diag) {
    const int modes = provider.mode_count();
    if (n.modes() != modes || m.modes() != modes) {
        throw std::invalid_argument("density_matrix_element: mode count mismatch with provider");
    }

    std::vector<int> lo(static_cast<std::size_t>(modes), 0);
    std::vector<int> hi(static_cast<std::size_t>(modes));
    bool fits_double = true;
    double sqrt_nm = 1.0, log_nm = 0.0;
    for (int j = 0; j < modes; ++j) {
        hi[static_cast<std::size_t>(j)] = std::min(n[j], m[j]);
        log_nm += 0.5 * (log_factorial(n[j]) + log_factorial(m[j]));
        if (n[j] > kMaxDoubleFactorial || m[j] > kMaxDoubleFactorial) {
            fits_double = false;
        } else {
            sqrt_nm *= std::sqrt(factorial(n[j])) * std::sqrt(factorial(m[j]));
        }
    }

    Complex acc = 0.0;
    Complex comp = 0.0;
    double peak = 0.0;
    for_each_in_box(lo, hi, [&](const std::vector<int>& kk) {
        double w;
        std::vector<int> ck(static_cast<std::size_t>(modes)), cl(static_cast<std::size_t>(modes));
        if (fits_double && std::isfinite(sqrt_nm)) {
            w = sqrt_nm;
            for (int j = 0; j < modes; ++j) w /= factorial(kk[static_cast<std::size_t>(j)]);
        } else {
            double log_w = log_nm;
            for (int j = 0; j < modes; ++j) {
                log_w -= log_factorial(kk[static_cast<std::size_t>(j)]);
            }
            w = std::exp(log_w);
        }
        for (int j = 0; j < modes; ++j) {
            ck[static_cast<std::size_t>(j)] = n[j] - kk[static_cast<std::size_t>(j)];
            cl[static_cast<std::size_t>(j)] = m[j] - kk[static_cast<std::size_t>(j)];
        }
        ElementDiagnostics cdiag;
        const Complex c = moment_coefficient(MultiIndex(std::move(ck)), MultiIndex(std::move(cl)),
                                             provider, policy, diag ? &cdiag : nullptr);
        const Complex term = w * c;
        const Complex y = term - comp;
        const Complex s = acc + y;
        comp = (s - acc) - y;
        acc = s;
        if (diag != nullptr) {
            peak = std::max({peak, w * cdiag.peak_magnitude, std::abs(acc)});
        }
    });
    if (diag != nullptr) {
        diag->peak_magnitude = peak;
        diag->result_magnitude = std::abs(acc);
    }
    return acc;
}

DensityMatrix reconstruct(const MomentProvider& provider, const MultiIndex& cutoffs,
                          const TruncationPolicy& policy) {
    policy.validate();
    if (cutoffs.modes() != provider.mode_count()) {
        throw std::invalid_argument("reconstruct: cutoff mode count mismatch with provider");
    }
    for (int j = 0; j < cutoffs.modes(); ++j) {
        if (cutoffs[j] < 1) throw std::invalid_argument("reconstruct: cutoffs must be >= 1");
    }

    DensityMatrix rho(cutoffs.values());
    const MemoizedMomentProvider memo(provider);

    for (Eigen::Index i = 0; i < rho.dim(); ++i) {
        const MultiIndex n = rho.unflatten(i);
        for (Eigen::Index j = 0; j <= i; ++j) {
            const MultiIndex m = rho.unflatten(j);
            ElementDiagnostics diag;
            const Complex v = density_matrix_element(n, m, memo, policy, &diag);
            rho.matrix()(i, j) = v;
            rho.matrix()(j, i) = std::conj(v);
            if (diag.cancellation_dominated()) {
                rho.flag_cancellation(n, m);
            }
        }
    }
    rho.set_eps_trunc(std::max(0.0, 1.0 - rho.trace().real()));
    return rho;
}

double projector_expansion_coefficient(int k, int l, int s) {
    if (k < 0 || l < 0 || s < 0) {
        throw std::invalid_argument("projector_expansion_coefficient: negative argument");
    }
    const double sign = (s % 2 != 0) ? -1.0 : 1.0;
    return sign * std::exp(-log_factorial(s) - 0.5 * (log_factorial(k) + log_factorial(l)));
}

}  // namespace bosrec
