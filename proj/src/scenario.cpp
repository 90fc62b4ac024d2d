#include "bosrec/scenario.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <memory>
#include <mutex>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bosrec/numerics.hpp"
#include "bosrec/states.hpp"

namespace bosrec {

int thread_budget() {
    int budget = static_cast<int>(std::thread::hardware_concurrency());
    if (budget < 1) budget = 1;
    if (const char* env = std::getenv("BOSREC_THREADS")) {
        const int requested = std::atoi(env);
        if (requested >= 1) budget = std::min(budget, requested);
    }
    return budget;
}

namespace {

// Chunked parallel loop; results must be written to index-addressed
// slots so assembly order does not depend on scheduling. The first
// worker exception is rethrown on the caller thread.
template <typename Fn>
void parallel_for_index(std::size_t n, Fn&& fn) {
    const int threads = std::min<std::size_t>(thread_budget(), n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&, w]() {
            try {
                for (std::size_t i = static_cast<std::size_t>(w); i < n;
                     i += static_cast<std::size_t>(threads)) {
                    fn(i);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct OutputRequest {
    bool population = false;
    bool purity = false;
    bool trace = false;
    bool coherent_amplitudes = false;
    bool thermal_betas = false;
    bool envelopes = false;
    std::vector<std::array<int, 4>> joint_elements;
    std::vector<std::array<int, 3>> reduced_elements;  // {mode, n, m}
};

std::vector<int> parse_index_list(const std::string& spec, std::size_t count,
                                  const std::string& token) {
    std::vector<int> out;
    std::string cur;
    for (char ch : spec + ",") {
        if (ch == ',') {
            try {
                std::size_t pos = 0;
                out.push_back(std::stoi(cur, &pos));
                if (pos != cur.size() || out.back() < 0) throw std::invalid_argument(cur);
            } catch (const std::exception&) {
                throw ConfigError("config: outputs token '" + token + "' has a bad index");
            }
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (out.size() != count) {
        throw ConfigError("config: outputs token '" + token + "' expects " +
                          std::to_string(count) + " indices");
    }
    return out;
}

OutputRequest parse_outputs(const ScenarioConfig& cfg) {
    OutputRequest req;
    std::vector<std::string> tokens = cfg.outputs;
    if (tokens.empty()) tokens = {"population", "trace"};
    for (const auto& tok : tokens) {
        if (tok == "population") {
            req.population = true;
        } else if (tok == "purity") {
            req.purity = true;
        } else if (tok == "trace") {
            req.trace = true;
        } else if (tok == "coherent_amplitudes") {
            if (cfg.init_kind != ScenarioConfig::InitKind::Coherent) {
                throw ConfigError(
                    "config: outputs coherent_amplitudes requires initial.kind = coherent");
            }
            req.coherent_amplitudes = true;
        } else if (tok == "thermal_betas") {
            if (cfg.init_kind != ScenarioConfig::InitKind::Thermal) {
                throw ConfigError(
                    "config: outputs thermal_betas requires initial.kind = thermal");
            }
            req.thermal_betas = true;
        } else if (tok == "envelopes") {
            req.envelopes = true;
        } else if (tok.rfind("element:", 0) == 0) {
            const auto idx = parse_index_list(tok.substr(8), 4, tok);
            req.joint_elements.push_back({idx[0], idx[1], idx[2], idx[3]});
        } else if (tok.rfind("reduced1:", 0) == 0 || tok.rfind("reduced2:", 0) == 0) {
            const int mode = (tok[7] == '1') ? 1 : 2;
            const auto idx = parse_index_list(tok.substr(9), 2, tok);
            req.reduced_elements.push_back({mode, idx[0], idx[1]});
        } else {
            throw ConfigError("config: unknown outputs token '" + tok + "'");
        }
    }
    return req;
}

std::pair<int, int> two_mode_cutoffs(const ScenarioConfig& cfg) {
    if (cfg.cutoffs.size() == 1) return {cfg.cutoffs[0], cfg.cutoffs[0]};
    return {cfg.cutoffs[0], cfg.cutoffs[1]};
}

void sort_records(std::vector<ObservableRecord>& records) {
    std::stable_sort(records.begin(), records.end(),
                     [](const ObservableRecord& a, const ObservableRecord& b) {
                         if (a.time_index != b.time_index) return a.time_index < b.time_index;
                         if (a.observable != b.observable) return a.observable < b.observable;
                         return a.index < b.index;
                     });
}

/// Initial state of M1 as an explicit matrix in a dim-sized basis, for
/// the oracle and for fidelity targets.
DensityMatrix initial_matrix(const ScenarioConfig& cfg, int dim) {
    switch (cfg.init_kind) {
        case ScenarioConfig::InitKind::Vacuum:
            return fock_state(0, dim);
        case ScenarioConfig::InitKind::Fock:
            if (cfg.fock_n >= dim) {
                throw ConfigError("config: initial.n does not fit the requested dimension");
            }
            return fock_state(cfg.fock_n, dim);
        case ScenarioConfig::InitKind::Coherent:
            return coherent_state(cfg.alpha, dim);
        case ScenarioConfig::InitKind::Thermal:
            return thermal_state(cfg.beta, dim);
        case ScenarioConfig::InitKind::Matrix: {
            const DensityMatrix loaded = cfg.initial_state().matrix();
            if (loaded.dim() > dim) {
                throw ConfigError("config: initial matrix exceeds the requested dimension");
            }
            DensityMatrix out({dim});
            out.matrix().topLeftCorner(loaded.dim(), loaded.dim()) = loaded.matrix();
            return out;
        }
    }
    throw ConfigError("config: invalid initial.kind");
}

}  // namespace

EvolveResult run_evolve(const ScenarioConfig& cfg) {
    const OutputRequest req = parse_outputs(cfg);
    const auto [c1, c2] = two_mode_cutoffs(cfg);
    const InitialState init = cfg.initial_state();
    const std::vector<double> times = cfg.time_grid();

    EvolveResult result;
    result.times = times;
    result.states.resize(times.size());
    std::vector<std::vector<ObservableRecord>> per_time(times.size());

    parallel_for_index(times.size(), [&](std::size_t i) {
        const double t = times[i];
        try {
            const Envelopes env = envelopes(cfg.params, t);
            const DensityMatrix joint = joint_density(cfg.params, init, c1, c2, t, cfg.policy);
            const DensityMatrix red1 = reduced_density(cfg.params, init, 1, c1, t, cfg.policy);
            const DensityMatrix red2 = reduced_density(cfg.params, init, 2, c2, t, cfg.policy);

            auto& recs = per_time[i];
            auto add = [&](std::string name, std::vector<int> index, Complex value) {
                recs.push_back({static_cast<int>(i), t, std::move(name), std::move(index), value});
            };

            if (req.population) {
                for (int n = 0; n < c1; ++n) add("population", {1, n}, red1.matrix()(n, n).real());
                for (int n = 0; n < c2; ++n) add("population", {2, n}, red2.matrix()(n, n).real());
            }
            if (req.purity) {
                add("purity", {1}, purity(red1));
                add("purity", {2}, purity(red2));
            }
            if (req.trace) add("trace", {}, joint.trace());
            if (req.envelopes) {
                add("envelope", {1}, env.f1);
                add("envelope", {2}, env.f2);
            }
            if (req.coherent_amplitudes) {
                const auto [a1, a2] = coherent_amplitudes(cfg.params, cfg.alpha, t);
                add("coherent_amplitude", {1}, a1);
                add("coherent_amplitude", {2}, a2);
            }
            if (req.thermal_betas) {
                const auto [b1, b2] = thermal_betas(cfg.params, cfg.beta, t);
                add("thermal_beta", {1}, b1);
                add("thermal_beta", {2}, b2);
            }
            for (const auto& e : req.joint_elements) {
                add("element", {e[0], e[1], e[2], e[3]},
                    joint_element(env, init, e[0], e[1], e[2], e[3], cfg.policy));
            }
            for (const auto& e : req.reduced_elements) {
                const int cut = (e[0] == 1) ? c1 : c2;
                if (e[1] >= cut || e[2] >= cut) {
                    throw ConfigError("config: reduced element index exceeds cutoffs");
                }
                const DensityMatrix& red = (e[0] == 1) ? red1 : red2;
                add("reduced_element", {e[0], e[1], e[2]}, red.matrix()(e[1], e[2]));
            }
            result.states[i] = joint;
        } catch (const TruncationError& te) {
            throw TruncationError("t=" + std::to_string(t) + ": " + te.what(),
                                  te.last_term_magnitude());
        }
    });

    for (auto& recs : per_time) {
        result.records.insert(result.records.end(), recs.begin(), recs.end());
    }
    sort_records(result.records);
    return result;
}

CompareResult run_compare(const ScenarioConfig& cfg) {
    if (!cfg.oracle) {
        throw ConfigError("config: compare requires oracle.dims and oracle.dt");
    }
    const auto [c1, c2] = two_mode_cutoffs(cfg);
    const int d1 = cfg.oracle->dims[0];
    const int d2 = cfg.oracle->dims[1];
    const InitialState init = cfg.initial_state();
    const std::vector<double> times = cfg.time_grid();

    // Closed-form states, evaluated in parallel.
    std::vector<DensityMatrix> closed(times.size());
    parallel_for_index(times.size(), [&](std::size_t i) {
        try {
            closed[i] = joint_density(cfg.params, init, c1, c2, times[i], cfg.policy);
        } catch (const TruncationError& te) {
            throw TruncationError("t=" + std::to_string(times[i]) + ": " + te.what(),
                                  te.last_term_magnitude());
        }
    });

    // Master-equation trajectory on the same grid.
    const auto [h, jumps] = build_system(cfg.params, d1, d2);
    const DensityMatrix rho0 = tensor_product(initial_matrix(cfg, d1), fock_state(0, d2));
    const Trajectory traj = integrate(h, jumps, rho0, times, cfg.oracle->dt);

    CompareResult result;
    result.times = times;
    result.tolerance = cfg.compare_tolerance;
    const int b1 = std::min(c1, d1);
    const int b2 = std::min(c2, d2);
    for (std::size_t i = 0; i < times.size(); ++i) {
        double dev = 0.0;
        for (int n1 = 0; n1 < b1; ++n1) {
            for (int n2 = 0; n2 < b2; ++n2) {
                for (int m1 = 0; m1 < b1; ++m1) {
                    for (int m2 = 0; m2 < b2; ++m2) {
                        const Complex a = closed[i].matrix()(n1 * c2 + n2, m1 * c2 + m2);
                        const Complex b = traj.states[i].matrix()(n1 * d2 + n2, m1 * d2 + m2);
                        dev = std::max(dev, std::abs(a - b));
                    }
                }
            }
        }
        result.max_element_deviation.push_back(dev);
        result.trace_deviation.push_back(
            std::abs(closed[i].trace().real() - traj.states[i].trace().real()));
        result.worst_deviation = std::max(result.worst_deviation, dev);
    }
    result.pass = result.worst_deviation <= result.tolerance;
    return result;
}

SwapDemoResult run_swap_demo(const ScenarioConfig& cfg) {
    if (cfg.params.kappa1 != 0.0 || cfg.params.kappa2 != 0.0) {
        throw ConfigError("swap-demo requires kappa1 = kappa2 = 0 (lossless swap)");
    }
    if (cfg.params.omega1 != cfg.params.omega2) {
        throw ConfigError("swap-demo requires omega1 = omega2 (resonant swap)");
    }
    const double g = cfg.params.real_coupling();
    if (!(g > 0.0)) throw ConfigError("swap-demo requires coupling g > 0");

    const auto [c1, c2] = two_mode_cutoffs(cfg);
    const InitialState init = cfg.initial_state();
    const double t_swap = std::acos(-1.0) / (2.0 * g);

    const DensityMatrix red1 = reduced_density(cfg.params, init, 1, c1, t_swap, cfg.policy);
    const DensityMatrix red2 = reduced_density(cfg.params, init, 2, c2, t_swap, cfg.policy);

    // Swap target: rho2_{n,m}(t*) = rho1_{n,m}(0) (-i)^n (i)^m e^{-iw(n-m)t*},
    // i.e. the initial state conjugated by the diagonal unitary (-i e^{-iwt*})^n.
    DensityMatrix target = initial_matrix(cfg, c2);
    const Complex phase = Complex(0.0, -1.0) * std::exp(Complex(0.0, -cfg.params.omega1 * t_swap));
    Eigen::VectorXcd u(c2);
    for (int n = 0; n < c2; ++n) u(n) = ipow(phase, n);
    target.matrix() = u.asDiagonal() * target.matrix() * u.asDiagonal().inverse();

    SwapDemoResult result;
    result.t_swap = t_swap;
    result.mode2_fidelity = fidelity(red2, target);
    result.mode1_vacuum_deviation =
        (red1.matrix() - fock_state(0, c1).matrix()).cwiseAbs().maxCoeff();
    result.records.push_back({0, t_swap, "fidelity", {2}, result.mode2_fidelity});
    result.records.push_back({0, t_swap, "vacuum_deviation", {1}, result.mode1_vacuum_deviation});
    sort_records(result.records);
    return result;
}

ReconstructResult run_reconstruct(const ScenarioConfig& cfg) {
    if (cfg.cutoffs.size() != 1) {
        throw ConfigError("config: reconstruct expects a single-mode cutoff");
    }
    std::unique_ptr<MomentProvider> provider;
    switch (cfg.init_kind) {
        case ScenarioConfig::InitKind::Vacuum:
            provider = std::make_unique<FockMomentProvider>(0);
            break;
        case ScenarioConfig::InitKind::Fock:
            provider = std::make_unique<FockMomentProvider>(cfg.fock_n);
            break;
        case ScenarioConfig::InitKind::Coherent:
            provider = std::make_unique<CoherentMomentProvider>(cfg.alpha);
            break;
        case ScenarioConfig::InitKind::Thermal:
            provider = std::make_unique<ThermalMomentProvider>(cfg.beta);
            break;
        case ScenarioConfig::InitKind::Matrix:
            provider = std::make_unique<MatrixMomentProvider>(cfg.initial_state().matrix());
            break;
    }
    ReconstructResult result{reconstruct(*provider, MultiIndex{cfg.cutoffs[0]}, cfg.policy)};
    return result;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string index_string(const std::vector<int>& index) {
    std::string s;
    for (std::size_t i = 0; i < index.size(); ++i) {
        if (i > 0) s += ':';
        s += std::to_string(index[i]);
    }
    return s;
}

nlohmann::json json_number(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

}  // namespace

void write_records_csv(std::ostream& os, const std::vector<ObservableRecord>& records) {
    os << "time,observable,index,re,im\n";
    for (const auto& r : records) {
        os << format_double(r.time) << ',' << r.observable << ',' << index_string(r.index) << ','
           << format_double(r.value.real()) << ',' << format_double(r.value.imag()) << '\n';
    }
}

nlohmann::json records_to_json(const std::vector<ObservableRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json j;
        j["time"] = r.time;
        j["observable"] = r.observable;
        j["index"] = r.index;
        j["re"] = json_number(r.value.real());
        j["im"] = json_number(r.value.imag());
        arr.push_back(std::move(j));
    }
    return arr;
}

nlohmann::json evolve_to_json(const EvolveResult& result) {
    nlohmann::json j;
    j["times"] = result.times;
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : result.states) states.push_back(s.to_json());
    j["states"] = std::move(states);
    j["records"] = records_to_json(result.records);
    return j;
}

nlohmann::json compare_to_json(const CompareResult& result) {
    nlohmann::json j;
    j["times"] = result.times;
    j["max_element_deviation"] = result.max_element_deviation;
    j["trace_deviation"] = result.trace_deviation;
    j["tolerance"] = result.tolerance;
    j["worst_deviation"] = result.worst_deviation;
    j["pass"] = result.pass;
    return j;
}

void write_compare_csv(std::ostream& os, const CompareResult& result) {
    os << "time,observable,index,re,im\n";
    for (std::size_t i = 0; i < result.times.size(); ++i) {
        os << format_double(result.times[i]) << ",max_element_deviation,,"
           << format_double(result.max_element_deviation[i]) << ",0\n";
        os << format_double(result.times[i]) << ",trace_deviation,,"
           << format_double(result.trace_deviation[i]) << ",0\n";
    }
}

}  // namespace bosrec
