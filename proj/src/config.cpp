#include "bosrec/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bosrec/states.hpp"

namespace bosrec {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

class KeyValueReader {
public:
    explicit KeyValueReader(const std::string& text) {
        std::istringstream is(text);
        std::string line;
        int lineno = 0;
        while (std::getline(is, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": expected 'key = value', got '" + line + "'");
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) {
                throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
            }
            if (!entries_.emplace(key, value).second) {
                throw ConfigError("config: duplicate key '" + key + "'");
            }
        }
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    std::string get_string(const std::string& key) {
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            throw ConfigError("config: missing required key '" + key + "'");
        }
        used_.insert(key);
        return it->second;
    }

    double get_double(const std::string& key) {
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
        }
    }

    double get_double_or(const std::string& key, double fallback) {
        return has(key) ? get_double(key) : fallback;
    }

    int get_int(const std::string& key) {
        const double d = get_double(key);
        const int i = static_cast<int>(std::lround(d));
        if (std::abs(d - i) > 0.0) {
            throw ConfigError("config: key '" + key + "' expects an integer");
        }
        return i;
    }

    int get_int_or(const std::string& key, int fallback) {
        return has(key) ? get_int(key) : fallback;
    }

    std::vector<int> get_int_list(const std::string& key) {
        std::vector<int> out;
        for (const auto& tok : split_ws(get_string(key))) {
            try {
                std::size_t pos = 0;
                out.push_back(std::stoi(tok, &pos));
                if (pos != tok.size()) throw std::invalid_argument(tok);
            } catch (const std::exception&) {
                throw ConfigError("config: key '" + key + "' expects integers, got '" + tok +
                                  "'");
            }
        }
        return out;
    }

    void check_all_used() const {
        for (const auto& [key, value] : entries_) {
            if (used_.count(key) == 0) {
                throw ConfigError("config: unknown key '" + key + "'");
            }
        }
    }

private:
    std::map<std::string, std::string> entries_;
    std::set<std::string> used_;
};

}  // namespace

std::vector<double> ScenarioConfig::time_grid() const {
    std::vector<double> times(static_cast<std::size_t>(t_steps));
    if (t_steps == 1) {
        times[0] = t_start;
        return times;
    }
    const double step = (t_end - t_start) / (t_steps - 1);
    for (int i = 0; i < t_steps; ++i) times[static_cast<std::size_t>(i)] = t_start + i * step;
    return times;
}

InitialState ScenarioConfig::initial_state() const {
    switch (init_kind) {
        case InitKind::Vacuum:
            return InitialState::from_matrix(fock_state(0, 1));
        case InitKind::Fock:
            return InitialState::from_matrix(fock_state(fock_n, fock_n + 1));
        case InitKind::Coherent:
            return InitialState::coherent(alpha);
        case InitKind::Thermal:
            return InitialState::thermal(beta);
        case InitKind::Matrix: {
            std::ifstream in(matrix_file);
            if (!in) {
                throw ConfigError("config: initial.matrix_file '" + matrix_file +
                                  "' cannot be opened");
            }
            nlohmann::json j;
            try {
                in >> j;
                return InitialState::from_matrix(DensityMatrix::from_json(j));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception& e) {
                throw ConfigError("config: initial.matrix_file '" + matrix_file + "': " +
                                  e.what());
            }
        }
    }
    throw ConfigError("config: invalid initial.kind");
}

ScenarioConfig parse_config(const std::string& text) {
    KeyValueReader kv(text);
    ScenarioConfig cfg;

    cfg.params.omega1 = kv.get_double("params.omega1");
    cfg.params.omega2 = kv.get_double("params.omega2");
    cfg.params.kappa1 = kv.get_double("params.kappa1");
    cfg.params.kappa2 = kv.get_double("params.kappa2");
    cfg.params.g = Complex(kv.get_double("params.g"), kv.get_double_or("params.g_imag", 0.0));
    try {
        cfg.params.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: params: ") + e.what());
    }

    const std::string kind = kv.get_string("initial.kind");
    if (kind == "vacuum") {
        cfg.init_kind = ScenarioConfig::InitKind::Vacuum;
    } else if (kind == "fock") {
        cfg.init_kind = ScenarioConfig::InitKind::Fock;
        cfg.fock_n = kv.get_int("initial.n");
        if (cfg.fock_n < 0) throw ConfigError("config: initial.n must be >= 0");
    } else if (kind == "coherent") {
        cfg.init_kind = ScenarioConfig::InitKind::Coherent;
        cfg.alpha = Complex(kv.get_double("initial.alpha_re"),
                            kv.get_double_or("initial.alpha_im", 0.0));
    } else if (kind == "thermal") {
        cfg.init_kind = ScenarioConfig::InitKind::Thermal;
        cfg.beta = kv.get_double("initial.beta");
        if (!(cfg.beta > 0.0)) throw ConfigError("config: initial.beta must be > 0");
    } else if (kind == "matrix") {
        cfg.init_kind = ScenarioConfig::InitKind::Matrix;
        cfg.matrix_file = kv.get_string("initial.matrix_file");
    } else {
        throw ConfigError("config: initial.kind must be one of "
                          "vacuum|fock|coherent|thermal|matrix, got '" + kind + "'");
    }

    cfg.t_start = kv.get_double_or("grid.t_start", 0.0);
    cfg.t_end = kv.get_double_or("grid.t_end", cfg.t_start);
    cfg.t_steps = kv.get_int_or("grid.t_steps", 1);
    if (cfg.t_start < 0.0) throw ConfigError("config: grid.t_start must be >= 0");
    if (cfg.t_steps < 1) throw ConfigError("config: grid.t_steps must be >= 1");
    if (cfg.t_steps > 1 && !(cfg.t_end > cfg.t_start)) {
        throw ConfigError("config: grid.t_end must be greater than grid.t_start");
    }

    cfg.cutoffs = kv.get_int_list("cutoffs");
    if (cfg.cutoffs.empty() || cfg.cutoffs.size() > 2) {
        throw ConfigError("config: cutoffs expects one or two values");
    }
    for (int c : cfg.cutoffs) {
        if (c < 1) throw ConfigError("config: cutoffs must be >= 1");
    }

    cfg.policy.max_series_depth = kv.get_int_or("policy.max_series_depth", 64);
    cfg.policy.term_tolerance = kv.get_double_or("policy.term_tolerance", 1e-14);
    try {
        cfg.policy.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: policy: ") + e.what());
    }

    if (kv.has("oracle.dims") || kv.has("oracle.dt")) {
        ScenarioConfig::OracleSettings o;
        o.dims = kv.get_int_list("oracle.dims");
        if (o.dims.size() != 2) throw ConfigError("config: oracle.dims expects two values");
        for (int d : o.dims) {
            if (d < 2) throw ConfigError("config: oracle.dims must be >= 2");
        }
        o.dt = kv.get_double("oracle.dt");
        if (!(o.dt > 0.0)) throw ConfigError("config: oracle.dt must be > 0");
        cfg.oracle = std::move(o);
    }

    if (kv.has("outputs")) {
        for (const auto& tok : split_ws(kv.get_string("outputs"))) cfg.outputs.push_back(tok);
    }

    cfg.compare_tolerance = kv.get_double_or("compare.tolerance", 1e-4);
    if (!(cfg.compare_tolerance > 0.0)) {
        throw ConfigError("config: compare.tolerance must be > 0");
    }

    kv.check_all_used();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace bosrec
