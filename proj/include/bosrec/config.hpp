#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bosrec/reconstruction.hpp"
#include "bosrec/two_mode.hpp"

namespace bosrec {

/// A scenario file failed validation; the message names the offending key.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parsed scenario description. The on-disk format is flat key-value
/// text with dotted section names, e.g.
///   params.omega1 = 5.0
///   initial.kind = fock
///   initial.n = 2
///   grid.t_start = 0
///   grid.t_end = 30
///   grid.t_steps = 61
///   cutoffs = 12 12
///   oracle.dims = 12 12
///   oracle.dt = 1e-3
///   outputs = population trace
/// Lines starting with '#' are comments.
struct ScenarioConfig {
    enum class InitKind { Vacuum, Fock, Coherent, Thermal, Matrix };

    ModelParams params;

    InitKind init_kind = InitKind::Vacuum;
    int fock_n = 0;
    Complex alpha{0.0, 0.0};
    double beta = 1.0;
    std::string matrix_file;

    double t_start = 0.0;
    double t_end = 1.0;
    int t_steps = 1;

    std::vector<int> cutoffs;
    TruncationPolicy policy;

    struct OracleSettings {
        std::vector<int> dims;
        double dt = 1e-3;
    };
    std::optional<OracleSettings> oracle;

    std::vector<std::string> outputs;
    double compare_tolerance = 1e-4;

    /// Grid times t_start + i * (t_end - t_start)/(t_steps - 1); a single
    /// step collapses to {t_start}.
    std::vector<double> time_grid() const;

    /// The initial single-mode state for the closed-form solver. Matrix
    /// kind loads the JSON file; vacuum and fock become explicit matrices.
    InitialState initial_state() const;
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

}  // namespace bosrec
