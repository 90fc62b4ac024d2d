#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bosrec/config.hpp"
#include "bosrec/lindblad.hpp"

namespace bosrec {

/// One output row: a named observable with an integer index tuple and a
/// complex value at a grid time. Rows are emitted time-major, then by
/// observable name, then by index, so output files are byte-stable.
struct ObservableRecord {
    int time_index = 0;
    double time = 0.0;
    std::string observable;
    std::vector<int> index;
    Complex value{0.0, 0.0};
};

struct EvolveResult {
    std::vector<double> times;
    std::vector<DensityMatrix> states;  // joint matrices per grid time
    std::vector<ObservableRecord> records;
};

struct CompareResult {
    std::vector<double> times;
    std::vector<double> max_element_deviation;
    std::vector<double> trace_deviation;
    double tolerance = 0.0;
    double worst_deviation = 0.0;
    bool pass = false;
};

struct SwapDemoResult {
    double t_swap = 0.0;
    double mode2_fidelity = 0.0;
    double mode1_vacuum_deviation = 0.0;
    std::vector<ObservableRecord> records;
};

struct ReconstructResult {
    DensityMatrix rho;
};

/// Closed-form evolution over the time grid; grid points evaluate in
/// parallel (capped by BOSREC_THREADS) with order-preserving assembly.
EvolveResult run_evolve(const ScenarioConfig& cfg);

/// Closed form vs. master-equation integration on the same grid.
CompareResult run_compare(const ScenarioConfig& cfg);

/// Lossless resonant swap at t = pi/(2g): mode-2 state vs the
/// phase-adjusted initial mode-1 state, and mode 1 vs vacuum.
SwapDemoResult run_swap_demo(const ScenarioConfig& cfg);

/// Generic moment-provider reconstruction of the configured single-mode
/// initial state.
ReconstructResult run_reconstruct(const ScenarioConfig& cfg);

// Output formatting. Doubles print with 17 significant digits;
// infinities render as the string "inf".
void write_records_csv(std::ostream& os, const std::vector<ObservableRecord>& records);
nlohmann::json records_to_json(const std::vector<ObservableRecord>& records);
nlohmann::json evolve_to_json(const EvolveResult& result);
nlohmann::json compare_to_json(const CompareResult& result);
void write_compare_csv(std::ostream& os, const CompareResult& result);
std::string format_double(double v);

/// Thread cap from BOSREC_THREADS (default: hardware concurrency).
int thread_budget();

}  // namespace bosrec
