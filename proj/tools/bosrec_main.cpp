#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bosrec/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitTruncation = 2;
constexpr int kExitToleranceFail = 3;

struct CommonOptions {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    double tolerance = -1.0;  // <0: keep the config value
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("config", opts.config_path, "scenario config file")->required();
    cmd->add_option("--out", opts.out_path, "output file (default: stdout)");
    cmd->add_option("--format", opts.format, "output format: csv|json")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--tolerance", opts.tolerance, "comparison tolerance override");
}

void emit(const CommonOptions& opts, const std::string& payload) {
    if (opts.out_path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(opts.out_path, std::ios::binary);
    if (!out) {
        throw bosrec::ConfigError("cannot open output file '" + opts.out_path + "'");
    }
    out << payload;
}

std::string render_records(const CommonOptions& opts,
                           const std::vector<bosrec::ObservableRecord>& records) {
    if (opts.format == "csv") {
        std::ostringstream os;
        bosrec::write_records_csv(os, records);
        return os.str();
    }
    return bosrec::records_to_json(records).dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bosrec: moment-reconstruction dynamics of two coupled damped oscillators"};
    app.require_subcommand(1);

    CommonOptions evolve_opts, compare_opts, swap_opts, reconstruct_opts;
    CLI::App* evolve = app.add_subcommand("evolve", "closed-form time evolution");
    add_common(evolve, evolve_opts);
    CLI::App* compare =
        app.add_subcommand("compare", "closed form vs master-equation integration");
    add_common(compare, compare_opts);
    CLI::App* swap = app.add_subcommand("swap-demo", "lossless resonant state swap check");
    add_common(swap, swap_opts);
    CLI::App* reconstruct =
        app.add_subcommand("reconstruct", "reconstruct a single-mode state from moments");
    add_common(reconstruct, reconstruct_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (evolve->parsed()) {
            const auto cfg = bosrec::load_config(evolve_opts.config_path);
            const auto result = bosrec::run_evolve(cfg);
            if (evolve_opts.format == "json") {
                emit(evolve_opts, bosrec::evolve_to_json(result).dump(2) + "\n");
            } else {
                emit(evolve_opts, render_records(evolve_opts, result.records));
            }
            return kExitOk;
        }
        if (compare->parsed()) {
            auto cfg = bosrec::load_config(compare_opts.config_path);
            if (compare_opts.tolerance > 0.0) cfg.compare_tolerance = compare_opts.tolerance;
            const auto result = bosrec::run_compare(cfg);
            if (compare_opts.format == "json") {
                emit(compare_opts, bosrec::compare_to_json(result).dump(2) + "\n");
            } else {
                std::ostringstream os;
                bosrec::write_compare_csv(os, result);
                emit(compare_opts, os.str());
            }
            std::cerr << "compare: " << (result.pass ? "PASS" : "FAIL") << " worst deviation "
                      << bosrec::format_double(result.worst_deviation) << " vs tolerance "
                      << bosrec::format_double(result.tolerance) << "\n";
            return result.pass ? kExitOk : kExitToleranceFail;
        }
        if (swap->parsed()) {
            auto cfg = bosrec::load_config(swap_opts.config_path);
            const auto result = bosrec::run_swap_demo(cfg);
            emit(swap_opts, render_records(swap_opts, result.records));
            const double tol = swap_opts.tolerance > 0.0 ? swap_opts.tolerance : 1e-10;
            const bool pass = result.mode2_fidelity >= 1.0 - tol &&
                              result.mode1_vacuum_deviation <= tol;
            std::cerr << "swap-demo: t_swap=" << bosrec::format_double(result.t_swap)
                      << " fidelity=" << bosrec::format_double(result.mode2_fidelity)
                      << " mode1_vacuum_deviation="
                      << bosrec::format_double(result.mode1_vacuum_deviation) << " "
                      << (pass ? "PASS" : "FAIL") << "\n";
            return pass ? kExitOk : kExitToleranceFail;
        }
        if (reconstruct->parsed()) {
            const auto cfg = bosrec::load_config(reconstruct_opts.config_path);
            const auto result = bosrec::run_reconstruct(cfg);
            if (!result.rho.cancellation_flags().empty()) {
                std::cerr << "reconstruct: " << result.rho.cancellation_flags().size()
                          << " element(s) cancellation-dominated\n";
            }
            if (reconstruct_opts.format == "json") {
                emit(reconstruct_opts, result.rho.to_json().dump(2) + "\n");
            } else {
                std::vector<bosrec::ObservableRecord> records;
                const auto& m = result.rho.matrix();
                for (Eigen::Index r = 0; r < result.rho.dim(); ++r) {
                    for (Eigen::Index c = 0; c < result.rho.dim(); ++c) {
                        if (std::abs(m(r, c)) < 1e-15) continue;
                        records.push_back({0, 0.0, "element",
                                           {static_cast<int>(r), static_cast<int>(c)}, m(r, c)});
                    }
                }
                emit(reconstruct_opts, render_records(reconstruct_opts, records));
            }
            return kExitOk;
        }
    } catch (const bosrec::TruncationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTruncation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitValidation;
}
