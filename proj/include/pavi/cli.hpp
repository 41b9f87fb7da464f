#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pavi/measures.hpp"

namespace pavi {

/// Resolved configuration for one CLI command. Precedence: flags > JSON
/// config file > these defaults.
struct RunConfig {
    std::string command;
    std::string data_path;
    std::string response = "y";
    std::string family = "binomial";
    std::string models_path;
    std::vector<std::string> weightings = {"arm", "bicp"};
    double psi = 1.0;
    int splits = 100;
    int folds = 5;
    int reps = 1;
    uint64_t seed = 42;
    double train_fraction = 0.5;
    std::string out_dir = ".";
    bool with_diagnostics = false;
    int example = 1;
    int n_override = 0;
    double sigma = 1.0;
    std::string sigmas = "0.01:5:9";
    std::string penalty = "lasso";
};

/// "a:b:k" (k evenly spaced values over [a,b]) or a comma list.
std::vector<double> parse_sigma_list(const std::string& text);

// Command bodies, reusable from tests. Each writes its TSV outputs under
// config.out_dir. cmd_assess accepts an injected ensemble that replaces the
// computed weightings (test hook).
void cmd_assess(const RunConfig& config, const CandidateEnsemble* injected = nullptr);
void cmd_simulate(const RunConfig& config);
void cmd_sweep(const RunConfig& config);
void cmd_paths(const RunConfig& config);
void cmd_diagnostics(const RunConfig& config);

/// Parses argv and dispatches; returns the process exit code. Structured
/// errors print one "code: message: context" line on stderr and yield 1.
int run_cli(int argc, const char* const* argv);

}  // namespace pavi
