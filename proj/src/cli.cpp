#include "pavi/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>

#include "pavi/ensemble.hpp"
#include "pavi/errors.hpp"
#include "pavi/glm.hpp"
#include "pavi/io.hpp"
#include "pavi/parallel.hpp"
#include "pavi/rng.hpp"
#include "pavi/simharness.hpp"

namespace pavi {

namespace {

std::vector<WeightingMethod> parse_weightings(const std::vector<std::string>& names) {
    std::vector<WeightingMethod> out;
    for (const auto& name : names) {
        for (const auto& part : [&] {
                 std::vector<std::string> parts;
                 size_t pos = 0;
                 while (pos <= name.size()) {
                     size_t comma = name.find(',', pos);
                     if (comma == std::string::npos) comma = name.size();
                     if (comma > pos) parts.push_back(name.substr(pos, comma - pos));
                     pos = comma + 1;
                 }
                 return parts;
             }()) {
            WeightingMethod m = parse_weighting(part);
            if (std::find(out.begin(), out.end(), m) == out.end()) out.push_back(m);
        }
    }
    if (out.empty()) throw Error("bad-weighting", "no weighting method requested");
    return out;
}

std::string out_path(const RunConfig& config, const std::string& file) {
    return (std::filesystem::path(config.out_dir) / file).string();
}

WeightingConfig make_weighting_config(const RunConfig& config, WeightingMethod method) {
    WeightingConfig wc;
    wc.method = method;
    wc.psi = config.psi;
    wc.splits_L = config.splits;
    wc.train_fraction = config.train_fraction;
    wc.seed = 0;  // run_replication / cmd_assess derive per-rep seeds
    return wc;
}

std::vector<PathSolution> candidate_paths(const Dataset& data) {
    std::vector<PathSolution> paths;
    for (PenaltySpec spec : {PenaltySpec::lasso(), PenaltySpec::scad(), PenaltySpec::mcp()}) {
        paths.push_back(fit_path(data, spec, lambda_grid(data, spec)));
    }
    return paths;
}

void append_aggregate_rows(TextTable& table, const AggregateTable& agg,
                           const std::string& sigma_label) {
    for (const auto& row : agg.rows) {
        std::vector<std::string> cells;
        if (!sigma_label.empty()) cells.push_back(sigma_label);
        cells.push_back(method_name(row.method));
        cells.push_back(weighting_name(row.weighting));
        cells.push_back(std::to_string(row.replications));
        for (const AggregateCell* cell :
             {&row.f_true, &row.g_true, &row.f_hat, &row.g_hat, &row.d_f, &row.d_g, &row.sd_f,
              &row.sd_g}) {
            cells.push_back(format_number(cell->mean));
            cells.push_back(format_number(cell->se));
        }
        table.rows.push_back(std::move(cells));
    }
}

std::vector<std::string> aggregate_columns(bool with_sigma) {
    std::vector<std::string> cols;
    if (with_sigma) cols.push_back("sigma");
    cols.insert(cols.end(), {"method", "weighting", "reps"});
    for (const char* name : {"F", "G", "F_hat", "G_hat", "d_F", "d_G", "sd_F_hat", "sd_G_hat"}) {
        cols.push_back(name);
        cols.push_back(std::string("se_") + name);
    }
    return cols;
}

}  // namespace

std::vector<double> parse_sigma_list(const std::string& text) {
    std::vector<double> values;
    auto parse_one = [&](const std::string& tok) {
        char* end = nullptr;
        double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0' || !(v > 0.0)) {
            throw Error("bad-sigmas", "cannot parse sigma value", tok);
        }
        return v;
    };
    size_t colon1 = text.find(':');
    if (colon1 != std::string::npos) {
        size_t colon2 = text.find(':', colon1 + 1);
        if (colon2 == std::string::npos) {
            throw Error("bad-sigmas", "expected start:end:count", text);
        }
        double start = parse_one(text.substr(0, colon1));
        double end = parse_one(text.substr(colon1 + 1, colon2 - colon1 - 1));
        int count = std::atoi(text.substr(colon2 + 1).c_str());
        if (count < 1) throw Error("bad-sigmas", "count must be at least 1", text);
        if (count == 1) return {start};
        for (int i = 0; i < count; ++i) {
            values.push_back(start + (end - start) * i / (count - 1));
        }
        return values;
    }
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        if (comma > pos) values.push_back(parse_one(text.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (values.empty()) throw Error("bad-sigmas", "empty sigma list", text);
    return values;
}

void cmd_assess(const RunConfig& config, const CandidateEnsemble* injected) {
    Family family = parse_family(config.family);
    Dataset data = load_dataset(config.data_path, config.response, family);
    std::vector<NamedModel> models = load_model_list(config.models_path, data.p());
    if (models.empty()) throw Error("bad-input", "model list is empty", config.models_path);
    std::vector<WeightingMethod> weightings = parse_weightings(config.weightings);

    CandidateSet candidates;
    if (!injected) {
        candidates = collect_candidates(candidate_paths(data),
                                        std::min(data.n() - 4, 200));
    }

    // Per repetition the ARM splits re-randomize; path candidates are
    // deterministic given the data and are built once.
    struct Accum {
        double f = 0, sd_f = 0, g = 0, sd_g = 0;
    };
    std::map<std::pair<std::string, WeightingMethod>, Accum> totals;
    for (int rep = 0; rep < config.reps; ++rep) {
        for (WeightingMethod w : weightings) {
            CandidateEnsemble ensemble;
            if (injected) {
                ensemble = *injected;
            } else {
                WeightingConfig wc = make_weighting_config(config, w);
                wc.seed = derive_seed(config.seed, {static_cast<uint64_t>(rep)});
                ensemble = compute_weights(data, candidates, wc);
            }
            for (const auto& model : models) {
                AssessmentReport report = assess(model.set, ensemble);
                Accum& acc = totals[{model.name, w}];
                acc.f += report.f_hat;
                acc.sd_f += report.sd_f;
                acc.g += report.g_hat;
                acc.sd_g += report.sd_g;
            }
        }
    }

    TextTable table;
    table.columns = {"model", "weighting", "F", "sd_F", "G", "sd_G"};
    for (const auto& model : models) {
        for (WeightingMethod w : weightings) {
            const Accum& acc = totals[{model.name, w}];
            table.rows.push_back({model.name, weighting_name(w),
                                  format_number(acc.f / config.reps),
                                  format_number(acc.sd_f / config.reps),
                                  format_number(acc.g / config.reps),
                                  format_number(acc.sd_g / config.reps)});
        }
    }
    write_tsv(out_path(config, "assessment.tsv"), table);

    if (config.with_diagnostics) {
        TextTable diag;
        diag.columns = {"model", "size", "AIC", "BIC", "deviance", "converged"};
        for (const auto& model : models) {
            FittedModel fit = fit_model(data, model.set);
            FitDiagnostics d = diagnostics(fit, data);
            diag.rows.push_back({model.name, std::to_string(model.set.size()),
                                 format_number(d.aic), format_number(d.bic),
                                 format_number(d.deviance), fit.converged ? "1" : "0"});
        }
        write_tsv(out_path(config, "diagnostics.tsv"), diag);
    }
}

void cmd_simulate(const RunConfig& config) {
    ScenarioSpec spec;
    spec.example_id = config.example;
    spec.family = parse_family(config.family);
    spec.n = config.n_override;
    spec.sigma = config.sigma;
    spec.seed = config.seed;
    std::vector<WeightingMethod> weightings = parse_weightings(config.weightings);

    auto reports = run_replications(spec, config.reps,
                                    make_weighting_config(config, WeightingMethod::arm),
                                    make_weighting_config(config, WeightingMethod::bicp),
                                    weightings);
    AggregateTable agg = aggregate(reports, weightings);

    TextTable table;
    table.columns = aggregate_columns(false);
    append_aggregate_rows(table, agg, "");
    std::string file =
        "example" + std::to_string(config.example) + "_" + config.family + ".tsv";
    write_tsv(out_path(config, file), table);
}

void cmd_sweep(const RunConfig& config) {
    ScenarioSpec spec;
    spec.example_id = config.example;
    spec.family = Family::gaussian;
    spec.n = config.n_override;
    spec.seed = config.seed;
    std::vector<WeightingMethod> weightings = parse_weightings(config.weightings);
    std::vector<double> sigmas = parse_sigma_list(config.sigmas);

    auto rows = sigma_sweep(spec, sigmas, config.reps,
                            make_weighting_config(config, WeightingMethod::arm),
                            make_weighting_config(config, WeightingMethod::bicp), weightings);

    TextTable table;
    table.columns = aggregate_columns(true);
    for (const auto& row : rows) {
        append_aggregate_rows(table, row.table, format_number(row.sigma));
    }
    write_tsv(out_path(config, "sweep_example" + std::to_string(config.example) + ".tsv"),
              table);
}

void cmd_paths(const RunConfig& config) {
    Family family = parse_family(config.family);
    Dataset data = load_dataset(config.data_path, config.response, family);
    PenaltySpec spec;
    switch (parse_penalty(config.penalty)) {
        case PenaltyKind::lasso: spec = PenaltySpec::lasso(); break;
        case PenaltyKind::adaptive_lasso:
            spec = PenaltySpec::adaptive_with_weights(
                adaptive_weights(data, 1.0, config.folds, config.seed));
            break;
        case PenaltyKind::scad: spec = PenaltySpec::scad(); break;
        case PenaltyKind::mcp: spec = PenaltySpec::mcp(); break;
    }
    PathSolution path = fit_path(data, spec, lambda_grid(data, spec));

    TextTable table;
    table.columns = {"index", "lambda", "df", "converged", "support"};
    for (int i = 0; i < path.grid.length(); ++i) {
        table.rows.push_back({std::to_string(i), format_number(path.grid.values[i]),
                              std::to_string(path.supports[i].size()),
                              path.converged[i] ? "1" : "0", path.supports[i].to_string()});
    }
    write_tsv(out_path(config, "path_" + config.penalty + ".tsv"), table);
}

void cmd_diagnostics(const RunConfig& config) {
    Family family = parse_family(config.family);
    Dataset data = load_dataset(config.data_path, config.response, family);
    std::vector<NamedModel> models = load_model_list(config.models_path, data.p());
    TextTable diag;
    diag.columns = {"model", "size", "AIC", "BIC", "deviance", "converged"};
    for (const auto& model : models) {
        FittedModel fit = fit_model(data, model.set);
        FitDiagnostics d = diagnostics(fit, data);
        diag.rows.push_back({model.name, std::to_string(model.set.size()),
                             format_number(d.aic), format_number(d.bic),
                             format_number(d.deviance), fit.converged ? "1" : "0"});
    }
    write_tsv(out_path(config, "diagnostics.tsv"), diag);
}

namespace {

void apply_json_config(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("file-open", "cannot open config file", path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error("config-parse", "bad JSON config", e.what());
    }
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("data", config.data_path);
    get("response", config.response);
    get("family", config.family);
    get("models", config.models_path);
    get("weighting", config.weightings);
    get("psi", config.psi);
    get("splits", config.splits);
    get("folds", config.folds);
    get("reps", config.reps);
    get("seed", config.seed);
    get("train_fraction", config.train_fraction);
    get("out", config.out_dir);
    get("diagnostics", config.with_diagnostics);
    get("example", config.example);
    get("n", config.n_override);
    get("sigma", config.sigma);
    get("sigmas", config.sigmas);
    get("penalty", config.penalty);
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    RunConfig config;

    // Config file values sit between built-in defaults and explicit flags,
    // so the file is applied before CLI11 parses argv.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                apply_json_config(config, argv[i + 1]);
            } catch (const Error& e) {
                std::cerr << e.what() << "\n";
                return 1;
            }
        }
    }

    CLI::App app{"Estimate F- and G-measures of variable-selection outcomes from data alone"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file")->expected(1);

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", config.seed, "RNG seed");
        cmd->add_option("--out", config.out_dir, "output directory");
        cmd->add_option("--config", config_path, "JSON config file");
    };

    CLI::App* assess = app.add_subcommand("assess", "assess models-under-check on a dataset");
    assess->add_option("--data", config.data_path, "CSV dataset")->required();
    assess->add_option("--response", config.response, "response column name");
    assess->add_option("--family", config.family, "gaussian|binomial");
    assess->add_option("--models", config.models_path, "model list file")->required();
    assess->add_option("--weighting", config.weightings, "arm,bicp");
    assess->add_option("--psi", config.psi, "complexity prior adjustment");
    assess->add_option("--splits", config.splits, "ARM split count");
    assess->add_option("--train-fraction", config.train_fraction, "ARM training fraction");
    assess->add_option("--reps", config.reps, "averaging repetitions");
    assess->add_flag("--diagnostics", config.with_diagnostics, "also emit AIC/BIC/deviance");
    add_common(assess);

    CLI::App* simulate = app.add_subcommand("simulate", "run a simulation design");
    simulate->add_option("--example", config.example, "design id 1..5")->required();
    simulate->add_option("--family", config.family, "gaussian|binomial");
    simulate->add_option("--reps", config.reps, "replications");
    simulate->add_option("--n", config.n_override, "override sample size");
    simulate->add_option("--sigma", config.sigma, "gaussian noise sd");
    simulate->add_option("--weighting", config.weightings, "arm,bicp");
    simulate->add_option("--psi", config.psi, "complexity prior adjustment");
    simulate->add_option("--splits", config.splits, "ARM split count");
    add_common(simulate);

    CLI::App* sweep = app.add_subcommand("sweep", "noise-level sweep (gaussian)");
    sweep->add_option("--example", config.example, "design id 1..5")->required();
    sweep->add_option("--sigmas", config.sigmas, "start:end:count or comma list");
    sweep->add_option("--reps", config.reps, "replications per sigma");
    sweep->add_option("--n", config.n_override, "override sample size");
    sweep->add_option("--weighting", config.weightings, "arm,bicp");
    sweep->add_option("--psi", config.psi, "complexity prior adjustment");
    sweep->add_option("--splits", config.splits, "ARM split count");
    add_common(sweep);

    CLI::App* paths_cmd = app.add_subcommand("paths", "fit one penalized path");
    paths_cmd->add_option("--data", config.data_path, "CSV dataset")->required();
    paths_cmd->add_option("--response", config.response, "response column name");
    paths_cmd->add_option("--family", config.family, "gaussian|binomial");
    paths_cmd->add_option("--penalty", config.penalty, "lasso|adlasso|scad|mcp");
    paths_cmd->add_option("--folds", config.folds, "pilot CV folds (adaptive)");
    add_common(paths_cmd);

    CLI::App* diag = app.add_subcommand("diagnostics", "AIC/BIC/deviance for listed models");
    diag->add_option("--data", config.data_path, "CSV dataset")->required();
    diag->add_option("--response", config.response, "response column name");
    diag->add_option("--family", config.family, "gaussian|binomial");
    diag->add_option("--models", config.models_path, "model list file")->required();
    add_common(diag);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (assess->parsed()) {
            cmd_assess(config);
        } else if (simulate->parsed()) {
            cmd_simulate(config);
        } else if (sweep->parsed()) {
            cmd_sweep(config);
        } else if (paths_cmd->parsed()) {
            cmd_paths(config);
        } else if (diag->parsed()) {
            cmd_diagnostics(config);
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace pavi
