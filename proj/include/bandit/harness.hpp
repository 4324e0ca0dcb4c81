#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bandit/environment.hpp"
#include "bandit/evaluation.hpp"
#include "bandit/policies.hpp"

namespace bandit {

enum class ExperimentKind { LinearOrthogonal, LogisticNoisy, CustomFile };

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::LinearOrthogonal;
    std::string algo = "simplelints";
    std::size_t d = 8;
    std::size_t K = 32;
    double M = 2.0;
    double scale = 5.0;
    std::size_t T = 1000;
    std::size_t runs = 1;
    std::uint64_t seed = 1;
    double delta = 0.1;
    double lambda = 1.0;
    bool lambda_theory = false; // replace lambda by the horizon-dependent lambda_T
    double s_bound = 0.0;       // 0: take the environment default
    std::string eval_mode;      // "exact" | "mc" | "" (auto)
    std::size_t eval_every = 0; // 0: max(1, T/100)
    std::size_t n_mc = 10000;
    std::optional<double> threshold;
    bool fast_thats = false;
    std::size_t threads = 1;
    std::string out_csv;
    std::string out_plot;
    bool plot_log_y = false;
    // backing store for custom environments (env.* keys of the config file)
    std::map<std::string, std::string> env_spec;
};

struct EvalRow {
    std::size_t t;
    double simple_regret;
    bool exact;
    double stderr_;
};

struct RunResult {
    std::string algo;
    std::size_t run_id = 0;
    std::vector<EvalRow> rows;
    std::optional<std::size_t> rounds_to_threshold;
    Vec final_theta;
    std::vector<std::size_t> pull_counts; // by action index
    double elliptical_sum = 0.0;
    double elliptical_bound = 0.0;
    double min_weight = 0.0; // smallest L-update weight, logistic variants
};

// key = value lines, '#' comments; later keys win
std::map<std::string, std::string> parse_config_file(const std::string& path);
ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv);
void validate_config(const ExperimentConfig& cfg);

ContextualEnv build_environment(const ExperimentConfig& cfg);
ContextualEnv build_custom_env(const std::map<std::string, std::string>& env_spec);

// `runs` independently seeded simulations of cfg.algo; deterministic in
// (cfg, seed) and independent of the thread count.
std::vector<RunResult> run_experiment(const ExperimentConfig& cfg);

void write_csv(const std::vector<RunResult>& results, const std::string& path);
std::string csv_to_string(const std::vector<RunResult>& results);

void emit_plot(const std::string& csv_path, const std::string& out_path, bool log_y = false);
std::string render_plot_svg(const std::string& csv_text, bool log_y);

struct SweepRow {
    std::string algo;
    std::string param;
    double value;
    std::size_t runs;
    std::size_t crossed;
    double mean_rounds; // over runs that crossed
    double stderr_rounds;
};

void write_sweep_summary(const std::vector<SweepRow>& rows, const std::string& path);

} // namespace bandit
