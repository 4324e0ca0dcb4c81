#include <cmath>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bandit/harness.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct CliOverrides {
    std::map<std::string, std::string> kv;
};

void add_override_options(CLI::App* cmd, CliOverrides& ov) {
    // every flag maps onto a config key; command line wins over the file
    static const char* keys[] = {"algo",      "d",        "K",          "M",
                                 "scale",     "T",        "runs",       "seed",
                                 "delta",     "lambda",   "s_bound",    "eval_mode",
                                 "eval_every", "n_mc",    "threshold",  "threads",
                                 "experiment"};
    for (const char* key : keys) {
        cmd->add_option_function<std::string>(
            "--" + std::string(key),
            [&ov, key](const std::string& v) { ov.kv[key] = v; });
    }
    cmd->add_option_function<std::string>(
        "--out", [&ov](const std::string& v) { ov.kv["out_csv"] = v; });
    cmd->add_option_function<std::string>(
        "--plot", [&ov](const std::string& v) { ov.kv["out_plot"] = v; });
    cmd->add_flag_function("--fast-thats",
                           [&ov](std::int64_t) { ov.kv["fast_thats"] = "true"; });
    cmd->add_flag_function("--lambda-theory",
                           [&ov](std::int64_t) { ov.kv["lambda_theory"] = "true"; });
    cmd->add_flag_function("--log-y", [&ov](std::int64_t) { ov.kv["plot_log_y"] = "true"; });
}

bandit::ExperimentConfig make_config(const std::string& config_path, const CliOverrides& ov) {
    std::map<std::string, std::string> kv;
    if (!config_path.empty()) kv = bandit::parse_config_file(config_path);
    for (const auto& [k, v] : ov.kv) kv[k] = v;
    return bandit::config_from_map(kv);
}

std::string stem_of(const std::string& path) {
    const auto dotpos = path.rfind(".csv");
    return dotpos == std::string::npos ? path : path.substr(0, dotpos);
}

int run_command(const std::string& config_path, const CliOverrides& ov) {
    bandit::ExperimentConfig cfg = make_config(config_path, ov);
    const std::vector<std::string> algos = split_list(cfg.algo);
    if (algos.empty()) throw std::invalid_argument("run: no algorithm given");
    std::vector<bandit::RunResult> all;
    for (const std::string& algo : algos) {
        bandit::ExperimentConfig one = cfg;
        one.algo = algo;
        std::vector<bandit::RunResult> results = bandit::run_experiment(one);
        double final_mean = 0.0;
        for (const auto& r : results) final_mean += r.rows.back().simple_regret;
        final_mean /= static_cast<double>(results.size());
        std::cout << algo << ": runs=" << results.size()
                  << " mean_final_regret=" << final_mean << "\n";
        for (auto& r : results) all.push_back(std::move(r));
    }
    if (!cfg.out_csv.empty()) {
        bandit::write_csv(all, cfg.out_csv);
        std::cout << "wrote " << cfg.out_csv << "\n";
        if (!cfg.out_plot.empty()) {
            bandit::emit_plot(cfg.out_csv, cfg.out_plot, cfg.plot_log_y);
            std::cout << "wrote " << cfg.out_plot << "\n";
        }
    }
    return 0;
}

int sweep_command(const std::string& config_path, const CliOverrides& ov,
                  const std::string& param, const std::string& values_csv) {
    const std::vector<std::string> values = split_list(values_csv);
    if (values.empty()) throw std::invalid_argument("sweep: --values is empty");
    bandit::ExperimentConfig base = make_config(config_path, ov);
    if (base.out_csv.empty()) throw std::invalid_argument("sweep: out_csv (--out) is required");
    if (!base.threshold) throw std::invalid_argument("sweep: a regret threshold is required");
    const std::vector<std::string> algos = split_list(base.algo);
    const std::string stem = stem_of(base.out_csv);

    std::vector<bandit::SweepRow> summary;
    for (const std::string& value : values) {
        CliOverrides point = ov;
        point.kv[param] = value;
        bandit::ExperimentConfig cfg = make_config(config_path, point);
        std::vector<bandit::RunResult> all;
        for (const std::string& algo : algos) {
            bandit::ExperimentConfig one = cfg;
            one.algo = algo;
            std::vector<bandit::RunResult> results = bandit::run_experiment(one);

            bandit::SweepRow row;
            row.algo = algo;
            row.param = param;
            row.value = std::stod(value);
            row.runs = results.size();
            row.crossed = 0;
            double sum = 0.0, sum_sq = 0.0;
            for (const auto& r : results) {
                if (r.rounds_to_threshold) {
                    ++row.crossed;
                    const double v = static_cast<double>(*r.rounds_to_threshold);
                    sum += v;
                    sum_sq += v * v;
                }
            }
            if (row.crossed > 0) {
                row.mean_rounds = sum / static_cast<double>(row.crossed);
                const double var =
                    std::max(0.0, sum_sq / static_cast<double>(row.crossed) -
                                      row.mean_rounds * row.mean_rounds);
                row.stderr_rounds = row.crossed > 1
                                        ? std::sqrt(var / static_cast<double>(row.crossed - 1))
                                        : 0.0;
            } else {
                row.mean_rounds = 0.0;
                row.stderr_rounds = 0.0;
            }
            summary.push_back(row);
            std::cout << algo << " " << param << "=" << value << ": crossed " << row.crossed
                      << "/" << row.runs;
            if (row.crossed) std::cout << " mean_rounds=" << row.mean_rounds;
            std::cout << "\n";
            for (auto& r : results) all.push_back(std::move(r));
        }
        const std::string path = stem + "_" + param + value + ".csv";
        bandit::write_csv(all, path);
        std::cout << "wrote " << path << "\n";
    }
    const std::string summary_path = stem + "_summary.csv";
    bandit::write_sweep_summary(summary, summary_path);
    std::cout << "wrote " << summary_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"contextual bandit simple-regret simulation harness"};
    app.require_subcommand(1);

    std::string config_path;
    CliOverrides run_ov, sweep_ov;
    std::string sweep_param, sweep_values;

    CLI::App* run = app.add_subcommand("run", "run one experiment configuration");
    run->add_option("--config", config_path, "plain key = value configuration file");
    add_override_options(run, run_ov);

    CLI::App* sweep = app.add_subcommand("sweep", "repeat an experiment over a parameter grid");
    sweep->add_option("--config", config_path, "plain key = value configuration file");
    sweep->add_option("--param", sweep_param, "config key to vary")->required();
    sweep->add_option("--values", sweep_values, "comma-separated grid values")->required();
    add_override_options(sweep, sweep_ov);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path, run_ov);
        return sweep_command(config_path, sweep_ov, sweep_param, sweep_values);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
