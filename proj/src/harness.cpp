#include "bandit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace bandit {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + s);
    }
}

std::size_t to_size(const std::string& s, const std::string& key) {
    const double v = to_double(s, key);
    if (v < 0 || v != std::floor(v))
        throw std::invalid_argument("config: '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(v);
}

bool to_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw std::invalid_argument("config: bad boolean for '" + key + "': " + s);
}

Vec parse_vec(const std::string& s, const std::string& key) {
    Vec v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(to_double(trim(item), key));
    if (v.empty()) throw std::invalid_argument("config: empty vector for '" + key + "'");
    return v;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

} // namespace

std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config: " + path + ":" + std::to_string(lineno) +
                                     ": empty key");
        kv[key] = val;
    }
    return kv;
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& kv) {
    ExperimentConfig cfg;
    for (const auto& [key, val] : kv) {
        if (key == "experiment") {
            if (val == "linear_orthogonal") cfg.experiment = ExperimentKind::LinearOrthogonal;
            else if (val == "logistic_noisy") cfg.experiment = ExperimentKind::LogisticNoisy;
            else if (val == "custom_file") cfg.experiment = ExperimentKind::CustomFile;
            else throw std::invalid_argument("config: unknown experiment '" + val + "'");
        } else if (key == "algo") cfg.algo = val;
        else if (key == "d") cfg.d = to_size(val, key);
        else if (key == "K") cfg.K = to_size(val, key);
        else if (key == "M") cfg.M = to_double(val, key);
        else if (key == "scale") cfg.scale = to_double(val, key);
        else if (key == "T") cfg.T = to_size(val, key);
        else if (key == "runs") cfg.runs = to_size(val, key);
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_size(val, key));
        else if (key == "delta") cfg.delta = to_double(val, key);
        else if (key == "lambda") cfg.lambda = to_double(val, key);
        else if (key == "lambda_theory") cfg.lambda_theory = to_bool(val, key);
        else if (key == "s_bound") cfg.s_bound = to_double(val, key);
        else if (key == "eval_mode") cfg.eval_mode = val;
        else if (key == "eval_every") cfg.eval_every = to_size(val, key);
        else if (key == "n_mc") cfg.n_mc = to_size(val, key);
        else if (key == "threshold") cfg.threshold = to_double(val, key);
        else if (key == "fast_thats") cfg.fast_thats = to_bool(val, key);
        else if (key == "threads") cfg.threads = to_size(val, key);
        else if (key == "out_csv") cfg.out_csv = val;
        else if (key == "out_plot") cfg.out_plot = val;
        else if (key == "plot_log_y") cfg.plot_log_y = to_bool(val, key);
        else if (key.rfind("env.", 0) == 0) cfg.env_spec[key] = val;
        else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (!algo_from_name(cfg.algo))
        throw std::invalid_argument("config: unknown algo '" + cfg.algo + "'");
    if (cfg.runs < 1) throw std::invalid_argument("config: runs must be >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
        throw std::invalid_argument("config: delta must lie in (0,1)");
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("config: lambda must be > 0");
    if (cfg.s_bound < 0.0) throw std::invalid_argument("config: s_bound must be >= 0");
    if (!cfg.eval_mode.empty() && cfg.eval_mode != "exact" && cfg.eval_mode != "mc")
        throw std::invalid_argument("config: eval_mode must be 'exact' or 'mc'");
    if (cfg.n_mc < 1) throw std::invalid_argument("config: n_mc must be >= 1");
    if (cfg.threads < 1) throw std::invalid_argument("config: threads must be >= 1");
    if (cfg.experiment == ExperimentKind::LinearOrthogonal) {
        if (cfg.d < 2) throw std::invalid_argument("config: linear_orthogonal needs d >= 2");
        if (cfg.K < 2) throw std::invalid_argument("config: linear_orthogonal needs K >= 2");
    }
    if (cfg.experiment == ExperimentKind::LogisticNoisy && cfg.d < 2)
        throw std::invalid_argument("config: logistic_noisy needs d >= 2");

    const ContextualEnv env = build_environment(cfg);
    const Algo algo = *algo_from_name(cfg.algo);
    const bool logistic_algo =
        algo == Algo::MULog || algo == Algo::THaTS || algo == Algo::SimpleLinTSMLE;
    if (logistic_algo && env.reward_model() != RewardModel::Logistic)
        throw std::invalid_argument("config: " + cfg.algo + " needs a logistic environment");
    if (cfg.eval_mode == "exact" && !env.is_finite())
        throw std::invalid_argument("config: exact evaluation needs a finite environment");
}

ContextualEnv build_custom_env(const std::map<std::string, std::string>& spec) {
    auto get = [&](const std::string& key) -> const std::string& {
        const auto it = spec.find(key);
        if (it == spec.end()) throw std::invalid_argument("config: missing key '" + key + "'");
        return it->second;
    };
    const Vec theta = parse_vec(get("env.theta_star"), "env.theta_star");
    const std::string model_name = get("env.reward");
    RewardModel model;
    if (model_name == "linear") model = RewardModel::Linear;
    else if (model_name == "logistic") model = RewardModel::Logistic;
    else throw std::invalid_argument("config: env.reward must be 'linear' or 'logistic'");
    double noise = 0.0;
    if (auto it = spec.find("env.noise_std"); it != spec.end())
        noise = to_double(it->second, "env.noise_std");
    double s_bound = norm(theta) + 1.0;
    if (auto it = spec.find("env.s_bound"); it != spec.end())
        s_bound = to_double(it->second, "env.s_bound");

    std::vector<ContextArms> contexts;
    for (std::size_t ci = 0;; ++ci) {
        const std::string prefix = "env.context." + std::to_string(ci);
        const auto pit = spec.find(prefix + ".prob");
        if (pit == spec.end()) break;
        ContextArms ctx;
        ctx.prob = to_double(pit->second, prefix + ".prob");
        for (std::size_t ai = 0;; ++ai) {
            const auto ait = spec.find(prefix + ".arm." + std::to_string(ai));
            if (ait == spec.end()) break;
            ctx.arms.push_back(parse_vec(ait->second, prefix + ".arm"));
        }
        contexts.push_back(std::move(ctx));
    }
    if (contexts.empty()) throw std::invalid_argument("config: custom env has no contexts");
    return ContextualEnv::finite(theta, model, noise, std::move(contexts), s_bound);
}

ContextualEnv build_environment(const ExperimentConfig& cfg) {
    switch (cfg.experiment) {
        case ExperimentKind::LinearOrthogonal:
            return build_linear_orthogonal_env(cfg.d, cfg.K, cfg.scale);
        case ExperimentKind::LogisticNoisy:
            return build_logistic_noisy_env(cfg.d, cfg.M);
        case ExperimentKind::CustomFile:
            return build_custom_env(cfg.env_spec);
    }
    throw std::logic_error("build_environment: unknown kind");
}

namespace {

std::vector<std::size_t> eval_points(const ExperimentConfig& cfg) {
    if (cfg.T == 0) return {0};
    const std::size_t every = cfg.eval_every > 0 ? cfg.eval_every
                                                 : std::max<std::size_t>(1, cfg.T / 100);
    std::vector<std::size_t> pts;
    for (std::size_t t = every; t <= cfg.T; t += every) pts.push_back(t);
    if (pts.empty() || pts.back() != cfg.T) pts.push_back(cfg.T);
    return pts;
}

RunResult execute_run(const ExperimentConfig& cfg, const ContextualEnv& env, std::size_t run_id) {
    const Algo algo = *algo_from_name(cfg.algo);
    const double S = cfg.s_bound > 0.0 ? cfg.s_bound : env.s_bound();
    AlgParams params;
    params.delta = cfg.delta;
    params.s_bound = S;
    params.horizon = std::max<std::size_t>(1, cfg.T);
    params.fast_thats = cfg.fast_thats;
    params.lambda = cfg.lambda_theory
                        ? lambda_T(RadiusParams{cfg.d, S, static_cast<double>(params.horizon),
                                                cfg.delta})
                        : cfg.lambda;

    const bool exact = cfg.eval_mode.empty() ? env.is_finite() : cfg.eval_mode == "exact";
    Rng rng(derive_seed(cfg.seed, run_id));
    Rng eval_rng(derive_seed(cfg.seed, run_id + (1ull << 32)));

    AlgState state(algo, env.dim(), params);
    RunResult result;
    result.algo = cfg.algo;
    result.run_id = run_id;

    const std::vector<std::size_t> points = eval_points(cfg);
    std::size_t next_point = 0;

    auto evaluate_at = [&](std::size_t t) {
        const PolicySnapshot snap = state.finalize();
        const RegretEstimate est = simple_regret(
            snap, env, exact ? EvalMode::Exact : EvalMode::MonteCarlo, eval_rng, cfg.n_mc);
        result.rows.push_back(EvalRow{t, est.value, est.exact, est.stderr_});
        if (cfg.threshold && !result.rounds_to_threshold && est.value <= *cfg.threshold)
            result.rounds_to_threshold = t;
        result.final_theta = snap.theta_out;
    };

    if (cfg.T == 0) {
        evaluate_at(0);
    } else {
        for (std::size_t t = 1; t <= cfg.T; ++t) {
            const auto [handle, arms] = env.sample_round(rng, static_cast<long>(t));
            (void)handle;
            const std::size_t a = state.step(arms, rng);
            const double x = env.sample_reward(arms[a], rng);
            state.record_reward(arms[a], x);
            if (result.pull_counts.size() < arms.size()) result.pull_counts.resize(arms.size(), 0);
            ++result.pull_counts[a];
            if (next_point < points.size() && points[next_point] == t) {
                evaluate_at(t);
                ++next_point;
            }
        }
    }

    result.elliptical_sum = 0.0;
    for (double v : state.elliptical_terms()) result.elliptical_sum += v;
    result.elliptical_bound = epl_bound(cfg.T, env.dim(), params.lambda, 1.0);
    result.min_weight = std::numeric_limits<double>::infinity();
    for (double w : state.l_update_weights()) result.min_weight = std::min(result.min_weight, w);
    return result;
}

} // namespace

std::vector<RunResult> run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ContextualEnv env = build_environment(cfg);
    std::vector<RunResult> results(cfg.runs);
    const std::size_t workers = std::min(cfg.threads, cfg.runs);
    if (workers <= 1) {
        for (std::size_t r = 0; r < cfg.runs; ++r) results[r] = execute_run(cfg, env, r);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (;;) {
                    const std::size_t r = next.fetch_add(1);
                    if (r >= cfg.runs) return;
                    results[r] = execute_run(cfg, env, r);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

std::string csv_to_string(const std::vector<RunResult>& results) {
    std::string out = "algo,run,t,simple_regret,stderr,rounds_to_threshold\n";
    for (const RunResult& r : results) {
        for (const EvalRow& row : r.rows) {
            out += r.algo;
            out += ',';
            out += std::to_string(r.run_id);
            out += ',';
            out += std::to_string(row.t);
            out += ',';
            out += format_double(row.simple_regret);
            out += ',';
            if (!row.exact) out += format_double(row.stderr_);
            out += ',';
            if (r.rounds_to_threshold) out += std::to_string(*r.rounds_to_threshold);
            out += '\n';
        }
    }
    return out;
}

void write_csv(const std::vector<RunResult>& results, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    const std::string text = csv_to_string(results);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

void write_sweep_summary(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("sweep summary: cannot open " + path);
    out << "algo,param,value,runs,crossed,mean_rounds_to_threshold,stderr\n";
    for (const SweepRow& r : rows) {
        out << r.algo << ',' << r.param << ',' << format_double(r.value) << ',' << r.runs << ','
            << r.crossed << ',';
        if (r.crossed > 0) out << format_double(r.mean_rounds);
        out << ',';
        if (r.crossed > 1) out << format_double(r.stderr_rounds);
        out << '\n';
    }
    if (!out) throw std::runtime_error("sweep summary: write failed for " + path);
}

} // namespace bandit
