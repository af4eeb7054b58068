// lfadapt: command-line front end. Exit codes: 0 ok, 2 config error,
// 3 solver failure, 4 property violation under --assert.

#include "lfadapt/adaptive.hpp"
#include "lfadapt/config.hpp"
#include "lfadapt/harness.hpp"
#include "lfadapt/report.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <filesystem>
#include <map>
#include <sstream>

using namespace lfa;
using nlohmann::json;

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;
constexpr int kAssertFailure = 4;

struct Common {
    std::string config;
    std::int64_t seed = -1;
    std::string out;
    int m = 0;
    bool json_out = false;
    bool assert_mode = false;
};

ExperimentConfig load(const Common& c) {
    if (c.config.empty()) throw ConfigError("--config is required");
    ExperimentConfig cfg = load_config(c.config);
    if (c.seed >= 0) cfg.seed = static_cast<std::uint64_t>(c.seed);
    if (c.m > 0) cfg.m = c.m;
    validate(cfg);
    return cfg;
}

std::string out_dir(const Common& c, const ExperimentConfig& cfg) {
    if (!c.out.empty()) return c.out;
    if (const char* env = std::getenv("LFADAPT_OUT")) return std::string(env) + "/" + cfg.name;
    return "out/" + cfg.name;
}

struct Setting {
    Grid grid;
    Functional T;
    std::vector<ConstraintSystem> classes;
    std::vector<const ConstraintSystem*> ptrs;
};

Setting build(const ExperimentConfig& cfg) {
    Setting s{make_grid(cfg.m), {}, {}, {}};
    s.T = point_functional(s.grid, cfg.t0);
    BuildOptions bo;
    bo.window_frac = cfg.window_frac;
    for (auto& c : cfg.classes) s.classes.push_back(build_class(parse_class(c), s.grid, bo));
    for (auto& c : s.classes) s.ptrs.push_back(&c);
    return s;
}

std::vector<double> eps_or_default(const ExperimentConfig& cfg) {
    if (!cfg.eps.empty()) return cfg.eps;
    std::vector<double> e;
    for (double n : cfg.n_values) e.push_back(1.0 / std::sqrt(n));
    if (e.empty()) e = log_spaced(1e-3, 1e-1, 8);
    return e;
}

int cmd_modulus(const Common& c) {
    ExperimentConfig cfg = load(c);
    Setting s = build(cfg);
    json out = json::array();
    const int k = static_cast<int>(s.classes.size());
    std::vector<double> eps = eps_or_default(cfg);
    if (!c.json_out) std::printf("%-4s %-4s %-14s %-22s %s\n", "i", "j", "epsilon", "value", "status");
    bool ok = true;
    for (int i = 1; i <= k; ++i)
        for (int j = 1; j <= k; ++j) {
            std::vector<ModulusResult> rows;
            for (double e : eps) {
                rows.push_back(ordered_modulus(s.classes[i - 1], s.classes[j - 1], s.T, e));
                auto& r = rows.back();
                ok = ok && r.status == SolverStatus::Converged;
                out.push_back({{"i", i}, {"j", j}, {"epsilon", r.epsilon}, {"value", r.value},
                               {"status", to_string(r.status)}});
                if (!c.json_out)
                    std::printf("%-4d %-4d %-14s %-22s %s\n", i, j, format_number(e).c_str(),
                                format_number(r.value).c_str(), to_string(r.status));
            }
            if (!c.out.empty()) {
                std::filesystem::create_directories(c.out);
                std::ostringstream os;
                write_modulus_csv(os, rows, cfg.m);
                write_text_file(c.out + "/modulus_F" + std::to_string(i) + "_F" + std::to_string(j) + ".csv",
                                os.str());
            }
        }
    if (c.json_out) std::cout << out.dump(2) << "\n";
    return ok ? 0 : kSolverFailure;
}

int cmd_constants(const Common& c) {
    ExperimentConfig cfg = load(c);
    Setting s = build(cfg);
    json out = json::array();
    bool replay_ok = true;
    for (double n : cfg.n_values) {
        ModuliCache cache(s.ptrs, s.T);
        json entry{{"n", n}};
        if (s.ptrs.size() == 2) {
            TestConstants tc = two_space_constants(cache, n);
            TestConstants rp = two_space_formulas(replay_oracle(cache.log()), n);
            replay_ok = replay_ok && to_json(tc) == to_json(rp);
            entry["two_space"] = to_json(tc);
            entry["benchmark"] = adaptation_benchmark(cache.oracle(), n);
        } else if (s.ptrs.size() > 2) {
            LadderConstants lc = ladder_formulas(cache.oracle(), static_cast<int>(s.ptrs.size()), n);
            LadderConstants rp = ladder_formulas(replay_oracle(cache.log()), lc.k, n);
            replay_ok = replay_ok && to_json(lc) == to_json(rp);
            entry["ladder"] = to_json(lc);
        } else {
            throw ConfigError("constants needs at least two classes");
        }
        entry["moduli"] = to_json(cache.log());
        out.push_back(entry);
    }
    if (c.json_out) {
        std::cout << out.dump(2) << "\n";
    } else {
        for (auto& e : out) {
            std::printf("n = %s\n", format_number(e["n"].get<double>()).c_str());
            const json& body = e.contains("two_space") ? e["two_space"] : e["ladder"];
            for (auto& [key, v] : body.items())
                if (!v.is_array()) std::printf("  %-12s %s\n", key.c_str(), v.dump().c_str());
            if (e.contains("ladder")) std::printf("  A            %s\n", body["A"].dump().c_str());
        }
    }
    if (c.assert_mode && !replay_ok) {
        std::fprintf(stderr, "constants: replay from the moduli log is not bit-exact\n");
        return kAssertFailure;
    }
    return 0;
}

int run_and_report(const Common& c, ExperimentConfig cfg) {
    const std::string dir = out_dir(c, cfg);
    ExperimentResult res = run_experiment(cfg, dir);
    if (c.json_out) {
        std::ifstream f(res.manifest_path);
        std::cout << f.rdbuf();
    } else {
        std::ifstream f(dir + "/worst.csv");
        std::string line;
        while (std::getline(f, line)) std::cout << line << "\n";
        std::printf("artifacts in %s\n", dir.c_str());
    }
    if (res.status != 0) std::fprintf(stderr, "%s\n", res.error.c_str());
    return res.status;
}

int cmd_risk(const Common& c) {
    ExperimentConfig cfg = load(c);
    cfg.kind = "minimax";
    return run_and_report(c, cfg);
}

int cmd_adapt(const Common& c) {
    ExperimentConfig cfg = load(c);
    if (cfg.kind != "two_space" && cfg.kind != "ladder" && cfg.kind != "continuum")
        throw ConfigError("adapt needs kind two_space, ladder or continuum");
    return run_and_report(c, cfg);
}

// Groups worst.csv rows by (estimator, panel class) and fits both models.
int cmd_rates(const Common& c, const std::string& csv) {
    std::string path = csv;
    if (path.empty()) {
        ExperimentConfig cfg = load(c);
        const std::string dir = out_dir(c, cfg);
        ExperimentResult res = run_experiment(cfg, dir);
        if (res.status != 0) {
            std::fprintf(stderr, "%s\n", res.error.c_str());
            return res.status;
        }
        path = dir + "/worst.csv";
    }
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot read " + path);
    std::string line;
    std::getline(f, line);
    std::map<std::string, std::vector<std::pair<double, double>>> groups;
    while (std::getline(f, line)) {
        std::vector<std::string> cols(1);
        bool quoted = false;
        for (char ch : line) {
            if (ch == '"') quoted = !quoted;
            else if (ch == ',' && !quoted) cols.emplace_back();
            else cols.back() += ch;
        }
        if (cols.size() < 4) continue;
        const std::string panel = cols[2].substr(0, cols[2].find(':'));
        groups[cols[1] + " " + panel].push_back({std::stod(cols[0]), std::stod(cols[3])});
    }
    json out = json::object();
    for (auto& [key, pts] : groups) {
        RateFit pure = rate_fit(pts, RateModel::PurePower);
        RateFit wlog = rate_fit(pts, RateModel::PowerWithLog);
        out[key] = {{"pure_power", to_json(pure)}, {"power_with_log", to_json(wlog)}};
        if (!c.json_out)
            std::printf("%-24s exponent %.4f (r2 %.4f) | with log: exponent %.4f, log coeff %.4f (r2 %.4f)\n",
                        key.c_str(), pure.exponent, pure.r_squared, wlog.exponent, wlog.log_factor_coeff,
                        wlog.r_squared);
    }
    if (c.json_out) std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_check(const Common& c) {
    ExperimentConfig cfg = load(c);
    Setting s = build(cfg);
    json out;
    bool pass = true;
    if (cfg.kind == "continuum") {
        ContinuumFamily fam = lipschitz_family(s.grid, cfg.alpha_lo, cfg.alpha_hi, cfg.M, cfg.decreasing);
        std::vector<double> lambdas;
        for (int p = 0; p < cfg.probes; ++p)
            lambdas.push_back(cfg.alpha_lo + (cfg.alpha_hi - cfg.alpha_lo) * p / std::max(1, cfg.probes - 1));
        std::vector<double> eps = cfg.eps.empty() ? log_spaced(1e-2, 1e-1, 4) : cfg.eps;
        ContinuumReport rep = check_continuum_conditions(fam, s.T, eps, lambdas);
        out = to_json(rep);
        pass = rep.pass;
    } else {
        NonnestedReport rep = check_nonnested_conditions(s.ptrs, s.T, eps_or_default(cfg));
        out = to_json(rep);
        pass = rep.pass;
    }
    if (c.json_out) {
        std::cout << out.dump(2) << "\n";
    } else {
        for (auto& [key, v] : out.items()) std::printf("%-12s %s\n", key.c_str(), v.dump().c_str());
    }
    return c.assert_mode && !pass ? kAssertFailure : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive estimation of linear functionals: moduli, estimators and Monte Carlo checks"};
    app.require_subcommand(1);
    Common common;
    std::string rates_csv;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "experiment config file");
        sub->add_option("--seed", common.seed, "override the config seed");
        sub->add_option("--out", common.out, "output directory");
        sub->add_option("--m", common.m, "override the grid size");
        sub->add_flag("--json", common.json_out, "print JSON");
        sub->add_flag("--assert", common.assert_mode, "exit 4 when a checked property fails");
    };
    auto* modulus = app.add_subcommand("modulus", "ordered moduli table over the config classes");
    auto* constants = app.add_subcommand("constants", "test constants (two classes) or ladder constants");
    auto* risk = app.add_subcommand("risk", "worst-case Monte Carlo risk of the minimax affine estimator");
    auto* adapt = app.add_subcommand("adapt", "run the configured adaptive experiment");
    auto* rates = app.add_subcommand("rates", "rate fits of worst-case risk against n");
    auto* check = app.add_subcommand("check", "check the non-nested or continuum conditions");
    for (auto* s : {modulus, constants, risk, adapt, rates, check}) add_common(s);
    rates->add_option("--csv", rates_csv, "worst.csv from an earlier run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }
    try {
        if (*modulus) return cmd_modulus(common);
        if (*constants) return cmd_constants(common);
        if (*risk) return cmd_risk(common);
        if (*adapt) return cmd_adapt(common);
        if (*rates) return cmd_rates(common, rates_csv);
        if (*check) return cmd_check(common);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid input: %s\n", e.what());
        return kConfigError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return kSolverFailure;
    }
    return 0;
}
