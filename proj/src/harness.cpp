#include "lfadapt/harness.hpp"

#include "lfadapt/report.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lfa {

using nlohmann::json;

EstimateFn as_estimate_fn(const AffineEstimator& e) {
    return [&e](const Observation& obs) { return apply_affine(e, obs); };
}

RiskReport mc_risk(const EstimateFn& est, const FunctionOnGrid& f, const Functional& T, double n, int reps,
                   std::uint64_t seed, const std::string& estimator_id, const std::string& f_id) {
    if (reps < 100) throw std::invalid_argument("mc_risk: reps must be >= 100");
    const double Tf = eval_functional(T, f);
    std::vector<double> sqerr(reps);
    for (int r = 0; r < reps; ++r) {
        const double d = est(sample_observation(f, n, seed, static_cast<std::uint64_t>(r))) - Tf;
        sqerr[r] = d * d;
    }
    double mean = 0.0;
    for (double x : sqerr) mean += x;
    mean /= reps;
    double ss = 0.0;
    for (double x : sqerr) ss += (x - mean) * (x - mean);
    RiskReport rep;
    rep.estimator = estimator_id;
    rep.f_id = f_id;
    rep.n = n;
    rep.reps = reps;
    rep.mse = mean;
    rep.se = std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps));
    rep.seed = seed;
    return rep;
}

double affine_risk(const AffineEstimator& e, const FunctionOnGrid& f, const Functional& T, double n) {
    const double bias = e.mean_at(f) - eval_functional(T, f);
    return bias * bias + (std::isinf(n) ? 0.0 : e.variance_at(n));
}

WorstCase worst_case_risk(const EstimateFn& est, const std::vector<PanelFunction>& panel, const ConstraintSystem* cls,
                          const Functional& T, double n, int reps, std::uint64_t seed,
                          const std::string& estimator_id, double tol) {
    if (panel.empty()) throw std::invalid_argument("worst_case_risk: empty panel");
    if (cls)
        for (auto& p : panel)
            if (!contains(*cls, p.f, tol))
                throw std::invalid_argument("worst_case_risk: panel member '" + p.id + "' is not in " + cls->label);
    WorstCase wc;
    for (auto& p : panel) {
        wc.table.push_back(mc_risk(est, p.f, T, n, reps, seed, estimator_id, p.id));
        if (wc.table.size() == 1 || wc.table.back().mse > wc.worst.mse) wc.worst = wc.table.back();
    }
    return wc;
}

namespace {

struct Lsq {
    Eigen::VectorXd beta;
    double r2 = 0.0;
};

Lsq least_squares(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Lsq out;
    out.beta = X.colPivHouseholderQr().solve(y);
    const double ss_res = (y - X * out.beta).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    out.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res < 1e-24 ? 1.0 : 0.0);
    return out;
}

}  // namespace

RateFit rate_fit(const std::vector<std::pair<double, double>>& points, RateModel model) {
    const int p = static_cast<int>(points.size());
    if (p < 4) throw std::invalid_argument("rate_fit: need at least 4 points");
    double lo = INFINITY, hi = 0.0;
    for (auto& [n, mse] : points) {
        if (!(n > 1) || !std::isfinite(n)) throw std::invalid_argument("rate_fit: n must be finite and > 1");
        if (!(mse > 0) || !std::isfinite(mse)) throw std::invalid_argument("rate_fit: mse must be finite and > 0");
        lo = std::min(lo, n);
        hi = std::max(hi, n);
    }
    if (hi / lo < 4) throw std::invalid_argument("rate_fit: n values must span at least two doublings");
    Eigen::MatrixXd X(p, 3);
    Eigen::VectorXd y(p);
    RateFit fit;
    fit.model = model;
    for (int i = 0; i < p; ++i) {
        const double ln = std::log(points[i].first);
        X(i, 0) = 1.0;
        X(i, 1) = ln;
        X(i, 2) = std::log(ln);
        y[i] = std::log(points[i].second);
        fit.n_values.push_back(points[i].first);
    }
    Lsq pure = least_squares(X.leftCols(2), y);
    fit.pure_exponent = pure.beta[1];
    fit.r_squared_pure = pure.r2;
    if (model == RateModel::PurePower) {
        fit.intercept = pure.beta[0];
        fit.exponent = pure.beta[1];
        fit.r_squared = pure.r2;
    } else {
        Lsq full = least_squares(X, y);
        fit.intercept = full.beta[0];
        fit.exponent = full.beta[1];
        fit.log_factor_coeff = full.beta[2];
        fit.r_squared = full.r2;
    }
    return fit;
}

std::vector<PanelFunction> standard_panel(const std::vector<const ConstraintSystem*>& generators,
                                          const ConstraintSystem& target, const Functional& T, double n,
                                          double gamma_plus, const SolverOptions& opts) {
    std::vector<double> eps{1.0 / std::sqrt(n)};
    for (double e : {std::sqrt(std::log(gamma_plus) / n), std::sqrt(std::log(n) / n)})
        if (std::find(eps.begin(), eps.end(), e) == eps.end()) eps.push_back(e);
    return hard_panel(generators, target, T, eps, opts);
}

// ---------------------------------------------------------------- experiments

namespace {

std::string class_tag(int i) { return "F" + std::to_string(i); }

struct RunContext {
    const ExperimentConfig& cfg;
    std::filesystem::path out;
    Grid grid;
    Functional T;
    std::vector<ConstraintSystem> classes;
    json manifest;
    ExperimentResult result;

    void write(const std::string& name, const std::string& content) {
        write_text_file((out / name).string(), content);
        result.artifacts.push_back(name);
    }
};

// Worst-case risk rows over each panel class, plus a rate fit per panel once
// every n has been run.
struct PanelRates {
    std::map<int, std::vector<std::pair<double, double>>> worst;

    void add(int panel, double n, double mse) { worst[panel].push_back({n, mse}); }
    json fits() const {
        json out = json::object();
        for (auto& [p, pts] : worst) {
            try {
                out[class_tag(p)] = {{"pure_power", to_json(rate_fit(pts, RateModel::PurePower))},
                                     {"power_with_log", to_json(rate_fit(pts, RateModel::PowerWithLog))}};
            } catch (const std::invalid_argument& e) {
                out[class_tag(p)] = {{"skipped", e.what()}};
            }
        }
        return out;
    }
};

void run_panels(RunContext& ctx, const EstimateFn& est, const std::string& est_id, double n,
                const std::vector<const ConstraintSystem*>& generators, const std::vector<int>& panels,
                const std::vector<const ConstraintSystem*>& targets, double gamma_plus,
                std::vector<RiskReport>& worst_rows, PanelRates& rates) {
    for (std::size_t q = 0; q < panels.size(); ++q) {
        auto panel = standard_panel(generators, *targets[q], ctx.T, n, gamma_plus);
        WorstCase wc = worst_case_risk(est, panel, targets[q], ctx.T, n, ctx.cfg.reps, ctx.cfg.seed, est_id);
        const std::string tag = class_tag(panels[q]);
        for (auto r : wc.table) {
            r.f_id = tag + ":" + r.f_id;
            ctx.result.risk_rows.push_back(r);
        }
        RiskReport w = wc.worst;
        w.f_id = tag + ":" + w.f_id;
        worst_rows.push_back(w);
        rates.add(panels[q], n, wc.worst.mse);
    }
}

void run_modulus(RunContext& ctx) {
    const int k = static_cast<int>(ctx.classes.size());
    json snap = json::array();
    for (int i = 1; i <= k; ++i)
        for (int j = 1; j <= k; ++j) {
            std::vector<ModulusResult> rows;
            for (double e : ctx.cfg.eps) {
                rows.push_back(ordered_modulus(ctx.classes[i - 1], ctx.classes[j - 1], ctx.T, e));
                snap.push_back({{"i", i}, {"j", j}, {"epsilon", e}, {"value", rows.back().value},
                                {"status", to_string(rows.back().status)}});
                if (rows.back().status != SolverStatus::Converged)
                    throw std::runtime_error("modulus solve failed for (" + class_tag(i) + ", " + class_tag(j) + ")");
            }
            std::ostringstream os;
            write_modulus_csv(os, rows, ctx.grid.m);
            ctx.write("modulus_" + class_tag(i) + "_" + class_tag(j) + ".csv", os.str());
        }
    ctx.manifest["moduli"] = snap;
}

std::vector<int> panels_or(const ExperimentConfig& cfg, std::vector<int> fallback) {
    return cfg.panels.empty() ? fallback : cfg.panels;
}

void run_estimation(RunContext& ctx) {
    const auto& cfg = ctx.cfg;
    std::vector<const ConstraintSystem*> all;
    for (auto& c : ctx.classes) all.push_back(&c);
    std::vector<RiskReport> worst_rows;
    PanelRates rates;
    json per_n = json::array();

    for (double n : cfg.n_values) {
        json entry{{"n", n}};
        if (cfg.kind == "minimax") {
            AffineEstimator e = minimax_affine(ctx.classes[0], ctx.T, n);
            entry["estimator"] = to_json(e.prov);
            auto panels = panels_or(cfg, {1});
            std::vector<const ConstraintSystem*> targets;
            for (int p : panels) targets.push_back(all[p - 1]);
            run_panels(ctx, as_estimate_fn(e), "minimax", n, {all[0]}, panels, targets, std::exp(1.0), worst_rows,
                       rates);
        } else if (cfg.kind == "two_space") {
            TwoSpaceAdaptive ta = two_space_adaptive(ctx.classes[0], ctx.classes[1], ctx.T, n);
            entry["constants"] = to_json(ta.constants);
            entry["moduli"] = to_json(ta.moduli);
            entry["swapped"] = ta.swapped;
            entry["crossing"] = ta.crossing;
            entry["union"] = {{"nested", ta.union_cert.nested}, {"hull_ratio", ta.union_cert.hull_ratio}};
            auto panels = panels_or(cfg, {1, 2});
            std::vector<const ConstraintSystem*> targets;
            for (int p : panels) targets.push_back(all[p - 1]);
            EstimateFn est = [&ta](const Observation& o) { return decide(ta, o).estimate; };
            run_panels(ctx, est, "two_space", n, all, panels, targets, ta.constants.gamma_plus, worst_rows, rates);
        } else if (cfg.kind == "ladder") {
            Ladder L = ladder_constants(all, ctx.T, n);
            entry["constants"] = to_json(L.c);
            entry["moduli"] = to_json(L.moduli);
            double gp = std::exp(1.0);
            for (auto& row : L.c.gamma_plus)
                for (double g : row) gp = std::max(gp, g);
            std::vector<int> def;
            for (int i = 1; i <= static_cast<int>(all.size()); ++i) def.push_back(i);
            auto panels = panels_or(cfg, def);
            std::vector<const ConstraintSystem*> targets;
            for (int p : panels) targets.push_back(all[p - 1]);
            EstimateFn est = [&L](const Observation& o) { return ladder_adaptive(L, o).estimate; };
            run_panels(ctx, est, "ladder", n, all, panels, targets, gp, worst_rows, rates);
        } else {  // continuum
            ContinuumFamily fam = lipschitz_family(ctx.grid, cfg.alpha_lo, cfg.alpha_hi, cfg.M, cfg.decreasing);
            ContinuumAdaptive ca = continuum_adaptive(fam, ctx.T, n, cfg.probes);
            entry["grid"] = to_json(ca.grid);
            entry["moduli"] = to_json(ca.moduli);
            entry["threshold"] = ca.threshold;
            std::vector<int> panels;
            std::vector<const ConstraintSystem*> targets;
            for (int j = 1; j <= ca.grid.k; ++j) {
                panels.push_back(j);
                targets.push_back(&ca.spaces[j - 1]);
            }
            EstimateFn est = [&ca](const Observation& o) { return evaluate(ca, o).estimate; };
            for (std::size_t q = 0; q < targets.size(); ++q)
                run_panels(ctx, est, "continuum", n, {targets.front(), targets[q]}, {panels[q]}, {targets[q]},
                           std::exp(1.0), worst_rows, rates);
        }
        per_n.push_back(entry);
    }
    std::ostringstream all_rows, worst;
    write_risk_csv(all_rows, ctx.result.risk_rows);
    write_risk_csv(worst, worst_rows);
    ctx.write("risk.csv", all_rows.str());
    ctx.write("worst.csv", worst.str());
    ctx.manifest["runs"] = per_n;
    ctx.manifest["rate_fits"] = rates.fits();
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
    validate(cfg);
    std::filesystem::create_directories(out_dir);
    RunContext ctx{cfg, out_dir, make_grid(cfg.m), {}, {}, json::object(), {}};
    ctx.T = point_functional(ctx.grid, cfg.t0);
    BuildOptions bo;
    bo.window_frac = cfg.window_frac;
    for (auto& s : cfg.classes) ctx.classes.push_back(build_class(parse_class(s), ctx.grid, bo));

    ctx.manifest["name"] = cfg.name;
    ctx.manifest["kind"] = cfg.kind;
    ctx.manifest["config_hash"] = config_hash(cfg);
    ctx.manifest["config"] = canonical_text(cfg);
    ctx.manifest["seed"] = cfg.seed;
    ctx.manifest["m"] = cfg.m;
    ctx.manifest["versions"] = {{"lfadapt", "0.1.0"},
                                {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                              std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                              std::to_string(EIGEN_MINOR_VERSION)},
                                {"compiler", __VERSION__}};
    try {
        if (cfg.kind == "modulus") run_modulus(ctx);
        else run_estimation(ctx);
        ctx.manifest["partial"] = false;
    } catch (const std::runtime_error& e) {
        ctx.result.status = 3;
        ctx.result.error = e.what();
        ctx.manifest["partial"] = true;
        ctx.manifest["error"] = e.what();
    }
    ctx.manifest["artifacts"] = ctx.result.artifacts;
    ctx.result.manifest_path = (ctx.out / "manifest.json").string();
    write_text_file(ctx.result.manifest_path, ctx.manifest.dump(2) + "\n");
    return std::move(ctx.result);
}

}  // namespace lfa
