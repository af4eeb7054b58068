#include "lfadapt/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace lfa {

using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

// JSON has no inf/nan; those go out as strings.
json num(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

json matrix(const std::vector<std::vector<double>>& m) {
    json a = json::array();
    for (auto& row : m) {
        json r = json::array();
        for (double x : row) r.push_back(num(x));
        a.push_back(r);
    }
    return a;
}

json vec(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

}  // namespace

void write_risk_csv(std::ostream& os, const std::vector<RiskReport>& rows) {
    os << "n,estimator,f_id,mse,se,reps,seed\n";
    for (auto& r : rows)
        os << format_number(r.n) << ',' << csv_field(r.estimator) << ',' << csv_field(r.f_id) << ','
           << format_number(r.mse) << ',' << format_number(r.se) << ',' << r.reps << ',' << r.seed << '\n';
}

void write_modulus_csv(std::ostream& os, const std::vector<ModulusResult>& rows, int m) {
    os << "epsilon,value,status,m\n";
    for (auto& r : rows)
        os << format_number(r.epsilon) << ',' << format_number(r.value) << ',' << to_string(r.status) << ',' << m
           << '\n';
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

json to_json(const std::vector<ModulusRecord>& log) {
    json a = json::array();
    for (auto& r : log)
        a.push_back({{"i", r.i}, {"j", r.j}, {"epsilon", num(r.eps)}, {"value", num(r.value)},
                     {"status", to_string(r.status)}});
    return a;
}

json to_json(const TestConstants& c) {
    return {{"n", num(c.n)},
            {"gamma_12", num(c.gamma_12)},
            {"gamma_21", num(c.gamma_21)},
            {"gamma_plus", num(c.gamma_plus)},
            {"sigma2_12", num(c.sigma2_12)},
            {"sigma2_21", num(c.sigma2_21)},
            {"b_12", num(c.b_12)},
            {"b_21", num(c.b_21)},
            {"v_12", num(c.v_12)},
            {"v_21", num(c.v_21)},
            {"omega_1", num(c.omega_1)},
            {"omega_G", num(c.omega_G)}};
}

json to_json(const LadderConstants& c) {
    return {{"k", c.k},
            {"n", num(c.n)},
            {"gamma", matrix(c.gamma)},
            {"gamma_plus", matrix(c.gamma_plus)},
            {"b", matrix(c.b)},
            {"v", matrix(c.v)},
            {"sigma2", matrix(c.sigma2)},
            {"A", vec(c.A)}};
}

json to_json(const GridLadder& g) {
    return {{"k", g.k},
            {"epsilon", num(g.eps)},
            {"xi", vec(g.xi)},
            {"lambdas", vec(g.lambdas)},
            {"omega_min", num(g.omega_min)},
            {"omega_max", num(g.omega_max)},
            {"probe_lambdas", vec(g.probe_lambdas)},
            {"probe_omegas", vec(g.probe_omegas)}};
}

json to_json(const NonnestedReport& r) {
    json c1 = json::array(), c2 = json::array();
    for (auto& p : r.condition1) c1.push_back({{"i", p.i}, {"j", p.j}, {"constant", num(p.constant)}, {"pass", p.pass}});
    for (auto& u : r.condition2)
        c2.push_back(
            {{"upto", u.upto}, {"min_ratio", num(u.min_ratio)}, {"max_ratio", num(u.max_ratio)}, {"pass", u.pass}});
    return {{"eps_grid", vec(r.eps_grid)}, {"c_max", num(r.c_max)}, {"condition1", c1}, {"condition2", c2},
            {"pass", r.pass}};
}

json to_json(const ContinuumReport& r) {
    return {{"eps_grid", vec(r.eps_grid)},
            {"lambda_grid", vec(r.lambda_grid)},
            {"C1", {{"nested", r.c1_nested}, {"witness", r.c1_witness}}},
            {"C2", {{"r", vec(r.r)}, {"c1", num(r.c1)}, {"c2", num(r.c2)}, {"monotone", r.c2_monotone}}},
            {"C3", {{"ordered", r.c3_ordered}, {"min_ratio", num(r.c3_min_ratio)}, {"pass", r.c3_pass}}},
            {"C4", {{"omega_min", vec(r.omega_min)}, {"omega_max", vec(r.omega_max)}, {"pass", r.c4_pass}}},
            {"pass", r.pass}};
}

json to_json(const RiskReport& r) {
    return {{"n", num(r.n)},     {"estimator", r.estimator}, {"f_id", r.f_id}, {"mse", num(r.mse)},
            {"se", num(r.se)},   {"reps", r.reps},           {"seed", r.seed}};
}

json to_json(const RateFit& f) {
    return {{"model", f.model == RateModel::PurePower ? "pure_power" : "power_with_log"},
            {"exponent", num(f.exponent)},
            {"intercept", num(f.intercept)},
            {"log_factor_coeff", num(f.log_factor_coeff)},
            {"r_squared", num(f.r_squared)},
            {"r_squared_pure", num(f.r_squared_pure)},
            {"pure_exponent", num(f.pure_exponent)},
            {"n_values", vec(f.n_values)}};
}

json to_json(const Provenance& p) {
    return {{"kind", p.kind},         {"F", p.F},
            {"H", p.H},               {"n", num(p.n)},
            {"V", num(p.V)},          {"slope", num(p.slope)},
            {"eps_star", num(p.eps_star)}, {"supval", num(p.supval)},
            {"const_shift", num(p.const_shift)}};
}

}  // namespace lfa
