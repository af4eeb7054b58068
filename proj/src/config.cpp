#include "lfadapt/config.hpp"

#include "lfadapt/classes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace lfa {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    const auto caret = v.find('^');
    if (caret != std::string::npos) {
        double base = to_double(key, trim(v.substr(0, caret)));
        double ex = to_double(key, trim(v.substr(caret + 1)));
        return std::pow(base, ex);
    }
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + key + "' is not a number: " + v);
    return x;
}

long long to_int(const std::string& key, const std::string& v) {
    long long x = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("config: '" + key + "' is not an integer: " + v);
    return x;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: '" + key + "' is not a boolean: " + v);
}

std::string num(double x) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<int, std::string> classes;
    std::string section;
    std::set<std::string> seen;
    std::stringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("config line " + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const std::string full = section + "." + key;
        if (!seen.insert(full).second) throw ConfigError("config: duplicate key " + full);

        if (section == "experiment") {
            if (key == "name") cfg.name = val;
            else if (key == "kind") cfg.kind = val;
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(full, val));
            else if (key == "reps") cfg.reps = static_cast<int>(to_int(full, val));
            else if (key == "m") cfg.m = static_cast<int>(to_int(full, val));
            else if (key == "window_frac") cfg.window_frac = to_double(full, val);
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "functional") {
            if (key == "t0") cfg.t0 = to_double(full, val);
            else throw ConfigError("config: unknown key " + full);
        } else if (section == "classes") {
            if (key.size() < 2 || key[0] != 'F') throw ConfigError("config: class keys are F1, F2, ...; got " + key);
            const long long idx = to_int(full, key.substr(1));
            if (idx < 1 || idx > 64) throw ConfigError("config: class index out of range: " + key);
            classes[static_cast<int>(idx)] = val;
        } else if (section == "run") {
            if (key == "n") {
                for (auto& s : split_list(val)) cfg.n_values.push_back(to_double(full, s));
            } else if (key == "eps") {
                for (auto& s : split_list(val)) cfg.eps.push_back(to_double(full, s));
            } else if (key == "panels") {
                for (auto& s : split_list(val)) cfg.panels.push_back(static_cast<int>(to_int(full, s)));
            } else {
                throw ConfigError("config: unknown key " + full);
            }
        } else if (section == "continuum") {
            if (key == "alpha_lo") cfg.alpha_lo = to_double(full, val);
            else if (key == "alpha_hi") cfg.alpha_hi = to_double(full, val);
            else if (key == "M") cfg.M = to_double(full, val);
            else if (key == "decreasing") cfg.decreasing = to_bool(full, val);
            else if (key == "probes") cfg.probes = static_cast<int>(to_int(full, val));
            else throw ConfigError("config: unknown key " + full);
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside a known section: " + full);
        }
    }
    int expect = 1;
    for (auto& [idx, spec] : classes) {
        if (idx != expect) throw ConfigError("config: class F" + std::to_string(expect) + " is missing");
        ++expect;
        try {
            cfg.classes.push_back(to_string(parse_class(spec)));
        } catch (const std::invalid_argument& e) {
            throw ConfigError("config: F" + std::to_string(idx) + ": " + e.what());
        }
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

void validate(const ExperimentConfig& cfg) {
    static const std::set<std::string> kinds{"modulus", "minimax", "two_space", "ladder", "continuum"};
    if (!kinds.count(cfg.kind)) throw ConfigError("config: unknown experiment kind '" + cfg.kind + "'");
    if (cfg.reps < 100) throw ConfigError("config: reps must be >= 100 (got " + std::to_string(cfg.reps) + ")");
    if (cfg.m < 3) throw ConfigError("config: m must be >= 3");
    if (!(cfg.window_frac > 0 && cfg.window_frac <= 1)) throw ConfigError("config: window_frac must lie in (0, 1]");
    if (!(cfg.t0 > -0.5 && cfg.t0 < 0.5)) throw ConfigError("config: t0 must lie inside (-1/2, 1/2)");
    const std::size_t k = cfg.classes.size();
    const std::size_t need = cfg.kind == "continuum" ? 0 : cfg.kind == "minimax" ? 1 : cfg.kind == "modulus" ? 1 : 2;
    if (k < need) throw ConfigError("config: kind " + cfg.kind + " needs at least " + std::to_string(need) + " classes");
    if (cfg.kind == "two_space" && k != 2) throw ConfigError("config: two_space needs exactly two classes");
    if (cfg.kind == "modulus") {
        if (cfg.eps.empty()) throw ConfigError("config: modulus needs run.eps");
    } else if (cfg.n_values.empty()) {
        throw ConfigError("config: run.n is empty");
    }
    for (double n : cfg.n_values)
        if (!(n > 1) || !std::isfinite(n)) throw ConfigError("config: n values must be finite and > 1");
    for (double e : cfg.eps)
        if (!(e > 0)) throw ConfigError("config: eps values must be positive");
    for (int p : cfg.panels)
        if (cfg.kind != "continuum" && (p < 1 || static_cast<std::size_t>(p) > k))
            throw ConfigError("config: panel index " + std::to_string(p) + " has no class");
    if (cfg.kind == "continuum") {
        if (!(cfg.alpha_lo > 0 && cfg.alpha_lo <= cfg.alpha_hi && cfg.alpha_hi <= 1))
            throw ConfigError("config: continuum needs 0 < alpha_lo <= alpha_hi <= 1");
        if (!(cfg.M > 0)) throw ConfigError("config: continuum M must be positive");
        if (cfg.probes < 2) throw ConfigError("config: continuum probes must be >= 2");
    }
}

std::string canonical_text(const ExperimentConfig& cfg) {
    std::ostringstream os;
    auto list = [](const auto& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            if constexpr (std::is_same_v<std::decay_t<decltype(v[0])>, double>) s += num(v[i]);
            else s += std::to_string(v[i]);
        }
        return s;
    };
    os << "[classes]\n";
    for (std::size_t i = 0; i < cfg.classes.size(); ++i) os << "F" << i + 1 << "=" << cfg.classes[i] << "\n";
    os << "[continuum]\nM=" << num(cfg.M) << "\nalpha_hi=" << num(cfg.alpha_hi) << "\nalpha_lo=" << num(cfg.alpha_lo)
       << "\ndecreasing=" << (cfg.decreasing ? "true" : "false") << "\nprobes=" << cfg.probes << "\n";
    os << "[experiment]\nkind=" << cfg.kind << "\nm=" << cfg.m << "\nname=" << cfg.name << "\nreps=" << cfg.reps
       << "\nseed=" << cfg.seed << "\nwindow_frac=" << num(cfg.window_frac) << "\n";
    os << "[functional]\nt0=" << num(cfg.t0) << "\n";
    os << "[run]\neps=" << list(cfg.eps) << "\nn=" << list(cfg.n_values) << "\npanels=" << list(cfg.panels) << "\n";
    return os.str();
}

std::string config_hash(const ExperimentConfig& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : canonical_text(cfg)) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace lfa
