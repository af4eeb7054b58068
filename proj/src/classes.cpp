#include "lfadapt/classes.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace lfa {

ClassSpec ClassSpec::lipschitz(double alpha, double M) { return {Kind::Lipschitz, alpha, M, {}}; }
ClassSpec ClassSpec::right_lipschitz(double alpha, double M) { return {Kind::RightLipschitz, alpha, M, {}}; }
ClassSpec ClassSpec::left_lipschitz(double alpha, double M) { return {Kind::LeftLipschitz, alpha, M, {}}; }
ClassSpec ClassSpec::decreasing() { return {Kind::Decreasing, 1.0, 0.0, {}}; }
ClassSpec ClassSpec::bounded(double B) { return {Kind::Bounded, 1.0, B, {}}; }
ClassSpec ClassSpec::intersect(std::vector<ClassSpec> parts) {
    // flatten nested intersections so the text form stays canonical
    std::vector<ClassSpec> flat;
    for (auto& p : parts) {
        if (p.kind == Kind::Intersection)
            flat.insert(flat.end(), p.parts.begin(), p.parts.end());
        else
            flat.push_back(std::move(p));
    }
    if (flat.size() == 1) return flat.front();
    return {Kind::Intersection, 1.0, 0.0, std::move(flat)};
}

void validate(const ClassSpec& s) {
    switch (s.kind) {
        case ClassSpec::Kind::Lipschitz:
        case ClassSpec::Kind::RightLipschitz:
        case ClassSpec::Kind::LeftLipschitz:
            if (!(s.alpha > 0 && s.alpha <= 1)) throw std::invalid_argument("class: alpha must lie in (0, 1]");
            if (!(s.M > 0) || !std::isfinite(s.M)) throw std::invalid_argument("class: M must be positive");
            break;
        case ClassSpec::Kind::Bounded:
            if (!(s.M > 0) || !std::isfinite(s.M)) throw std::invalid_argument("class: bound B must be positive");
            break;
        case ClassSpec::Kind::Decreasing:
            break;
        case ClassSpec::Kind::Intersection:
            if (s.parts.empty()) throw std::invalid_argument("class: empty intersection");
            for (auto& p : s.parts) validate(p);
            break;
    }
}

namespace {

std::string num(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_num(const std::string& s, const std::string& ctx) {
    std::string t = trim(s);
    double x = 0;
    auto r = std::from_chars(t.data(), t.data() + t.size(), x);
    if (r.ec != std::errc() || r.ptr != t.data() + t.size())
        throw std::invalid_argument("class: bad number '" + t + "' in '" + ctx + "'");
    return x;
}

ClassSpec parse_term(const std::string& raw) {
    std::string t = trim(raw);
    if (t == "decreasing") return ClassSpec::decreasing();
    auto lp = t.find('(');
    if (lp == std::string::npos || t.back() != ')') throw std::invalid_argument("class: cannot parse term '" + t + "'");
    std::string name = trim(t.substr(0, lp));
    std::string args = t.substr(lp + 1, t.size() - lp - 2);
    double alpha = -1, M = -1, B = -1;
    std::size_t pos = 0;
    while (pos <= args.size()) {
        auto comma = args.find(',', pos);
        std::string kv = args.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        auto eq = kv.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("class: expected key=value in '" + t + "'");
        std::string key = trim(kv.substr(0, eq));
        double val = parse_num(kv.substr(eq + 1), t);
        if (key == "alpha" || key == "a")
            alpha = val;
        else if (key == "M")
            M = val;
        else if (key == "B")
            B = val;
        else
            throw std::invalid_argument("class: unknown key '" + key + "' in '" + t + "'");
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    ClassSpec out;
    if (name == "bounded") {
        if (B < 0) throw std::invalid_argument("class: bounded needs B=");
        out = ClassSpec::bounded(B);
    } else {
        if (alpha < 0 || M < 0) throw std::invalid_argument("class: '" + name + "' needs alpha= and M=");
        if (name == "lipschitz")
            out = ClassSpec::lipschitz(alpha, M);
        else if (name == "right_lipschitz")
            out = ClassSpec::right_lipschitz(alpha, M);
        else if (name == "left_lipschitz")
            out = ClassSpec::left_lipschitz(alpha, M);
        else
            throw std::invalid_argument("class: unknown kind '" + name + "'");
    }
    validate(out);
    return out;
}

}  // namespace

ClassSpec parse_class(const std::string& text) {
    std::vector<ClassSpec> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        char c = i < text.size() ? text[i] : '+';
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (c == '+' && depth == 0) {
            parts.push_back(parse_term(text.substr(start, i - start)));
            start = i + 1;
        }
    }
    if (depth != 0) throw std::invalid_argument("class: unbalanced parentheses in '" + text + "'");
    return ClassSpec::intersect(std::move(parts));
}

std::string to_string(const ClassSpec& s) {
    switch (s.kind) {
        case ClassSpec::Kind::Lipschitz: return "lipschitz(alpha=" + num(s.alpha) + ",M=" + num(s.M) + ")";
        case ClassSpec::Kind::RightLipschitz:
            return "right_lipschitz(alpha=" + num(s.alpha) + ",M=" + num(s.M) + ")";
        case ClassSpec::Kind::LeftLipschitz: return "left_lipschitz(alpha=" + num(s.alpha) + ",M=" + num(s.M) + ")";
        case ClassSpec::Kind::Decreasing: return "decreasing";
        case ClassSpec::Kind::Bounded: return "bounded(B=" + num(s.M) + ")";
        case ClassSpec::Kind::Intersection: {
            std::string out;
            for (std::size_t i = 0; i < s.parts.size(); ++i) out += (i ? "+" : "") + to_string(s.parts[i]);
            return out;
        }
    }
    return {};
}

double HolderFamily::bound(int d, double delta) const {
    return alpha == 1.0 ? M * d * delta : M * std::pow(d * delta, alpha);
}

namespace {

constexpr int kShortRange = 3;          // pair distances always kept for alpha < 1
constexpr std::size_t kAllPairsBelow = 6000;  // families this small are emitted whole

std::size_t family_pairs(const HolderFamily& h) {
    std::size_t len = h.hi - h.lo + 1;
    std::size_t w = std::min<std::size_t>(h.window, len - 1);
    // sum_{d=1}^{w} (len - d)
    return w * len - w * (w + 1) / 2;
}

void add_build(const ClassSpec& s, const Grid& g, const BuildOptions& opts, ConstraintSystem& cs) {
    const double eps = 1e-12;
    auto holder = [&](int lo, int hi) {
        if (hi <= lo) return;
        int window = 1;
        if (s.alpha < 1.0) {
            window = static_cast<int>(std::ceil(opts.window_frac * g.m));
            window = std::clamp(window, 1, g.m);
        }
        cs.holder.push_back({s.alpha, s.M, lo, hi, window});
    };
    switch (s.kind) {
        case ClassSpec::Kind::Lipschitz: holder(0, g.m - 1); break;
        case ClassSpec::Kind::RightLipschitz: {
            int lo = 0;
            while (lo < g.m && g.t(lo) < -eps) ++lo;
            holder(lo, g.m - 1);
            break;
        }
        case ClassSpec::Kind::LeftLipschitz: {
            int hi = g.m - 1;
            while (hi >= 0 && g.t(hi) > eps) --hi;
            holder(0, hi);
            break;
        }
        case ClassSpec::Kind::Decreasing: cs.decreasing.push_back({0, g.m - 1}); break;
        case ClassSpec::Kind::Bounded:
            for (int i = 0; i < g.m; ++i) {
                cs.rows.push_back({{{i, 1.0}}, s.M});
                cs.rows.push_back({{{i, -1.0}}, s.M});
            }
            break;
        case ClassSpec::Kind::Intersection:
            for (auto& p : s.parts) add_build(p, g, opts, cs);
            break;
    }
}

}  // namespace

ConstraintSystem build_class(const ClassSpec& spec, const Grid& grid, const BuildOptions& opts) {
    validate(spec);
    ConstraintSystem cs;
    cs.grid = grid;
    cs.label = to_string(spec);
    add_build(spec, grid, opts, cs);
    return cs;
}

std::size_t ConstraintSystem::num_rows() const {
    std::size_t n = rows.size();
    for (auto& h : holder) n += 2 * family_pairs(h);
    for (auto& d : decreasing) n += d.second - d.first;
    return n;
}

double ConstraintSystem::max_violation(const Eigen::VectorXd& v) const {
    double worst = 0.0;
    for (auto& h : holder) {
        for (int d = 1; d <= std::min(h.window, h.hi - h.lo); ++d) {
            double b = h.bound(d, grid.delta);
            for (int i = h.lo; i + d <= h.hi; ++i) worst = std::max(worst, std::abs(v[i] - v[i + d]) - b);
        }
    }
    for (auto& d : decreasing)
        for (int i = d.first; i < d.second; ++i) worst = std::max(worst, v[i + 1] - v[i]);
    for (auto& r : rows) {
        double s = 0;
        for (auto& [j, a] : r.a) s += a * v[j];
        worst = std::max(worst, s - r.b);
    }
    return worst;
}

void ConstraintSystem::base_rows(int anchor, std::vector<DiffRow>& out) const {
    for (auto& h : holder) {
        int dmax = std::min(h.window, h.hi - h.lo);
        bool whole = h.window == 1 || family_pairs(h) <= kAllPairsBelow;
        int short_range = whole ? dmax : std::min(dmax, kShortRange);
        for (int d = 1; d <= short_range; ++d) {
            double b = h.bound(d, grid.delta);
            for (int i = h.lo; i + d <= h.hi; ++i) {
                out.push_back({i, i + d, b});
                out.push_back({i + d, i, b});
            }
        }
        if (!whole && anchor >= h.lo && anchor <= h.hi) {
            for (int j = std::max(h.lo, anchor - dmax); j <= std::min(h.hi, anchor + dmax); ++j) {
                int d = std::abs(j - anchor);
                if (d <= short_range) continue;
                double b = h.bound(d, grid.delta);
                out.push_back({anchor, j, b});
                out.push_back({j, anchor, b});
            }
        }
    }
    for (auto& d : decreasing)
        for (int i = d.first; i < d.second; ++i) out.push_back({i + 1, i, 0.0});
}

bool ConstraintSystem::base_is_complete() const {
    for (auto& h : holder)
        if (!(h.window == 1 || family_pairs(h) <= kAllPairsBelow || std::min(h.window, h.hi - h.lo) <= kShortRange))
            return false;
    return true;
}

std::size_t ConstraintSystem::violated_rows(const Eigen::VectorXd& v, double tol, std::size_t cap,
                                            std::vector<DiffRow>& out) const {
    struct Hit {
        double viol;
        DiffRow row;
    };
    std::vector<Hit> hits;
    for (auto& h : holder) {
        int dmax = std::min(h.window, h.hi - h.lo);
        for (int d = 1; d <= dmax; ++d) {
            double b = h.bound(d, grid.delta);
            for (int i = h.lo; i + d <= h.hi; ++i) {
                double diff = v[i] - v[i + d];
                if (diff - b > tol)
                    hits.push_back({diff - b, {i, i + d, b}});
                else if (-diff - b > tol)
                    hits.push_back({-diff - b, {i + d, i, b}});
            }
        }
    }
    std::size_t total = hits.size();
    std::size_t take = std::min(cap, total);
    std::partial_sort(hits.begin(), hits.begin() + take, hits.end(),
                      [](const Hit& a, const Hit& b) { return a.viol > b.viol; });
    for (std::size_t k = 0; k < take; ++k) out.push_back(hits[k].row);
    return total;
}

void ConstraintSystem::near_active_rows(const Eigen::VectorXd& v, double rel_slack,
                                        std::vector<DiffRow>& out) const {
    for (auto& h : holder) {
        int dmax = std::min(h.window, h.hi - h.lo);
        for (int d = 1; d <= dmax; ++d) {
            double b = h.bound(d, grid.delta);
            for (int i = h.lo; i + d <= h.hi; ++i) {
                double diff = v[i] - v[i + d];
                if (b - diff < rel_slack * b) out.push_back({i, i + d, b});
                if (b + diff < rel_slack * b) out.push_back({i + d, i, b});
            }
        }
    }
}

void ConstraintSystem::all_diff_rows(std::vector<DiffRow>& out) const {
    for (auto& h : holder) {
        int dmax = std::min(h.window, h.hi - h.lo);
        for (int d = 1; d <= dmax; ++d) {
            double b = h.bound(d, grid.delta);
            for (int i = h.lo; i + d <= h.hi; ++i) {
                out.push_back({i, i + d, b});
                out.push_back({i + d, i, b});
            }
        }
    }
    for (auto& d : decreasing)
        for (int i = d.first; i < d.second; ++i) out.push_back({i + 1, i, 0.0});
}

bool contains(const ConstraintSystem& cs, const FunctionOnGrid& f, double tol) {
    if (cs.grid != f.grid) throw std::invalid_argument("contains: grid mismatch");
    return cs.max_violation(f.v) <= tol;
}

namespace {

double pos(double x, const char* what) {
    if (!(x > 0)) throw std::invalid_argument(std::string("closed_form_modulus: ") + what + " must be positive");
    return x;
}

double holder_exp(double a) { return 2 * a / (2 * a + 1); }

}  // namespace

ClosedForm closed_form_modulus(Example ex, Which which, const ExampleParams& p, double eps) {
    if (!(eps > 0)) throw std::invalid_argument("closed_form_modulus: eps must be positive");
    ClosedForm out;
    switch (ex) {
        case Example::Ex1: {
            if (!(0 < p.a2 && p.a2 < p.a1 && p.a1 <= 1))
                throw std::invalid_argument("closed_form_modulus: Ex1 needs 0 < a2 < a1 <= 1");
            pos(p.M1, "M1");
            pos(p.M2, "M2");
            auto term = [&](double lead, double a, double M) {
                double q = holder_exp(a);
                return ClosedForm{std::pow(lead, a / (2 * a + 1)) * std::pow(M, 1 / (2 * a + 1)) * std::pow(eps, q), q,
                                  true};
            };
            switch (which) {
                case Which::F1: return term(p.a1 + 0.5, p.a1, p.M1);
                case Which::F2: return term(p.a2 + 0.5, p.a2, p.M2);
                default: return term(2 * p.a1 + 1, p.a1, p.M1);
            }
        }
        case Example::Ex2: {
            if (!(0 < p.a2 && p.a2 <= p.a1 && p.a1 <= 1 && 0 < p.b1 && p.b1 <= p.b2 && p.b2 <= 1))
                throw std::invalid_argument("closed_form_modulus: Ex2 needs 0<a2<=a1<=1 and 0<b1<=b2<=1");
            double e = 0;
            switch (which) {
                case Which::F1: e = std::max(p.a1, p.a2); break;
                case Which::F2: e = std::max(p.b1, p.b2); break;
                default: e = std::max(std::min(p.a1, p.b1), std::min(p.a2, p.b2)); break;
            }
            out.exponent = holder_exp(e);
            out.value = std::pow(eps, out.exponent);
            return out;
        }
        case Example::Ex3: {
            if (!(p.b1 > p.b2 && p.b2 > p.a1 && p.a1 > p.a2 && p.a2 > 0 && p.b1 <= 1))
                throw std::invalid_argument("closed_form_modulus: Ex3 needs 1>=b1>b2>a1>a2>0");
            double e = 0;
            switch (which) {
                case Which::F1: e = p.a1; break;
                case Which::F2: e = p.b1; break;
                case Which::F12: e = p.b2; break;
                case Which::F21: e = p.b1; break;
                case Which::Plus: {
                    double v12 = std::pow(eps, holder_exp(p.b2)), v21 = std::pow(eps, holder_exp(p.b1));
                    out.exponent = v12 >= v21 ? holder_exp(p.b2) : holder_exp(p.b1);
                    out.value = std::max(v12, v21);
                    return out;
                }
            }
            out.exponent = holder_exp(e);
            out.value = std::pow(eps, out.exponent);
            return out;
        }
    }
    return out;
}

ClassSpec example_class(Example ex, int which, const ExampleParams& p) {
    if (which != 1 && which != 2) throw std::invalid_argument("example_class: which must be 1 or 2");
    switch (ex) {
        case Example::Ex1:
            return which == 1 ? ClassSpec::intersect({ClassSpec::decreasing(), ClassSpec::lipschitz(p.a1, p.M1)})
                              : ClassSpec::intersect({ClassSpec::decreasing(), ClassSpec::lipschitz(p.a2, p.M2)});
        case Example::Ex2:
            return which == 1 ? ClassSpec::intersect(
                                    {ClassSpec::left_lipschitz(p.a1, p.M1), ClassSpec::right_lipschitz(p.a2, p.M2)})
                              : ClassSpec::intersect(
                                    {ClassSpec::left_lipschitz(p.b1, p.N1), ClassSpec::right_lipschitz(p.b2, p.N2)});
        case Example::Ex3:
            return which == 1 ? ClassSpec::intersect({ClassSpec::decreasing(), ClassSpec::left_lipschitz(p.a1, p.M1),
                                                      ClassSpec::right_lipschitz(p.a2, p.M2)})
                              : ClassSpec::intersect({ClassSpec::decreasing(), ClassSpec::left_lipschitz(p.b1, p.N1),
                                                      ClassSpec::right_lipschitz(p.b2, p.N2)});
    }
    return {};
}

}  // namespace lfa
