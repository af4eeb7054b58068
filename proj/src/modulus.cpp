#include "lfadapt/modulus.hpp"

#include "lfadapt/qp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lfa {

const char* to_string(SolverStatus s) {
    switch (s) {
        case SolverStatus::Converged: return "converged";
        case SolverStatus::MaxIters: return "max-iters";
        case SolverStatus::Infeasible: return "infeasible";
    }
    return "?";
}

namespace {

// Column layout for (f, g). When both classes are invariant under adding
// a constant, so is the whole problem, and f_k is pinned to 0 to remove that
// direction from the Newton systems.
struct Layout {
    int m = 0, k = 0;
    bool pin = false;
    int fcol(int i) const {
        if (pin && i == k) return -1;
        return pin && i > k ? i - 1 : i;
    }
    int gcol(int i) const { return (pin ? m - 1 : m) + i; }
    int nvar() const { return gcol(m); }
};

struct RowSet {
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> b;

    void add_diff(const DiffRow& r, const Layout& L, bool gblock) {
        int ci = gblock ? L.gcol(r.i) : L.fcol(r.i);
        int cj = gblock ? L.gcol(r.j) : L.fcol(r.j);
        int row = static_cast<int>(b.size());
        if (ci >= 0) trip.emplace_back(row, ci, 1.0);
        if (cj >= 0) trip.emplace_back(row, cj, -1.0);
        b.push_back(r.b);
    }
    void add_linear(const LinearRow& r, const Layout& L, bool gblock) {
        int row = static_cast<int>(b.size());
        for (auto& [i, a] : r.a) {
            int c = gblock ? L.gcol(i) : L.fcol(i);
            if (c >= 0) trip.emplace_back(row, c, a);
        }
        b.push_back(r.b);
    }
};

double interior_slope(const ConstraintSystem& a, const ConstraintSystem& b) {
    double c = 1.0;
    for (auto* cs : {&a, &b}) {
        for (auto& h : cs->holder) c = std::min(c, h.M);
        for (auto& r : cs->rows) c = std::min(c, std::abs(r.b));
    }
    return 0.25 * c;
}

// One extremal pair of the penalised problem
//   max Tg - Tf - (kappa/2) |g - f|^2  over f in F1, g in F2.
struct PairPoint {
    double kappa = 0, d = 0, value = 0, gap = 0;
    Eigen::VectorXd f, g;
    bool ok = false;        // QP converged and pair inside both classes
    bool unbounded = false;
};

// Holds the constraint rows found so far; cuts found at one kappa are kept for
// the next, so a search over kappa mostly reuses a settled row set.
class PairSolver {
public:
    PairSolver(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T, const SolverOptions& o)
        : F1_(F1), F2_(F2), opts_(o), G_(F1.grid) {
        if (F1.grid != F2.grid) throw std::invalid_argument("modulus: classes live on different grids");
        if (T.index < 0 || T.index >= G_.m) throw std::invalid_argument("modulus: functional index outside grid");
        L_.m = G_.m;
        L_.k = T.index;
        L_.pin = F1.shift_invariant() && F2.shift_invariant();
        const int n = L_.nvar();
        std::vector<DiffRow> base;
        F1.base_rows(L_.k, base);
        for (auto& r : base) rows_.add_diff(r, L_, false);
        base.clear();
        F2.base_rows(L_.k, base);
        for (auto& r : base) rows_.add_diff(r, L_, true);
        for (auto& r : F1.rows) rows_.add_linear(r, L_, false);
        for (auto& r : F2.rows) rows_.add_linear(r, L_, true);
        complete_ = F1.base_is_complete() && F2.base_is_complete();

        p_.n = n;
        p_.c = Eigen::VectorXd::Zero(n);
        if (L_.fcol(L_.k) >= 0) p_.c[L_.fcol(L_.k)] = 1.0;
        p_.c[L_.gcol(L_.k)] = -1.0;
        std::vector<Eigen::Triplet<double>> dt;
        for (int i = 0; i < G_.m; ++i) {
            dt.emplace_back(i, L_.gcol(i), 1.0);
            if (L_.fcol(i) >= 0) dt.emplace_back(i, L_.fcol(i), -1.0);
        }
        p_.D.resize(G_.m, n);
        p_.D.setFromTriplets(dt.begin(), dt.end());
        p_.weight = G_.delta;
        p_.x0 = Eigen::VectorXd::Zero(n);
        double cs = interior_slope(F1, F2);
        for (int i = 0; i < G_.m; ++i) {
            double v = -cs * (G_.t(i) - G_.t(L_.k));
            if (L_.fcol(i) >= 0) p_.x0[L_.fcol(i)] = v;
            p_.x0[L_.gcol(i)] = v;
        }
    }

    PairPoint solve(double kappa) {
        ++solves;
        p_.kappa = kappa;
        QpOptions qo;
        qo.tol_rel = std::min(1e-10, opts_.tol * 1e-4);
        PairPoint out;
        out.kappa = kappa;
        for (int round = 0; round <= opts_.max_cut_rounds; ++round) {
            if (built_rows_ != rows_.b.size()) {
                p_.A.resize(static_cast<int>(rows_.b.size()), p_.n);
                p_.A.setFromTriplets(rows_.trip.begin(), rows_.trip.end());
                p_.b = Eigen::Map<Eigen::VectorXd>(rows_.b.data(), rows_.b.size());
                built_rows_ = rows_.b.size();
            }
            QpResult qr = solve_qp(p_, qo);
            iterations += qr.iterations;
            out.gap = qr.gap;
            out.f.resize(G_.m);
            out.g.resize(G_.m);
            for (int i = 0; i < G_.m; ++i) {
                out.f[i] = L_.fcol(i) >= 0 ? qr.x[L_.fcol(i)] : 0.0;
                out.g[i] = qr.x[L_.gcol(i)];
            }
            out.value = out.g[L_.k] - out.f[L_.k];
            out.d = std::sqrt(G_.delta) * (out.g - out.f).norm();
            if (qr.status == QpResult::Status::Unbounded) {
                out.unbounded = true;
                return out;
            }
            if (qr.status != QpResult::Status::Converged) return out;
            if (complete_) {
                out.ok = true;
                return out;
            }
            std::vector<DiffRow> cut_f, cut_g;
            std::size_t nf = F1_.violated_rows(out.f, opts_.feas_tol, opts_.cut_batch, cut_f);
            std::size_t ng = F2_.violated_rows(out.g, opts_.feas_tol, opts_.cut_batch, cut_g);
            if (nf + ng == 0) {
                out.ok = true;
                return out;
            }
            ++cut_rounds;
            for (auto& r : cut_f) rows_.add_diff(r, L_, false);
            for (auto& r : cut_g) rows_.add_diff(r, L_, true);
        }
        return out;
    }

    const Grid& grid() const { return G_; }
    int iterations = 0, solves = 0, cut_rounds = 0;

private:
    const ConstraintSystem& F1_;
    const ConstraintSystem& F2_;
    SolverOptions opts_;
    Grid G_;
    Layout L_;
    RowSet rows_;
    bool complete_ = false;
    std::size_t built_rows_ = 0;
    QuadProgram p_;
};

// Finds log kappa where resid(point) changes sign. resid must be monotone in
// log kappa with the sign of `direction`; slope0 is a guess of its slope.
// Returns the last point; stop(point) may end the search early (true = stop).
template <class Resid, class Stop>
PairPoint search_kappa(PairSolver& S, double kappa0, double slope0, double tol, Resid resid, Stop stop) {
    double x = std::log(kappa0);
    PairPoint pt = S.solve(std::exp(x));
    double r = resid(pt);
    if (stop(pt, r) || std::abs(r) <= tol) return pt;
    double xa = x, ra = r;  // last point
    bool bracket = false;
    double xlo = 0, rlo = 0, xhi = 0, rhi = 0;  // r(xlo) and r(xhi) of opposite signs
    int side = 0;
    for (int it = 0; it < 80; ++it) {
        double xn;
        if (!bracket) {
            xn = xa - ra / slope0;
            xn = std::clamp(xn, xa - 6.0, xa + 6.0);
        } else {
            xn = (xlo * rhi - xhi * rlo) / (rhi - rlo);
            if (!(xn > std::min(xlo, xhi) && xn < std::max(xlo, xhi))) xn = 0.5 * (xlo + xhi);
        }
        pt = S.solve(std::exp(xn));
        double rn = resid(pt);
        if (stop(pt, rn) || std::abs(rn) <= tol) return pt;
        if (!bracket) {
            if ((rn > 0) != (ra > 0)) {
                bracket = true;
                xlo = xa, rlo = ra, xhi = xn, rhi = rn;
            } else if (std::abs(xn - xa) > 1e-12) {
                double sl = (rn - ra) / (xn - xa);
                if (sl * slope0 > 0) slope0 = sl;
            }
            xa = xn, ra = rn;
            continue;
        }
        // Illinois variant of regula falsi
        if ((rn > 0) == (rhi > 0)) {
            xhi = xn, rhi = rn;
            if (side == 1) rlo *= 0.5;
            side = 1;
        } else {
            xlo = xn, rlo = rn;
            if (side == -1) rhi *= 0.5;
            side = -1;
        }
        if (std::abs(xhi - xlo) < 1e-13) return pt;
    }
    return pt;
}

SolverStatus status_of(const PairPoint& p) {
    if (p.unbounded) return SolverStatus::Infeasible;
    return p.ok ? SolverStatus::Converged : SolverStatus::MaxIters;
}

void fill(ModulusResult& r, const PairPoint& p, const PairSolver& S) {
    const Grid& G = S.grid();
    r.status = status_of(p);
    r.f_star = FunctionOnGrid(G, p.f);
    r.g_star = FunctionOnGrid(G, p.g);
    r.value = p.value;
    r.achieved_distance = p.d;
    r.derivative = p.kappa * p.d;
    r.gap = p.gap;
    r.iterations = S.iterations;
    r.solves = S.solves;
    r.cut_rounds = S.cut_rounds;
}

constexpr double kLogTol = 1e-8;

}  // namespace

ModulusResult ordered_modulus(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                              double eps, const SolverOptions& opts) {
    if (!(eps >= 0)) throw std::invalid_argument("ordered_modulus: eps must be nonnegative");
    ModulusResult r;
    r.epsilon = eps;
    r.f_star = FunctionOnGrid::zeros(F1.grid);
    r.g_star = FunctionOnGrid::zeros(F1.grid);
    if (eps == 0.0) return r;
    PairSolver S(F1, F2, T, opts);
    const double kappa0 = std::pow(eps, -4.0 / 3.0);
    const double kappa_min = kappa0 * 1e-16;
    bool saturated = false;
    PairPoint pt = search_kappa(
        S, kappa0, -0.75, kLogTol,
        [&](const PairPoint& p) { return p.d > 0 ? std::log(p.d / eps) : -1e3; },
        [&](const PairPoint& p, double res) {
            if (!p.ok || p.value <= 0 || p.d <= 0) return true;
            if (res < 0 && p.kappa <= kappa_min) return saturated = true;
            return false;
        });
    if (saturated) {
        // the distance budget is never used up: the unpenalised problem is the answer
        PairPoint lp = S.solve(0.0);
        if (lp.ok && lp.d <= eps * (1 + 1e-9)) pt = lp;
    }
    fill(r, pt, S);
    if (saturated) r.derivative = 0.0;
    return r;
}

ModulusResult between_modulus(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                              double eps, const SolverOptions& opts) {
    ModulusResult a = ordered_modulus(F1, F2, T, eps, opts);
    ModulusResult b = ordered_modulus(F2, F1, T, eps, opts);
    if (b.value > a.value) {
        b.order = 21;
        return b;
    }
    a.order = 12;
    return a;
}

double tangent_floor(const Grid& g) { return g.delta * 1e-3; }

TangentResult tangent_epsilon(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T, double s,
                              const SolverOptions& opts) {
    if (!(s > 0)) throw std::invalid_argument("tangent_epsilon: slope must be positive");
    TangentResult out;
    out.slope = s;
    PairSolver S(F1, F2, T, opts);
    const double floor = tangent_floor(F1.grid);
    const double eps0 = std::clamp(std::pow(2.0 / (3.0 * s), 3.0), 10 * F1.grid.delta, 1.0);
    bool low = false, high = false;
    PairPoint pt = search_kappa(
        S, s / eps0, 0.25, kLogTol,
        [&](const PairPoint& p) { return p.d > 0 ? std::log(p.kappa * p.d / s) : -1e3; },
        [&](const PairPoint& p, double res) {
            if (!p.ok) return true;
            if (res < 0 && p.d < floor) return low = true;
            if (res > 0 && p.d > 1e3) return high = true;
            return false;
        });
    out.evaluations = S.solves;
    if (high)
        throw std::domain_error("tangent_epsilon: slope is below the asymptotic slope of the modulus");
    if (low || pt.d < floor) {
        // The penalty is steeper than the modulus at the origin: the supremum sits
        // at the bottom of the bracket.
        out.at_floor = true;
        out.mr = ordered_modulus(F1, F2, T, floor, opts);
        out.eps_star = floor;
        out.supval = out.mr.value - s * floor;
        out.evaluations += out.mr.solves;
        return out;
    }
    fill(out.mr, pt, S);
    out.mr.epsilon = pt.d;
    out.eps_star = pt.d;
    out.supval = pt.value - s * pt.d;
    return out;
}

TangentResult tangent_epsilon_golden(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                                     double s, const SolverOptions& opts, double log_tol) {
    if (!(s > 0)) throw std::invalid_argument("tangent_epsilon_golden: slope must be positive");
    TangentResult out;
    out.slope = s;
    double a = std::log(tangent_floor(F1.grid)), b = std::log(10.0);
    const double ig = (std::sqrt(5.0) - 1) / 2;
    auto phi = [&](double x) {
        ++out.evaluations;
        return ordered_modulus(F1, F2, T, std::exp(x), opts).value - s * std::exp(x);
    };
    double x1 = b - ig * (b - a), x2 = a + ig * (b - a);
    double f1 = phi(x1), f2 = phi(x2);
    while (b - a > log_tol) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ig * (b - a);
            f1 = phi(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ig * (b - a);
            f2 = phi(x2);
        }
    }
    double xs = 0.5 * (a + b);
    out.eps_star = std::exp(xs);
    out.mr = ordered_modulus(F1, F2, T, out.eps_star, opts);
    out.supval = out.mr.value - s * out.eps_star;
    out.at_floor = out.eps_star <= tangent_floor(F1.grid) * std::exp(2 * log_tol);
    return out;
}

TangentResult minimize_along_path(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                                  const PathObjective& objective, double log_kappa_lo, double log_kappa_hi,
                                  const SolverOptions& opts, double log_tol) {
    if (!(log_kappa_hi > log_kappa_lo)) throw std::invalid_argument("minimize_along_path: empty bracket");
    PairSolver S(F1, F2, T, opts);
    PairPoint best;
    double best_val = std::numeric_limits<double>::infinity();
    auto phi = [&](double x) {
        PairPoint p = S.solve(std::exp(x));
        if (!p.ok || p.d <= 0) return std::numeric_limits<double>::infinity();
        double v = objective(p.value, p.d, p.kappa * p.d);
        if (v < best_val) {
            best_val = v;
            best = std::move(p);
        }
        return v;
    };
    const double ig = (std::sqrt(5.0) - 1) / 2;
    double a = log_kappa_lo, b = log_kappa_hi;
    // widen when the minimum sits on an edge of the bracket
    for (int shifts = 0; shifts < 6; ++shifts) {
        double x1 = b - ig * (b - a), x2 = a + ig * (b - a);
        double f1 = phi(x1), f2 = phi(x2);
        const double width = b - a;
        const double a0 = a, b0 = b;
        while (b - a > log_tol) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - ig * (b - a);
                f1 = phi(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + ig * (b - a);
                f2 = phi(x2);
            }
        }
        if (a - a0 < 4 * log_tol && std::isfinite(best_val)) {
            b = a0 + log_tol;
            a = a0 - width;
        } else if (b0 - b < 4 * log_tol && std::isfinite(best_val)) {
            a = b0 - log_tol;
            b = b0 + width;
        } else {
            break;
        }
    }
    if (!std::isfinite(best_val)) throw std::runtime_error("minimize_along_path: no penalised solve converged");
    TangentResult out;
    fill(out.mr, best, S);
    out.mr.epsilon = best.d;
    out.eps_star = best.d;
    out.slope = best.kappa * best.d;
    out.supval = best.value - out.slope * best.d;
    out.evaluations = S.solves;
    return out;
}

LinearMax maximize_linear(const ConstraintSystem& F, const Eigen::VectorXd& c, int pin, const SolverOptions& opts,
                          const std::vector<const Eigen::VectorXd*>& hints) {
    const Grid& G = F.grid;
    if (c.size() != G.m) throw std::invalid_argument("maximize_linear: objective length differs from grid");
    if (pin >= G.m) throw std::invalid_argument("maximize_linear: pin index outside grid");
    // reuse the pair layout with an unused f block: g columns carry v
    Layout L;
    L.m = G.m;
    L.k = pin >= 0 ? pin : G.m / 2;
    L.pin = false;
    auto col = [&](int i) {
        if (pin < 0) return i;
        if (i == pin) return -1;
        return i > pin ? i - 1 : i;
    };
    const int n = pin >= 0 ? G.m - 1 : G.m;
    RowSet rows;
    auto add_diff = [&](const DiffRow& r) {
        int row = static_cast<int>(rows.b.size());
        if (col(r.i) >= 0) rows.trip.emplace_back(row, col(r.i), 1.0);
        if (col(r.j) >= 0) rows.trip.emplace_back(row, col(r.j), -1.0);
        rows.b.push_back(r.b);
    };
    {
        std::vector<DiffRow> base;
        F.base_rows(L.k, base);
        if (!F.base_is_complete())
            for (auto* h : hints) F.near_active_rows(*h, 1e-6, base);
        for (auto& r : base) add_diff(r);
        for (auto& r : F.rows) {
            int row = static_cast<int>(rows.b.size());
            for (auto& [i, a] : r.a)
                if (col(i) >= 0) rows.trip.emplace_back(row, col(i), a);
            rows.b.push_back(r.b);
        }
    }
    QuadProgram p;
    p.n = n;
    p.c = Eigen::VectorXd::Zero(n);
    p.x0 = Eigen::VectorXd::Zero(n);
    const double cs = interior_slope(F, F);
    for (int i = 0; i < G.m; ++i) {
        if (col(i) < 0) continue;
        p.c[col(i)] = -c[i];
        p.x0[col(i)] = -cs * (G.t(i) - G.t(L.k));
    }
    QpOptions qo;
    qo.tol_rel = std::min(1e-10, opts.tol * 1e-4);
    LinearMax out;
    out.status = SolverStatus::MaxIters;
    Eigen::VectorXd v(G.m);
    // A relaxation's value + gap bounds the sup from above and any feasible
    // hint bounds it from below; once they meet no further cuts are needed.
    double lower = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_hint;
    for (auto* h : hints) {
        Eigen::VectorXd u = *h;
        if (pin >= 0) u.array() -= u[pin];
        if (!contains(F, FunctionOnGrid(G, u), opts.feas_tol)) continue;
        if (c.dot(u) > lower) {
            lower = c.dot(u);
            best_hint = u;
        }
    }
    for (int round = 0; round <= opts.max_cut_rounds; ++round) {
        p.A.resize(static_cast<int>(rows.b.size()), n);
        p.A.setFromTriplets(rows.trip.begin(), rows.trip.end());
        p.b = Eigen::Map<Eigen::VectorXd>(rows.b.data(), rows.b.size());
        QpResult qr = solve_qp(p, qo);
        if (qr.status == QpResult::Status::Unbounded) {
            out.unbounded = true;
            out.status = SolverStatus::Infeasible;
            out.value = out.bound = std::numeric_limits<double>::infinity();
            return out;
        }
        for (int i = 0; i < G.m; ++i) v[i] = col(i) >= 0 ? qr.x[col(i)] : 0.0;
        out.arg = FunctionOnGrid(G, v);
        out.value = c.dot(v);
        if (qr.status != QpResult::Status::Converged) {
            out.bound = out.value + qr.gap;
            return out;
        }
        const double upper = out.value + qr.gap;
        if (upper - lower <= std::max(1e-13, opts.tol * std::abs(upper))) {
            if (lower > out.value) {
                out.value = lower;
                out.arg = FunctionOnGrid(G, best_hint);
            }
            out.bound = upper;
            out.status = SolverStatus::Converged;
            return out;
        }
        std::vector<DiffRow> cuts;
        if (!F.base_is_complete() && F.violated_rows(v, opts.feas_tol, opts.cut_batch, cuts) > 0) {
            for (auto& r : cuts) add_diff(r);
            continue;
        }
        out.bound = out.value + qr.gap;
        out.status = SolverStatus::Converged;
        return out;
    }
    return out;
}

ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& series) {
    if (series.size() < 4) throw std::invalid_argument("fit_exponent: need at least 4 points");
    double lo = series.front().first, hi = lo;
    for (auto& [e, w] : series) {
        if (!(e > 0) || !(w > 0)) throw std::invalid_argument("fit_exponent: eps and omega must be positive");
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    if (hi / lo < 10.0 * (1 - 1e-12)) throw std::invalid_argument("fit_exponent: eps must span at least a decade");
    const double n = static_cast<double>(series.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    ExponentFit fit;
    for (auto& [e, w] : series) {
        double x = std::log(e), y = 2 * std::log(w);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
        fit.epsilons.push_back(e);
    }
    double vx = sxx - sx * sx / n, vy = syy - sy * sy / n, cxy = sxy - sx * sy / n;
    fit.q_hat = cxy / vx;
    fit.c_hat = std::exp((sy - fit.q_hat * sx) / n);
    fit.r_squared = vy > 0 ? std::clamp(cxy * cxy / (vx * vy), 0.0, 1.0) : 1.0;
    return fit;
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    std::vector<double> out;
    if (count == 1) return {lo};
    for (int i = 0; i < count; ++i) out.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (count - 1)));
    return out;
}

}  // namespace lfa
