#include "lfadapt/estimators.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <sstream>

namespace lfa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_grid(const Grid& a, const Grid& b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

}  // namespace

BiasRange bias_range(const AffineEstimator& e, const ConstraintSystem& F, const Functional& T,
                     const SolverOptions& opts, const std::vector<const Eigen::VectorXd*>& hints) {
    require_same_grid(e.grid, F.grid, "bias_range");
    const Grid& G = F.grid;
    Eigen::VectorXd c = G.delta * e.w;
    c[T.index] -= 1.0;
    BiasRange br;
    int pin = -1;
    if (F.shift_invariant()) {
        // bias(f + const) = bias(f) + const * sum(c)
        double drift = c.sum();
        if (std::abs(drift) > 1e-9 * (1.0 + c.cwiseAbs().sum())) {
            br.sup_bias = kInf;
            br.inf_bias = -kInf;
            return br;
        }
        pin = T.index;
    }
    LinearMax hi = maximize_linear(F, c, pin, opts, hints);
    LinearMax lo = maximize_linear(F, -c, pin, opts, hints);
    br.sup_bias = e.c0 + hi.bound;
    br.inf_bias = e.c0 - lo.bound;
    br.status = hi.status != SolverStatus::Converged ? hi.status : lo.status;
    return br;
}

namespace {

// Estimator with slope s from the extremal pair in tr; V = s^2/n.
AffineEstimator from_pair(const ConstraintSystem& F, const ConstraintSystem& H, const Functional& T, double n,
                          double s, const TangentResult& tr, const EstimatorOptions& opts) {
    const Grid& G = F.grid;
    const bool invariant = F.shift_invariant() || H.shift_invariant();
    const Eigen::VectorXd& f = tr.mr.f_star.v;
    const Eigen::VectorXd& g = tr.mr.g_star.v;
    Eigen::VectorXd h = g - f;
    const double d = std::sqrt(G.delta * h.squaredNorm());

    AffineEstimator e;
    e.grid = G;
    double shift = 0.0;
    if (d == 0.0) {
        e.w = Eigen::VectorXd::Zero(G.m);
    } else if (invariant) {
        // w = a h + b with delta*sum(w) = 1 and delta*|w|^2 = s^2. At an exact
        // tangent pair b = 0 and a = s/d; solving for (a, b) absorbs the solver
        // error on the constant direction, which would otherwise make the bias
        // unbounded.
        const double h1 = G.delta * h.sum();
        const double spread = d * d - h1 * h1;
        const double a = spread > 0 ? std::sqrt((s * s - 1.0) / spread) : s / d;
        shift = 1.0 - a * h1;
        e.w = a * h;
        e.w.array() += shift;
    } else {
        e.w = (s / d) * h;
    }
    e.c0 = 0.5 * (g[T.index] + f[T.index]) - 0.5 * G.delta * e.w.dot(f + g);

    e.prov.kind = "ordered";
    e.prov.F = F.label;
    e.prov.H = H.label;
    e.prov.n = n;
    e.prov.V = s * s / n;
    e.prov.slope = s;
    e.prov.eps_star = tr.eps_star;
    e.prov.supval = tr.supval;
    e.prov.const_shift = shift;

    if (opts.certify) {
        const double allowed = 0.5 * tr.supval + opts.contract_tol;
        BiasRange bf = bias_range(e, F, T, opts.solver, {&f, &g});
        if (bf.sup_bias > allowed) {
            std::ostringstream os;
            os << "sup bias over " << F.label << " is " << bf.sup_bias << ", above supval/2 = " << 0.5 * tr.supval;
            throw ContractViolation(os.str(), bf.sup_bias - 0.5 * tr.supval);
        }
        BiasRange bh = bias_range(e, H, T, opts.solver, {&f, &g});
        if (bh.inf_bias < -allowed) {
            std::ostringstream os;
            os << "inf bias over " << H.label << " is " << bh.inf_bias << ", below -supval/2 = " << -0.5 * tr.supval;
            throw ContractViolation(os.str(), -0.5 * tr.supval - bh.inf_bias);
        }
    }
    return e;
}

}  // namespace

AffineEstimator ordered_estimator(const ConstraintSystem& F, const ConstraintSystem& H, const Functional& T, double V,
                                  double n, const EstimatorOptions& opts) {
    require_same_grid(F.grid, H.grid, "ordered_estimator");
    if (!(V > 0) || !std::isfinite(V)) throw std::invalid_argument("ordered_estimator: V must be positive and finite");
    if (!(n > 0) || !std::isfinite(n)) throw std::invalid_argument("ordered_estimator: n must be positive and finite");
    const double s = std::sqrt(n * V);
    if ((F.shift_invariant() || H.shift_invariant()) && s <= 1.0)
        throw std::invalid_argument(
            "ordered_estimator: V <= 1/n, but finite bias over a shift-invariant class needs delta*sum(w) = 1 and "
            "hence variance >= 1/n");
    TangentResult tr = tangent_epsilon(F, H, T, s, opts.solver);
    AffineEstimator e = from_pair(F, H, T, n, s, tr, opts);
    e.prov.V = V;
    return e;
}

AffineEstimator minimax_affine(const ConstraintSystem& F, const Functional& T, double n, const EstimatorOptions& opts) {
    if (!(n > 0) || !std::isfinite(n)) throw std::invalid_argument("minimax_affine: n must be positive and finite");
    // Minimise the worst-case MSE bound (supval/2)^2 + s^2/n, which is convex in
    // the slope s and hence unimodal along the penalised path. Start from the
    // penalty that reaches 1/sqrt(n).
    const double eps0 = 1.0 / std::sqrt(n);
    ModulusResult mr = usual_modulus(F, T, eps0, opts.solver);
    double kappa0 = mr.derivative > 0 ? mr.derivative / mr.achieved_distance : 1.0 / (eps0 * eps0);
    const bool invariant = F.shift_invariant();
    auto risk = [&](double omega, double d, double s) {
        if (invariant && s <= 1.0) return kInf;
        double half = 0.5 * (omega - s * d);
        return half * half + s * s / n;
    };
    TangentResult tr = minimize_along_path(F, F, T, risk, std::log(kappa0) - 4.5, std::log(kappa0) + 1.5, opts.solver);
    AffineEstimator e = from_pair(F, F, T, n, tr.slope, tr, opts);
    e.prov.kind = "minimax";
    return e;
}

namespace {

// Tightest bound the family gives on |v_i - v_j| at index distance dist, or +inf.
double implied_bound(const HolderFamily& h, int dist, double delta) {
    if (dist <= h.window) return h.bound(dist, delta);
    if (h.alpha == 1.0) return dist * h.bound(1, delta);
    return kInf;
}

bool family_implied(const HolderFamily& outer, const ConstraintSystem& inner, double delta) {
    const int dmax = std::min(outer.window, outer.hi - outer.lo);
    for (const auto& h : inner.holder) {
        if (h.lo > outer.lo || h.hi < outer.hi) continue;
        bool ok = true;
        for (int dist = 1; dist <= dmax && ok; ++dist)
            ok = implied_bound(h, dist, delta) <= outer.bound(dist, delta) * (1 + 1e-12);
        if (ok) return true;
    }
    return false;
}

bool same_support(const LinearRow& a, const LinearRow& b) {
    if (a.a.size() != b.a.size()) return false;
    for (std::size_t i = 0; i < a.a.size(); ++i)
        if (a.a[i] != b.a[i]) return false;
    return true;
}

}  // namespace

bool structurally_nested(const ConstraintSystem& inner, const ConstraintSystem& outer) {
    if (inner.grid != outer.grid) return false;
    for (const auto& h : outer.holder)
        if (!family_implied(h, inner, outer.grid.delta)) return false;
    for (const auto& [lo, hi] : outer.decreasing) {
        bool ok = false;
        for (const auto& [a, b] : inner.decreasing) ok = ok || (a <= lo && b >= hi);
        if (!ok) return false;
    }
    for (const auto& r : outer.rows) {
        bool ok = false;
        for (const auto& q : inner.rows) ok = ok || (same_support(q, r) && q.b <= r.b);
        if (!ok) return false;
    }
    return true;
}

ConstraintSystem hull_relaxation(const ConstraintSystem& a, const ConstraintSystem& b) {
    if (a.grid != b.grid) throw std::invalid_argument("hull_relaxation: grid mismatch");
    ConstraintSystem out;
    out.grid = a.grid;
    out.label = "hull(" + a.label + "," + b.label + ")";
    auto reach = [](const HolderFamily& h) { return h.alpha == 1.0 ? INT_MAX : h.window; };
    for (const auto& fa : a.holder)
        for (const auto& fb : b.holder) {
            int lo = std::max(fa.lo, fb.lo), hi = std::min(fa.hi, fb.hi);
            if (hi <= lo) continue;
            int w = std::min(reach(fa), reach(fb));
            double alpha = std::min(fa.alpha, fb.alpha);
            out.holder.push_back({alpha, std::max(fa.M, fb.M), lo, hi, w == INT_MAX ? 1 : w});
        }
    for (const auto& [la, ha] : a.decreasing)
        for (const auto& [lb, hb] : b.decreasing) {
            int lo = std::max(la, lb), hi = std::min(ha, hb);
            if (hi > lo) out.decreasing.push_back({lo, hi});
        }
    for (const auto& ra : a.rows)
        for (const auto& rb : b.rows)
            if (same_support(ra, rb)) out.rows.push_back({ra.a, std::max(ra.b, rb.b)});
    return out;
}

double union_modulus(const std::vector<const ConstraintSystem*>& Fs, const Functional& T, double eps,
                     const SolverOptions& opts) {
    double best = 0.0;
    for (auto* a : Fs)
        for (auto* b : Fs) best = std::max(best, ordered_modulus(*a, *b, T, eps, opts).value);
    return best;
}

AffineEstimator union_minimax(const std::vector<const ConstraintSystem*>& Fs, const Functional& T, double n,
                              const EstimatorOptions& opts, UnionCertificate* cert) {
    if (Fs.empty()) throw std::invalid_argument("union_minimax: empty class list");
    for (auto* F : Fs) require_same_grid(F->grid, Fs.front()->grid, "union_minimax");
    UnionCertificate local;
    UnionCertificate& c = cert ? *cert : local;
    c = UnionCertificate{};
    if (Fs.size() == 1) {
        c.nested = true;
        return minimax_affine(*Fs.front(), T, n, opts);
    }
    for (std::size_t j = 0; j < Fs.size(); ++j) {
        bool holds_all = true;
        for (std::size_t i = 0; i < Fs.size() && holds_all; ++i)
            holds_all = i == j || structurally_nested(*Fs[i], *Fs[j]);
        if (holds_all) {
            c.nested = true;
            c.outer = static_cast<int>(j);
            AffineEstimator e = minimax_affine(*Fs[j], T, n, opts);
            e.prov.kind = "union";
            return e;
        }
    }
    ConstraintSystem hull = *Fs.front();
    for (std::size_t i = 1; i < Fs.size(); ++i) hull = hull_relaxation(hull, *Fs[i]);
    const double eps = 1.0 / std::sqrt(n);
    const double wu = union_modulus(Fs, T, eps, opts.solver);
    const double wh = usual_modulus(hull, T, eps, opts.solver).value;
    c.hull_ratio = wu > 0 ? wh / wu : kInf;
    AffineEstimator e = minimax_affine(hull, T, n, opts);
    e.prov.kind = "union";
    return e;
}

double gaussian_fourth_moment(double mu, double sigma2) {
    return mu * mu * mu * mu + 6 * mu * mu * sigma2 + 3 * sigma2 * sigma2;
}

}  // namespace lfa
