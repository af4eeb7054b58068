#include "lfadapt/qp.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace lfa {

const char* to_string(QpResult::Status s) {
    switch (s) {
        case QpResult::Status::Converged: return "converged";
        case QpResult::Status::MaxIters: return "max-iters";
        case QpResult::Status::Unbounded: return "unbounded";
        case QpResult::Status::Failed: return "failed";
    }
    return "?";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

bool trace() {
    static const bool on = std::getenv("LFA_TRACE") != nullptr;
    return on;
}

double max_step(const Vec& v, const Vec& dv) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (dv[i] < 0) a = std::min(a, -v[i] / dv[i]);
    return a;
}

}  // namespace

QpResult solve_qp(const QuadProgram& p, const QpOptions& opts) {
    QpResult res;
    const int n = p.n;
    const auto m = p.A.rows();
    const SpMat At = p.A.transpose();
    SpMat Q(n, n);
    if (p.D.nonZeros() > 0 && p.kappa != 0) Q = (p.kappa * p.weight) * (p.D.transpose() * p.D);
    auto qx = [&](const Vec& x) -> Vec { return Q.nonZeros() ? Vec(Q * x) : Vec(Vec::Zero(n)); };

    Vec x = p.x0;
    Vec s = p.b - p.A * x;
    const double cn = std::max(p.c.lpNorm<Eigen::Infinity>(), 1e-300);
    double floor_s = 1e-8 * std::max(1.0, s.size() ? s.cwiseAbs().maxCoeff() : 1.0);
    for (Eigen::Index i = 0; i < m; ++i) s[i] = std::max(s[i], floor_s);
    // duals on the central path through x0 for the best-fitting path parameter
    double tau = 1.0;
    {
        Vec g = At * s.cwiseInverse();
        double gg = g.squaredNorm();
        Vec r = p.c + qx(x);
        if (gg > 0) tau = std::max(1e-300, -r.dot(g) / gg);
        if (!(tau > 0) || !std::isfinite(tau)) tau = cn;
        tau = std::max(tau, 1e-6 * cn * (s.size() ? s.minCoeff() : 1.0));
    }
    // keep the duals at the scale of c so the first steps can cancel the dual residual
    Vec lam = (tau * s.cwiseInverse()).array() + cn;

    // tiny shift so directions touched by nothing stay factorizable; scaling it with
    // the barrier weights (which grow without bound) would perturb the steps
    const double reg = 1e-14 * std::max(1.0, Q.nonZeros() ? Q.diagonal().maxCoeff() : 0.0);
    Eigen::SimplicialLDLT<SpMat> ldlt;
    bool analysed = false;
    res.status = QpResult::Status::MaxIters;
    const double bn = std::max(1.0, p.b.size() ? p.b.lpNorm<Eigen::Infinity>() : 1.0);
    // Best iterate by the worst ratio of residual to tolerance. Degenerate
    // problems can stall just short of the gap target and then drift; the best
    // point is returned when it is within kSlack of every tolerance.
    constexpr double kSlack = 100.0;
    double best_merit = INFINITY;
    int best_it = 0;
    Vec bx = x, bs = s, bl = lam;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
        Vec Qx = qx(x);
        Vec rd = Qx + p.c + At * lam;
        Vec rp = p.A * x + s - p.b;
        double gap = s.dot(lam);
        double obj = p.c.dot(x) + 0.5 * x.dot(Qx);
        double scale = std::max({std::abs(obj), opts.scale, 1e-300});
        double rdn = rd.lpNorm<Eigen::Infinity>(), rpn = rp.size() ? rp.lpNorm<Eigen::Infinity>() : 0.0;
        if (trace()) std::fprintf(stderr, "qp it=%d obj=%.15g gap=%.3g rd=%.3g rp=%.3g\n", it, obj, gap, rdn, rpn);
        if (!std::isfinite(gap) || !std::isfinite(rdn) || !std::isfinite(obj)) break;
        const double merit = std::max({gap / std::max(opts.tol_abs, opts.tol_rel * scale), rdn / (1e-7 * cn),
                                       rpn / (1e-12 * bn)});
        if (merit <= 1.0) {
            res.status = QpResult::Status::Converged;
            best_merit = merit;
            bx = x, bs = s, bl = lam;
            break;
        }
        if (merit < best_merit) {
            best_merit = merit;
            best_it = it;
            bx = x, bs = s, bl = lam;
        } else if (it - best_it > 15) {
            break;  // stalled
        }

        Vec w = lam.cwiseQuotient(s);
        SpMat M = At * w.asDiagonal() * p.A;
        if (Q.nonZeros()) M += Q;
        for (int j = 0; j < n; ++j) M.coeffRef(j, j) += reg;
        if (!analysed) {
            ldlt.analyzePattern(M);
            analysed = true;
        }
        ldlt.factorize(M);
        // near the end the barrier weights span ~1e20 and the pivots can lose
        // positivity; a larger diagonal shift is enough to finish
        double shift = reg;
        const double diag_max = M.diagonal().cwiseAbs().maxCoeff();
        for (int retry = 0; ldlt.info() != Eigen::Success && retry < 8; ++retry) {
            const double bump = std::max(shift * 100, 1e-16 * diag_max) - shift;
            for (int j = 0; j < n; ++j) M.coeffRef(j, j) += bump;
            shift += bump;
            ldlt.factorize(M);
        }
        if (ldlt.info() != Eigen::Success) {
            res.status = QpResult::Status::Failed;
            break;
        }
        // Newton step for residuals (rd, rp, lam.*s - target)
        auto direction = [&](const Vec& rc, Vec& dx, Vec& ds, Vec& dl) {
            Vec rhs = -rd + At * (rc - lam.cwiseProduct(rp)).cwiseQuotient(s);
            dx = ldlt.solve(rhs);
            ds = -rp - p.A * dx;
            dl = -(rc + lam.cwiseProduct(ds)).cwiseQuotient(s);
        };
        Vec dxa, dsa, dla;
        Vec rc = lam.cwiseProduct(s);
        direction(rc, dxa, dsa, dla);
        double aa = std::min(max_step(s, dsa), max_step(lam, dla));
        double mu = gap / std::max<double>(1, m);
        double mu_aff = (s + aa * dsa).dot(lam + aa * dla) / std::max<double>(1, m);
        double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        rc += dsa.cwiseProduct(dla);
        rc.array() -= sigma * mu;
        Vec dx, ds, dl;
        direction(rc, dx, ds, dl);
        double ap = max_step(s, ds), ad = max_step(lam, dl);
        double a = std::min(1.0, 0.995 * std::min(ap, ad));
        x += a * dx;
        s += a * ds;
        lam += a * dl;
        if (x.lpNorm<Eigen::Infinity>() > opts.unbounded_norm) {
            res.status = QpResult::Status::Unbounded;
            break;
        }
    }
    if (res.status != QpResult::Status::Unbounded) {
        x = bx, s = bs, lam = bl;
        if (best_merit <= kSlack) res.status = QpResult::Status::Converged;
    }
    res.x = x;
    res.lambda = lam;
    res.obj = p.c.dot(x) + 0.5 * x.dot(qx(x));
    res.gap = res.status == QpResult::Status::Unbounded ? std::numeric_limits<double>::infinity() : s.dot(lam);
    res.iterations = it;
    return res;
}

}  // namespace lfa
