#pragma once
// Sparse convex QP
//   minimise c.x + (kappa/2) * weight * |D x|^2   subject to  A x <= b
// by a Mehrotra predictor-corrector interior point method. Each iteration
// factors Q + A^T diag(lambda/s) A once and reuses it for both solves.

#include <Eigen/Sparse>

namespace lfa {

struct QuadProgram {
    int n = 0;
    Eigen::VectorXd c;
    Eigen::SparseMatrix<double, Eigen::RowMajor> A;
    Eigen::VectorXd b;
    Eigen::SparseMatrix<double> D;  // may be empty (LP)
    double weight = 1.0;
    double kappa = 0.0;
    Eigen::VectorXd x0;  // starting point; need not be feasible
};

struct QpOptions {
    double tol_rel = 1e-9;  // complementarity gap relative to max(1e-300, |objective|, scale)
    double tol_abs = 1e-15;
    double scale = 0.0;
    int max_iter = 200;
    double unbounded_norm = 1e9;
};

struct QpResult {
    enum class Status { Converged, MaxIters, Unbounded, Failed };
    Status status = Status::Failed;
    Eigen::VectorXd x, lambda;
    double obj = 0.0;
    double gap = 0.0;  // s.lambda at exit; bounds obj - min when residuals vanish
    int iterations = 0;
};

QpResult solve_qp(const QuadProgram& p, const QpOptions& opts = {});

const char* to_string(QpResult::Status s);

}  // namespace lfa
