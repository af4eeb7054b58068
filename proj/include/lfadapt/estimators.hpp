#pragma once
// Affine estimators built from extremal pairs: the bias/variance-budgeted
// ordered estimator, the minimax affine estimator over one class, the union
// estimator, and LP certification of bias ranges.

#include "lfadapt/classes.hpp"
#include "lfadapt/funcspace.hpp"
#include "lfadapt/modulus.hpp"

#include <stdexcept>
#include <vector>

namespace lfa {

struct EstimatorOptions {
    SolverOptions solver;
    double contract_tol = 1e-6;  // absolute slack allowed on the certified bias bounds
    bool certify = true;
};

// sup and inf over a class of E[estimate] - Tf
struct BiasRange {
    double sup_bias = 0.0;
    double inf_bias = 0.0;
    SolverStatus status = SolverStatus::Converged;
};

BiasRange bias_range(const AffineEstimator& e, const ConstraintSystem& F, const Functional& T,
                     const SolverOptions& opts = {}, const std::vector<const Eigen::VectorXd*>& hints = {});

class ContractViolation : public std::runtime_error {
public:
    ContractViolation(const std::string& what, double slack) : std::runtime_error(what), slack(slack) {}
    double slack;  // measured excess over the allowed bound
};

// Variance exactly V; bias over F at most supval/2 and over H at least
// -supval/2, supval = sup_eps (omega(eps, F, H) - sqrt(nV) eps). With
// certify, both bounds are checked by bias_range and ContractViolation is
// thrown when either is exceeded by more than contract_tol.
AffineEstimator ordered_estimator(const ConstraintSystem& F, const ConstraintSystem& H, const Functional& T, double V,
                                  double n, const EstimatorOptions& opts = {});

// Ordered estimator with F = H at the slope minimising the worst-case MSE
// bound (supval/2)^2 + s^2/n.
AffineEstimator minimax_affine(const ConstraintSystem& F, const Functional& T, double n,
                               const EstimatorOptions& opts = {});

// Sound sufficient test: every constraint of `outer` is implied by a single
// constraint of `inner`, so inner is a subset of outer.
bool structurally_nested(const ConstraintSystem& inner, const ConstraintSystem& outer);

// Constraint-wise relaxation valid on both classes: Hoelder families on
// overlapping ranges merge to (min alpha, max M), monotone rows survive if both
// have them, boxes widen to the larger bound.
ConstraintSystem hull_relaxation(const ConstraintSystem& a, const ConstraintSystem& b);

struct UnionCertificate {
    bool nested = false;
    int outer = 0;            // index of the class used when nested
    double hull_ratio = 1.0;  // omega(1/sqrt n, hull) / omega(1/sqrt n, union)
};

// Minimax affine estimator over the union of the classes: the largest class when
// the list is nested, otherwise over the hull relaxation of the list.
AffineEstimator union_minimax(const std::vector<const ConstraintSystem*>& Fs, const Functional& T, double n,
                              const EstimatorOptions& opts = {}, UnionCertificate* cert = nullptr);

// omega(eps, union) = max over ordered pairs of classes
double union_modulus(const std::vector<const ConstraintSystem*>& Fs, const Functional& T, double eps,
                     const SolverOptions& opts = {});

// E X^4 for X ~ N(mu, sigma2)
double gaussian_fourth_moment(double mu, double sigma2);

}  // namespace lfa
