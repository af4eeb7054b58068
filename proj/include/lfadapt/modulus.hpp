#pragma once
// Ordered and between-class moduli of a point functional over pairs of
// constraint systems, plus the slope-matched (tangent) problem and exponent fits.

#include "lfadapt/classes.hpp"
#include "lfadapt/funcspace.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace lfa {

struct SolverOptions {
    double tol = 1e-6;            // relative, on the objective
    double feas_tol = 1e-11;      // accepted constraint violation of the returned pair
    int max_cut_rounds = 40;
    std::size_t cut_batch = 4000;
};

enum class SolverStatus { Converged, MaxIters, Infeasible };
const char* to_string(SolverStatus s);

struct ModulusResult {
    double epsilon = 0.0;
    double value = 0.0;
    FunctionOnGrid f_star, g_star;
    double achieved_distance = 0.0;
    SolverStatus status = SolverStatus::Converged;
    double gap = 0.0;        // duality gap of the last penalised solve
    double derivative = 0.0; // d omega / d eps at achieved_distance (Lagrange multiplier)
    int order = 12;          // for between_modulus: which ordered modulus won
    int iterations = 0;      // interior point iterations over all solves
    int solves = 0;
    int cut_rounds = 0;
};

// sup { Tg - Tf : f in F1, g in F2, |g - f|_2 <= eps }
ModulusResult ordered_modulus(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                              double eps, const SolverOptions& opts = {});
// max of the two ordered moduli
ModulusResult between_modulus(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                              double eps, const SolverOptions& opts = {});
inline ModulusResult usual_modulus(const ConstraintSystem& F, const Functional& T, double eps,
                                   const SolverOptions& opts = {}) {
    return ordered_modulus(F, F, T, eps, opts);
}

struct TangentResult {
    double eps_star = 0.0;
    double supval = 0.0;  // omega(eps*) - s eps*
    double slope = 0.0;
    ModulusResult mr;     // pair at eps*
    bool at_floor = false;
    int evaluations = 0;
};

// Maximises omega(eps, F1, F2) - s eps. The extremal pair of
//   max Tg - Tf - (kappa/2) |g - f|_2^2
// sits at distance d(kappa) with derivative kappa * d(kappa); kappa is tuned
// until that derivative equals s. Throws std::domain_error when s is below the
// asymptotic slope of the modulus (no finite maximiser).
TangentResult tangent_epsilon(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T, double s,
                              const SolverOptions& opts = {});
// Golden-section search over log eps in [delta*1e-3, 10]; one modulus solve per probe.
TangentResult tangent_epsilon_golden(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                                     double s, const SolverOptions& opts = {}, double log_tol = 1e-4);

double tangent_floor(const Grid& g);

// objective(omega, eps, slope) evaluated at points of the penalised path
using PathObjective = std::function<double(double, double, double)>;

// Golden-section search over log kappa for the path point minimising the
// objective, which must be unimodal along the path. Each probe is one
// penalised solve, so an outer search over slopes costs no inner tangent
// searches. The bracket is widened when the minimum lands on an edge.
TangentResult minimize_along_path(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                                  const PathObjective& objective, double log_kappa_lo, double log_kappa_hi,
                                  const SolverOptions& opts = {}, double log_tol = 2e-3);

struct LinearMax {
    double value = 0.0;  // c.v at the returned maximiser
    double bound = 0.0;  // value + duality gap; +inf when unbounded
    FunctionOnGrid arg;
    SolverStatus status = SolverStatus::Converged;
    bool unbounded = false;
};

// sup { c.v : v in F }, with v[pin] = 0 when pin >= 0 (used for classes that are
// invariant under constant shifts when the objective ignores constants).
// Pair rows nearly tight at the hint functions seed the cutting-plane loop.
LinearMax maximize_linear(const ConstraintSystem& F, const Eigen::VectorXd& c, int pin,
                          const SolverOptions& opts = {}, const std::vector<const Eigen::VectorXd*>& hints = {});

struct ExponentFit {
    double q_hat = 0.0;      // slope of log omega^2 against log eps
    double c_hat = 0.0;      // omega^2 ~ c_hat eps^q_hat
    double r_squared = 0.0;
    std::vector<double> epsilons;
};

// Least squares of log omega^2 on log eps. Needs >= 4 points over >= 1 decade.
ExponentFit fit_exponent(const std::vector<std::pair<double, double>>& series);

std::vector<double> log_spaced(double lo, double hi, int count);

}  // namespace lfa
