#pragma once
// Adaptive constructions built from ordered moduli: the two-class test and
// estimator, the nested ladder, the continuum grid ladder, lower-bound
// formulas and the three-case classifier.
//
// Every constant here is a pure function of moduli values obtained through a
// ModulusOracle. The live oracle runs the solver and logs each call; replaying
// the log through replay_oracle reproduces all constants bit-exactly.

#include "lfadapt/classes.hpp"
#include "lfadapt/estimators.hpp"
#include "lfadapt/funcspace.hpp"
#include "lfadapt/modulus.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

namespace lfa {

// One logged modulus value: omega(eps, classes[i], classes[j]) with 1-based
// indices into the list of classes the constants were built from.
struct ModulusRecord {
    int i = 0, j = 0;
    double eps = 0.0;
    double value = 0.0;
    SolverStatus status = SolverStatus::Converged;
};

using ModulusOracle = std::function<double(int i, int j, double eps)>;

// Memoises ordered moduli (and extremal pairs) for a fixed list of classes.
class ModuliCache {
public:
    ModuliCache(std::vector<const ConstraintSystem*> classes, Functional T, SolverOptions opts = {});

    // 1-based class indices; i == j gives the usual modulus.
    const ModulusResult& get(int i, int j, double eps);
    double value(int i, int j, double eps) { return get(i, j, eps).value; }
    // omega of the union of classes 1..upto (max over ordered pairs)
    double union_value(int upto, double eps);
    ModulusOracle oracle();

    const std::vector<ModulusRecord>& log() const { return log_; }
    const std::vector<const ConstraintSystem*>& classes() const { return classes_; }
    const Functional& functional() const { return T_; }
    const SolverOptions& options() const { return opts_; }

private:
    std::vector<const ConstraintSystem*> classes_;
    Functional T_;
    SolverOptions opts_;
    std::map<std::tuple<int, int, double>, ModulusResult> memo_;
    std::vector<ModulusRecord> log_;
};

// Looks values up in a log; throws std::out_of_range for a query not in it.
ModulusOracle replay_oracle(const std::vector<ModulusRecord>& log);

// ---------------------------------------------------------------- two classes

struct TestConstants {
    double n = 0.0;
    double gamma_12 = 0.0, gamma_21 = 0.0, gamma_plus = 0.0;
    double sigma2_12 = 0.0, sigma2_21 = 0.0;
    double b_12 = 0.0, b_21 = 0.0;
    double v_12 = 0.0, v_21 = 0.0;
    double omega_1 = 0.0;  // omega(1/sqrt n, F1)
    double omega_G = 0.0;  // omega(1/sqrt n, F1 u F2)
};

// Classes 1 and 2 of the oracle.
TestConstants two_space_formulas(const ModulusOracle& omega, double n);
TestConstants two_space_constants(ModuliCache& cache, double n);
TestConstants two_space_constants(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                                  double n, const SolverOptions& opts = {});

struct TwoSpaceAdaptive {
    Functional T;
    double n = 0.0;
    AffineEstimator T1, T12, T21, Tstar2;
    TestConstants constants;
    bool swapped = false;   // input classes were exchanged to put the smaller modulus first
    bool crossing = false;  // neither order dominates over the probe eps grid
    UnionCertificate union_cert;
    std::vector<ModulusRecord> moduli;
    std::string label_1, label_2;  // classes after any swap
};

struct Decision {
    int accept = 0;  // I_n
    double estimate = 0.0;
    double t1 = 0.0, t12 = 0.0, t21 = 0.0, tstar = 0.0;
};

// Precondition omega(eps, F1) <= omega(eps, F2) is probed at eps in
// {1/(2 sqrt n), 1/sqrt n, 2/sqrt n}; the classes are swapped when the reverse
// holds at every probe by more than 5%.
TwoSpaceAdaptive two_space_adaptive(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T,
                                    double n, const EstimatorOptions& opts = {});
Decision decide(const TwoSpaceAdaptive& ta, const Observation& obs);

// omega_+^2(sqrt(ln gamma_+ / n), F1, F2) + omega^2(1/sqrt n, F2)
double adaptation_benchmark(const ModulusOracle& omega, double n);
double adaptation_benchmark(const ConstraintSystem& F1, const ConstraintSystem& F2, const Functional& T, double n,
                            const SolverOptions& opts = {});

// ------------------------------------------------------------ lower bounds

using ModulusFn = std::function<double(double eps)>;

// gamma_n = max(e, omega_+(1/sqrt n) / (c_star omega_1)); returns
// omega_+^2(sqrt(ln gamma_n / n)) + omega_2^2 (outer constant taken as 1).
double theorem1_bound(double omega_1, double omega_2, const ModulusFn& omega_plus, double n, double c_star);
// [omega_+(sqrt(rho ln gamma_n^2 / n)) - gamma_n^-(1-rho) omega_+(1/sqrt n)]^2
double theorem2_bound(const ModulusFn& omega_plus, double n, double gamma_n, double rho);

enum class AdaptationCase { Case1, Case2, Case3 };
const char* to_string(AdaptationCase c);
// q1, q2, q12: exponents of omega^2 for F1, F2 and the between-class modulus.
AdaptationCase classify_case(double q1, double q2, double q12, double tol = 0.02);

// ------------------------------------------------------------------ ladder

struct LadderConstants {
    int k = 0;
    double n = 0.0;
    // 0-based storage of the 1-based quantities; diagonals unused
    std::vector<std::vector<double>> gamma, gamma_plus, b, v, sigma2;
    std::vector<double> A;
};

// Classes 1..k of the oracle, nested or modulus-nested.
LadderConstants ladder_formulas(const ModulusOracle& omega, int k, double n);

struct Ladder {
    Functional T;
    LadderConstants c;
    std::vector<std::string> labels;
    std::vector<AffineEstimator> Ti;                // Ti[i]: minimax over the union of classes 1..i+1
    std::vector<std::vector<AffineEstimator>> Tij;  // Tij[i][j], i != j
    std::vector<ModulusRecord> moduli;
    // threshold constants of the pairwise test
    double b_factor() const;  // 4 (2k)^{1/2} + 1
    double a_factor() const;  // 4 k^{1/2}
};

Ladder ladder_constants(const std::vector<const ConstraintSystem*>& spaces, const Functional& T, double n,
                        const EstimatorOptions& opts = {});

struct Selection {
    int index = 0;  // 1-based selected class
    double estimate = 0.0;
};

// I_{i,j} for i < j (1-based)
bool ladder_test(const Ladder& L, const std::vector<double>& ti, const std::vector<std::vector<double>>& tij, int i,
                 int j);
Selection ladder_adaptive(const Ladder& L, const Observation& obs);

// ---------------------------------------------------------- non-nested lists

struct PairCondition {
    int i = 0, j = 0;
    double constant = 0.0;  // max over l<=i, m<=j and eps of omega(F_l,F_m)/omega(F_i,F_j)
    bool pass = true;
};

struct UnionCondition {
    int upto = 0;
    double min_ratio = 1.0, max_ratio = 1.0;  // omega(hull of 1..upto) / omega(union of 1..upto)
    bool pass = true;
};

struct NonnestedReport {
    std::vector<double> eps_grid;
    double c_max = 0.0;
    std::vector<PairCondition> condition1;
    std::vector<UnionCondition> condition2;
    bool pass = true;
};

NonnestedReport check_nonnested_conditions(const std::vector<const ConstraintSystem*>& spaces, const Functional& T,
                                           const std::vector<double>& eps_grid, double c_max = 4.0,
                                           const SolverOptions& opts = {});

// ---------------------------------------------------------------- continuum

// Classes indexed by lambda in [lambda_lo, lambda_hi]; larger lambda is the
// smaller class.
struct ContinuumFamily {
    std::string name;
    double lambda_lo = 0.0, lambda_hi = 1.0;
    std::function<ConstraintSystem(double lambda)> make;
};

// lipschitz(alpha = lambda, M), optionally intersected with decreasing
ContinuumFamily lipschitz_family(const Grid& g, double alpha_lo, double alpha_hi, double M, bool decreasing = false);

struct GridChoice {
    std::vector<double> xi;     // xi_1 < ... < xi_k
    std::vector<int> members;   // index into the input set for each xi
};

// Lemma-style geometric grid over a finite set of positive values: xi_1 = min,
// xi_k = max, xi_{i+1} >= 2 xi_i for 2 <= i <= k-1, and every value w has
// some xi_i with xi_i/2 < w <= xi_i. Built greedily from the top, which is the
// only sequence with those properties. Throws std::runtime_error naming a
// witness if coverage fails.
GridChoice build_xi(const std::vector<double>& omega_set);

struct GridLadder {
    std::vector<double> xi;
    std::vector<double> lambdas;  // matched index for each xi
    int k = 0;
    double omega_min = 0.0, omega_max = 0.0;
    std::vector<double> probe_lambdas, probe_omegas;
    double eps = 0.0;  // sqrt(log n / n)
};

GridLadder build_grid_ladder(const ContinuumFamily& family, const Functional& T, double n, int probe_count,
                             const SolverOptions& opts = {});

struct ContinuumReport {
    std::vector<double> eps_grid, lambda_grid;
    // C1
    bool c1_nested = true;
    std::string c1_witness;
    // C2: omega(eps, F_lambda) between c1 eps^r and c2 eps^r
    std::vector<double> r;
    double c1 = 0.0, c2 = 0.0;  // c1 also covers the C3 ratio
    bool c2_monotone = true;
    // C3: ordering of moduli and omega_+ >= c1 omega(F_lambda2)
    bool c3_ordered = true;
    double c3_min_ratio = 0.0;
    bool c3_pass = true;
    // C4: probed moduli finite and positive
    std::vector<double> omega_min, omega_max;
    bool c4_pass = true;
    bool pass = true;
};

ContinuumReport check_continuum_conditions(const ContinuumFamily& family, const Functional& T,
                                           const std::vector<double>& eps_grid,
                                           const std::vector<double>& lambda_grid, const SolverOptions& opts = {});

struct ContinuumAdaptive {
    Functional T;
    double n = 0.0;
    GridLadder grid;
    std::vector<ConstraintSystem> spaces;           // F_1 (smallest) .. F_k
    std::vector<AffineEstimator> Ti;                // Ti[0] minimax over F_1; Ti[j] = T_{j,j}
    std::vector<std::vector<AffineEstimator>> Tij;  // i != j
    std::vector<double> threshold;                  // (11/2) omega(sqrt(log n/n), F_j)
    std::vector<double> b, v;                       // diagnostics (3/2) omega and (4/log n) omega^2
    std::vector<double> omega_log;                  // omega(sqrt(log n/n), F_j)
    double omega_1 = 0.0;                           // omega(1/sqrt n, F_1)
    std::vector<ModulusRecord> moduli;
};

ContinuumAdaptive continuum_adaptive(const ContinuumFamily& family, const Functional& T, double n, int probe_count,
                                     const EstimatorOptions& opts = {});
Selection evaluate(const ContinuumAdaptive& ca, const Observation& obs);

// ----------------------------------------------------------------- panels

struct PanelFunction {
    std::string id;
    FunctionOnGrid f;
};

// 0, plus extremal pairs (and their midpoints) of the ordered moduli between
// every pair of generator classes at each eps, kept when inside `target`.
std::vector<PanelFunction> hard_panel(const std::vector<const ConstraintSystem*>& generators,
                                      const ConstraintSystem& target, const Functional& T,
                                      const std::vector<double>& eps, const SolverOptions& opts = {},
                                      double tol = 1e-9);

}  // namespace lfa
