#pragma once
// Convex parameter spaces as linear inequality systems on grid values.
//
// Canonical text form (used by configs and the CLI):
//   spec  := term ('+' term)*            '+' is intersection
//   term  := 'decreasing'
//          | kind '(' 'alpha=' num ',' 'M=' num ')'
//          | 'bounded(B=' num ')'         |v_i| <= B
//   kind  := 'lipschitz' | 'right_lipschitz' | 'left_lipschitz'
// e.g. "decreasing+lipschitz(alpha=1,M=1)".

#include "lfadapt/funcspace.hpp"

#include <string>
#include <vector>

namespace lfa {

struct ClassSpec {
    enum class Kind { Lipschitz, RightLipschitz, LeftLipschitz, Decreasing, Bounded, Intersection };
    Kind kind = Kind::Lipschitz;
    double alpha = 1.0;
    double M = 1.0;  // Hoelder constant, or the bound B for Bounded
    std::vector<ClassSpec> parts;

    static ClassSpec lipschitz(double alpha, double M);
    static ClassSpec right_lipschitz(double alpha, double M);
    static ClassSpec left_lipschitz(double alpha, double M);
    static ClassSpec decreasing();
    static ClassSpec bounded(double B);
    static ClassSpec intersect(std::vector<ClassSpec> parts);
};

// Throws std::invalid_argument with the offending position on bad input.
ClassSpec parse_class(const std::string& text);
std::string to_string(const ClassSpec& spec);
void validate(const ClassSpec& spec);

// v_i - v_j <= b
struct DiffRow {
    int i, j;
    double b;
};

// General sparse row a.v <= b.
struct LinearRow {
    std::vector<std::pair<int, double>> a;
    double b;
};

// |v_i - v_j| <= M (t_j - t_i)^alpha for lo <= i < j <= hi with j - i <= window.
struct HolderFamily {
    double alpha, M;
    int lo, hi, window;
    double bound(int d, double delta) const;
};

struct BuildOptions {
    // Pair window for alpha < 1 as a fraction of m; 1.0 keeps every pair.
    double window_frac = 0.25;
};

class ConstraintSystem {
public:
    Grid grid;
    std::string label;
    std::vector<HolderFamily> holder;
    std::vector<std::pair<int, int>> decreasing;  // index ranges [lo, hi]
    std::vector<LinearRow> rows;

    std::size_t num_rows() const;
    // True when v + c stays feasible for every constant c.
    bool shift_invariant() const { return rows.empty(); }
    double max_violation(const Eigen::VectorXd& v) const;

    // Rows that are always handed to the solver: adjacent Hoelder pairs, pairs
    // anchored at `anchor`, monotone rows. For alpha = 1 this is the full system.
    void base_rows(int anchor, std::vector<DiffRow>& out) const;
    // Appends Hoelder pair rows violated by more than tol, most violated first,
    // at most cap of them. Returns the total number violated.
    std::size_t violated_rows(const Eigen::VectorXd& v, double tol, std::size_t cap,
                              std::vector<DiffRow>& out) const;
    // Appends Hoelder pair rows with slack below rel_slack * bound at v.
    void near_active_rows(const Eigen::VectorXd& v, double rel_slack, std::vector<DiffRow>& out) const;
    // Every row written out; only sensible for small m.
    void all_diff_rows(std::vector<DiffRow>& out) const;
    // True if base_rows already equal the whole system.
    bool base_is_complete() const;
};

ConstraintSystem build_class(const ClassSpec& spec, const Grid& grid, const BuildOptions& opts = {});
bool contains(const ConstraintSystem& cs, const FunctionOnGrid& f, double tol);

// Leading-order moduli of the three worked examples.
enum class Example { Ex1, Ex2, Ex3 };
enum class Which { F1, F2, F12, F21, Plus };

// Ex1: F1 = decreasing+lipschitz(a1,M1), F2 = decreasing+lipschitz(a2,M2), 0<a2<a1<=1.
// Ex2: F1 = left(a1,M1)+right(a2,M2), F2 = left(b1,N1)+right(b2,N2),
//      0<a2<=a1<=1, 0<b1<=b2<=1.
// Ex3: the Ex2 classes intersected with decreasing, b1>b2>a1>a2.
struct ExampleParams {
    double a1 = 1, M1 = 1, a2 = 0.5, M2 = 1;
    double b1 = 1, N1 = 1, b2 = 1, N2 = 1;
};

struct ClosedForm {
    double value = 0;
    double exponent = 0;      // power of eps in the displayed term
    bool paper_constant = false;  // false: unit constant, exponent-only
};

// The displayed leading term C eps^q. For Ex1 the constant is explicit; Ex2 and
// Ex3 carry a unit constant. In our numerics these displays track omega itself
// (see README, "Moduli normalisation").
ClosedForm closed_form_modulus(Example ex, Which which, const ExampleParams& p, double eps);

ClassSpec example_class(Example ex, int which /*1 or 2*/, const ExampleParams& p);

}  // namespace lfa
