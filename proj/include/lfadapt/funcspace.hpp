#pragma once
// Uniform binning of [-1/2, 1/2], point functionals, binned white-noise
// observations and affine estimators acting on them.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lfa {

// Bin centres t_i = -1/2 + delta/2 + i*delta, i = 0..m-1. The grid is fully
// determined by m, so it is cheap to copy.
struct Grid {
    int m = 0;
    double delta = 0.0;

    double t(int i) const { return -0.5 + 0.5 * delta + i * delta; }
    Eigen::VectorXd points() const;
    // Index of the bin centre nearest to t0 (ties go to the left bin).
    int nearest(double t0) const;
    bool operator==(const Grid& o) const { return m == o.m; }
    bool operator!=(const Grid& o) const { return m != o.m; }
};

Grid make_grid(int m);

struct FunctionOnGrid {
    Grid grid;
    Eigen::VectorXd v;

    FunctionOnGrid() = default;
    FunctionOnGrid(const Grid& g, Eigen::VectorXd values);
    static FunctionOnGrid zeros(const Grid& g);
    static FunctionOnGrid from(const Grid& g, const std::function<double(double)>& fn);
};

double l2_distance(const FunctionOnGrid& f, const FunctionOnGrid& g);
double l2_norm(const FunctionOnGrid& f);

// Point evaluation Tf = f(t0), realised on the nearest bin.
struct Functional {
    double t0 = 0.0;
    int index = 0;
};

Functional point_functional(const Grid& g, double t0 = 0.0);
double eval_functional(const Functional& T, const FunctionOnGrid& f);

// Binned increments Y_i = f(t_i) delta + sqrt(delta/n) z_i. n may be +inf,
// which gives the noiseless surrogate.
struct Observation {
    Grid grid;
    Eigen::VectorXd y;
    double n = 1.0;
    std::uint64_t seed = 0;
    std::uint64_t rep = 0;
};

Observation sample_observation(const FunctionOnGrid& f, double n, std::uint64_t seed,
                               std::uint64_t rep = 0);

// Fills z with standard normals for sub-stream (seed, rep). Philox4x32-10
// counter blocks feed Box-Muller pairs, so z_i depends only on (seed, rep, i).
void standard_normals(std::uint64_t seed, std::uint64_t rep, Eigen::Ref<Eigen::VectorXd> z);

struct Provenance {
    std::string kind;      // "ordered", "minimax", "union", "unit"
    std::string F, H;      // canonical class strings
    double n = 0.0;
    double V = 0.0;
    double slope = 0.0;    // s = sqrt(nV)
    double eps_star = 0.0;
    double supval = 0.0;   // omega(eps*) - s eps*
    double const_shift = 0.0;  // weight added on the constant direction
};

// c0 + sum_i w_i Y_i.
struct AffineEstimator {
    Grid grid;
    double c0 = 0.0;
    Eigen::VectorXd w;
    Provenance prov;

    double variance_at(double n) const { return grid.delta * w.squaredNorm() / n; }
    // E[c0 + w.Y] under f
    double mean_at(const FunctionOnGrid& f) const;
};

double apply_affine(const AffineEstimator& e, const Observation& obs);

}  // namespace lfa
