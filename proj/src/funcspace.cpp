#include "lfadapt/funcspace.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lfa {

Eigen::VectorXd Grid::points() const {
    Eigen::VectorXd p(m);
    for (int i = 0; i < m; ++i) p[i] = t(i);
    return p;
}

int Grid::nearest(double t0) const {
    // t(i) = t0  <=>  i = (t0 + 1/2)/delta - 1/2
    double x = (t0 + 0.5) / delta - 0.5;
    int i = static_cast<int>(std::ceil(x - 0.5));
    if (i < 0) i = 0;
    if (i > m - 1) i = m - 1;
    return i;
}

Grid make_grid(int m) {
    if (m < 2) throw std::invalid_argument("make_grid: m must be >= 2");
    Grid g;
    g.m = m;
    g.delta = 1.0 / m;
    return g;
}

FunctionOnGrid::FunctionOnGrid(const Grid& g, Eigen::VectorXd values) : grid(g), v(std::move(values)) {
    if (v.size() != g.m) throw std::invalid_argument("FunctionOnGrid: value count differs from grid size");
    if (!v.allFinite()) throw std::invalid_argument("FunctionOnGrid: non-finite value");
}

FunctionOnGrid FunctionOnGrid::zeros(const Grid& g) { return FunctionOnGrid(g, Eigen::VectorXd::Zero(g.m)); }

FunctionOnGrid FunctionOnGrid::from(const Grid& g, const std::function<double(double)>& fn) {
    Eigen::VectorXd v(g.m);
    for (int i = 0; i < g.m; ++i) v[i] = fn(g.t(i));
    return FunctionOnGrid(g, std::move(v));
}

double l2_distance(const FunctionOnGrid& f, const FunctionOnGrid& g) {
    if (f.grid != g.grid) throw std::invalid_argument("l2_distance: grid mismatch");
    return std::sqrt(f.grid.delta * (g.v - f.v).squaredNorm());
}

double l2_norm(const FunctionOnGrid& f) { return std::sqrt(f.grid.delta * f.v.squaredNorm()); }

Functional point_functional(const Grid& g, double t0) {
    if (t0 < -0.5 || t0 > 0.5) throw std::invalid_argument("point_functional: t0 outside [-1/2, 1/2]");
    return Functional{t0, g.nearest(t0)};
}

double eval_functional(const Functional& T, const FunctionOnGrid& f) {
    if (T.index < 0 || T.index >= f.grid.m) throw std::invalid_argument("eval_functional: index outside grid");
    return f.v[T.index];
}

namespace {

// Philox4x32-10 (Salmon et al., SC'11), as in Random123.
struct Philox4x32 {
    using ctr_t = std::array<std::uint32_t, 4>;
    static constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    static constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;

    static ctr_t eval(ctr_t c, std::uint32_t k0, std::uint32_t k1) {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                k0 += W0;
                k1 += W1;
            }
            std::uint64_t p0 = std::uint64_t(M0) * c[0];
            std::uint64_t p1 = std::uint64_t(M1) * c[2];
            c = {std::uint32_t(p1 >> 32) ^ c[1] ^ k0, std::uint32_t(p1), std::uint32_t(p0 >> 32) ^ c[3] ^ k1,
                 std::uint32_t(p0)};
        }
        return c;
    }
};

inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
    std::uint64_t x = (std::uint64_t(hi) << 32) | lo;
    return (double(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

void standard_normals(std::uint64_t seed, std::uint64_t rep, Eigen::Ref<Eigen::VectorXd> z) {
    const auto k0 = std::uint32_t(seed), k1 = std::uint32_t(seed >> 32);
    const Eigen::Index n = z.size();
    for (Eigen::Index j = 0; 2 * j < n; ++j) {
        auto out = Philox4x32::eval({std::uint32_t(j), std::uint32_t(std::uint64_t(j) >> 32), std::uint32_t(rep),
                                     std::uint32_t(rep >> 32)},
                                    k0, k1);
        double u1 = open_unit(out[0], out[1]);
        double u2 = open_unit(out[2], out[3]);
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * std::numbers::pi * u2;
        z[2 * j] = r * std::cos(a);
        if (2 * j + 1 < n) z[2 * j + 1] = r * std::sin(a);
    }
}

Observation sample_observation(const FunctionOnGrid& f, double n, std::uint64_t seed, std::uint64_t rep) {
    if (!(n > 0)) throw std::invalid_argument("sample_observation: n must be positive");
    Observation obs;
    obs.grid = f.grid;
    obs.n = n;
    obs.seed = seed;
    obs.rep = rep;
    obs.y = f.v * f.grid.delta;
    if (std::isfinite(n)) {
        Eigen::VectorXd z(f.grid.m);
        standard_normals(seed, rep, z);
        obs.y += std::sqrt(f.grid.delta / n) * z;
    }
    return obs;
}

double AffineEstimator::mean_at(const FunctionOnGrid& f) const {
    if (f.grid != grid) throw std::invalid_argument("AffineEstimator::mean_at: grid mismatch");
    return c0 + grid.delta * w.dot(f.v);
}

double apply_affine(const AffineEstimator& e, const Observation& obs) {
    if (e.grid != obs.grid) throw std::invalid_argument("apply_affine: grid mismatch");
    return e.c0 + e.w.dot(obs.y);
}

}  // namespace lfa
