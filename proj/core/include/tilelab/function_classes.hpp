#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "tilelab/rng.hpp"

namespace tilelab {

// ============================================================================
// Metric-entropy machinery: explicit epsilon-nets at desk scale, packing
// counts, entropy-order algebra and the rate equation M(eps_n) = n eps_n^2.
// ============================================================================

// Entropy order M(eps) ~ (1/eps)^c1 * (log 1/eps)^c2 with c1 > 0 (richness).
struct EntropyOrder {
    double c1 = 1.0;
    double c2 = 0.0;

    EntropyOrder(double c1_, double c2_);
};

struct RateSolution {
    double epsilon_n = 0.0;
    double risk_exponent = 0.0;  // risk ~ n^{risk_exponent}; equals -2/(2+c1)
};

// Solves (1/eps)^c1 (log 1/eps)^c2 = n eps^2 by bisection on log(1/eps).
RateSolution rate_from_entropy(const EntropyOrder& order, double n);

// Piecewise-constant function on a uniform grid over a box (d = 1 or 2).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(int d, std::array<double, 2> lo, std::array<double, 2> hi,
                 std::array<int, 2> cells, std::vector<double> values);

    double operator()(std::span<const double> x) const;
    double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

    int dim() const { return d_; }
    const std::vector<double>& values() const { return values_; }
    std::array<int, 2> cells() const { return cells_; }

    // Exact L2(uniform) distance between functions on the same grid.
    static double l2_distance(const GridFunction& a, const GridFunction& b);

private:
    int d_ = 1;
    std::array<double, 2> lo_{0.0, 0.0}, hi_{1.0, 1.0};
    std::array<int, 2> cells_{1, 1};
    std::vector<double> values_;
};

namespace detail {

// Chain-constrained value lattice shared by the explicit nets: cells in a
// fixed raster order, first cell free on the lattice, each later cell within
// +-band lattice steps of its chain predecessor. Counting is an exact DP.
struct ChainLattice {
    int levels = 0;       // lattice size: values -B, -B+step, ..., B
    double value_min = 0.0;
    double value_step = 1.0;
    long transitions = 0;
    int band = 0;

    double log_count() const;  // exact log cardinality via renormalized DP
    int quantize(double v) const;
    int clamp_to_band(int raw, int prev) const;
    double level_value(int i) const { return value_min + i * value_step; }
};

}  // namespace detail

// Explicit net for Lip(alpha; C) balls on [0,1]^d, |g| <= B, alpha in (0,1],
// d in {1,2}. Members are chain-constrained piecewise constants; the greedy
// chain quantization of any class member is a net member within epsilon in
// L2(uniform).
class LipschitzNet {
public:
    LipschitzNet(int d, double alpha, double C, double B, double epsilon);

    double epsilon() const { return epsilon_; }
    double log_size() const;
    long total_cells() const { return total_cells_; }

    GridFunction cover(const std::function<double(std::span<const double>)>& g) const;

    // Materializes every member (d=1 only); throws std::length_error if the
    // net is larger than `limit`.
    std::vector<GridFunction> enumerate(std::size_t limit) const;

    std::array<int, 2> cells_per_axis() const { return cells_; }

private:
    int d_;
    double alpha_, C_, B_, epsilon_;
    std::array<int, 2> cells_{1, 1};
    long total_cells_ = 1;
    double cell_width_ = 1.0;
    detail::ChainLattice lattice_;

    std::vector<int> chain_quantize(const std::function<double(std::span<const double>)>& g) const;
    GridFunction from_levels(const std::vector<int>& levels) const;
};

// One component of a multi-index member: a ridge function lambda(beta' x).
struct RidgeComponent {
    GridFunction lambda;       // 1-D profile on [-sqrt(d), sqrt(d)]
    std::vector<double> beta;  // unit vector
};

class MultiIndexFn {
public:
    explicit MultiIndexFn(std::vector<RidgeComponent> parts) : parts_(std::move(parts)) {}
    double operator()(std::span<const double> x) const;
    const std::vector<RidgeComponent>& parts() const { return parts_; }

private:
    std::vector<RidgeComponent> parts_;
};

// Product net for p-index models with Holder(s=0, gamma; L) links on [0,1]^d:
// a 1-D profile net S at sup-norm radius eps/(2p) times a direction net T at
// radius (eps/(2p L*))^(1/gamma), L* = L (1+d)^(s+1).
class MultiIndexNet {
public:
    MultiIndexNet(int p, int s, double gamma, double L, double B, int d, double epsilon);

    double epsilon() const { return epsilon_; }
    double log_size() const;
    std::size_t direction_count() const { return directions_.size(); }
    double profile_log_size() const;  // log |S|

    MultiIndexFn cover(const std::vector<std::function<double(double)>>& lambdas,
                       const std::vector<std::vector<double>>& betas) const;

private:
    int p_, d_;
    double gamma_, L_, B_, epsilon_;
    double domain_half_;  // sqrt(d)
    std::array<int, 2> profile_cells_{1, 1};
    double profile_cell_width_ = 1.0;
    detail::ChainLattice profile_lattice_;
    std::vector<std::vector<double>> directions_;

    GridFunction quantize_profile(const std::function<double(double)>& lambda) const;
    std::size_t nearest_direction(std::span<const double> beta) const;
};

// Greedy maximal packing of the members at the given separation (exact L2 on
// the shared grid). Order-deterministic; lower-bounds the true packing number.
long packing_entropy_bruteforce(const std::vector<GridFunction>& members, double separation);

// log-size of an eps-net for the parametric scale class
// {exp(sum_i c_i x_i) : |c_i| <= C} on [0,1]^d under L2(uniform); grows like
// d log(1/eps), dominated by every nonparametric class here.
double scale_class_net_log_size(double C, int d, double epsilon);

// --- random class members (covering-test oracles and CLI summaries) ---------

// Piecewise-linear on `knots` knots, |slope| <= C, reflected at +-B.
std::function<double(std::span<const double>)> random_lipschitz_fn(Rng& rng, int d, double C,
                                                                   double B, int knots = 33);

// Random 1-D Holder(s=0, gamma=1) link with constant <= L, |lambda| <= B on
// [-half, half].
std::function<double(double)> random_link_fn(Rng& rng, double L, double B, double half,
                                             int knots = 33);

// Numeric L2(uniform) distance on [0,1]^d between arbitrary callables.
double l2_distance_uniform(const std::function<double(std::span<const double>)>& a,
                           const std::function<double(std::span<const double>)>& b, int d,
                           int pts_per_axis = 512);

}  // namespace tilelab
