#include "tilelab/function_classes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tilelab {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kLogSizeGuard = 1048576.0;  // log|net| <= 2^20

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void capacity(bool ok, const char* msg) {
    if (!ok) throw std::length_error(msg);
}

}  // namespace

EntropyOrder::EntropyOrder(double c1_, double c2_) : c1(c1_), c2(c2_) {
    require(c1 > 0.0, "EntropyOrder: richness requires c1 > 0");
}

RateSolution rate_from_entropy(const EntropyOrder& order, double n) {
    require(n >= 2.0, "rate_from_entropy: n must be >= 2");
    // t = log(1/eps):  (c1 + 2) t + c2 log t = log n
    const double logn = std::log(n);
    auto F = [&](double t) { return (order.c1 + 2.0) * t + order.c2 * std::log(t) - logn; };
    double lo = order.c2 < 0.0 ? -order.c2 / (order.c1 + 2.0) + 1e-12 : 1e-9;
    double hi = std::max(2.0 * lo, 1.0);
    while (F(hi) < 0.0) hi *= 2.0;
    if (F(lo) > 0.0) {
        // no solution with eps < 1 at this n; report the boundary
        return {std::exp(-lo), -2.0 / (2.0 + order.c1)};
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (F(mid) < 0.0 ? lo : hi) = mid;
    }
    return {std::exp(-0.5 * (lo + hi)), -2.0 / (2.0 + order.c1)};
}

// ---------------------------------------------------------------------------
// GridFunction
// ---------------------------------------------------------------------------

GridFunction::GridFunction(int d, std::array<double, 2> lo, std::array<double, 2> hi,
                           std::array<int, 2> cells, std::vector<double> values)
    : d_(d), lo_(lo), hi_(hi), cells_(cells), values_(std::move(values)) {
    require(d == 1 || d == 2, "GridFunction: d must be 1 or 2");
    const std::size_t expect = d == 1 ? static_cast<std::size_t>(cells[0])
                                      : static_cast<std::size_t>(cells[0]) * cells[1];
    require(values_.size() == expect, "GridFunction: value count mismatch");
}

double GridFunction::operator()(std::span<const double> x) const {
    int idx[2] = {0, 0};
    for (int a = 0; a < d_; ++a) {
        const double w = (hi_[a] - lo_[a]) / cells_[a];
        int i = static_cast<int>(std::floor((x[a] - lo_[a]) / w));
        idx[a] = std::clamp(i, 0, cells_[a] - 1);
    }
    return d_ == 1 ? values_[idx[0]] : values_[static_cast<std::size_t>(idx[0]) * cells_[1] + idx[1]];
}

double GridFunction::l2_distance(const GridFunction& a, const GridFunction& b) {
    require(a.d_ == b.d_ && a.cells_ == b.cells_ && a.values_.size() == b.values_.size(),
            "GridFunction::l2_distance: grids must match");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        const double d = a.values_[i] - b.values_[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.values_.size()));
}

// ---------------------------------------------------------------------------
// ChainLattice
// ---------------------------------------------------------------------------

namespace detail {

double ChainLattice::log_count() const {
    std::vector<double> p(levels, 1.0 / levels);
    double log_total = std::log(static_cast<double>(levels));
    std::vector<double> q(levels);
    for (long t = 0; t < transitions; ++t) {
        // prefix sums give the +-band window in O(levels)
        std::vector<double> pre(levels + 1, 0.0);
        for (int v = 0; v < levels; ++v) pre[v + 1] = pre[v] + p[v];
        double s = 0.0;
        for (int v = 0; v < levels; ++v) {
            const int lo = std::max(0, v - band);
            const int hi = std::min(levels - 1, v + band);
            q[v] = pre[hi + 1] - pre[lo];
            s += q[v];
        }
        log_total += std::log(s);
        for (int v = 0; v < levels; ++v) p[v] = q[v] / s;
    }
    return log_total;
}

int ChainLattice::quantize(double v) const {
    const int raw = static_cast<int>(std::lround((v - value_min) / value_step));
    return std::clamp(raw, 0, levels - 1);
}

int ChainLattice::clamp_to_band(int raw, int prev) const {
    const int lo = std::max(0, prev - band);
    const int hi = std::min(levels - 1, prev + band);
    return std::clamp(raw, lo, hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// LipschitzNet
// ---------------------------------------------------------------------------

LipschitzNet::LipschitzNet(int d, double alpha, double C, double B, double epsilon)
    : d_(d), alpha_(alpha), C_(C), B_(B), epsilon_(epsilon) {
    require(d == 1 || d == 2, "LipschitzNet: d must be 1 or 2");
    require(alpha > 0.0 && alpha <= 1.0, "LipschitzNet: alpha must lie in (0,1]");
    require(C > 0.0 && B > 0.0 && epsilon > 0.0, "LipschitzNet: C, B, epsilon must be > 0");

    // within-cell variation <= C (w sqrt(d)/2)^alpha <= eps/2, quantization
    // step eps contributes eps/2: sup error <= eps, hence L2(uniform) <= eps.
    const double w_target =
        2.0 / std::sqrt(static_cast<double>(d)) * std::pow(epsilon / (2.0 * C), 1.0 / alpha);
    const double per_axis_f = std::max(1.0, std::ceil(1.0 / w_target));
    const double levels_f = std::ceil(2.0 * B / epsilon) + 1.0;
    capacity(per_axis_f <= (d == 2 ? 450.0 : 200000.0) && levels_f <= 20000.0,
             "LipschitzNet: capacity guard exceeded");
    const int per_axis = static_cast<int>(per_axis_f);
    cells_ = {per_axis, d == 2 ? per_axis : 1};
    total_cells_ = static_cast<long>(per_axis) * (d == 2 ? per_axis : 1);
    cell_width_ = 1.0 / per_axis;

    lattice_.value_step = epsilon;
    lattice_.value_min = -B;
    lattice_.levels = std::max(1, static_cast<int>(levels_f));
    lattice_.transitions = total_cells_ - 1;
    lattice_.band =
        static_cast<int>(std::ceil(C * std::pow(cell_width_, alpha) / epsilon - 1e-12)) + 1;
    const double log_estimate = lattice_.transitions * std::log(2.0 * lattice_.band + 1.0) +
                                std::log(static_cast<double>(lattice_.levels));
    capacity(log_estimate <= kLogSizeGuard, "LipschitzNet: log-size guard exceeded");
}

double LipschitzNet::log_size() const { return lattice_.log_count(); }

std::vector<int> LipschitzNet::chain_quantize(
    const std::function<double(std::span<const double>)>& g) const {
    // chain order: first column top-down, then each row left to right; every
    // transition spans one cell width
    std::vector<int> levels(total_cells_, 0);
    auto center = [&](int i) { return (i + 0.5) * cell_width_; };
    if (d_ == 1) {
        for (int i = 0; i < cells_[0]; ++i) {
            const double x = center(i);
            const int raw = lattice_.quantize(g(std::span<const double>(&x, 1)));
            levels[i] = i == 0 ? raw : lattice_.clamp_to_band(raw, levels[i - 1]);
        }
        return levels;
    }
    for (int i = 0; i < cells_[0]; ++i) {
        for (int j = 0; j < cells_[1]; ++j) {
            const double x[2] = {center(i), center(j)};
            const int raw = lattice_.quantize(g(std::span<const double>(x, 2)));
            const std::size_t at = static_cast<std::size_t>(i) * cells_[1] + j;
            if (i == 0 && j == 0) {
                levels[at] = raw;
            } else if (j == 0) {
                levels[at] = lattice_.clamp_to_band(raw, levels[at - cells_[1]]);
            } else {
                levels[at] = lattice_.clamp_to_band(raw, levels[at - 1]);
            }
        }
    }
    return levels;
}

GridFunction LipschitzNet::from_levels(const std::vector<int>& levels) const {
    std::vector<double> vals(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i) vals[i] = lattice_.level_value(levels[i]);
    return GridFunction(d_, {0.0, 0.0}, {1.0, 1.0}, cells_, std::move(vals));
}

GridFunction LipschitzNet::cover(const std::function<double(std::span<const double>)>& g) const {
    return from_levels(chain_quantize(g));
}

std::vector<GridFunction> LipschitzNet::enumerate(std::size_t limit) const {
    require(d_ == 1, "LipschitzNet::enumerate: only d=1 nets are materialized");
    std::vector<GridFunction> out;
    std::vector<int> stack(total_cells_, 0);
    // iterative DFS over chain-admissible level assignments
    std::function<void(int)> rec = [&](int pos) {
        if (pos == total_cells_) {
            capacity(out.size() < limit, "LipschitzNet::enumerate: capacity exceeded");
            out.push_back(from_levels(stack));
            return;
        }
        const int lo = pos == 0 ? 0 : std::max(0, stack[pos - 1] - lattice_.band);
        const int hi =
            pos == 0 ? lattice_.levels - 1 : std::min(lattice_.levels - 1, stack[pos - 1] + lattice_.band);
        for (int v = lo; v <= hi; ++v) {
            stack[pos] = v;
            rec(pos + 1);
        }
    };
    rec(0);
    return out;
}

// ---------------------------------------------------------------------------
// MultiIndexNet
// ---------------------------------------------------------------------------

double MultiIndexFn::operator()(std::span<const double> x) const {
    double s = 0.0;
    for (const auto& part : parts_) {
        double t = 0.0;
        for (std::size_t a = 0; a < part.beta.size(); ++a) t += part.beta[a] * x[a];
        s += part.lambda(t);
    }
    return s;
}

MultiIndexNet::MultiIndexNet(int p, int s, double gamma, double L, double B, int d, double epsilon)
    : p_(p), d_(d), gamma_(gamma), L_(L), B_(B), epsilon_(epsilon) {
    require(p >= 1 && p <= 3, "MultiIndexNet: p must lie in {1,2,3}");
    require(s == 0, "MultiIndexNet: explicit nets are built for s=0 links (alpha <= 1)");
    require(gamma > 0.0 && gamma <= 1.0, "MultiIndexNet: gamma must lie in (0,1]");
    require(L > 0.0 && B > 0.0 && epsilon > 0.0, "MultiIndexNet: L, B, epsilon must be > 0");
    require(d >= 1 && d <= 3, "MultiIndexNet: d must lie in {1,2,3}");

    domain_half_ = std::sqrt(static_cast<double>(d));
    const double eps_s = epsilon / (2.0 * p);
    const double w = 2.0 * std::pow(eps_s / (2.0 * L), 1.0 / gamma);
    const double cells_f = std::max(1.0, std::ceil(2.0 * domain_half_ / w));
    capacity(cells_f <= 200000.0, "MultiIndexNet: capacity guard exceeded");
    const int cells = static_cast<int>(cells_f);
    profile_cells_ = {cells, 1};
    profile_cell_width_ = 2.0 * domain_half_ / cells;

    profile_lattice_.value_step = eps_s;
    profile_lattice_.value_min = -B;
    profile_lattice_.levels = std::max(1, static_cast<int>(std::ceil(2.0 * B / eps_s)) + 1);
    profile_lattice_.transitions = cells - 1;
    profile_lattice_.band = static_cast<int>(std::ceil(
                                L * std::pow(profile_cell_width_, gamma) / eps_s - 1e-12)) +
                            1;
    capacity(cells <= 200000 && profile_lattice_.levels <= 20000,
             "MultiIndexNet: capacity guard exceeded");

    const double l_star = L * std::pow(1.0 + d, s + 1);
    const double delta_t = std::pow(epsilon / (2.0 * p * l_star), 1.0 / gamma);
    if (d == 1) {
        directions_ = {{1.0}, {-1.0}};
    } else if (d == 2) {
        const int m = std::max<int>(4, static_cast<int>(std::ceil(kPi / delta_t)));
        capacity(m <= 1000000, "MultiIndexNet: direction net guard exceeded");
        for (int j = 0; j < m; ++j) {
            const double a = 2.0 * kPi * j / m;
            directions_.push_back({std::cos(a), std::sin(a)});
        }
    } else {
        const double dp = delta_t / 2.0;
        const int mt = std::max<int>(2, static_cast<int>(std::ceil(kPi / dp)));
        const int mp = std::max<int>(4, static_cast<int>(std::ceil(2.0 * kPi / dp)));
        capacity(static_cast<long>(mt) * mp <= 4000000,
                 "MultiIndexNet: direction net guard exceeded");
        for (int i = 0; i < mt; ++i) {
            const double th = (i + 0.5) * kPi / mt;
            for (int j = 0; j < mp; ++j) {
                const double ph = 2.0 * kPi * j / mp;
                directions_.push_back(
                    {std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
            }
        }
    }
    const double log_estimate =
        p_ * (profile_lattice_.transitions * std::log(2.0 * profile_lattice_.band + 1.0) +
              std::log(static_cast<double>(profile_lattice_.levels)) +
              std::log(static_cast<double>(directions_.size())));
    capacity(log_estimate <= kLogSizeGuard, "MultiIndexNet: log-size guard exceeded");
}

double MultiIndexNet::profile_log_size() const { return profile_lattice_.log_count(); }

double MultiIndexNet::log_size() const {
    return p_ * (profile_log_size() + std::log(static_cast<double>(directions_.size())));
}

GridFunction MultiIndexNet::quantize_profile(const std::function<double(double)>& lambda) const {
    const int cells = profile_cells_[0];
    std::vector<int> levels(cells, 0);
    for (int i = 0; i < cells; ++i) {
        const double t = -domain_half_ + (i + 0.5) * profile_cell_width_;
        const int raw = profile_lattice_.quantize(lambda(t));
        levels[i] = i == 0 ? raw : profile_lattice_.clamp_to_band(raw, levels[i - 1]);
    }
    std::vector<double> vals(levels.size());
    for (std::size_t i = 0; i < levels.size(); ++i)
        vals[i] = profile_lattice_.level_value(levels[i]);
    return GridFunction(1, {-domain_half_, 0.0}, {domain_half_, 1.0}, profile_cells_,
                        std::move(vals));
}

std::size_t MultiIndexNet::nearest_direction(std::span<const double> beta) const {
    std::size_t best = 0;
    double best_dot = -2.0;
    for (std::size_t j = 0; j < directions_.size(); ++j) {
        double dot = 0.0;
        for (std::size_t a = 0; a < beta.size(); ++a) dot += beta[a] * directions_[j][a];
        if (dot > best_dot) {
            best_dot = dot;
            best = j;
        }
    }
    return best;
}

MultiIndexFn MultiIndexNet::cover(const std::vector<std::function<double(double)>>& lambdas,
                                  const std::vector<std::vector<double>>& betas) const {
    require(static_cast<int>(lambdas.size()) == p_ && betas.size() == lambdas.size(),
            "MultiIndexNet::cover: need exactly p (lambda, beta) components");
    std::vector<RidgeComponent> parts;
    parts.reserve(p_);
    for (int i = 0; i < p_; ++i) {
        RidgeComponent rc;
        rc.beta = directions_[nearest_direction(betas[i])];
        rc.lambda = quantize_profile(lambdas[i]);
        parts.push_back(std::move(rc));
    }
    return MultiIndexFn(std::move(parts));
}

// ---------------------------------------------------------------------------

long packing_entropy_bruteforce(const std::vector<GridFunction>& members, double separation) {
    capacity(members.size() <= 10000, "packing_entropy_bruteforce: |net| must be <= 1e4");
    require(separation >= 0.0, "packing_entropy_bruteforce: separation must be >= 0");
    std::vector<const GridFunction*> kept;
    for (const auto& m : members) {
        bool ok = true;
        for (const auto* k : kept) {
            if (GridFunction::l2_distance(m, *k) <= separation) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(&m);
    }
    return static_cast<long>(kept.size());
}

double scale_class_net_log_size(double C, int d, double epsilon) {
    require(C > 0.0 && d >= 1 && epsilon > 0.0, "scale_class_net_log_size: bad arguments");
    const double delta = 2.0 * epsilon * std::exp(-C * d) / d;
    const long per_axis = std::max<long>(1, static_cast<long>(std::ceil(2.0 * C / delta)));
    return d * std::log(static_cast<double>(per_axis));
}

// ---------------------------------------------------------------------------
// random class members
// ---------------------------------------------------------------------------

namespace {

// reflected random walk: |increment| <= C*dx keeps the Lipschitz constant,
// reflection at +-B keeps the bound
std::vector<double> reflected_walk(Rng& rng, int knots, double max_step, double B) {
    std::vector<double> v(knots);
    v[0] = (2.0 * rng.uniform() - 1.0) * B;
    for (int i = 1; i < knots; ++i) {
        double next = v[i - 1] + (2.0 * rng.uniform() - 1.0) * max_step;
        if (next > B) next = 2.0 * B - next;
        if (next < -B) next = -2.0 * B - next;
        v[i] = std::clamp(next, -B, B);
    }
    return v;
}

double interp(const std::vector<double>& v, double lo, double hi, double x) {
    const int n = static_cast<int>(v.size());
    const double t = std::clamp((x - lo) / (hi - lo), 0.0, 1.0) * (n - 1);
    const int i = std::min(static_cast<int>(t), n - 2);
    const double w = t - i;
    return v[i] * (1.0 - w) + v[i + 1] * w;
}

}  // namespace

std::function<double(std::span<const double>)> random_lipschitz_fn(Rng& rng, int d, double C,
                                                                   double B, int knots) {
    if (d == 1) {
        auto v = reflected_walk(rng, knots, C / (knots - 1), B);
        return [v](std::span<const double> x) { return interp(v, 0.0, 1.0, x[0]); };
    }
    require(d == 2, "random_lipschitz_fn: d must be 1 or 2");
    auto v1 = reflected_walk(rng, knots, C / (knots - 1), B);
    auto v2 = reflected_walk(rng, knots, C / (knots - 1), B);
    return [v1, v2](std::span<const double> x) {
        return 0.5 * (interp(v1, 0.0, 1.0, x[0]) + interp(v2, 0.0, 1.0, x[1]));
    };
}

std::function<double(double)> random_link_fn(Rng& rng, double L, double B, double half,
                                             int knots) {
    auto v = reflected_walk(rng, knots, L * (2.0 * half) / (knots - 1), B);
    return [v, half](double t) { return interp(v, -half, half, t); };
}

double l2_distance_uniform(const std::function<double(std::span<const double>)>& a,
                           const std::function<double(std::span<const double>)>& b, int d,
                           int pts_per_axis) {
    require(d == 1 || d == 2, "l2_distance_uniform: d must be 1 or 2");
    double s = 0.0;
    if (d == 1) {
        for (int i = 0; i < pts_per_axis; ++i) {
            const double x = (i + 0.5) / pts_per_axis;
            const double diff = a(std::span<const double>(&x, 1)) - b(std::span<const double>(&x, 1));
            s += diff * diff;
        }
        return std::sqrt(s / pts_per_axis);
    }
    for (int i = 0; i < pts_per_axis; ++i) {
        for (int j = 0; j < pts_per_axis; ++j) {
            const double x[2] = {(i + 0.5) / pts_per_axis, (j + 0.5) / pts_per_axis};
            const double diff = a(std::span<const double>(x, 2)) - b(std::span<const double>(x, 2));
            s += diff * diff;
        }
    }
    return std::sqrt(s / (static_cast<double>(pts_per_axis) * pts_per_axis));
}

}  // namespace tilelab
