#include "tilelab/psi_tile.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tilelab/quadrature.hpp"

namespace tilelab {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

// Leftmost point where the nondecreasing predicate value crosses >= 0,
// bracketed by g(lo) < 0 <= g(hi). Plateaus at exactly zero resolve to their
// left edge, matching the definition's infimum rule.
template <typename G>
double infimal_root(const G& g, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (g(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

constexpr double kRootTol = 1e-10;

}  // namespace

std::string to_string(PsiKind kind) {
    switch (kind) {
        case PsiKind::Constant: return "constant";
        case PsiKind::Linear: return "linear";
        case PsiKind::Momentile: return "momentile";
        case PsiKind::Huber: return "huber";
    }
    return "?";
}

PsiKind psi_kind_from_string(const std::string& name) {
    if (name == "constant" || name == "quantile") return PsiKind::Constant;
    if (name == "linear" || name == "expectile") return PsiKind::Linear;
    if (name == "momentile") return PsiKind::Momentile;
    if (name == "huber") return PsiKind::Huber;
    throw std::invalid_argument("unknown psi generator: " + name);
}

PsiSpec PsiSpec::quantile(double tau) {
    require(tau > 0.0 && tau < 1.0, "PsiSpec: level must lie in (0,1)");
    return PsiSpec{PsiKind::Constant, 1, tau};
}

PsiSpec PsiSpec::expectile(double phi) {
    require(phi > 0.0 && phi < 1.0, "PsiSpec: level must lie in (0,1)");
    return PsiSpec{PsiKind::Linear, 1, phi};
}

PsiSpec PsiSpec::momentile(int k, double phi) {
    require(k >= 1, "PsiSpec: momentile order must be >= 1");
    require(phi > 0.0 && phi < 1.0, "PsiSpec: level must lie in (0,1)");
    return PsiSpec{PsiKind::Momentile, k, phi};
}

PsiSpec PsiSpec::huber(double phi) {
    require(phi > 0.0 && phi < 1.0, "PsiSpec: level must lie in (0,1)");
    return PsiSpec{PsiKind::Huber, 1, phi};
}

double PsiSpec::psi(double t) const {
    switch (kind) {
        case PsiKind::Constant: return 1.0;
        case PsiKind::Linear: return t;
        case PsiKind::Momentile:
            return k == 1 ? 1.0 : static_cast<double>(k) * std::pow(t, k - 1);
        case PsiKind::Huber: return 2.0 * std::min(t, 1.0);
    }
    return 0.0;
}

int PsiSpec::required_moment() const {
    switch (kind) {
        case PsiKind::Constant: return 0;
        case PsiKind::Linear: return 1;
        case PsiKind::Momentile: return k - 1;
        case PsiKind::Huber: return 0;
    }
    return 0;
}

std::string PsiSpec::describe() const {
    std::string s = to_string(kind);
    if (kind == PsiKind::Momentile) s += "(k=" + std::to_string(k) + ")";
    return s + "@" + std::to_string(level);
}

double loss_eval(const TailLoss& loss, double z) {
    const PsiSpec& p = loss.psi;
    const double w = z >= 0.0 ? p.level : 1.0 - p.level;
    const double a = std::abs(z);
    switch (p.kind) {
        case PsiKind::Constant: return w * a;
        case PsiKind::Linear: return w * a * a / 2.0;
        case PsiKind::Momentile: return w * std::pow(a, p.k);
        case PsiKind::Huber: return w * (a <= 1.0 ? a * a : 2.0 * a - 1.0);
    }
    return 0.0;
}

namespace {

void check_admissible(const ErrorFamily& f, const PsiSpec& psi) {
    const int m = psi.required_moment();
    if (!has_absolute_moment(f, m))
        throw MomentError("generator " + psi.describe() + " requires E|eps|^" + std::to_string(m) +
                          " which does not exist for " + f.describe());
}

// Population G(z) = (1-phi) * int_{-inf}^z psi(z-y) f dy
//                 -    phi  * int_z^{inf}  psi(y-z) f dy.
double population_g(const LocScaleMember& m, const PsiSpec& psi, double z) {
    QuadOptions<double> opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-13;

    std::vector<double> left_breaks{z};
    if (m.eta < z) left_breaks.push_back(m.eta);
    if (psi.kind == PsiKind::Huber) left_breaks.push_back(z - 1.0);
    std::sort(left_breaks.begin(), left_breaks.end());
    double left = 0.0;
    {
        auto f = [&](double y) { return psi.psi(z - y) * pdf(m, y); };
        auto r = integrate_half_line_left(f, left_breaks.front(), m.sigma, opt);
        left += r.value;
        for (std::size_t i = 0; i + 1 < left_breaks.size(); ++i)
            left += integrate_interval(f, left_breaks[i], left_breaks[i + 1], opt).value;
    }

    std::vector<double> right_breaks{z};
    if (m.eta > z) right_breaks.push_back(m.eta);
    if (psi.kind == PsiKind::Huber) right_breaks.push_back(z + 1.0);
    std::sort(right_breaks.begin(), right_breaks.end());
    double right = 0.0;
    {
        auto f = [&](double y) { return psi.psi(y - z) * pdf(m, y); };
        for (std::size_t i = 0; i + 1 < right_breaks.size(); ++i)
            right += integrate_interval(f, right_breaks[i], right_breaks[i + 1], opt).value;
        right += integrate_half_line_right(f, right_breaks.back(), m.sigma, opt).value;
    }
    return (1.0 - psi.level) * left - psi.level * right;
}

}  // namespace

double psi_tile_of_density(const LocScaleMember& m, const PsiSpec& psi) {
    check_admissible(m.family, psi);
    if (psi.kind == PsiKind::Constant || (psi.kind == PsiKind::Momentile && psi.k == 1))
        return quantile(m, psi.level);

    auto g = [&](double z) { return population_g(m, psi, z); };
    // quantile-based bracket, expanded until it straddles the root
    double lo = quantile(m, std::min(psi.level, 0.25)) - m.sigma;
    double hi = quantile(m, std::max(psi.level, 0.75)) + m.sigma;
    double step = m.sigma;
    while (g(lo) >= 0.0) {
        lo -= step;
        step *= 2.0;
        if (step > 1e12) throw std::runtime_error("psi_tile_of_density: no lower bracket");
    }
    step = m.sigma;
    while (g(hi) < 0.0) {
        hi += step;
        step *= 2.0;
        if (step > 1e12) throw std::runtime_error("psi_tile_of_density: no upper bracket");
    }
    return infimal_root(g, lo, hi, kRootTol);
}

double psi_tile_shift(const LocScaleMember& m, const PsiSpec& psi, double mu_x, double sigma_x) {
    require(sigma_x > 0.0, "psi_tile_shift: sigma_x must be > 0");
    const LocScaleMember standard{m.family, 0.0, 1.0};
    return mu_x + sigma_x * psi_tile_of_density(standard, psi);
}

double empirical_psi_tile(std::span<const double> samples, const PsiSpec& psi) {
    if (samples.empty()) throw std::invalid_argument("empirical_psi_tile: empty sample");
    if (samples.size() == 1) return samples[0];

    if (psi.kind == PsiKind::Constant || (psi.kind == PsiKind::Momentile && psi.k == 1)) {
        std::vector<double> sorted(samples.begin(), samples.end());
        std::sort(sorted.begin(), sorted.end());
        const double n = static_cast<double>(sorted.size());
        std::size_t idx = static_cast<std::size_t>(std::ceil(n * psi.level));
        idx = std::min(std::max<std::size_t>(idx, 1), sorted.size());
        return sorted[idx - 1];
    }

    auto g = [&](double z) {
        double left = 0.0, right = 0.0;
        for (double y : samples) {
            if (y <= z)
                left += psi.psi(z - y);
            else
                right += psi.psi(y - z);
        }
        return (1.0 - psi.level) * left - psi.level * right;
    };
    const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
    return infimal_root(g, *mn - 1.0, *mx + 1.0, kRootTol);
}

}  // namespace tilelab
