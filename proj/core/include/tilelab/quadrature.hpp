#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace tilelab {

// Thrown when an adaptive integration cannot reach the requested tolerance.
// Carries the tolerance actually achieved so callers can report it.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved)
        : std::runtime_error(what + " (achieved abs error " + std::to_string(achieved) + ")"),
          achieved_error(achieved) {}
    double achieved_error;
};

template <typename Real>
struct QuadOptions {
    Real rel_tol = Real(1e-10);
    Real abs_tol = Real(1e-12);
    int max_intervals = 4000;
};

template <typename Real>
struct QuadResult {
    Real value = Real(0);
    Real error = Real(0);
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

// Gauss-Kronrod 15(7) abscissae and weights on [-1,1] (positive half; symmetric).
// Odd indices are the embedded Gauss-7 nodes.
template <typename Real>
struct GK15 {
    static constexpr Real xk[8] = {
        Real(0.991455371120812639206854697526329L),
        Real(0.949107912342758524526189684047851L),
        Real(0.864864423359769072789712788640926L),
        Real(0.741531185599394439863864773280788L),
        Real(0.586087235467691130294144838258730L),
        Real(0.405845151377397166906606412076961L),
        Real(0.207784955007898467600689403773245L),
        Real(0.0L)};
    static constexpr Real wk[8] = {
        Real(0.022935322010529224963732008058970L),
        Real(0.063092092629978553290700663189204L),
        Real(0.104790010322250183839876322541518L),
        Real(0.140653259715525918745189590510238L),
        Real(0.169004726639267902826583426598550L),
        Real(0.190350578064785409913256402421014L),
        Real(0.204432940075298892414161999234649L),
        Real(0.209482141084727828012999174891714L)};
    static constexpr Real wg[4] = {
        Real(0.129484966168869693270611432679082L),
        Real(0.279705391489276667901467771423780L),
        Real(0.381830050505118944950369775488975L),
        Real(0.417959183673469387755102040816327L)};
};

template <typename Real, typename F>
void gk15_panel(const F& f, Real a, Real b, Real& kronrod, Real& err) {
    using T = GK15<Real>;
    const Real half = (b - a) / 2;
    const Real mid = (a + b) / 2;
    Real resk = 0, resg = 0;
    for (int i = 0; i < 8; ++i) {
        const Real dx = half * T::xk[i];
        Real fv;
        if (i == 7) {
            fv = f(mid);
        } else {
            fv = f(mid - dx) + f(mid + dx);
        }
        resk += T::wk[i] * fv;
        if (i % 2 == 1) resg += T::wg[i / 2] * fv;
    }
    kronrod = resk * half;
    const Real gauss = resg * half;
    err = std::abs(kronrod - gauss);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on a finite interval. Never throws; inspect `converged`.
template <typename Real, typename F>
QuadResult<Real> integrate_interval(const F& f, Real a, Real b,
                                    const QuadOptions<Real>& opt = {}) {
    QuadResult<Real> out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    struct Segment {
        Real a, b, value, error;
    };
    std::vector<Segment> segs;
    segs.reserve(64);
    Real v, e;
    detail::gk15_panel(f, a, b, v, e);
    out.evaluations = 15;
    segs.push_back({a, b, v, e});
    Real total_v = v, total_e = e;

    while (static_cast<int>(segs.size()) < opt.max_intervals) {
        if (total_e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total_v))) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        Segment s = segs[worst];
        const Real m = (s.a + s.b) / 2;
        if (m == s.a || m == s.b) break;  // interval exhausted at machine precision
        Real v1, e1, v2, e2;
        detail::gk15_panel(f, s.a, m, v1, e1);
        detail::gk15_panel(f, m, s.b, v2, e2);
        out.evaluations += 30;
        total_v += v1 + v2 - s.value;
        total_e += e1 + e2 - s.error;
        segs[worst] = {s.a, m, v1, e1};
        segs.push_back({m, s.b, v2, e2});
    }
    out.value = total_v;
    out.error = total_e;
    out.converged = total_e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total_v)) ||
                    total_e <= Real(16) * std::numeric_limits<Real>::epsilon() * std::abs(total_v);
    return out;
}

namespace detail {

// Right tail (y >= b): y = b + scale*tan(u), u in (0, pi/2).
template <typename Real, typename F>
auto tail_transform_right(const F& f, Real b, Real scale) {
    return [=](Real u) -> Real {
        const Real t = std::tan(u);
        const Real y = b + scale * t;
        const Real fv = f(y);
        if (fv == Real(0)) return Real(0);
        return fv * scale * (Real(1) + t * t);
    };
}

template <typename Real, typename F>
auto tail_transform_left(const F& f, Real b, Real scale) {
    return [=](Real u) -> Real {
        const Real t = std::tan(u);
        const Real y = b - scale * t;
        const Real fv = f(y);
        if (fv == Real(0)) return Real(0);
        return fv * scale * (Real(1) + t * t);
    };
}

}  // namespace detail

template <typename Real, typename F>
QuadResult<Real> integrate_half_line_right(const F& f, Real a, Real scale = Real(1),
                                           const QuadOptions<Real>& opt = {}) {
    const Real half_pi = std::atan2(Real(1), Real(0));
    return integrate_interval(detail::tail_transform_right<Real>(f, a, scale), Real(0), half_pi,
                              opt);
}

template <typename Real, typename F>
QuadResult<Real> integrate_half_line_left(const F& f, Real b, Real scale = Real(1),
                                          const QuadOptions<Real>& opt = {}) {
    const Real half_pi = std::atan2(Real(1), Real(0));
    return integrate_interval(detail::tail_transform_left<Real>(f, b, scale), Real(0), half_pi,
                              opt);
}

// Integral over the whole real line, split at the given breakpoints (density
// kinks go here). Tails are mapped through y = b +/- scale*tan(u).
template <typename Real, typename F>
QuadResult<Real> integrate_real_line(const F& f, std::vector<Real> breakpoints,
                                     Real scale = Real(1), const QuadOptions<Real>& opt = {}) {
    if (breakpoints.empty()) breakpoints.push_back(Real(0));
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

    QuadResult<Real> out;
    out.converged = true;
    auto accumulate = [&out](const QuadResult<Real>& r) {
        out.value += r.value;
        out.error += r.error;
        out.evaluations += r.evaluations;
        out.converged = out.converged && r.converged;
    };
    accumulate(integrate_half_line_left(f, breakpoints.front(), scale, opt));
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i)
        accumulate(integrate_interval(f, breakpoints[i], breakpoints[i + 1], opt));
    accumulate(integrate_half_line_right(f, breakpoints.back(), scale, opt));
    return out;
}

// Upper incomplete gamma Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt for x >= 0,
// evaluated by tail-transformed adaptive quadrature (relative tolerance 1e-12).
double upper_incomplete_gamma(double a, double x);

}  // namespace tilelab
