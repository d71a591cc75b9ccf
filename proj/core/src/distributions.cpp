#include "tilelab/distributions.hpp"

#include <cmath>
#include <stdexcept>

#include "tilelab/quadrature.hpp"
#include "tilelab/rng.hpp"

namespace tilelab {

namespace {

constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
constexpr double kSqrtPi = 1.7724538509055160272981674833411;
constexpr double kPi = 3.1415926535897932384626433832795;

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double asym_normal_const(double phi) {
    return 2.0 / kSqrtPi * std::sqrt(phi * (1.0 - phi)) / (std::sqrt(phi) + std::sqrt(1.0 - phi));
}

}  // namespace

double upper_incomplete_gamma(double a, double x) {
    if (x < 0) throw std::invalid_argument("upper_incomplete_gamma: x must be >= 0");
    QuadOptions<double> opt;
    opt.rel_tol = 1e-12;
    opt.abs_tol = 1e-300;
    const double scale = std::max(1.0, std::sqrt(std::max(a, 1.0)));
    auto r = integrate_half_line_right<double>(
        [a](double t) { return t <= 0 ? 0.0 : std::exp((a - 1.0) * std::log(t) - t); }, x, scale,
        opt);
    if (!r.converged)
        throw QuadratureError("upper_incomplete_gamma failed to converge", static_cast<double>(r.error));
    return r.value;
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Ald: return "ald";
        case FamilyKind::Acdtg: return "acdtg";
        case FamilyKind::Cnl: return "cnl";
        case FamilyKind::Cauchy: return "cauchy";
        case FamilyKind::AsymNormal: return "asymnormal";
    }
    return "?";
}

FamilyKind family_kind_from_string(const std::string& name) {
    if (name == "ald") return FamilyKind::Ald;
    if (name == "acdtg") return FamilyKind::Acdtg;
    if (name == "cnl") return FamilyKind::Cnl;
    if (name == "cauchy") return FamilyKind::Cauchy;
    if (name == "asymnormal" || name == "asym_normal") return FamilyKind::AsymNormal;
    throw std::invalid_argument("unknown error family: " + name);
}

ErrorFamily ErrorFamily::ald(double tau) {
    require(tau > 0.0 && tau < 1.0, "ALD: tau must lie in (0,1)");
    ErrorFamily f;
    f.kind = FamilyKind::Ald;
    f.tau = tau;
    return f;
}

ErrorFamily ErrorFamily::acdtg(double tau, double alpha_shape) {
    require(tau > 0.0 && tau < 1.0, "ACDTG: tau must lie in (0,1)");
    require(alpha_shape >= 0.0, "ACDTG: alpha must be >= 0");
    if (alpha_shape == 0.0) return ald(tau);  // exact ALD alias at alpha = 0
    ErrorFamily f;
    f.kind = FamilyKind::Acdtg;
    f.tau = tau;
    f.alpha_shape = alpha_shape;
    f.acdtg_norm_ = upper_incomplete_gamma(alpha_shape + 1.0, alpha_shape);
    return f;
}

ErrorFamily ErrorFamily::cnl(double tau) {
    require(tau > 0.0 && tau < 1.0, "CNL: tau must lie in (0,1)");
    ErrorFamily f;
    f.kind = FamilyKind::Cnl;
    f.tau = tau;
    return f;
}

ErrorFamily ErrorFamily::cauchy() {
    ErrorFamily f;
    f.kind = FamilyKind::Cauchy;
    return f;
}

ErrorFamily ErrorFamily::asym_normal(double phi) {
    require(phi > 0.0 && phi < 1.0, "AsymNormal: phi must lie in (0,1)");
    ErrorFamily f;
    f.kind = FamilyKind::AsymNormal;
    f.phi = phi;
    return f;
}

double ErrorFamily::cnl_beta() const { return (1.0 - tau) * kSqrt2Pi / (2.0 * tau); }

double ErrorFamily::pinned_level() const {
    switch (kind) {
        case FamilyKind::Ald:
        case FamilyKind::Acdtg:
        case FamilyKind::Cnl: return tau;
        case FamilyKind::Cauchy: return 0.5;
        case FamilyKind::AsymNormal: return phi;
    }
    return 0.5;
}

std::string ErrorFamily::describe() const {
    switch (kind) {
        case FamilyKind::Ald: return "ald(tau=" + std::to_string(tau) + ")";
        case FamilyKind::Acdtg:
            return "acdtg(tau=" + std::to_string(tau) + ",alpha=" + std::to_string(alpha_shape) + ")";
        case FamilyKind::Cnl: return "cnl(tau=" + std::to_string(tau) + ")";
        case FamilyKind::Cauchy: return "cauchy";
        case FamilyKind::AsymNormal: return "asymnormal(phi=" + std::to_string(phi) + ")";
    }
    return "?";
}

LocScaleMember::LocScaleMember(ErrorFamily f, double eta_, double sigma_)
    : family(f), eta(eta_), sigma(sigma_) {
    require(sigma > 0.0, "LocScaleMember: sigma must be > 0");
    require(std::isfinite(eta), "LocScaleMember: eta must be finite");
}

double standard_log_pdf(const ErrorFamily& f, double z) {
    switch (f.kind) {
        case FamilyKind::Ald:
            return std::log(f.tau * (1.0 - f.tau)) - check_loss(f.tau, z);
        case FamilyKind::Acdtg: {
            const double u = f.alpha_shape + check_loss(f.tau, z);
            return std::log(f.tau * (1.0 - f.tau) / f.acdtg_norm()) + f.alpha_shape * std::log(u) -
                   u;
        }
        case FamilyKind::Cnl: {
            if (z <= 0.0) return std::log(2.0 * f.tau / kSqrt2Pi) - 0.5 * z * z;
            const double beta = f.cnl_beta();
            return std::log((1.0 - f.tau) / beta) - z / beta;
        }
        case FamilyKind::Cauchy: return -std::log(kPi * (1.0 + z * z));
        case FamilyKind::AsymNormal: {
            const double w = z >= 0.0 ? f.phi : 1.0 - f.phi;
            return std::log(asym_normal_const(f.phi)) - w * z * z;
        }
    }
    return -std::numeric_limits<double>::infinity();
}

double standard_pdf(const ErrorFamily& f, double z) { return std::exp(standard_log_pdf(f, z)); }

double standard_pdf_derivative(const ErrorFamily& f, double z) {
    const double g = standard_pdf(f, z);
    switch (f.kind) {
        case FamilyKind::Ald: return (z >= 0.0 ? -f.tau : 1.0 - f.tau) * g;
        case FamilyKind::Acdtg: {
            const double slope = (z >= 0.0 ? f.tau : f.tau - 1.0);
            const double u = f.alpha_shape + check_loss(f.tau, z);
            return g * slope * (f.alpha_shape / u - 1.0);
        }
        case FamilyKind::Cnl:
            return z <= 0.0 ? -z * g : -g / f.cnl_beta();
        case FamilyKind::Cauchy: return -2.0 * z * g / (1.0 + z * z);
        case FamilyKind::AsymNormal: {
            const double w = z >= 0.0 ? f.phi : 1.0 - f.phi;
            return -2.0 * w * z * g;
        }
    }
    return 0.0;
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double acdtg_cdf(const ErrorFamily& f, double z) {
    const double a = f.alpha_shape;
    if (z <= 0.0) {
        const double g = upper_incomplete_gamma(a + 1.0, a + (1.0 - f.tau) * (-z));
        return f.tau * g / f.acdtg_norm();
    }
    const double g = upper_incomplete_gamma(a + 1.0, a + f.tau * z);
    return 1.0 - (1.0 - f.tau) * g / f.acdtg_norm();
}

}  // namespace

double standard_cdf(const ErrorFamily& f, double z) {
    switch (f.kind) {
        case FamilyKind::Ald:
            if (z <= 0.0) return f.tau * std::exp((1.0 - f.tau) * z);
            return 1.0 - (1.0 - f.tau) * std::exp(-f.tau * z);
        case FamilyKind::Acdtg: return acdtg_cdf(f, z);
        case FamilyKind::Cnl: {
            if (z <= 0.0) return 2.0 * f.tau * normal_cdf(z);
            return f.tau + (1.0 - f.tau) * (1.0 - std::exp(-z / f.cnl_beta()));
        }
        case FamilyKind::Cauchy: return 0.5 + std::atan(z) / kPi;
        case FamilyKind::AsymNormal: {
            const double c = asym_normal_const(f.phi);
            if (z < 0.0)
                return c * 0.5 * std::sqrt(kPi / (1.0 - f.phi)) *
                       std::erfc(-z * std::sqrt(1.0 - f.phi));
            const double left_total = c * 0.5 * std::sqrt(kPi / (1.0 - f.phi));
            return left_total + c * 0.5 * std::sqrt(kPi / f.phi) * std::erf(z * std::sqrt(f.phi));
        }
    }
    return 0.0;
}

double standard_quantile(const ErrorFamily& f, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile: p must lie in (0,1)");
    switch (f.kind) {
        case FamilyKind::Ald:
            if (p < f.tau) return std::log(p / f.tau) / (1.0 - f.tau);
            return -std::log((1.0 - p) / (1.0 - f.tau)) / f.tau;
        case FamilyKind::Cauchy: return std::tan(kPi * (p - 0.5));
        case FamilyKind::Cnl: {
            if (p <= f.tau) {
                // invert 2*tau*Phi(z) = p on z <= 0
                double lo = -40.0, hi = 0.0;
                for (int i = 0; i < 200; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    (standard_cdf(f, mid) < p ? lo : hi) = mid;
                }
                return 0.5 * (lo + hi);
            }
            return -f.cnl_beta() * std::log(1.0 - (p - f.tau) / (1.0 - f.tau));
        }
        default: {
            // monotone bisection on the cdf with an expanding bracket
            double lo = -1.0, hi = 1.0;
            while (standard_cdf(f, lo) > p) lo *= 2.0;
            while (standard_cdf(f, hi) < p) hi *= 2.0;
            for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(lo)); ++i) {
                const double mid = 0.5 * (lo + hi);
                (standard_cdf(f, mid) < p ? lo : hi) = mid;
            }
            return 0.5 * (lo + hi);
        }
    }
}

double pdf(const LocScaleMember& m, double y) {
    return standard_pdf(m.family, (y - m.eta) / m.sigma) / m.sigma;
}

double log_pdf(const LocScaleMember& m, double y) {
    return standard_log_pdf(m.family, (y - m.eta) / m.sigma) - std::log(m.sigma);
}

double cdf(const LocScaleMember& m, double y) {
    return standard_cdf(m.family, (y - m.eta) / m.sigma);
}

double quantile(const LocScaleMember& m, double p) {
    return m.eta + m.sigma * standard_quantile(m.family, p);
}

double draw_standard(const ErrorFamily& f, Rng& rng) {
    switch (f.kind) {
        case FamilyKind::Ald: {
            const double u = rng.uniform_open();
            if (u < f.tau) return std::log(u / f.tau) / (1.0 - f.tau);
            return -std::log((1.0 - u) / (1.0 - f.tau)) / f.tau;
        }
        case FamilyKind::Acdtg: {
            // side weights (tau left, 1-tau right); each side maps through
            // u = alpha + rho to a Gamma(alpha+1) law truncated to [alpha, inf)
            const bool left = rng.uniform_open() < f.tau;
            double u;
            do {
                u = rng.gamma(f.alpha_shape + 1.0);
            } while (u < f.alpha_shape);
            const double rho = u - f.alpha_shape;
            return left ? -rho / (1.0 - f.tau) : rho / f.tau;
        }
        case FamilyKind::Cnl: {
            if (rng.uniform_open() < f.tau) return -std::abs(rng.normal());
            return f.cnl_beta() * rng.exponential();
        }
        case FamilyKind::Cauchy: return std::tan(kPi * (rng.uniform_open() - 0.5));
        case FamilyKind::AsymNormal: {
            const double sp = std::sqrt(f.phi), sq = std::sqrt(1.0 - f.phi);
            const double left_weight = sp / (sp + sq);
            if (rng.uniform_open() < left_weight)
                return -std::abs(rng.normal()) / std::sqrt(2.0 * (1.0 - f.phi));
            return std::abs(rng.normal()) / std::sqrt(2.0 * f.phi);
        }
    }
    return 0.0;
}

std::vector<double> sample(const LocScaleMember& m, std::uint64_t seed, std::size_t n) {
    Rng rng(seed);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = m.eta + m.sigma * draw_standard(m.family, rng);
    return out;
}

bool has_absolute_moment(const ErrorFamily& f, int order) {
    if (order <= 0) return true;
    return f.kind != FamilyKind::Cauchy;
}

}  // namespace tilelab
