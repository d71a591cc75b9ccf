#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tilelab {

// ============================================================================
// Error distribution families of the location-scale model Y = mu(X) + sigma(X)*eps
// ============================================================================

enum class FamilyKind { Ald, Acdtg, Cnl, Cauchy, AsymNormal };

std::string to_string(FamilyKind kind);
FamilyKind family_kind_from_string(const std::string& name);

// Tagged descriptor of one error law and its shape parameters. Construct via
// the named factories; they validate the parameter domain.
struct ErrorFamily {
    FamilyKind kind = FamilyKind::Cauchy;
    double tau = 0.5;          // skewness / proportion level (ALD, ACDTG, CNL)
    double alpha_shape = 0.0;  // ACDTG only
    double phi = 0.5;          // AsymNormal skewness

    static ErrorFamily ald(double tau);
    static ErrorFamily acdtg(double tau, double alpha_shape);
    static ErrorFamily cnl(double tau);
    static ErrorFamily cauchy();
    static ErrorFamily asym_normal(double phi);

    // CNL right-side scale, pinned by (1-tau)/beta = 2*tau/sqrt(2*pi).
    double cnl_beta() const;

    // Upper incomplete gamma Gamma(alpha+1, alpha), cached at construction
    // for ACDTG (equals 1 for the other families).
    double acdtg_norm() const { return acdtg_norm_; }

    // The pinned tile level of the standard member: tau-quantile = 0 for
    // ALD/ACDTG/CNL, median for Cauchy, phi-expectile = 0 for AsymNormal.
    double pinned_level() const;

    std::string describe() const;

private:
    double acdtg_norm_ = 1.0;
};

// An (eta, sigma) member of the family's location-scale family with density
// (1/sigma) f((y-eta)/sigma).
struct LocScaleMember {
    ErrorFamily family;
    double eta = 0.0;
    double sigma = 1.0;

    LocScaleMember() = default;
    LocScaleMember(ErrorFamily f, double eta_, double sigma_);
};

// Check loss rho_tau(z) = z*(tau - I(z<0)).
inline double check_loss(double tau, double z) { return z * (tau - (z < 0 ? 1.0 : 0.0)); }

// Standard member (eta=0, sigma=1) density and its a.e. derivative.
double standard_pdf(const ErrorFamily& f, double z);
double standard_log_pdf(const ErrorFamily& f, double z);
double standard_pdf_derivative(const ErrorFamily& f, double z);
double standard_cdf(const ErrorFamily& f, double z);
double standard_quantile(const ErrorFamily& f, double p);

double pdf(const LocScaleMember& m, double y);
double log_pdf(const LocScaleMember& m, double y);
double cdf(const LocScaleMember& m, double y);
double quantile(const LocScaleMember& m, double p);

// i.i.d. draws, deterministic given the seed. Parallel callers must derive
// distinct seeds (see derive_seed in rng.hpp).
std::vector<double> sample(const LocScaleMember& m, std::uint64_t seed, std::size_t n);

class Rng;
// One draw from the standard member, advancing the caller's generator.
double draw_standard(const ErrorFamily& f, Rng& rng);

// Whether E|eps|^order is finite for the standard member (order >= 0).
bool has_absolute_moment(const ErrorFamily& f, int order);

}  // namespace tilelab
