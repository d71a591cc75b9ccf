#pragma once

#include <span>
#include <stdexcept>
#include <string>

#include "tilelab/distributions.hpp"

namespace tilelab {

// Thrown when a generator needs a moment the error family does not have
// (e.g. expectile under Cauchy).
class MomentError : public std::domain_error {
public:
    explicit MomentError(const std::string& what) : std::domain_error(what) {}
};

enum class PsiKind {
    Constant,   // psi == 1   -> quantile
    Linear,     // psi(x) = x -> expectile
    Momentile,  // psi(t) = k t^(k-1), integer k >= 1 (k-th power loss)
    Huber       // psi_H(x) = 2 min(x, 1)
};

std::string to_string(PsiKind kind);
PsiKind psi_kind_from_string(const std::string& name);

// A psi-tile specification: generator psi and level phi in (0,1).
struct PsiSpec {
    PsiKind kind = PsiKind::Constant;
    int k = 1;           // momentile order
    double level = 0.5;  // phi

    static PsiSpec quantile(double tau);
    static PsiSpec expectile(double phi);
    static PsiSpec momentile(int k, double phi);
    static PsiSpec huber(double phi);

    double psi(double t) const;  // generator value at t >= 0

    // Smallest m such that E|eps|^m < infinity is needed to evaluate the
    // population tile: the defining integrals weight residuals by psi.
    int required_moment() const;

    std::string describe() const;
};

// The loss implied by a generator, J(z) = phi * int_0^z psi for z >= 0 and
// (1-phi) * int_0^|z| psi for z < 0. Constant yields the check loss; Linear
// yields half the asymmetric square loss (same minimizers; psi generators are
// identified up to positive scaling, and Momentile(2) gives the unscaled one).
struct TailLoss {
    PsiSpec psi;
};

double loss_eval(const TailLoss& loss, double z);

// phi-th psi-tile t_{phi,psi} of the member's distribution: the infimal root
// of G(z) = int_{-inf}^z psi(z-y) dF - phi * int psi(|z-y|) dF. The Constant
// generator resolves through CDF inversion.
double psi_tile_of_density(const LocScaleMember& m, const PsiSpec& psi);

// Shift identity: mu_x + sigma_x * t_{phi,psi}(standard member).
double psi_tile_shift(const LocScaleMember& m, const PsiSpec& psi, double mu_x, double sigma_x);

// Infimal root of the empirical G; Constant generator returns the left
// order-statistic quantile. A single observation is its own tile.
double empirical_psi_tile(std::span<const double> samples, const PsiSpec& psi);

}  // namespace tilelab
