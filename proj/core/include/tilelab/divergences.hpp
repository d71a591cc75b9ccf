#pragma once

#include <array>
#include <vector>

#include "tilelab/distributions.hpp"
#include "tilelab/quadrature.hpp"

namespace tilelab {

// ============================================================================
// KL divergence and squared Hellinger distance between location-scale members,
// closed-form oracles, and numerical verifiers for the local conditions the
// rate theory rests on.
// ============================================================================

enum class DivergenceMethod { Quadrature, ClosedForm };

struct DivergenceReport {
    double eta = 0.0;
    double sigma = 1.0;
    double kl = 0.0;            // D(f_{0,1} || f_{eta,sigma})
    double hellinger_sq = 0.0;  // d_H^2(f_{0,1}, f_{eta,sigma}) in [0,2]
    DivergenceMethod method = DivergenceMethod::Quadrature;
};

// D(f_{0,1} || f_{eta,sigma}) by adaptive quadrature split at the density
// kinks {0, eta}, tails mapped through tan. Throws QuadratureError on
// non-convergence.
double kl_quadrature(const ErrorFamily& f, double eta, double sigma,
                     const QuadOptions<double>& opt = {1e-10, 1e-12, 4000});

// d_H^2(f_{0,1}, f_{eta,sigma}) by the same quadrature scheme.
double hellinger_sq(const ErrorFamily& f, double eta, double sigma,
                    const QuadOptions<double>& opt = {1e-10, 1e-12, 4000});

// General pairs, reduced through location-scale invariance to the standard
// member: kappa = (mu2-mu1)/sigma1, varpi = sigma2/sigma1.
double kl_pair(const ErrorFamily& f, double mu1, double sigma1, double mu2, double sigma2);
double hellinger_sq_pair(const ErrorFamily& f, double mu1, double sigma1, double mu2,
                         double sigma2);

// Direct two-member quadrature without the invariance reduction (used to test
// the reduction identity).
double kl_pair_direct(const ErrorFamily& f, double mu1, double sigma1, double mu2, double sigma2,
                      const QuadOptions<double>& opt = {1e-10, 1e-12, 4000});
double hellinger_sq_pair_direct(const ErrorFamily& f, double mu1, double sigma1, double mu2,
                                double sigma2,
                                const QuadOptions<double>& opt = {1e-10, 1e-12, 4000});

// Reference closed forms.
double kl_closed_form_cauchy(double eta, double sigma);
// log(sigma) + E[rho_tau(Y-eta)]/sigma - 1 with Y standard ALD(tau); the
// expectation pieces follow the closed-form displays for each sign of eta.
double kl_closed_form_ald(double tau, double eta, double sigma);

DivergenceReport divergence_report(const ErrorFamily& f, double eta, double sigma);

// Pointwise Hellinger-derivative components of the location-scale map at
// (eta,sigma)=(0,1): xi_eta = -g'/(2 sqrt g), xi_sigma = -sqrt(g)/2 + y*xi_eta.
double xi_dot_location(const ErrorFamily& f, double y);
double xi_dot_scale(const ErrorFamily& f, double y);

// --- Condition 1: D(f_{0,1}||f_{eta,sigma}) = O(eta^2 + (1-sigma)^2) --------

struct Condition1Report {
    std::vector<double> radii;
    std::vector<double> sup_ratios;  // sup over directions of D / r^2 at each radius
    double limit_ratio = 0.0;        // sup ratio at the smallest radius
    bool pass = false;
};

Condition1Report check_condition1(const ErrorFamily& f, std::vector<double> radii,
                                  int directions = 16);

// --- Condition 2: Hellinger differentiability at (0,1) ----------------------

struct HellingerDerivativeReport {
    double d_mu = 0.0;     // L2 norm of the location component
    double d_sigma = 0.0;  // L2 norm of the scale component
    std::array<std::array<double, 2>, 2> gram{};
    double gram_det = 0.0;
    std::vector<double> steps;
    std::vector<double> residual_ratios;  // sup over 8 directions of ||r_theta|| / |theta-theta0|
    bool pass = false;
};

HellingerDerivativeReport check_condition2(const ErrorFamily& f, std::vector<double> h_steps);

// --- Lemma 1 two-sided bounds on a compact grid ------------------------------

struct Lemma1Constants {
    double c_lower = 0.0;  // min d_H^2 / (mu1-mu2)^2 over the grid, mu1 != mu2
    double c_upper = 0.0;  // max D / ((mu1-mu2)^2 + (sigma1-sigma2)^2)
    long pairs_evaluated = 0;
};

// mu in [-J, J] (linear grid), sigma in [1/sigma_bar, sigma_bar] (geometric
// grid, contains 1 for odd grid_n). grid_n points per axis.
Lemma1Constants lemma1_constants(const ErrorFamily& f, double J, double sigma_bar,
                                 int grid_n = 21);

// Central finite-difference Hessian of (eta,sigma) -> kl_quadrature at (0,1).
std::array<std::array<double, 2>, 2> kl_hessian_fd(const ErrorFamily& f, double h = 1e-3);

}  // namespace tilelab
