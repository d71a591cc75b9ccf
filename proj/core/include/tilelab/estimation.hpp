#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tilelab/distributions.hpp"
#include "tilelab/psi_tile.hpp"
#include "tilelab/rng.hpp"

namespace tilelab {

// ============================================================================
// Practical psi-tile regression estimators for the rate harness, plus the
// toy-scale progressive-mixture + Hellinger-projection estimator.
// ============================================================================

using RealFn = std::function<double(std::span<const double>)>;

struct CovariateModel {
    // fills one d-dimensional point
    std::function<void(Rng&, std::span<double>)> sampler;
    RealFn density;
};

CovariateModel uniform_covariate(int d);

// Y = mu(X) + sigma(X) * eps with sup|mu| <= J and sigma_fn in [1/sigma_bar,
// sigma_bar].
struct RegressionInstance {
    int d = 1;
    RealFn mu;
    RealFn sigma_fn;
    ErrorFamily family = ErrorFamily::cauchy();
    CovariateModel covariate;
    double J = 1.0;
    double sigma_bar = 2.0;
};

struct Dataset {
    int d = 1;
    std::vector<double> x;  // n x d, row-major
    std::vector<double> y;
    std::size_t size() const { return y.size(); }
    std::span<const double> point(std::size_t i) const {
        return {x.data() + i * static_cast<std::size_t>(d), static_cast<std::size_t>(d)};
    }
};

Dataset simulate(const RegressionInstance& instance, std::size_t n, std::uint64_t seed);

enum class MethodTag { BinnedPsiTile, KernelAls, MixtureNet };

struct FittedEstimate {
    RealFn predictor;
    MethodTag method = MethodTag::BinnedPsiTile;
    std::string hyperparams;
};

struct ClampRange {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    // [-J - sigma_bar*|t| - 1, J + sigma_bar*|t| + 1], the boundedness box of
    // the model plus one; stabilizes risks under Cauchy outliers.
    static ClampRange for_instance(double J, double sigma_bar, double tile_of_standard);
};

// Partitions [0,1]^d into m^d cells; the predictor is the within-cell
// empirical psi-tile. Empty cells inherit the nearest nonempty cell's value
// (row-major tie-break).
FittedEstimate fit_binned_psi_tile(const Dataset& data, const PsiSpec& psi, int bins_per_axis,
                                   ClampRange clamp = {});

struct KernelAlsResult {
    FittedEstimate estimate;
    int iterations = 0;
    std::vector<double> objective_trace;  // nonincreasing across iterations
    std::vector<double> coefficients;
};

// Regularized asymmetric least squares in the Gaussian-kernel RKHS,
// lambda ||u||_H^2 + (1/n) sum l_phi(y_i - u(x_i)), solved by IRLS on the
// representer coefficients. Throws on non-convergence after max_iter.
KernelAlsResult fit_kernel_als(const Dataset& data, double phi, double lambda, double bandwidth,
                               int max_iter = 500);

// A (mu, sigma) pair net member for the progressive mixture.
struct NetMember {
    RealFn mu;
    RealFn sigma_fn;
};

struct MixtureNetResult {
    FittedEstimate estimate;
    std::vector<double> posterior_log_weights;     // final, log scale
    std::vector<double> predictive_log_densities;  // log p~_t(y_t | x_t), per step
    std::function<std::size_t(std::span<const double>)> project;  // argmin member at x
};

// Progressive Bayes mixture over the member net updated sequentially in log
// space; the predictive density is the running average of per-step posterior
// mixtures, and the predictor Hellinger-projects it back onto the net on a
// fixed y-grid per evaluation point.
MixtureNetResult fit_mixture_net(const Dataset& data, const std::vector<NetMember>& net,
                                 const ErrorFamily& family, int y_grid = 512);

// Tensor-grid quadrature of (estimate - mu)^2 against the covariate density.
double l2_risk(const RealFn& estimate, const RegressionInstance& instance, int grid_per_axis);

}  // namespace tilelab
