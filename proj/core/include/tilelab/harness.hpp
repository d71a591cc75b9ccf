#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tilelab/estimation.hpp"

namespace tilelab {

// ============================================================================
// Configuration-driven orchestration: Monte Carlo rate experiments and
// verification suites, with CSV/SVG emission.
// ============================================================================

struct RateExperiment {
    ErrorFamily family = ErrorFamily::ald(0.5);
    PsiSpec psi = PsiSpec::quantile(0.5);
    std::string truth_id = "sin1";
    double truth_alpha = 1.0;  // smoothness used by the bin rule
    std::string sigma_id = "const1";
    std::string covariate_id = "uniform";
    int d = 1;
    std::vector<long> n_grid = {512, 1024, 2048, 4096, 8192, 16384};
    int replications = 50;
    std::string estimator = "binned_psi_tile";  // binned_psi_tile | binned_mean | kernel_als
    double kernel_lambda = 1e-3;
    double kernel_bandwidth = 0.1;
    int risk_grid = 256;
    std::uint64_t seed = 20250801;
};

// Flat key = value text, '#' comments. Unknown keys are an error.
RateExperiment parse_rate_config(const std::string& text);
RateExperiment load_rate_config(const std::string& path);
std::string canonical_config(const RateExperiment& e);
std::uint64_t config_hash(const RateExperiment& e);

std::uint64_t fnv1a(const std::string& text);

struct RateResult {
    std::vector<long> n;
    std::vector<double> mean_risk;
    std::vector<double> se_risk;
    std::vector<std::vector<double>> risks;  // [n_index][replication]
    double slope = 0.0;
    double slope_se = 0.0;
    double theory_exponent = 0.0;
    bool dropped_smallest_n = false;  // smallest n excluded from the slope fit
};

// simulate -> fit -> l2_risk per (n, replication), concurrent replications
// with per-replication derived seeds; aggregation is index-ordered.
RateResult run_rates(const RateExperiment& config);

// Named registries for config files.
RealFn truth_function(const std::string& id, int d);
RealFn sigma_function(const std::string& id, int d);
CovariateModel covariate_model(const std::string& id, int d);
RegressionInstance make_instance(const RateExperiment& config);

// --- verification suites -----------------------------------------------------

enum class VerifySuite { Condition1, Condition2, Lemma1, Nets, DivergenceOracles, All };
VerifySuite verify_suite_from_string(const std::string& name);
std::string to_string(VerifySuite suite);

struct CheckRow {
    std::string suite;
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

struct CheckTable {
    std::vector<CheckRow> rows;
    bool all_pass() const;
};

CheckTable run_verify(VerifySuite suite, std::optional<FamilyKind> family_filter = std::nullopt);

// --- output emission ----------------------------------------------------------

// $TILELAB_RESULTS_ROOT, defaulting to ./results.
std::string results_root();

std::string rates_csv(const RateExperiment& config, const RateResult& result);
std::string checks_csv(std::uint64_t config_hash, const CheckTable& table);
std::string rate_plot_svg(const RateResult& result);

// Writes rates.csv and plot.svg under <root>/<run-id>/ and returns the run
// directory. run-id is derived from the config hash.
std::string write_rate_outputs(const RateExperiment& config, const RateResult& result);
std::string write_check_outputs(const std::string& run_tag, std::uint64_t config_hash,
                                const CheckTable& table);

}  // namespace tilelab
