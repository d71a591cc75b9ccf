#include "tilelab/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "tilelab/divergences.hpp"
#include "tilelab/function_classes.hpp"
#include "tilelab/parallel.hpp"

namespace tilelab {

namespace {

constexpr double kTwoPi = 6.2831853071795864769252867665590;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---------------------------------------------------------------------------
// registries
// ---------------------------------------------------------------------------

RealFn truth_function(const std::string& id, int d) {
    if (id == "const0") return [](std::span<const double>) { return 0.0; };
    if (id == "ramp") return [](std::span<const double> x) { return x[0] - 0.5; };
    if (id == "tent") return [](std::span<const double> x) { return 1.0 - 2.0 * std::abs(x[0] - 0.5); };
    if (id == "sin1") return [](std::span<const double> x) { return 0.5 * std::sin(kTwoPi * x[0]); };
    if (id == "sin2") {
        require(d == 2, "truth sin2 needs d=2");
        return [](std::span<const double> x) {
            return 0.4 * std::sin(kTwoPi * x[0]) + 0.3 * std::cos(kTwoPi * x[1]);
        };
    }
    throw std::invalid_argument("unknown truth function: " + id);
}

RealFn sigma_function(const std::string& id, int /*d*/) {
    if (id == "const1") return [](std::span<const double>) { return 1.0; };
    if (id == "explin")
        return [](std::span<const double> x) { return std::exp(0.3 * (x[0] - 0.5)); };
    if (id == "sinmild")
        return [](std::span<const double> x) { return 1.0 + 0.25 * std::sin(kTwoPi * x[0]); };
    throw std::invalid_argument("unknown sigma function: " + id);
}

CovariateModel covariate_model(const std::string& id, int d) {
    if (id == "uniform") return uniform_covariate(d);
    if (id == "tilted") {
        // h(x) = 0.75 + 0.5 x_1 on [0,1], remaining axes uniform
        CovariateModel c;
        c.sampler = [](Rng& rng, std::span<double> out) {
            const double u = rng.uniform();
            out[0] = (std::sqrt(0.5625 + u) - 0.75) / 0.5;
            for (std::size_t a = 1; a < out.size(); ++a) out[a] = rng.uniform();
        };
        c.density = [](std::span<const double> x) { return 0.75 + 0.5 * x[0]; };
        return c;
    }
    throw std::invalid_argument("unknown covariate model: " + id);
}

RegressionInstance make_instance(const RateExperiment& config) {
    RegressionInstance inst;
    inst.d = config.d;
    inst.mu = truth_function(config.truth_id, config.d);
    inst.sigma_fn = sigma_function(config.sigma_id, config.d);
    inst.family = config.family;
    inst.covariate = covariate_model(config.covariate_id, config.d);
    inst.J = 1.0;
    inst.sigma_bar = 2.0;
    return inst;
}

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::string> parse_flat_keys(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (!key.empty()) kv[key] = val;
    }
    return kv;
}

}  // namespace

RateExperiment parse_rate_config(const std::string& text) {
    auto kv = parse_flat_keys(text);
    RateExperiment e;
    double tau = 0.5, alpha_shape = 1.0, phi = 0.5, level = 0.5;
    int psi_k = 2;
    std::string family = "ald", psi = "constant";
    for (const auto& [key, val] : kv) {
        if (key == "family") family = val;
        else if (key == "tau") tau = std::stod(val);
        else if (key == "alpha_shape") alpha_shape = std::stod(val);
        else if (key == "phi") phi = std::stod(val);
        else if (key == "psi") psi = val;
        else if (key == "psi_k") psi_k = std::stoi(val);
        else if (key == "level") level = std::stod(val);
        else if (key == "truth") e.truth_id = val;
        else if (key == "alpha") e.truth_alpha = std::stod(val);
        else if (key == "sigma_fn") e.sigma_id = val;
        else if (key == "covariate") e.covariate_id = val;
        else if (key == "d") e.d = std::stoi(val);
        else if (key == "replications") e.replications = std::stoi(val);
        else if (key == "estimator") e.estimator = val;
        else if (key == "kernel_lambda") e.kernel_lambda = std::stod(val);
        else if (key == "kernel_bandwidth") e.kernel_bandwidth = std::stod(val);
        else if (key == "risk_grid") e.risk_grid = std::stoi(val);
        else if (key == "seed") e.seed = std::stoull(val);
        else if (key == "n_grid") {
            e.n_grid.clear();
            std::istringstream ns(val);
            std::string tok;
            while (std::getline(ns, tok, ',')) e.n_grid.push_back(std::stol(tok));
        } else {
            throw std::invalid_argument("unknown config key: " + key);
        }
    }
    switch (family_kind_from_string(family)) {
        case FamilyKind::Ald: e.family = ErrorFamily::ald(tau); break;
        case FamilyKind::Acdtg: e.family = ErrorFamily::acdtg(tau, alpha_shape); break;
        case FamilyKind::Cnl: e.family = ErrorFamily::cnl(tau); break;
        case FamilyKind::Cauchy: e.family = ErrorFamily::cauchy(); break;
        case FamilyKind::AsymNormal: e.family = ErrorFamily::asym_normal(phi); break;
    }
    switch (psi_kind_from_string(psi)) {
        case PsiKind::Constant: e.psi = PsiSpec::quantile(level); break;
        case PsiKind::Linear: e.psi = PsiSpec::expectile(level); break;
        case PsiKind::Momentile: e.psi = PsiSpec::momentile(psi_k, level); break;
        case PsiKind::Huber: e.psi = PsiSpec::huber(level); break;
    }
    require(e.n_grid.size() >= 2, "config: n_grid needs at least two sizes for a slope fit");
    for (std::size_t i = 0; i + 1 < e.n_grid.size(); ++i)
        require(e.n_grid[i] < e.n_grid[i + 1], "config: n_grid must be strictly increasing");
    require(e.replications >= 10, "config: replications must be >= 10 for slope fitting");
    return e;
}

RateExperiment load_rate_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_rate_config(ss.str());
}

std::string canonical_config(const RateExperiment& e) {
    std::ostringstream out;
    out << "family=" << e.family.describe() << "\npsi=" << e.psi.describe()
        << "\ntruth=" << e.truth_id << "\nalpha=" << fmt(e.truth_alpha)
        << "\nsigma_fn=" << e.sigma_id << "\ncovariate=" << e.covariate_id << "\nd=" << e.d
        << "\nn_grid=";
    for (std::size_t i = 0; i < e.n_grid.size(); ++i) out << (i ? "," : "") << e.n_grid[i];
    out << "\nreplications=" << e.replications << "\nestimator=" << e.estimator
        << "\nkernel_lambda=" << fmt(e.kernel_lambda)
        << "\nkernel_bandwidth=" << fmt(e.kernel_bandwidth) << "\nrisk_grid=" << e.risk_grid
        << "\nseed=" << e.seed << "\n";
    return out.str();
}

std::uint64_t config_hash(const RateExperiment& e) { return fnv1a(canonical_config(e)); }

// ---------------------------------------------------------------------------
// rate experiments
// ---------------------------------------------------------------------------

namespace {

struct SlopeFit {
    double slope = 0.0, slope_se = 0.0;
};

SlopeFit ols_loglog(const std::vector<long>& n, const std::vector<double>& risk,
                    std::size_t first) {
    const std::size_t m = n.size() - first;
    double sx = 0, sy = 0;
    for (std::size_t i = first; i < n.size(); ++i) {
        sx += std::log(static_cast<double>(n[i]));
        sy += std::log(risk[i]);
    }
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0;
    for (std::size_t i = first; i < n.size(); ++i) {
        const double dx = std::log(static_cast<double>(n[i])) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(risk[i]) - my);
    }
    SlopeFit fit;
    fit.slope = sxy / sxx;
    double rss = 0;
    for (std::size_t i = first; i < n.size(); ++i) {
        const double pred = my + fit.slope * (std::log(static_cast<double>(n[i])) - mx);
        const double r = std::log(risk[i]) - pred;
        rss += r * r;
    }
    fit.slope_se = m > 2 ? std::sqrt(rss / (m - 2) / sxx) : 0.0;
    return fit;
}

}  // namespace

RateResult run_rates(const RateExperiment& config) {
    const RegressionInstance inst = make_instance(config);

    // admissibility gate: the target tile must exist for the family
    // (binned_mean deliberately targets the mean and is exempt; it exists to
    // demonstrate the misuse failure under heavy tails)
    double standard_tile = 0.0;
    if (config.estimator == "binned_psi_tile" || config.estimator == "kernel_als") {
        const int need = config.psi.required_moment();
        if (!has_absolute_moment(config.family, need))
            throw std::invalid_argument("run_rates: generator " + config.psi.describe() +
                                        " requires E|eps|^" + std::to_string(need) +
                                        " which does not exist for " + config.family.describe());
        standard_tile = psi_tile_of_density(LocScaleMember{config.family, 0.0, 1.0}, config.psi);
    }
    const ClampRange clamp = ClampRange::for_instance(inst.J, inst.sigma_bar, standard_tile);

    RateResult res;
    res.n = config.n_grid;
    const std::size_t nn = config.n_grid.size();
    const std::size_t reps = static_cast<std::size_t>(config.replications);
    res.risks.assign(nn, std::vector<double>(reps, 0.0));

    parallel_for_index(nn * reps, [&](std::size_t idx) {
        const std::size_t ni = idx / reps;
        const std::size_t rep = idx % reps;
        const long n = config.n_grid[ni];
        const std::uint64_t seed = derive_seed(config.seed, ni, rep);
        const Dataset data = simulate(inst, static_cast<std::size_t>(n), seed);
        FittedEstimate fit;
        if (config.estimator == "binned_psi_tile") {
            const int m = static_cast<int>(std::ceil(
                std::pow(static_cast<double>(n), 1.0 / (2.0 * config.truth_alpha + config.d))));
            fit = fit_binned_psi_tile(data, config.psi, m, clamp);
        } else if (config.estimator == "binned_mean") {
            const int m = static_cast<int>(std::ceil(
                std::pow(static_cast<double>(n), 1.0 / (2.0 * config.truth_alpha + config.d))));
            fit = fit_binned_psi_tile(data, PsiSpec::expectile(0.5), m, clamp);
        } else if (config.estimator == "kernel_als") {
            fit = fit_kernel_als(data, config.psi.level, config.kernel_lambda,
                                 config.kernel_bandwidth)
                      .estimate;
        } else {
            throw std::invalid_argument("unknown estimator: " + config.estimator);
        }
        res.risks[ni][rep] = l2_risk(fit.predictor, inst, config.risk_grid);
    });

    res.mean_risk.resize(nn);
    res.se_risk.resize(nn);
    for (std::size_t ni = 0; ni < nn; ++ni) {
        double s = 0;
        for (double r : res.risks[ni]) s += r;
        const double mean = s / reps;
        double var = 0;
        for (double r : res.risks[ni]) var += (r - mean) * (r - mean);
        res.mean_risk[ni] = mean;
        res.se_risk[ni] = reps > 1 ? std::sqrt(var / (reps - 1) / reps) : 0.0;
    }

    // drop the smallest n from the slope fit when its noise dominates
    std::size_t first = 0;
    if (nn > 2 && res.se_risk[0] > 0.25 * res.mean_risk[0]) {
        first = 1;
        res.dropped_smallest_n = true;
    }
    const SlopeFit fit = ols_loglog(res.n, res.mean_risk, first);
    res.slope = fit.slope;
    res.slope_se = fit.slope_se;
    res.theory_exponent =
        rate_from_entropy(EntropyOrder(config.d / config.truth_alpha, 0.0), 1e6).risk_exponent;
    return res;
}

// ---------------------------------------------------------------------------
// verification suites
// ---------------------------------------------------------------------------

VerifySuite verify_suite_from_string(const std::string& name) {
    if (name == "condition1") return VerifySuite::Condition1;
    if (name == "condition2") return VerifySuite::Condition2;
    if (name == "lemma1") return VerifySuite::Lemma1;
    if (name == "nets") return VerifySuite::Nets;
    if (name == "divergence-oracles") return VerifySuite::DivergenceOracles;
    if (name == "all") return VerifySuite::All;
    throw std::invalid_argument("unknown verify suite: " + name);
}

std::string to_string(VerifySuite suite) {
    switch (suite) {
        case VerifySuite::Condition1: return "condition1";
        case VerifySuite::Condition2: return "condition2";
        case VerifySuite::Lemma1: return "lemma1";
        case VerifySuite::Nets: return "nets";
        case VerifySuite::DivergenceOracles: return "divergence-oracles";
        case VerifySuite::All: return "all";
    }
    return "?";
}

bool CheckTable::all_pass() const {
    for (const auto& r : rows)
        if (!r.pass) return false;
    return true;
}

namespace {

std::vector<ErrorFamily> all_families(std::optional<FamilyKind> filter) {
    std::vector<ErrorFamily> fams = {ErrorFamily::ald(0.3), ErrorFamily::acdtg(0.3, 1.0),
                                     ErrorFamily::cnl(0.4), ErrorFamily::cauchy(),
                                     ErrorFamily::asym_normal(0.7)};
    if (!filter) return fams;
    std::vector<ErrorFamily> out;
    for (const auto& f : fams)
        if (f.kind == *filter) out.push_back(f);
    return out;
}

void verify_condition1(CheckTable& t, std::optional<FamilyKind> filter) {
    for (const auto& fam : all_families(filter)) {
        auto rep = check_condition1(fam, {0.2, 0.1, 0.05, 0.025});
        t.rows.push_back({"condition1", fam.describe() + ".bounded_ratio", rep.sup_ratios.back(),
                          10.0 * rep.sup_ratios.front(), rep.pass});
        if (fam.kind == FamilyKind::Cauchy)
            t.rows.push_back({"condition1", "cauchy.limit_ratio_quarter",
                              std::abs(rep.limit_ratio - 0.25), 0.02,
                              std::abs(rep.limit_ratio - 0.25) < 0.02});
    }
}

void verify_condition2(CheckTable& t, std::optional<FamilyKind> filter) {
    for (const auto& fam : all_families(filter)) {
        auto rep = check_condition2(fam, {0.1, 0.0562, 0.0316, 0.0178, 0.01});
        t.rows.push_back({"condition2", fam.describe() + ".gram_det", rep.gram_det, 1e-6,
                          rep.gram_det > 1e-6});
        const double halving = rep.residual_ratios.back() / rep.residual_ratios.front();
        t.rows.push_back(
            {"condition2", fam.describe() + ".residual_halving", halving, 0.5, halving < 0.5});
        double expected = -1.0;
        if (fam.kind == FamilyKind::Ald) expected = fam.tau * (1.0 - fam.tau) / 4.0;
        if (fam.kind == FamilyKind::Cauchy) expected = 0.125;
        if (fam.kind == FamilyKind::Cnl) {
            const double b = fam.cnl_beta();
            expected = (1.0 - fam.tau) / (4.0 * b * b) + fam.tau / 4.0;
        }
        if (expected > 0.0) {
            const double err = std::abs(rep.gram[0][0] - expected);
            t.rows.push_back(
                {"condition2", fam.describe() + ".location_norm_oracle", err, 1e-6, err < 1e-6});
        }
    }
}

void verify_lemma1(CheckTable& t, std::optional<FamilyKind> filter) {
    for (const auto& fam : all_families(filter)) {
        auto c = lemma1_constants(fam, 1.0, 2.0, 21);
        t.rows.push_back(
            {"lemma1", fam.describe() + ".c_lower_positive", c.c_lower, 0.0, c.c_lower > 0.0});
        t.rows.push_back({"lemma1", fam.describe() + ".c_upper_finite", c.c_upper, 0.0,
                          std::isfinite(c.c_upper) && c.c_upper > 0.0});
    }
}

void verify_divergence_oracles(CheckTable& t, std::optional<FamilyKind> filter) {
    if (!filter || *filter == FamilyKind::Cauchy) {
        const auto fam = ErrorFamily::cauchy();
        double max_err = 0.0;
        for (int i = 0; i < 10; ++i) {
            for (int j = 0; j < 10; ++j) {
                const double eta = -2.0 + 4.0 * i / 9.0;
                const double sigma = 0.5 + 1.5 * j / 9.0;
                max_err = std::max(max_err, std::abs(kl_quadrature(fam, eta, sigma) -
                                                     kl_closed_form_cauchy(eta, sigma)));
            }
        }
        t.rows.push_back({"divergence-oracles", "cauchy.kl_grid_max_abs_err", max_err, 1e-8,
                          max_err < 1e-8});
    }
    if (!filter || *filter == FamilyKind::Ald) {
        const auto fam = ErrorFamily::ald(0.3);
        double max_err = 0.0;
        for (int i = 0; i < 7; ++i) {
            for (int j = 0; j < 7; ++j) {
                const double eta = -1.5 + 3.0 * i / 6.0;
                const double sigma = 0.5 + 1.5 * j / 6.0;
                max_err = std::max(max_err, std::abs(kl_quadrature(fam, eta, sigma) -
                                                     kl_closed_form_ald(0.3, eta, sigma)));
            }
        }
        t.rows.push_back(
            {"divergence-oracles", "ald.kl_grid_max_abs_err", max_err, 1e-8, max_err < 1e-8});
    }
    for (const auto& fam : all_families(filter)) {
        // d_H^2 <= D and the location-scale reduction identity
        double worst_gap = 0.0, worst_red = 0.0;
        const double etas[] = {-0.8, 0.0, 0.7};
        const double sigmas[] = {0.8, 1.0, 1.3};
        for (double eta : etas) {
            for (double sigma : sigmas) {
                const double kl = kl_quadrature(fam, eta, sigma);
                const double h2 = hellinger_sq(fam, eta, sigma);
                worst_gap = std::max(worst_gap, h2 - kl);
                const double red =
                    std::abs(kl_pair_direct(fam, 0.4, 1.5, 0.4 + 1.5 * eta, 1.5 * sigma) - kl);
                worst_red = std::max(worst_red, red);
            }
        }
        t.rows.push_back({"divergence-oracles", fam.describe() + ".hellinger_le_kl", worst_gap,
                          0.0, worst_gap <= 1e-10});
        t.rows.push_back({"divergence-oracles", fam.describe() + ".kl_reduction_identity",
                          worst_red, 1e-8, worst_red < 1e-8});
    }
}

void verify_nets(CheckTable& t) {
    Rng rng(991);
    for (double eps : {0.2, 0.1, 0.05}) {
        const LipschitzNet net(1, 1.0, 1.0, 1.0, eps);
        int pass = 0;
        const int trials = 100;
        for (int k = 0; k < trials; ++k) {
            auto g = random_lipschitz_fn(rng, 1, 1.0, 1.0);
            const GridFunction member = net.cover(g);
            auto member_fn = [&member](std::span<const double> x) { return member(x); };
            if (l2_distance_uniform(g, member_fn, 1) <= eps) ++pass;
        }
        t.rows.push_back({"nets", "lipschitz.d1.cover@" + fmt(eps),
                          static_cast<double>(pass) / trials, 1.0, pass == trials});
    }
    for (double eps : {0.2, 0.1, 0.05}) {
        const MultiIndexNet net(1, 0, 1.0, 1.0, 1.0, 2, eps);
        int pass = 0;
        const int trials = 100;
        for (int k = 0; k < trials; ++k) {
            auto lam = random_link_fn(rng, 1.0, 1.0, std::sqrt(2.0));
            const double a = rng.uniform() * kTwoPi;
            std::vector<double> beta = {std::cos(a), std::sin(a)};
            auto g = [&](std::span<const double> x) {
                return lam(beta[0] * x[0] + beta[1] * x[1]);
            };
            MultiIndexFn member = net.cover({lam}, {beta});
            auto member_fn = [&member](std::span<const double> x) { return member(x); };
            if (l2_distance_uniform(g, member_fn, 2, 128) <= eps) ++pass;
        }
        t.rows.push_back({"nets", "multiindex.p1.d2.cover@" + fmt(eps),
                          static_cast<double>(pass) / trials, 1.0, pass == trials});
    }
    // log-size growth across halved radii vs the entropy order
    {
        const double l1 = LipschitzNet(1, 1.0, 1.0, 1.0, 0.1).log_size();
        const double l2v = LipschitzNet(1, 1.0, 1.0, 1.0, 0.05).log_size();
        const double ratio = l2v / l1;
        t.rows.push_back({"nets", "lipschitz.d1.logsize_ratio", ratio, 2.0,
                          ratio >= 1.0 && ratio <= 4.0});
    }
    {
        const double e1 = rate_from_entropy(EntropyOrder(1.0, 0.0), 4096).risk_exponent;
        t.rows.push_back({"nets", "rate_exponent.d1.alpha1", e1, -2.0 / 3.0,
                          std::abs(e1 + 2.0 / 3.0) < 1e-12});
    }
}

}  // namespace

CheckTable run_verify(VerifySuite suite, std::optional<FamilyKind> family_filter) {
    CheckTable t;
    switch (suite) {
        case VerifySuite::Condition1: verify_condition1(t, family_filter); break;
        case VerifySuite::Condition2: verify_condition2(t, family_filter); break;
        case VerifySuite::Lemma1: verify_lemma1(t, family_filter); break;
        case VerifySuite::Nets: verify_nets(t); break;
        case VerifySuite::DivergenceOracles: verify_divergence_oracles(t, family_filter); break;
        case VerifySuite::All:
            verify_condition1(t, family_filter);
            verify_condition2(t, family_filter);
            verify_lemma1(t, family_filter);
            verify_divergence_oracles(t, family_filter);
            verify_nets(t);
            break;
    }
    return t;
}

// ---------------------------------------------------------------------------
// output emission
// ---------------------------------------------------------------------------

std::string results_root() {
    if (const char* env = std::getenv("TILELAB_RESULTS_ROOT")) return env;
    return "results";
}

std::string rates_csv(const RateExperiment& config, const RateResult& result) {
    std::ostringstream out;
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(config)));
    out << "config_hash,n,mean_risk,se_risk,replications,slope,slope_se,theory_exponent\n";
    for (std::size_t i = 0; i < result.n.size(); ++i) {
        out << hash << ',' << result.n[i] << ',' << fmt(result.mean_risk[i]) << ','
            << fmt(result.se_risk[i]) << ',' << config.replications << ',' << fmt(result.slope)
            << ',' << fmt(result.slope_se) << ',' << fmt(result.theory_exponent) << '\n';
    }
    return out.str();
}

std::string checks_csv(std::uint64_t hash_value, const CheckTable& table) {
    std::ostringstream out;
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(hash_value));
    out << "config_hash,suite,check,value,threshold,pass\n";
    for (const auto& r : table.rows)
        out << hash << ',' << r.suite << ',' << r.check << ',' << fmt(r.value) << ','
            << fmt(r.threshold) << ',' << (r.pass ? 1 : 0) << '\n';
    return out.str();
}

std::string rate_plot_svg(const RateResult& result) {
    const int W = 640, H = 480, L = 70, Bm = 50, T = 20, R = 20;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\">\n<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    double xmin = std::log(static_cast<double>(result.n.front()));
    double xmax = std::log(static_cast<double>(result.n.back()));
    double ymin = 1e300, ymax = -1e300;
    for (double r : result.mean_risk) {
        ymin = std::min(ymin, std::log(r));
        ymax = std::max(ymax, std::log(r));
    }
    if (ymax - ymin < 1e-9) ymax = ymin + 1.0;
    auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double ly) { return H - Bm - (ly - ymin) / (ymax - ymin) * (H - T - Bm); };
    s << "<line x1=\"" << L << "\" y1=\"" << H - Bm << "\" x2=\"" << W - R << "\" y2=\"" << H - Bm
      << "\" stroke=\"black\"/>\n<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L
      << "\" y2=\"" << H - Bm << "\" stroke=\"black\"/>\n";
    // fitted line through the mean of the fitted points
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < result.n.size(); ++i) {
        sx += std::log(static_cast<double>(result.n[i]));
        sy += std::log(result.mean_risk[i]);
    }
    const double mx = sx / result.n.size(), my = sy / result.n.size();
    s << "<line x1=\"" << px(xmin) << "\" y1=\"" << py(my + result.slope * (xmin - mx))
      << "\" x2=\"" << px(xmax) << "\" y2=\"" << py(my + result.slope * (xmax - mx))
      << "\" stroke=\"#888\" stroke-dasharray=\"4,3\"/>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < result.n.size(); ++i)
        s << px(std::log(static_cast<double>(result.n[i]))) << ','
          << py(std::log(result.mean_risk[i])) << ' ';
    s << "\"/>\n";
    for (std::size_t i = 0; i < result.n.size(); ++i)
        s << "<circle cx=\"" << px(std::log(static_cast<double>(result.n[i]))) << "\" cy=\""
          << py(std::log(result.mean_risk[i])) << "\" r=\"3\" fill=\"#1f77b4\"/>\n";
    s << "<text x=\"" << (W / 2) << "\" y=\"" << (H - 12)
      << "\" text-anchor=\"middle\" font-size=\"13\">log n</text>\n";
    s << "<text x=\"16\" y=\"" << (H / 2)
      << "\" font-size=\"13\" transform=\"rotate(-90 16 " << (H / 2)
      << ")\" text-anchor=\"middle\">log mean risk</text>\n";
    s << "<text x=\"" << (W - R) << "\" y=\"" << (T + 12)
      << "\" text-anchor=\"end\" font-size=\"13\">slope " << fmt(result.slope) << " (theory "
      << fmt(result.theory_exponent) << ")</text>\n";
    s << "</svg>\n";
    return s.str();
}

namespace {

std::string run_dir_for(const std::string& tag, std::uint64_t hash_value) {
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(hash_value));
    const std::string dir = results_root() + "/" + tag + "-" + hash;
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

}  // namespace

std::string write_rate_outputs(const RateExperiment& config, const RateResult& result) {
    const std::string dir = run_dir_for("rates", config_hash(config));
    write_file(dir + "/rates.csv", rates_csv(config, result));
    write_file(dir + "/plot.svg", rate_plot_svg(result));
    return dir;
}

std::string write_check_outputs(const std::string& run_tag, std::uint64_t hash_value,
                                const CheckTable& table) {
    const std::string dir = run_dir_for(run_tag, hash_value);
    write_file(dir + "/checks.csv", checks_csv(hash_value, table));
    return dir;
}

}  // namespace tilelab
