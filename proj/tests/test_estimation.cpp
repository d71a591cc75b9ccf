#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tilelab/divergences.hpp"
#include "tilelab/estimation.hpp"
#include "tilelab/psi_tile.hpp"

using namespace tilelab;

namespace {

RegressionInstance make_test_instance(const ErrorFamily& fam, RealFn mu, RealFn sigma_fn) {
    RegressionInstance inst;
    inst.d = 1;
    inst.mu = std::move(mu);
    inst.sigma_fn = std::move(sigma_fn);
    inst.family = fam;
    inst.covariate = uniform_covariate(1);
    return inst;
}

RealFn constant_fn(double c) {
    return [c](std::span<const double>) { return c; };
}

// small dense solver, the independent route for the kernel ridge check
std::vector<double> gauss_solve(std::vector<std::vector<double>> A, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(A[i][k]) > std::abs(A[piv][k])) piv = i;
        std::swap(A[k], A[piv]);
        std::swap(b[k], b[piv]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = A[i][k] / A[k][k];
            for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
            b[i] -= f * b[k];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
        x[i] = s / A[i][i];
    }
    return x;
}

template <typename F>
double golden_min(const F& f, double lo, double hi, double tol = 1e-10) {
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (b - a > tol) {
        if (f(c) < f(d))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("simulate: determinism and marginal law") {
    const auto inst = make_test_instance(ErrorFamily::ald(0.3), constant_fn(0.0), constant_fn(1.0));
    const auto d1 = simulate(inst, 1000, 7);
    const auto d2 = simulate(inst, 1000, 7);
    CHECK(d1.y == d2.y);
    CHECK(d1.x == d2.x);
    CHECK(simulate(inst, 1000, 8).y != d1.y);

    // mu = 0, sigma = 1: y is marginally the error law (KS)
    const std::size_t n = 50000;
    auto data = simulate(inst, n, 99);
    std::sort(data.y.begin(), data.y.end());
    const LocScaleMember m{inst.family, 0.0, 1.0};
    double ks = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double F = cdf(m, data.y[i]);
        ks = std::max(ks, std::max(std::abs(F - static_cast<double>(i) / n),
                                   std::abs(static_cast<double>(i + 1) / n - F)));
    }
    CHECK(ks < 1.628 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("simulate: conditional tile follows the shift identity") {
    const auto fam = ErrorFamily::ald(0.3);
    auto mu = [](std::span<const double> x) { return 0.3 * std::sin(6.283185307179586 * x[0]); };
    auto sg = [](std::span<const double> x) { return 1.0 + 0.2 * x[0]; };
    const auto inst = make_test_instance(fam, mu, sg);
    const std::size_t n = 60000;
    const auto data = simulate(inst, n, 1234);

    const double q = psi_tile_of_density(LocScaleMember{fam, 0.0, 1.0}, PsiSpec::quantile(0.5));
    const int bins = 8;
    std::vector<std::vector<double>> bucket(bins);
    std::vector<double> xsum(bins, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const int b = std::min(bins - 1, static_cast<int>(data.x[i] * bins));
        bucket[b].push_back(data.y[i]);
        xsum[b] += data.x[i];
    }
    for (int b = 0; b < bins; ++b) {
        REQUIRE(bucket[b].size() > 1000);
        const double xbar = xsum[b] / bucket[b].size();
        const double expected = mu(std::span<const double>(&xbar, 1)) +
                                sg(std::span<const double>(&xbar, 1)) * q;
        const double emp = empirical_psi_tile(bucket[b], PsiSpec::quantile(0.5));
        CHECK(std::abs(emp - expected) < 0.08);
    }
}

TEST_CASE("binned fit: constant truth recovers the constant") {
    const auto fam = ErrorFamily::cnl(0.4);
    const auto inst = make_test_instance(fam, constant_fn(1.2), constant_fn(1.0));
    const auto data = simulate(inst, 20000, 5);
    const auto fit = fit_binned_psi_tile(data, PsiSpec::quantile(0.4), 5);
    for (double x : {0.05, 0.35, 0.55, 0.75, 0.95}) {
        CHECK(fit.predictor(std::span<const double>(&x, 1)) ==
              doctest::Approx(1.2).epsilon(0.05));
    }
}

TEST_CASE("binned fit: estimator equivariance") {
    const auto fam = ErrorFamily::asym_normal(0.6);
    const auto inst = make_test_instance(
        fam, [](std::span<const double> x) { return x[0] - 0.5; }, constant_fn(1.0));
    auto data = simulate(inst, 3000, 77);
    const auto base = fit_binned_psi_tile(data, PsiSpec::expectile(0.6), 6);
    Dataset mapped = data;
    for (double& y : mapped.y) y = -1.5 + 2.5 * y;
    const auto shifted = fit_binned_psi_tile(mapped, PsiSpec::expectile(0.6), 6);
    for (double x : {0.1, 0.4, 0.62, 0.9}) {
        std::span<const double> xs(&x, 1);
        CHECK(shifted.predictor(xs) ==
              doctest::Approx(-1.5 + 2.5 * base.predictor(xs)).epsilon(1e-7));
    }
}

TEST_CASE("binned fit: empty cells inherit the nearest nonempty value") {
    Dataset data;
    data.d = 1;
    // points only in cells 0 and 4 of 5
    data.x = {0.05, 0.1, 0.15, 0.9, 0.95};
    data.y = {1.0, 1.0, 1.0, 3.0, 3.0};
    const auto fit = fit_binned_psi_tile(data, PsiSpec::quantile(0.5), 5);
    double x = 0.3;  // cell 1 -> nearest nonempty is cell 0
    CHECK(fit.predictor(std::span<const double>(&x, 1)) == doctest::Approx(1.0));
    x = 0.7;  // cell 3 -> nearest nonempty is cell 4
    CHECK(fit.predictor(std::span<const double>(&x, 1)) == doctest::Approx(3.0));
    x = 0.5;  // cell 2 is equidistant; row-major tie-break picks cell 0
    CHECK(fit.predictor(std::span<const double>(&x, 1)) == doctest::Approx(1.0));

    // clamping
    const auto clamped = fit_binned_psi_tile(data, PsiSpec::quantile(0.5), 5, {-0.5, 2.0});
    x = 0.95;
    CHECK(clamped.predictor(std::span<const double>(&x, 1)) == doctest::Approx(2.0));
}

TEST_CASE("l2 risk oracles") {
    auto truth = [](std::span<const double> x) { return 2.0 * x[0]; };
    const auto inst = make_test_instance(ErrorFamily::cauchy(), truth, constant_fn(1.0));

    CHECK(l2_risk(truth, inst, 256) == doctest::Approx(0.0));
    auto plus_c = [&](std::span<const double> x) { return truth(x) + 0.3; };
    CHECK(l2_risk(plus_c, inst, 256) == doctest::Approx(0.09).epsilon(1e-10));

    // piecewise-constant vs linear truth: cellwise integral of (2x - c_k)^2
    auto pc = [](std::span<const double> x) { return x[0] < 0.5 ? 0.5 : 1.5; };
    // int_0^0.5 (2x-0.5)^2 + int_0.5^1 (2x-1.5)^2 = 2 * int_0^0.5 (2x-0.5)^2
    // = 2 * [ (2x-0.5)^3 / 6 ]_0^0.5 = 2 * (0.125 + 0.125)/6 = 1/12
    CHECK(l2_risk(pc, inst, 1024) == doctest::Approx(1.0 / 12.0).epsilon(1e-4));

    CHECK_THROWS_AS(l2_risk(truth, inst, 32), std::invalid_argument);
}

TEST_CASE("kernel ALS: phi=1/2 reduces to kernel ridge") {
    const auto inst = make_test_instance(
        ErrorFamily::asym_normal(0.5), [](std::span<const double> x) { return std::sin(3.0 * x[0]); },
        constant_fn(1.0));
    const auto data = simulate(inst, 40, 11);
    const double lambda = 1e-2, bw = 0.2;
    const auto fit = fit_kernel_als(data, 0.5, lambda, bw);

    // independent ridge route: (2 n lambda I + K) alpha = y
    const std::size_t n = data.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double diff = data.x[i] - data.x[j];
            A[i][j] = std::exp(-diff * diff / (2.0 * bw * bw)) * 0.5;
            if (i == j) A[i][j] += n * lambda;
        }
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = 0.5 * data.y[i];
    const auto alpha = gauss_solve(A, rhs);
    for (std::size_t i = 0; i < n; ++i)
        CHECK(fit.coefficients[i] == doctest::Approx(alpha[i]).epsilon(1e-6));
}

TEST_CASE("kernel ALS: one point interpolates as lambda -> 0") {
    Dataset data;
    data.d = 1;
    data.x = {0.4};
    data.y = {2.7};
    const auto fit = fit_kernel_als(data, 0.3, 1e-12, 0.3);
    const double x = 0.4;
    CHECK(fit.estimate.predictor(std::span<const double>(&x, 1)) ==
          doctest::Approx(2.7).epsilon(1e-6));
}

TEST_CASE("kernel ALS: IRLS matches a coordinate-descent oracle and descends") {
    const auto inst = make_test_instance(
        ErrorFamily::ald(0.5), [](std::span<const double> x) { return x[0] * x[0]; },
        constant_fn(1.0));
    const auto data = simulate(inst, 20, 3);
    const double phi = 0.7, lambda = 2e-2, bw = 0.03;
    const auto fit = fit_kernel_als(data, phi, lambda, bw);

    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i)
        CHECK(fit.objective_trace[i] <= fit.objective_trace[i - 1] + 1e-12);

    const std::size_t n = data.size();
    std::vector<std::vector<double>> K(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double diff = data.x[i] - data.x[j];
            K[i][j] = std::exp(-diff * diff / (2.0 * bw * bw));
        }
    auto objective = [&](const std::vector<double>& a) {
        double reg = 0.0;
        std::vector<double> Ka(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) Ka[i] += K[i][j] * a[j];
        for (std::size_t i = 0; i < n; ++i) reg += a[i] * Ka[i];
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = data.y[i] - Ka[i];
            loss += r * r * std::abs(phi - (r < 0 ? 1.0 : 0.0));
        }
        return lambda * reg + loss / static_cast<double>(n);
    };
    // cyclic golden-section coordinate descent to a small objective tolerance
    std::vector<double> a(n, 0.0);
    double prev = objective(a);
    for (int sweep = 0; sweep < 1500; ++sweep) {
        for (std::size_t i = 0; i < n; ++i) {
            auto f1 = [&](double v) {
                std::vector<double> tmp = a;
                tmp[i] = v;
                return objective(tmp);
            };
            a[i] = golden_min(f1, a[i] - 1.0, a[i] + 1.0, 1e-11);
        }
        const double cur = objective(a);
        if (prev - cur < 1e-12) break;
        prev = cur;
    }
    const double oracle_obj = objective(a);
    const double irls_obj = fit.objective_trace.back();
    CHECK(std::abs(irls_obj - oracle_obj) < 1e-4);
    CHECK(irls_obj <= oracle_obj + 1e-10);  // IRLS is never worse than the oracle
}

TEST_CASE("mixture net: singleton net returns the true member") {
    const auto fam = ErrorFamily::ald(0.5);
    auto truth = [](std::span<const double> x) { return 0.4 * x[0]; };
    const auto inst = make_test_instance(fam, truth, constant_fn(1.0));
    const auto data = simulate(inst, 100, 21);
    const std::vector<NetMember> net = {{truth, constant_fn(1.0)}};
    const auto fit = fit_mixture_net(data, net, fam);
    for (double x : {0.1, 0.6, 0.9})
        CHECK(fit.estimate.predictor(std::span<const double>(&x, 1)) ==
              doctest::Approx(truth(std::span<const double>(&x, 1))));
}

TEST_CASE("mixture net: posterior concentrates on the generating member") {
    const auto fam = ErrorFamily::asym_normal(0.5);
    const auto inst = make_test_instance(fam, constant_fn(0.0), constant_fn(1.0));
    const auto data = simulate(inst, 400, 33);
    const std::vector<NetMember> net = {{constant_fn(0.0), constant_fn(1.0)},
                                        {constant_fn(1.0), constant_fn(1.0)}};
    const auto fit = fit_mixture_net(data, net, fam);

    // likelihood-ratio oracle: log w1 - log w2 = sum log f1 - log f2
    double lr = 0.0;
    for (std::size_t t = 0; t < data.size(); ++t) {
        lr += log_pdf(LocScaleMember{fam, 0.0, 1.0}, data.y[t]) -
              log_pdf(LocScaleMember{fam, 1.0, 1.0}, data.y[t]);
    }
    CHECK(fit.posterior_log_weights[0] - fit.posterior_log_weights[1] ==
          doctest::Approx(lr).epsilon(1e-9));
    CHECK(std::exp(fit.posterior_log_weights[0]) > 0.999);
}

TEST_CASE("mixture net: realized regret obeys the progressive-mixture bound") {
    const auto fam = ErrorFamily::cnl(0.4);
    const double true_mu = 2.0;
    const auto inst = make_test_instance(fam, constant_fn(true_mu), constant_fn(1.0));
    const std::size_t n = 200;
    const auto data = simulate(inst, n, 55);

    std::vector<NetMember> net;
    std::vector<double> mus;
    for (int j = 0; j < 10; ++j) {
        const double c = 0.5 * j;  // includes the truth at j = 4
        mus.push_back(c);
        net.push_back({constant_fn(c), constant_fn(1.0)});
    }
    const auto fit = fit_mixture_net(data, net, fam);

    double regret = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        regret += log_pdf(LocScaleMember{fam, true_mu, 1.0}, data.y[t]) -
                  fit.predictive_log_densities[t];
    }
    const double avg_regret = regret / static_cast<double>(n);
    const double logG_over_n = std::log(10.0) / static_cast<double>(n);
    // truth is in the net, so log|G|/n alone bounds the realized average regret
    CHECK(avg_regret <= logG_over_n + 1e-12);
    // and a fortiori the looser bound with the largest pairwise KL added
    double max_pair_kl = 0.0;
    for (double a : mus)
        for (double b : mus)
            if (a != b) max_pair_kl = std::max(max_pair_kl, kl_pair(fam, a, 1.0, b, 1.0));
    CHECK(avg_regret <= logG_over_n + max_pair_kl);

    // Hellinger projection recovers the generating member
    for (double x : {0.2, 0.8})
        CHECK(fit.estimate.predictor(std::span<const double>(&x, 1)) ==
              doctest::Approx(true_mu));

    // capacity guards
    const std::vector<NetMember> big(1001, net[0]);
    CHECK_THROWS_AS(fit_mixture_net(data, big, fam), std::length_error);
}

TEST_CASE("binned fit: risk scales like the n^{-2/3} prediction between 512 and 4096") {
    const auto fam = ErrorFamily::ald(0.5);
    auto mu = [](std::span<const double> x) { return 0.5 * std::sin(6.283185307179586 * x[0]); };
    const auto inst = make_test_instance(fam, mu, constant_fn(1.0));
    const int reps = 50;
    double risk512 = 0.0, risk4096 = 0.0;
    for (int r = 0; r < reps; ++r) {
        for (long n : {512L, 4096L}) {
            const auto data = simulate(inst, static_cast<std::size_t>(n),
                                       derive_seed(314, static_cast<std::uint64_t>(n), r));
            const int m = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n))));
            const auto fit = fit_binned_psi_tile(data, PsiSpec::quantile(0.5), m);
            (n == 512 ? risk512 : risk4096) += l2_risk(fit.predictor, inst, 256);
        }
    }
    const double scaling = std::pow(4096.0 / 512.0, -2.0 / 3.0);
    const double ratio = (risk4096 / reps) / ((risk512 / reps) * scaling);
    CHECK(ratio > 0.2);
    CHECK(ratio < 5.0);
}

TEST_CASE("kernel ALS: iteration budget exhaustion throws") {
    const auto inst = make_test_instance(
        ErrorFamily::ald(0.5), [](std::span<const double> x) { return std::sin(5.0 * x[0]); },
        constant_fn(1.0));
    const auto data = simulate(inst, 30, 4);
    CHECK_THROWS_AS(fit_kernel_als(data, 0.3, 1e-4, 0.2, 1), std::runtime_error);
}

TEST_CASE("two binned generators differ by sigma times the tile gap") {
    // with constant sigma, predictors fitted at two levels differ by about
    // sigma * (t2 - t1) uniformly in x
    const auto fam = ErrorFamily::ald(0.3);
    const double sigma0 = 1.4;
    auto mu = [](std::span<const double> x) { return 0.4 * std::sin(6.283185307179586 * x[0]); };
    const auto inst = make_test_instance(fam, mu, constant_fn(sigma0));
    const auto psi1 = PsiSpec::quantile(0.3);  // pinned: t1 = 0
    const auto psi2 = PsiSpec::quantile(0.6);
    const double t1 = psi_tile_of_density(LocScaleMember{fam, 0.0, 1.0}, psi1);
    const double t2 = psi_tile_of_density(LocScaleMember{fam, 0.0, 1.0}, psi2);

    const int reps = 10;
    std::vector<double> diffs(reps);
    for (int r = 0; r < reps; ++r) {
        const auto data = simulate(inst, 20000, derive_seed(606, r));
        const auto f1 = fit_binned_psi_tile(data, psi1, 10);
        const auto f2 = fit_binned_psi_tile(data, psi2, 10);
        double acc = 0.0;
        const int grid = 200;
        for (int i = 0; i < grid; ++i) {
            const double x = (i + 0.5) / grid;
            std::span<const double> xs(&x, 1);
            acc += f2.predictor(xs) - f1.predictor(xs);
        }
        diffs[r] = acc / grid;
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= reps;
    double var = 0.0;
    for (double d : diffs) var += (d - mean) * (d - mean);
    const double se = std::sqrt(var / (reps - 1) / reps);
    CHECK(std::abs(mean - sigma0 * (t2 - t1)) < 3.0 * se + 1e-3);
}

TEST_CASE("binned median risk shrinks with n under Cauchy errors") {
    const auto fam = ErrorFamily::cauchy();
    auto mu = [](std::span<const double> x) { return 0.5 * std::sin(6.283185307179586 * x[0]); };
    const auto inst = make_test_instance(fam, mu, constant_fn(1.0));
    const ClampRange clamp = ClampRange::for_instance(1.0, 2.0, 0.0);
    double prev = 1e9;
    for (long n : {512L, 4096L, 32768L}) {
        double risk = 0.0;
        const int reps = 5;
        for (int r = 0; r < reps; ++r) {
            const auto data = simulate(inst, static_cast<std::size_t>(n), derive_seed(1000, n, r));
            const int m = static_cast<int>(std::ceil(std::cbrt(static_cast<double>(n))));
            const auto fit = fit_binned_psi_tile(data, PsiSpec::quantile(0.5), m, clamp);
            risk += l2_risk(fit.predictor, inst, 256);
        }
        risk /= reps;
        CHECK(risk < prev);
        prev = risk;
    }
}
