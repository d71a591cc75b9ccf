#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "tilelab/function_classes.hpp"
#include "tilelab/rng.hpp"

using namespace tilelab;

TEST_CASE("rate equation solutions and exponents") {
    // d=1, alpha=1: eps^{-1} = n eps^2 -> exponent -2/3
    const auto r = rate_from_entropy(EntropyOrder(1.0, 0.0), 4096);
    CHECK(r.risk_exponent == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
    CHECK(std::pow(1.0 / r.epsilon_n, 1.0) ==
          doctest::Approx(4096.0 * r.epsilon_n * r.epsilon_n).epsilon(1e-9));

    // interaction classes: c1 = r/alpha -> n^{-2 alpha/(2 alpha + r)}
    for (double alpha : {1.0, 2.0, 3.0}) {
        for (double rr : {1.0, 2.0, 3.0}) {
            const auto sol = rate_from_entropy(EntropyOrder(rr / alpha, 0.0), 1e5);
            CHECK(sol.risk_exponent ==
                  doctest::Approx(-2.0 * alpha / (2.0 * alpha + rr)).epsilon(1e-14));
        }
    }
    // multi-index: c1 = 1/(s+gamma) -> n^{-2 alpha/(2 alpha + 1)}, alpha = s+gamma
    for (double a : {0.6, 1.0, 2.4}) {
        const auto sol = rate_from_entropy(EntropyOrder(1.0 / a, 0.0), 1e5);
        CHECK(sol.risk_exponent == doctest::Approx(-2.0 * a / (2.0 * a + 1.0)).epsilon(1e-14));
    }

    // log factors shift eps_n but not the power-law exponent
    const auto with_log = rate_from_entropy(EntropyOrder(2.0, 1.5), 1e6);
    CHECK(with_log.risk_exponent == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(with_log.epsilon_n > 0.0);
    CHECK(with_log.epsilon_n < 1.0);

    CHECK_THROWS_AS(EntropyOrder(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(rate_from_entropy(EntropyOrder(1.0, 0.0), 1.0), std::invalid_argument);
}

TEST_CASE("rate solution is monotone in n") {
    const EntropyOrder order(1.0, 0.0);
    double prev_eps = 1.0, prev_neps2 = 0.0;
    for (double n : {64.0, 256.0, 1024.0, 65536.0, 1e7}) {
        const auto sol = rate_from_entropy(order, n);
        CHECK(sol.epsilon_n < prev_eps);
        const double neps2 = n * sol.epsilon_n * sol.epsilon_n;
        CHECK(neps2 > prev_neps2);
        prev_eps = sol.epsilon_n;
        prev_neps2 = neps2;
    }
}

TEST_CASE("degenerate coarse radius yields a single-cell net of constants") {
    for (int d : {1, 2}) {
        const double eps = 1.0 * std::pow(static_cast<double>(d), 0.5);  // C d^{alpha/2}, alpha=1
        const LipschitzNet net(d, 1.0, 1.0, 1.0, eps);
        CHECK(net.total_cells() == 1);
        Rng rng(3);
        auto g = random_lipschitz_fn(rng, d, 1.0, 1.0);
        const GridFunction member = net.cover(g);
        CHECK(member.values().size() == 1);
    }
}

TEST_CASE("Lipschitz net covers random class members") {
    Rng rng(11);
    for (double eps : {0.2, 0.1, 0.05}) {
        const LipschitzNet net(1, 1.0, 1.0, 1.0, eps);
        for (int k = 0; k < 30; ++k) {
            auto g = random_lipschitz_fn(rng, 1, 1.0, 1.0);
            const GridFunction member = net.cover(g);
            auto member_fn = [&member](std::span<const double> x) { return member(x); };
            CHECK(l2_distance_uniform(g, member_fn, 1) <= eps);
        }
    }
    // d = 2
    const double eps = 0.2;
    const LipschitzNet net2(2, 1.0, 1.0, 1.0, eps);
    for (int k = 0; k < 10; ++k) {
        auto g = random_lipschitz_fn(rng, 2, 1.0, 1.0);
        const GridFunction member = net2.cover(g);
        auto member_fn = [&member](std::span<const double> x) { return member(x); };
        CHECK(l2_distance_uniform(g, member_fn, 2, 128) <= eps);
    }
}

TEST_CASE("Lipschitz net log-size tracks the eps^{-d/alpha} order") {
    // log|net| * eps should stay within a fixed band across radii (d=1, alpha=1)
    std::vector<double> normalized;
    for (double eps : {0.2, 0.1, 0.05}) {
        const LipschitzNet net(1, 1.0, 1.0, 1.0, eps);
        normalized.push_back(net.log_size() * eps);
    }
    const double lo = *std::min_element(normalized.begin(), normalized.end());
    const double hi = *std::max_element(normalized.begin(), normalized.end());
    CHECK(lo > 0.0);
    CHECK(hi / lo < 2.0);

    // halving the radius roughly doubles the log-size
    const double ratio = LipschitzNet(1, 1.0, 1.0, 1.0, 0.05).log_size() /
                         LipschitzNet(1, 1.0, 1.0, 1.0, 0.1).log_size();
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 4.0);
}

TEST_CASE("capacity guards") {
    CHECK_THROWS_AS(LipschitzNet(2, 0.25, 1.0, 1.0, 1e-3), std::length_error);
    const LipschitzNet small(1, 1.0, 1.0, 1.0, 0.5);
    CHECK_NOTHROW(small.enumerate(1000));
    const LipschitzNet big(1, 1.0, 1.0, 1.0, 0.05);
    CHECK_THROWS_AS(big.enumerate(10000), std::length_error);
    CHECK_THROWS_AS(LipschitzNet(3, 1.0, 1.0, 1.0, 0.1), std::invalid_argument);
}

TEST_CASE("enumeration count matches the DP log-size") {
    for (double eps : {0.5, 0.25}) {
        const LipschitzNet net(1, 1.0, 1.0, 1.0, eps);
        const auto members = net.enumerate(100000);
        CHECK(std::log(static_cast<double>(members.size())) ==
              doctest::Approx(net.log_size()).epsilon(1e-10));
    }
}

TEST_CASE("greedy packing behaviour") {
    const LipschitzNet net(1, 1.0, 1.0, 1.0, 0.5);
    const auto members = net.enumerate(10000);
    REQUIRE(members.size() >= 2);

    // separation beyond the diameter packs exactly one member
    CHECK(packing_entropy_bruteforce(members, 100.0) == 1);
    // separation -> 0 keeps every distinct member
    CHECK(packing_entropy_bruteforce(members, 1e-12) == static_cast<long>(members.size()));

    // richness: the packing count at eps/2 on the finer net strictly exceeds
    // the packing count at eps on the coarser net
    const auto finer = LipschitzNet(1, 1.0, 1.0, 1.0, 0.25).enumerate(10000);
    const long coarse_pack = packing_entropy_bruteforce(members, 0.5);
    const long fine_pack = packing_entropy_bruteforce(finer, 0.25);
    CHECK(fine_pack > coarse_pack);

    std::vector<GridFunction> too_many(10001, members.front());
    CHECK_THROWS_AS(packing_entropy_bruteforce(too_many, 0.1), std::length_error);
}

TEST_CASE("multi-index net: degenerate constant links") {
    const MultiIndexNet net(1, 0, 1.0, 1.0, 1.0, 2, 0.2);
    auto constant = [](double) { return 0.37; };
    const MultiIndexFn member = net.cover({constant}, {{1.0, 0.0}});
    for (double x1 : {0.0, 0.3, 0.9}) {
        for (double x2 : {0.1, 0.8}) {
            const double x[2] = {x1, x2};
            CHECK(std::abs(member(std::span<const double>(x, 2)) - 0.37) <= 0.1 + 1e-12);
        }
    }
}

TEST_CASE("multi-index net covers random single-index members") {
    Rng rng(17);
    for (double eps : {0.2, 0.1}) {
        const MultiIndexNet net(1, 0, 1.0, 1.0, 1.0, 2, eps);
        for (int k = 0; k < 25; ++k) {
            auto lam = random_link_fn(rng, 1.0, 1.0, std::sqrt(2.0));
            const double a = rng.uniform() * 6.283185307179586;
            std::vector<double> beta = {std::cos(a), std::sin(a)};
            auto g = [&](std::span<const double> x) {
                return lam(beta[0] * x[0] + beta[1] * x[1]);
            };
            const MultiIndexFn member = net.cover({lam}, {beta});
            auto member_fn = [&member](std::span<const double> x) { return member(x); };
            CHECK(l2_distance_uniform(g, member_fn, 2, 128) <= eps);
        }
    }
}

TEST_CASE("multi-index net covers p=2 sums") {
    Rng rng(23);
    const MultiIndexNet net(2, 0, 1.0, 1.0, 1.0, 2, 0.2);
    for (int k = 0; k < 10; ++k) {
        std::vector<std::function<double(double)>> lams;
        std::vector<std::vector<double>> betas;
        for (int i = 0; i < 2; ++i) {
            lams.push_back(random_link_fn(rng, 1.0, 1.0, std::sqrt(2.0)));
            const double a = rng.uniform() * 6.283185307179586;
            betas.push_back({std::cos(a), std::sin(a)});
        }
        auto g = [&](std::span<const double> x) {
            return lams[0](betas[0][0] * x[0] + betas[0][1] * x[1]) +
                   lams[1](betas[1][0] * x[0] + betas[1][1] * x[1]);
        };
        const MultiIndexFn member = net.cover(lams, betas);
        auto member_fn = [&member](std::span<const double> x) { return member(x); };
        CHECK(l2_distance_uniform(g, member_fn, 2, 128) <= 0.2);
    }
}

TEST_CASE("multi-index log-size is dominated by the profile factor") {
    for (double eps : {0.2, 0.1, 0.05}) {
        const MultiIndexNet net(1, 0, 1.0, 1.0, 1.0, 2, eps);
        const double profile = net.profile_log_size();
        const double direction = std::log(static_cast<double>(net.direction_count()));
        // the direction factor contributes only O(log 1/eps)
        CHECK(direction < 0.5 * profile);
        CHECK(net.log_size() == doctest::Approx(profile + direction).epsilon(1e-12));
    }
    // profile factor scales like eps^{-1/(s+gamma)} with s=0, gamma=1
    const double ratio = MultiIndexNet(1, 0, 1.0, 1.0, 1.0, 2, 0.05).profile_log_size() /
                         MultiIndexNet(1, 0, 1.0, 1.0, 1.0, 2, 0.1).profile_log_size();
    CHECK(ratio >= 1.0);
    CHECK(ratio <= 4.0);
    CHECK_THROWS_AS(MultiIndexNet(1, 1, 1.0, 1.0, 1.0, 2, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(MultiIndexNet(4, 0, 1.0, 1.0, 1.0, 2, 0.1), std::invalid_argument);
}

TEST_CASE("scale class net is dominated by every nonparametric net (condition 3)") {
    for (double eps : {0.2, 0.1, 0.05}) {
        const double scale_log = scale_class_net_log_size(1.0, 1, eps);
        const double lip_log = LipschitzNet(1, 1.0, 1.0, 1.0, eps).log_size();
        CHECK(scale_log < lip_log);
    }
    // log growth only: halving eps adds a constant, not a factor
    const double g1 = scale_class_net_log_size(1.0, 2, 0.1);
    const double g2 = scale_class_net_log_size(1.0, 2, 0.05);
    CHECK(g2 - g1 < 2.0 * 2.0 * std::log(2.0) + 1e-9);
}

TEST_CASE("bounded density ratio against the uniform reference (condition 4)") {
    // densities with 1/C <= h <= C on [0,1]: sup h/h0 <= C <= C^2 for h0 = 1
    const double Cbar = 2.0;
    Rng rng(5);
    for (int k = 0; k < 20; ++k) {
        const double a = (2.0 * rng.uniform() - 1.0) * 0.5;
        auto h = [&](double x) {
            const double raw = std::exp(a * std::sin(6.283185307179586 * x));
            return std::clamp(raw, 1.0 / Cbar, Cbar);
        };
        double sup_ratio = 0.0;
        for (int i = 0; i <= 200; ++i) sup_ratio = std::max(sup_ratio, h(i / 200.0) / 1.0);
        CHECK(sup_ratio <= Cbar * Cbar);
    }
}

TEST_CASE("GridFunction exact L2 distance agrees with the numeric one") {
    const LipschitzNet net(1, 1.0, 1.0, 1.0, 0.25);
    Rng rng(29);
    auto g1 = random_lipschitz_fn(rng, 1, 1.0, 1.0);
    auto g2 = random_lipschitz_fn(rng, 1, 1.0, 1.0);
    const GridFunction a = net.cover(g1);
    const GridFunction b = net.cover(g2);
    auto fa = [&a](std::span<const double> x) { return a(x); };
    auto fb = [&b](std::span<const double> x) { return b(x); };
    CHECK(GridFunction::l2_distance(a, b) ==
          doctest::Approx(l2_distance_uniform(fa, fb, 1, 4096)).epsilon(1e-3));
}
