// tilelab: numerical laboratory for psi-tile regression in location-scale
// models. Subcommands: verify, rates, divergence, psitile, net.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "tilelab/divergences.hpp"
#include "tilelab/function_classes.hpp"
#include "tilelab/harness.hpp"
#include "tilelab/psi_tile.hpp"

namespace {

tilelab::ErrorFamily make_family(const std::string& name, double tau, double alpha, double phi) {
    using tilelab::ErrorFamily;
    switch (tilelab::family_kind_from_string(name)) {
        case tilelab::FamilyKind::Ald: return ErrorFamily::ald(tau);
        case tilelab::FamilyKind::Acdtg: return ErrorFamily::acdtg(tau, alpha);
        case tilelab::FamilyKind::Cnl: return ErrorFamily::cnl(tau);
        case tilelab::FamilyKind::Cauchy: return ErrorFamily::cauchy();
        case tilelab::FamilyKind::AsymNormal: return ErrorFamily::asym_normal(phi);
    }
    throw std::invalid_argument("unknown family: " + name);
}

tilelab::PsiSpec make_psi(const std::string& name, int k, double level) {
    using tilelab::PsiSpec;
    switch (tilelab::psi_kind_from_string(name)) {
        case tilelab::PsiKind::Constant: return PsiSpec::quantile(level);
        case tilelab::PsiKind::Linear: return PsiSpec::expectile(level);
        case tilelab::PsiKind::Momentile: return PsiSpec::momentile(k, level);
        case tilelab::PsiKind::Huber: return PsiSpec::huber(level);
    }
    throw std::invalid_argument("unknown psi: " + name);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tilelab: psi-tile regression laboratory for location-scale models"};
    app.require_subcommand(1);

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite_name = "all";
    std::string verify_family;
    verify->add_option("suite", suite_name,
                       "condition1|condition2|lemma1|nets|divergence-oracles|all");
    verify->add_option("--family", verify_family, "restrict to one family");

    // ---- rates ----
    auto* rates = app.add_subcommand("rates", "run a Monte Carlo rate experiment");
    std::string config_path;
    rates->add_option("config", config_path, "flat key=value config file")->required();

    // ---- divergence ----
    auto* div = app.add_subcommand("divergence", "KL and Hellinger report for one member");
    std::string div_family = "cauchy";
    double div_tau = 0.5, div_alpha = 1.0, div_phi = 0.5, div_eta = 0.0, div_sigma = 1.0;
    div->add_option("--family", div_family)->required();
    div->add_option("--tau", div_tau);
    div->add_option("--alpha", div_alpha);
    div->add_option("--phi", div_phi);
    div->add_option("--eta", div_eta)->required();
    div->add_option("--sigma", div_sigma)->required();

    // ---- psitile ----
    auto* tile = app.add_subcommand("psitile", "psi-tile of a location-scale member");
    std::string tile_family = "ald", tile_psi = "constant";
    double tile_tau = 0.5, tile_alpha = 1.0, tile_phi = 0.5, tile_level = 0.5;
    double tile_eta = 0.0, tile_sigma = 1.0;
    int tile_k = 2;
    tile->add_option("--family", tile_family)->required();
    tile->add_option("--tau", tile_tau);
    tile->add_option("--alpha", tile_alpha);
    tile->add_option("--phi", tile_phi);
    tile->add_option("--psi", tile_psi, "constant|linear|momentile|huber")->required();
    tile->add_option("--level", tile_level)->required();
    tile->add_option("--k", tile_k, "momentile order");
    tile->add_option("--eta", tile_eta);
    tile->add_option("--sigma", tile_sigma);

    // ---- net ----
    auto* net = app.add_subcommand("net", "construct a net and report its summary");
    std::string net_class = "lipschitz";
    int net_d = 1, net_p = 1, net_s = 0, net_trials = 100;
    double net_alpha = 1.0, net_c = 1.0, net_b = 1.0, net_eps = 0.1, net_gamma = 1.0,
           net_l = 1.0;
    std::uint64_t net_seed = 7;
    net->add_option("--class", net_class, "lipschitz|multiindex")->required();
    net->add_option("--d", net_d);
    net->add_option("--alpha", net_alpha);
    net->add_option("--C", net_c);
    net->add_option("--B", net_b);
    net->add_option("--epsilon", net_eps)->required();
    net->add_option("--p", net_p);
    net->add_option("--s", net_s);
    net->add_option("--gamma", net_gamma);
    net->add_option("--L", net_l);
    net->add_option("--trials", net_trials);
    net->add_option("--seed", net_seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*verify) {
            const auto suite = tilelab::verify_suite_from_string(suite_name);
            std::optional<tilelab::FamilyKind> filter;
            if (!verify_family.empty())
                filter = tilelab::family_kind_from_string(verify_family);
            const auto table = tilelab::run_verify(suite, filter);
            const std::uint64_t hash =
                tilelab::fnv1a(suite_name + "|" + verify_family);
            const std::string dir =
                tilelab::write_check_outputs("verify-" + suite_name, hash, table);
            for (const auto& r : table.rows)
                std::printf("[%s] %s %s value=%.10g threshold=%.10g\n",
                            r.pass ? "PASS" : "FAIL", r.suite.c_str(), r.check.c_str(), r.value,
                            r.threshold);
            std::printf("wrote %s/checks.csv\n", dir.c_str());
            return table.all_pass() ? 0 : 1;
        }
        if (*rates) {
            const auto config = tilelab::load_rate_config(config_path);
            const auto result = tilelab::run_rates(config);
            const std::string dir = tilelab::write_rate_outputs(config, result);
            for (std::size_t i = 0; i < result.n.size(); ++i)
                std::printf("n=%-7ld mean_risk=%.6g se=%.3g\n", result.n[i], result.mean_risk[i],
                            result.se_risk[i]);
            std::printf("slope=%.4f (se %.4f), theory exponent %.4f%s\n", result.slope,
                        result.slope_se, result.theory_exponent,
                        result.dropped_smallest_n ? " [smallest n dropped from fit]" : "");
            std::printf("wrote %s/rates.csv and plot.svg\n", dir.c_str());
            return 0;
        }
        if (*div) {
            const auto fam = make_family(div_family, div_tau, div_alpha, div_phi);
            const auto rep = tilelab::divergence_report(fam, div_eta, div_sigma);
            std::printf("family,eta,sigma,kl,hellinger_sq,method\n");
            std::printf("%s,%.10g,%.10g,%.12g,%.12g,quadrature\n", fam.describe().c_str(),
                        rep.eta, rep.sigma, rep.kl, rep.hellinger_sq);
            return 0;
        }
        if (*tile) {
            const auto fam = make_family(tile_family, tile_tau, tile_alpha, tile_phi);
            const auto psi = make_psi(tile_psi, tile_k, tile_level);
            const tilelab::LocScaleMember member{fam, tile_eta, tile_sigma};
            const double t = tilelab::psi_tile_of_density(member, psi);
            std::printf("family,psi,level,eta,sigma,tile\n");
            std::printf("%s,%s,%.10g,%.10g,%.10g,%.12g\n", fam.describe().c_str(),
                        psi.describe().c_str(), tile_level, tile_eta, tile_sigma, t);
            return 0;
        }
        if (*net) {
            tilelab::Rng rng(net_seed);
            std::printf("class,epsilon,log_size,cover_pass_rate\n");
            if (net_class == "lipschitz") {
                const tilelab::LipschitzNet lnet(net_d, net_alpha, net_c, net_b, net_eps);
                int pass = 0;
                for (int k = 0; k < net_trials; ++k) {
                    auto g = tilelab::random_lipschitz_fn(rng, net_d, net_c, net_b);
                    auto member = lnet.cover(g);
                    auto member_fn = [&member](std::span<const double> x) { return member(x); };
                    if (tilelab::l2_distance_uniform(g, member_fn, net_d,
                                                     net_d == 1 ? 512 : 128) <= net_eps)
                        ++pass;
                }
                std::printf("lipschitz,%.6g,%.6g,%.4f\n", net_eps, lnet.log_size(),
                            static_cast<double>(pass) / net_trials);
                return pass == net_trials ? 0 : 1;
            }
            if (net_class == "multiindex") {
                const tilelab::MultiIndexNet mnet(net_p, net_s, net_gamma, net_l, net_b, net_d,
                                                  net_eps);
                int pass = 0;
                for (int k = 0; k < net_trials; ++k) {
                    std::vector<std::function<double(double)>> lams;
                    std::vector<std::vector<double>> betas;
                    for (int i = 0; i < net_p; ++i) {
                        lams.push_back(tilelab::random_link_fn(
                            rng, net_l, net_b, std::sqrt(static_cast<double>(net_d))));
                        const double a = rng.uniform() * 6.283185307179586;
                        if (net_d == 1)
                            betas.push_back({rng.uniform() < 0.5 ? 1.0 : -1.0});
                        else
                            betas.push_back({std::cos(a), std::sin(a)});
                    }
                    auto g = [&](std::span<const double> x) {
                        double s = 0.0;
                        for (int i = 0; i < net_p; ++i) {
                            double t2 = 0.0;
                            for (int a = 0; a < net_d; ++a) t2 += betas[i][a] * x[a];
                            s += lams[i](t2);
                        }
                        return s;
                    };
                    auto member = mnet.cover(lams, betas);
                    auto member_fn = [&member](std::span<const double> x) { return member(x); };
                    if (tilelab::l2_distance_uniform(g, member_fn, net_d,
                                                     net_d == 1 ? 512 : 128) <= net_eps)
                        ++pass;
                }
                std::printf("multiindex,%.6g,%.6g,%.4f\n", net_eps, mnet.log_size(),
                            static_cast<double>(pass) / net_trials);
                return pass == net_trials ? 0 : 1;
            }
            std::fprintf(stderr, "unknown net class: %s\n", net_class.c_str());
            return 2;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
