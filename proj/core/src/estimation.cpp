#include "tilelab/estimation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tilelab {

namespace {

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double logsumexp(std::span<const double> v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

}  // namespace

CovariateModel uniform_covariate(int d) {
    require(d >= 1, "uniform_covariate: d must be >= 1");
    CovariateModel c;
    c.sampler = [](Rng& rng, std::span<double> out) {
        for (double& v : out) v = rng.uniform();
    };
    c.density = [](std::span<const double>) { return 1.0; };
    return c;
}

Dataset simulate(const RegressionInstance& instance, std::size_t n, std::uint64_t seed) {
    require(n >= 1, "simulate: n must be >= 1");
    Dataset data;
    data.d = instance.d;
    data.x.resize(n * static_cast<std::size_t>(instance.d));
    data.y.resize(n);
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        std::span<double> xi(data.x.data() + i * instance.d, instance.d);
        instance.covariate.sampler(rng, xi);
        const double eps = draw_standard(instance.family, rng);
        data.y[i] = instance.mu(xi) + instance.sigma_fn(xi) * eps;
    }
    return data;
}

ClampRange ClampRange::for_instance(double J, double sigma_bar, double tile_of_standard) {
    const double r = J + sigma_bar * std::abs(tile_of_standard) + 1.0;
    return {-r, r};
}

FittedEstimate fit_binned_psi_tile(const Dataset& data, const PsiSpec& psi, int bins_per_axis,
                                   ClampRange clamp) {
    require(bins_per_axis >= 1, "fit_binned_psi_tile: bins_per_axis must be >= 1");
    require(data.d == 1 || data.d == 2, "fit_binned_psi_tile: d must be 1 or 2");
    require(data.size() >= 1, "fit_binned_psi_tile: empty dataset");

    const int m = bins_per_axis;
    const int d = data.d;
    const std::size_t n_cells = d == 1 ? m : static_cast<std::size_t>(m) * m;

    auto cell_of = [m, d](std::span<const double> x) {
        std::size_t idx = 0;
        for (int a = 0; a < d; ++a) {
            int i = static_cast<int>(std::floor(x[a] * m));
            i = std::clamp(i, 0, m - 1);
            idx = idx * m + static_cast<std::size_t>(i);
        }
        return idx;
    };

    std::vector<std::vector<double>> buckets(n_cells);
    for (std::size_t i = 0; i < data.size(); ++i) buckets[cell_of(data.point(i))].push_back(data.y[i]);

    std::vector<double> values(n_cells, 0.0);
    std::vector<bool> filled(n_cells, false);
    for (std::size_t c = 0; c < n_cells; ++c) {
        if (buckets[c].empty()) continue;
        const double t = empirical_psi_tile(buckets[c], psi);
        values[c] = std::clamp(t, clamp.lo, clamp.hi);
        filled[c] = true;
    }

    // empty cells inherit the nearest nonempty cell (row-major tie-break)
    auto coords = [&](std::size_t c) {
        return d == 1 ? std::pair<int, int>{static_cast<int>(c), 0}
                      : std::pair<int, int>{static_cast<int>(c / m), static_cast<int>(c % m)};
    };
    for (std::size_t c = 0; c < n_cells; ++c) {
        if (filled[c]) continue;
        const auto [ci, cj] = coords(c);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_at = c;
        for (std::size_t o = 0; o < n_cells; ++o) {
            if (!filled[o]) continue;
            const auto [oi, oj] = coords(o);
            const double dist = static_cast<double>((ci - oi) * (ci - oi) + (cj - oj) * (cj - oj));
            if (dist < best) {
                best = dist;
                best_at = o;
            }
        }
        if (best_at != c) values[c] = values[best_at];
    }

    FittedEstimate est;
    est.method = MethodTag::BinnedPsiTile;
    est.hyperparams = "m=" + std::to_string(m) + ",psi=" + psi.describe();
    est.predictor = [values = std::move(values), cell_of](std::span<const double> x) {
        return values[cell_of(x)];
    };
    return est;
}

KernelAlsResult fit_kernel_als(const Dataset& data, double phi, double lambda, double bandwidth,
                               int max_iter) {
    require(phi > 0.0 && phi < 1.0, "fit_kernel_als: phi must lie in (0,1)");
    require(lambda > 0.0, "fit_kernel_als: lambda must be > 0");
    require(bandwidth > 0.0, "fit_kernel_als: bandwidth must be > 0");
    const std::size_t n = data.size();
    require(n >= 1, "fit_kernel_als: empty dataset");

    const int d = data.d;
    auto kernel = [&](std::span<const double> a, std::span<const double> b) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) {
            const double diff = a[i] - b[i];
            s += diff * diff;
        }
        return std::exp(-s / (2.0 * bandwidth * bandwidth));
    };

    Eigen::MatrixXd K(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j)
            K(i, j) = K(j, i) = kernel(data.point(i), data.point(j));
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(data.y.data(), n);

    auto objective = [&](const Eigen::VectorXd& a) {
        const Eigen::VectorXd r = y - K * a;
        double loss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = r(i) >= 0.0 ? phi : 1.0 - phi;
            loss += w * r(i) * r(i);
        }
        return lambda * a.dot(K * a) + loss / static_cast<double>(n);
    };

    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    double obj = objective(alpha);
    KernelAlsResult out;
    out.objective_trace.push_back(obj);

    const double nl = static_cast<double>(n) * lambda;
    int it = 0;
    for (; it < max_iter; ++it) {
        const Eigen::VectorXd r = y - K * alpha;
        Eigen::VectorXd w(n);
        for (std::size_t i = 0; i < n; ++i) w(i) = r(i) >= 0.0 ? phi : 1.0 - phi;
        // stationarity: (n lambda I + W K) alpha = W y
        Eigen::MatrixXd A = w.asDiagonal() * K;
        A.diagonal().array() += nl;
        Eigen::VectorXd next = A.partialPivLu().solve(w.asDiagonal() * y);

        // damp toward the previous iterate if the objective went up
        double next_obj = objective(next);
        for (int halvings = 0; next_obj > obj && halvings < 60; ++halvings) {
            next = 0.5 * (next + alpha);
            next_obj = objective(next);
        }
        if (next_obj > obj) {
            out.objective_trace.push_back(obj);
            break;  // no descent left at floating-point resolution
        }
        const double delta = (next - alpha).cwiseAbs().maxCoeff();
        alpha = next;
        obj = next_obj;
        out.objective_trace.push_back(obj);
        if (delta < 1e-8) {
            ++it;
            break;
        }
        if (it + 1 == max_iter)
            throw std::runtime_error(
                "fit_kernel_als: IRLS did not converge after " + std::to_string(max_iter) +
                " iterations (last max coefficient change " + std::to_string(delta) + ")");
    }
    out.iterations = it;
    out.coefficients.assign(alpha.data(), alpha.data() + n);

    std::vector<double> xs = data.x;
    std::vector<double> coef = out.coefficients;
    out.estimate.method = MethodTag::KernelAls;
    out.estimate.hyperparams = "phi=" + std::to_string(phi) + ",lambda=" + std::to_string(lambda) +
                               ",bw=" + std::to_string(bandwidth);
    out.estimate.predictor = [xs = std::move(xs), coef = std::move(coef), d, bandwidth,
                              n](std::span<const double> x) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double q = 0.0;
            for (int a = 0; a < d; ++a) {
                const double diff = x[a] - xs[j * d + a];
                q += diff * diff;
            }
            s += coef[j] * std::exp(-q / (2.0 * bandwidth * bandwidth));
        }
        return s;
    };
    return out;
}

MixtureNetResult fit_mixture_net(const Dataset& data, const std::vector<NetMember>& net,
                                 const ErrorFamily& family, int y_grid) {
    const std::size_t n = data.size();
    const std::size_t g = net.size();
    require(g >= 1, "fit_mixture_net: empty net");
    if (g > 1000 || n > 1000)
        throw std::length_error("fit_mixture_net: toy-scale guard (|net| <= 1e3, n <= 1e3)");

    // sequential posterior over net members, all in log space
    std::vector<double> lw(g, -std::log(static_cast<double>(g)));
    std::vector<double> avg_w(g, 0.0);  // running average of per-step posteriors
    MixtureNetResult out;
    out.predictive_log_densities.reserve(n);
    std::vector<double> scratch(g);
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t j = 0; j < g; ++j) avg_w[j] += std::exp(lw[j]);
        const auto x = data.point(t);
        for (std::size_t j = 0; j < g; ++j) {
            const LocScaleMember m{family, net[j].mu(x), net[j].sigma_fn(x)};
            scratch[j] = lw[j] + log_pdf(m, data.y[t]);
        }
        const double lse = logsumexp(scratch);
        // log-space updates cannot underflow to an all-zero weight vector
        if (!std::isfinite(lse))
            throw std::logic_error("fit_mixture_net: non-finite posterior update");
        out.predictive_log_densities.push_back(lse);
        for (std::size_t j = 0; j < g; ++j) lw[j] = scratch[j] - lse;  // posterior update
    }
    for (std::size_t j = 0; j < g; ++j) avg_w[j] /= static_cast<double>(n);
    out.posterior_log_weights = lw;

    // Hellinger projection of qhat(.|x) = sum_j avg_w_j f_j(.|x) onto the net,
    // evaluated on a fixed y-grid per x
    auto project = [avg_w, net, family, y_grid](std::span<const double> x) -> std::size_t {
        const std::size_t gg = net.size();
        std::vector<double> mu(gg), sg(gg);
        double mu_lo = std::numeric_limits<double>::infinity(), mu_hi = -mu_lo, s_max = 0.0;
        for (std::size_t j = 0; j < gg; ++j) {
            mu[j] = net[j].mu(x);
            sg[j] = net[j].sigma_fn(x);
            mu_lo = std::min(mu_lo, mu[j]);
            mu_hi = std::max(mu_hi, mu[j]);
            s_max = std::max(s_max, sg[j]);
        }
        const double lo = mu_lo - 8.0 * s_max, hi = mu_hi + 8.0 * s_max;
        const double dy = (hi - lo) / y_grid;
        std::vector<double> q_sqrt(y_grid);
        for (int i = 0; i < y_grid; ++i) {
            const double y = lo + (i + 0.5) * dy;
            double q = 0.0;
            for (std::size_t j = 0; j < gg; ++j)
                q += avg_w[j] * pdf(LocScaleMember{family, mu[j], sg[j]}, y);
            q_sqrt[i] = std::sqrt(q);
        }
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < gg; ++j) {
            double dist = 0.0;
            for (int i = 0; i < y_grid; ++i) {
                const double y = lo + (i + 0.5) * dy;
                const double diff = q_sqrt[i] - std::sqrt(pdf(LocScaleMember{family, mu[j], sg[j]}, y));
                dist += diff * diff * dy;
            }
            if (dist < best_d) {
                best_d = dist;
                best = j;
            }
        }
        return best;
    };

    out.estimate.method = MethodTag::MixtureNet;
    out.estimate.hyperparams = "net=" + std::to_string(g) + ",ygrid=" + std::to_string(y_grid);
    out.estimate.predictor = [project, net](std::span<const double> x) {
        return net[project(x)].mu(x);
    };
    out.project = project;
    return out;
}

double l2_risk(const RealFn& estimate, const RegressionInstance& instance, int grid_per_axis) {
    require(grid_per_axis >= 64, "l2_risk: grid must be >= 64 points per axis");
    require(instance.d == 1 || instance.d == 2, "l2_risk: d must be 1 or 2");
    double s = 0.0;
    if (instance.d == 1) {
        for (int i = 0; i < grid_per_axis; ++i) {
            const double x = (i + 0.5) / grid_per_axis;
            std::span<const double> xs(&x, 1);
            const double diff = estimate(xs) - instance.mu(xs);
            s += diff * diff * instance.covariate.density(xs);
        }
        return s / grid_per_axis;
    }
    for (int i = 0; i < grid_per_axis; ++i) {
        for (int j = 0; j < grid_per_axis; ++j) {
            const double x[2] = {(i + 0.5) / grid_per_axis, (j + 0.5) / grid_per_axis};
            std::span<const double> xs(x, 2);
            const double diff = estimate(xs) - instance.mu(xs);
            s += diff * diff * instance.covariate.density(xs);
        }
    }
    return s / (static_cast<double>(grid_per_axis) * grid_per_axis);
}

}  // namespace tilelab
