#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eqzero/ensemble.hpp"
#include "eqzero/fit.hpp"
#include "eqzero/io.hpp"
#include "eqzero/scaling.hpp"

namespace eqzero {

// ---------------------------------------------------------------------------
// Batch command layer.  Each cmd_* consumes a validated RunConfig, writes CSV
// (and SVG) outputs plus a summary.json into the output directory, and throws
// the library error types on failure; eqzero_main maps those to the exit-code
// contract (0 ok, 2 config, 3 numerical breakdown, 4 insufficient statistics).

struct RunConfig {
    std::string domain_arg = "disk";
    std::string weight_arg;            // empty: take the domain file's weight
    int degree = 20;
    int quad = 0;                      // 0: default max(256, 8(N+1))
    std::int64_t trials = 200;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool extended_precision = false;
    int workers = 1;
    int bins = 64;
    bool interior = false;             // basis: interior inner product

    std::string experiment = "density";  // montecarlo: density|correlation|variance
    std::vector<int> n_list;             // variance / kernel-scaling degree list
    double grid_step = 1e-3;             // scaling-curves step
    double grid_max = 8.0;               // scaling-curves range
    std::string corr_kind = "tangential";
    double band = 0.3;                   // correlation band halfwidth (scaled units)
    double max_separation = 8.0;
    double tolerance = 0.15;             // correlation pass/fail tolerance
    double radial_range = 0.5;
    bool scale_radial = false;
    std::string phi = "gauss";           // variance test function
    double exterior_point = 2.0;         // asymptotics evaluation point (real axis)
};

inline void validate(const RunConfig& cfg) {
    if (cfg.degree < 0) throw ConfigError("degree must be nonnegative");
    if (cfg.degree > 60 && !cfg.extended_precision)
        throw ConfigError("degree > 60 requires --extended-precision");
    if (cfg.quad < 0) throw ConfigError("quad must be positive");
    if (cfg.trials < 1) throw ConfigError("trials must be positive");
    if (cfg.workers < 1) throw ConfigError("workers must be positive");
    if (cfg.bins < 1) throw ConfigError("bins must be positive");
    if (!(cfg.grid_step > 0.0) || !(cfg.grid_max > 0.0))
        throw ConfigError("grid step and range must be positive");
    if (cfg.out_dir.empty()) throw ConfigError("output directory must be set");
    for (int n : cfg.n_list)
        if (n < 4) throw ConfigError("every N in n-list must be >= 4");
}

namespace detail {

inline int default_quad(const RunConfig& cfg, int extra = 1) {
    return cfg.quad > 0 ? cfg.quad : std::max(256, 8 * (cfg.degree + extra));
}

inline WeightSpec pick_weight(const RunConfig& cfg, const DomainFile& df) {
    return cfg.weight_arg.empty() ? df.weight : parse_weight_spec(cfg.weight_arg);
}

class RunReport {
public:
    RunReport(const RunConfig& cfg, const std::string& command) : t0_(clock_t::now()) {
        j_["version"] = version_string;
        j_["command"] = command;
        j_["config"] = {{"domain", cfg.domain_arg},
                        {"weight", cfg.weight_arg},
                        {"degree", cfg.degree},
                        {"quad", cfg.quad},
                        {"trials", cfg.trials},
                        {"seed", cfg.seed},
                        {"workers", cfg.workers},
                        {"bins", cfg.bins},
                        {"extended_precision", cfg.extended_precision}};
    }
    nlohmann::json& json() { return j_; }
    void write(const std::filesystem::path& dir) {
        j_["wall_seconds"] =
            std::chrono::duration<double>(clock_t::now() - t0_).count();
        std::ofstream out(dir / "summary.json");
        out << j_.dump(2) << "\n";
    }

private:
    using clock_t = std::chrono::steady_clock;
    clock_t::time_point t0_;
    nlohmann::json j_;
};

inline std::filesystem::path prepare_out_dir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace detail

// ---------------------------------------------------------------------------

inline int cmd_basis(const RunConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    detail::RunReport report(cfg, "basis");
    const DomainFile df = resolve_domain(cfg.domain_arg);
    const WeightSpec weight = detail::pick_weight(cfg, df);
    const int N = cfg.degree;
    const BasisOptions opts{cfg.extended_precision};

    OrthonormalBasis basis;
    BoundaryQuadrature quad;
    std::vector<double> ipw;  // inner-product weights on the grid
    if (cfg.interior) {
        const int M = detail::default_quad(cfg, 2);
        basis = build_interior_basis(df.domain, N, M, opts);
    } else {
        const int M = detail::default_quad(cfg, 1);
        basis = build_boundary_basis(df.domain, weight, N, M, opts);
        quad = make_boundary_quadrature(df.domain, M);
        ipw.resize(M);
        for (int m = 0; m < M; ++m) ipw[m] = weight.evaluator(quad.angles[m]) * quad.weights[m];
    }

    CsvWriter csv(dir / "basis.csv", "j,k,re,im",
                  "monomial coefficient k of P_j (dimensionless)");
    for (int j = 0; j <= N; ++j)
        for (int k = 0; k <= j; ++k)
            csv.row({static_cast<double>(j), static_cast<double>(k), basis.monomial[j][k].real(),
                     basis.monomial[j][k].imag()});

    // Gram residual on the construction grid (boundary case; the interior
    // construction is validated through its own quadrature in the tests).
    double gram_residual = 0.0;
    if (!cfg.interior) {
        const int M = quad.node_count();
        std::vector<std::vector<Complex>> vals(N + 1);
        for (int m = 0; m < M; ++m) {
            const std::vector<Complex> p = eval_basis(basis, quad.nodes[m]);
            for (int j = 0; j <= N; ++j) {
                if (vals[j].empty()) vals[j].resize(M);
                vals[j][m] = p[j];
            }
        }
        for (int j = 0; j <= N; ++j)
            for (int k = j; k <= N; ++k) {
                const Complex g = weighted_dot(vals[j], vals[k], ipw);
                const double target = (j == k) ? 1.0 : 0.0;
                gram_residual = std::max(gram_residual, std::abs(g - target));
            }
    }
    {
        nlohmann::json g;
        g["max_abs_residual"] = gram_residual;
        g["degree"] = N;
        g["inner_product"] = cfg.interior ? "interior" : "boundary";
        g["quad_provenance"] = basis.quad_provenance;
        std::ofstream out(dir / "gram_residual.json");
        out << g.dump(2) << "\n";
    }
    report.json()["gram_residual"] = gram_residual;
    report.write(dir);
    return 0;
}

inline int cmd_scaling_curves(const RunConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    detail::RunReport report(cfg, "scaling-curves");
    const double step = cfg.grid_step;
    const double range = cfg.grid_max;

    auto tabulate = [&](KappaKind kind, double lo, const char* file, const char* title) {
        std::vector<double> grid;
        for (double s = lo; s <= range + 0.5 * step; s += step) grid.push_back(s);
        const auto curve = kappa_curves(kind, grid);
        CsvWriter csv(dir / (std::string(file) + ".csv"), "separation,value",
                      "separation: scaled (1/N) units; value: dimensionless correlation");
        PlotSeries series;
        for (const auto& [s, v] : curve) {
            csv.row({s, v});
            series.x.push_back(s);
            series.y.push_back(v);
        }
        write_svg_line_plot(dir / (std::string(file) + ".svg"), title, "separation", "K", {series});
    };
    tabulate(KappaKind::tangential, 0.0, "kappa_tangential", "Tangential pair correlation");
    tabulate(KappaKind::normal, -range, "kappa_normal", "Normal pair correlation");

    {
        CsvWriter csv(dir / "d_infinity.csv", "separation,value",
                      "separation: scaled normal offset; value: intensity per scaled area");
        PlotSeries series;
        for (double t = -range; t <= range + 0.5 * step; t += step) {
            const double v = d_infinity(t);
            csv.row({t, v});
            series.x.push_back(t);
            series.y.push_back(v);
        }
        write_svg_line_plot(dir / "d_infinity.svg", "Scaled zero density", "tau", "D", {series});
    }
    report.write(dir);
    return 0;
}

namespace detail {

inline int montecarlo_density_run(const RunConfig& cfg, const std::filesystem::path& dir,
                                  RunReport& report) {
    const DomainFile df = resolve_domain(cfg.domain_arg);
    const WeightSpec weight = pick_weight(cfg, df);
    const OrthonormalBasis basis = build_boundary_basis(
        df.domain, weight, cfg.degree, default_quad(cfg), BasisOptions{cfg.extended_precision});
    DensityOptions opt;
    opt.bins = cfg.bins;
    opt.radial_range = cfg.radial_range;
    opt.scale_radial = cfg.scale_radial;
    opt.workers = cfg.workers;
    EmpiricalMeasureSummary s = montecarlo_density(basis, df.domain, cfg.trials, cfg.seed, opt);

    {
        CsvWriter csv(dir / "density_hist.csv", "bin_lo,bin_hi,count",
                      "angular histogram of arg Phi(zero), radians");
        for (int k = 0; k < cfg.bins; ++k)
            csv.row({tau * k / cfg.bins, tau * (k + 1) / cfg.bins,
                     static_cast<double>(s.angular_histogram[k])});
    }
    {
        CsvWriter csv(dir / "density_radial.csv", "bin_lo,bin_hi,count",
                      std::string("histogram of |Phi(zero)| - 1") +
                          (opt.scale_radial ? ", scaled by N" : ""));
        const double R = opt.radial_range;
        for (int k = 0; k < cfg.bins; ++k)
            csv.row({-R + 2 * R * k / cfg.bins, -R + 2 * R * (k + 1) / cfg.bins,
                     static_cast<double>(s.radial_histogram[k])});
    }
    const double ks = ks_uniform_statistic(s.angles);
    const double ks_critical = 1.63 / std::sqrt(static_cast<double>(s.angles.size()));
    auto& j = report.json();
    j["ks_angle"] = ks;
    j["ks_critical_99"] = ks_critical;
    j["ks_pass"] = ks < ks_critical;
    j["total_zeros"] = s.total_zeros;
    j["inversion_failures"] = s.inversion_failures;
    j["band"] = s.band;
    j["fraction_in_band"] = static_cast<double>(s.in_band) / static_cast<double>(s.total_zeros);
    j["resamples"] = s.resamples;
    return 0;
}

inline int montecarlo_correlation_run(const RunConfig& cfg, const std::filesystem::path& dir,
                                      RunReport& report) {
    const DomainFile df = resolve_domain(cfg.domain_arg);
    const WeightSpec weight = pick_weight(cfg, df);
    const OrthonormalBasis basis = build_boundary_basis(
        df.domain, weight, cfg.degree, default_quad(cfg), BasisOptions{cfg.extended_precision});
    PairCorrelationWindow window;
    window.kind = cfg.corr_kind == "normal" ? KappaKind::normal : KappaKind::tangential;
    window.band_halfwidth = cfg.band;
    window.max_separation = cfg.max_separation;
    const PairCorrelationEstimate est = montecarlo_pair_correlation(
        basis, df.domain, cfg.trials, window, cfg.bins, cfg.seed, cfg.workers);

    std::vector<double> closed(est.separation.size());
    for (std::size_t k = 0; k < est.separation.size(); ++k) {
        const double s = est.separation[k];
        try {
            closed[k] = window.kind == KappaKind::tangential
                            ? pair_correlation_K2(Complex(0.0), Complex(0.0, s))
                            : pair_correlation_K2(Complex(0.0), Complex(s, 0.0));
        } catch (const NearDiagonal&) {
            closed[k] = 0.0;
        }
    }
    {
        CsvWriter csv(dir / "pair_correlation.csv", "separation,value,pairs,closed_form",
                      "separation: scaled units; value: normalized two-point estimate");
        for (std::size_t k = 0; k < est.separation.size(); ++k)
            csv.row({est.separation[k], est.value[k], static_cast<double>(est.pair_counts[k]),
                     closed[k]});
    }
    // Pass/fail against the closed form on well-populated bins at moderate
    // separations (where the scaling limit is the right comparison).
    int checked = 0, passed = 0;
    for (std::size_t k = 0; k < est.separation.size(); ++k) {
        const double s = std::abs(est.separation[k]);
        if (s < 1.5 || s > 6.5 || est.pair_counts[k] < 100) continue;
        ++checked;
        if (std::abs(est.value[k] - closed[k]) <= cfg.tolerance * std::max(closed[k], 1e-12))
            ++passed;
    }
    auto& j = report.json();
    j["mean_band_count"] = est.mean_band_count;
    j["inversion_failures"] = est.inversion_failures;
    j["insufficient"] = est.insufficient;
    j["tolerance"] = cfg.tolerance;
    j["bins_checked"] = checked;
    j["bins_passed"] = passed;
    j["pass"] = checked > 0 && passed == checked;
    if (est.insufficient)
        throw InsufficientStatistics(
            "pair correlation: a normalization bin has fewer than 10 counts");
    return 0;
}

inline int montecarlo_variance_run(const RunConfig& cfg, const std::filesystem::path& dir,
                                   RunReport& report) {
    const DomainFile df = resolve_domain(cfg.domain_arg);
    const WeightSpec weight = pick_weight(cfg, df);
    std::vector<int> Ns = cfg.n_list.empty() ? std::vector<int>{8, 16, 32, 64} : cfg.n_list;
    std::vector<VariancePoint> pts;
    if (cfg.phi == "gauss") {
        pts = variance_experiment(df.domain, weight, GaussianBump(), Ns, cfg.trials, cfg.seed);
    } else if (cfg.phi == "bump") {
        pts = variance_experiment(df.domain, weight, RadialBump(0.5, 1.6), Ns, cfg.trials,
                                  cfg.seed);
    } else if (cfg.phi == "plateau") {
        pts = variance_experiment(df.domain, weight, RadialPlateau(1.5, 3.0), Ns, cfg.trials,
                                  cfg.seed);
    } else {
        throw ConfigError("unknown test function '" + cfg.phi + "' (gauss|bump|plateau)");
    }
    std::vector<double> xs, ys;
    {
        CsvWriter csv(dir / "variance.csv", "N,variance",
                      "sample variance of the normalized linear statistic");
        for (const auto& p : pts) {
            csv.row({static_cast<double>(p.N), p.variance});
            xs.push_back(p.N);
            ys.push_back(p.variance);
        }
    }
    const double slope = fit_log_slope(xs, ys, true);
    auto& j = report.json();
    j["fitted_slope"] = slope;
    j["slope_window"] = {-2.6, -1.4};
    j["pass"] = slope > -2.6 && slope < -1.4;
    return 0;
}

} // namespace detail

inline int cmd_montecarlo(const RunConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    detail::RunReport report(cfg, "montecarlo:" + cfg.experiment);
    int rc = 0;
    try {
        if (cfg.experiment == "density")
            rc = detail::montecarlo_density_run(cfg, dir, report);
        else if (cfg.experiment == "correlation")
            rc = detail::montecarlo_correlation_run(cfg, dir, report);
        else if (cfg.experiment == "variance")
            rc = detail::montecarlo_variance_run(cfg, dir, report);
        else
            throw ConfigError("unknown experiment '" + cfg.experiment +
                              "' (density|correlation|variance)");
    } catch (...) {
        report.write(dir);  // keep the partial record alongside the error
        throw;
    }
    report.write(dir);
    return rc;
}

/// Runs a command under the exit-code contract: 0 success, 2 configuration
/// error, 3 numerical breakdown, 4 insufficient statistics.
template <class Fn>
int run_with_exit_codes(Fn&& fn, std::string* message = nullptr) {
    try {
        return fn();
    } catch (const ConfigError& e) {
        if (message) *message = e.what();
        return 2;
    } catch (const InsufficientStatistics& e) {
        if (message) *message = e.what();
        return 4;
    } catch (const QuadratureTooCoarse& e) {
        if (message) *message = e.what();
        return 3;
    } catch (const GridTooCoarse& e) {
        if (message) *message = e.what();
        return 3;
    } catch (const LengthMismatch& e) {
        if (message) *message = e.what();
        return 3;
    } catch (const std::invalid_argument& e) {
        if (message) *message = e.what();
        return 2;
    } catch (const std::exception& e) {
        // NumericalBreakdown, NonConvergence, DegenerateBoundary,
        // MapInversionFailure, WeightNotPositive, NearDiagonal, I/O failures.
        if (message) *message = e.what();
        return 3;
    }
}

inline int cmd_asymptotics(const RunConfig& cfg) {
    const auto dir = detail::prepare_out_dir(cfg);
    detail::RunReport report(cfg, "asymptotics");
    const DomainFile df = resolve_domain(cfg.domain_arg);
    const WeightSpec weight = detail::pick_weight(cfg, df);
    const BasisOptions opts{cfg.extended_precision};
    const Complex z(cfg.exterior_point, 0.0);
    const int N = cfg.degree;

    // Boundary orthonormal polynomials against the exterior-map prediction.
    {
        const OrthonormalBasis basis =
            build_boundary_basis(df.domain, weight, N, detail::default_quad(cfg), opts);
        const OuterFunction outer = outer_function(df.domain, weight);
        const std::vector<Complex> p = eval_basis(basis, z);
        CsvWriter csv(dir / "szego_error.csv", "n,abs_error",
                      "absolute deviation of P_n from the exterior-map prediction");
        std::vector<double> ns, errs;
        for (int n = 0; n <= N; ++n) {
            const double e = std::abs(p[n] - szego_prediction(df.domain, outer, n, z));
            csv.row({static_cast<double>(n), e});
            if (n >= 5) {
                ns.push_back(n);
                errs.push_back(e);
            }
        }
        report.json()["szego_log_error_slope"] = fit_log_slope(ns, errs, false);
    }
    {
        const OrthonormalBasis basis =
            build_interior_basis(df.domain, N, detail::default_quad(cfg, 2), opts);
        const std::vector<Complex> p = eval_basis(basis, z);
        CsvWriter csv(dir / "carleman_error.csv", "n,abs_error",
                      "absolute deviation of P_n from the area-measure prediction");
        std::vector<double> ns, errs;
        for (int n = 0; n <= N; ++n) {
            const double e = std::abs(p[n] - carleman_prediction(df.domain, n, z));
            csv.row({static_cast<double>(n), e});
            if (n >= 5) {
                ns.push_back(n);
                errs.push_back(e);
            }
        }
        report.json()["carleman_log_error_slope"] = fit_log_slope(ns, errs, false);
    }
    {
        std::vector<int> Ns = cfg.n_list.empty() ? std::vector<int>{20, 28, 40, 57, 80, 113, 160}
                                                 : cfg.n_list;
        const auto errors = scaled_kernel_convergence(df.domain, weight, Ns, Complex(1.0, 1.0),
                                                      Complex(0.5, 0.0), KernelKind::szego, opts);
        CsvWriter csv(dir / "kernel_scaling.csv", "N,abs_error",
                      "scaled partial kernel versus its limit at zeta=(1+i, 0.5)");
        std::vector<double> xs, ys;
        for (const auto& [n, e] : errors) {
            csv.row({static_cast<double>(n), e});
            xs.push_back(n);
            ys.push_back(e);
        }
        report.json()["kernel_scaling_loglog_slope"] = fit_log_slope(xs, ys, true);
    }
    report.write(dir);
    return 0;
}

} // namespace eqzero
