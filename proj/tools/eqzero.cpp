// eqzero: batch CLI for random polynomial zero statistics on analytic plane
// domains.  Subcommands: basis, scaling-curves, montecarlo, asymptotics.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "eqzero/cli.hpp"

namespace {

void add_common(CLI::App* sub, eqzero::RunConfig& cfg) {
    sub->add_option("--domain", cfg.domain_arg,
                    "built-in (disk, ellipse:<m>, perturbed-disk) or a domain file");
    sub->add_option("--weight", cfg.weight_arg, "constant:<v> or exp_cos:<amplitude>");
    sub->add_option("--degree", cfg.degree, "polynomial degree N");
    sub->add_option("--quad", cfg.quad, "quadrature nodes M (default max(256, 8(N+1)))");
    sub->add_option("--trials", cfg.trials, "Monte Carlo trials");
    sub->add_option("--seed", cfg.seed, "64-bit master seed");
    sub->add_option("--out", cfg.out_dir, "output directory")->required();
    sub->add_flag("--extended-precision", cfg.extended_precision,
                  "compensated summation; allows degree > 60");
    sub->add_option("--workers", cfg.workers, "worker threads for Monte Carlo commands");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"random polynomial zero statistics on analytic plane domains"};
    app.require_subcommand(1);

    eqzero::RunConfig cfg;
    int which = 0;

    CLI::App* basis = app.add_subcommand("basis", "dump an orthonormal polynomial basis");
    add_common(basis, cfg);
    basis->add_flag("--interior", cfg.interior, "use the interior (area) inner product");
    basis->callback([&] { which = 1; });

    CLI::App* curves =
        app.add_subcommand("scaling-curves", "tabulate the universal scaling-limit curves");
    add_common(curves, cfg);
    curves->add_option("--grid-step", cfg.grid_step, "tabulation step (default 1e-3)");
    curves->add_option("--grid-max", cfg.grid_max, "tabulation range (default 8)");
    curves->callback([&] { which = 2; });

    CLI::App* mc = app.add_subcommand("montecarlo", "sample zero statistics");
    add_common(mc, cfg);
    mc->add_option("--experiment", cfg.experiment, "density | correlation | variance");
    mc->add_option("--bins", cfg.bins, "histogram bins");
    mc->add_option("--band", cfg.band, "correlation band halfwidth (scaled units)");
    mc->add_option("--max-separation", cfg.max_separation, "correlation range (scaled units)");
    mc->add_option("--kind", cfg.corr_kind, "correlation section: tangential | normal");
    mc->add_option("--tolerance", cfg.tolerance, "correlation pass/fail tolerance");
    mc->add_option("--radial-range", cfg.radial_range, "density radial histogram range");
    mc->add_flag("--scale-radial", cfg.scale_radial, "scale the radial histogram by N");
    mc->add_option("--n-list", cfg.n_list, "degrees for the variance experiment");
    mc->add_option("--phi", cfg.phi, "variance test function: gauss | bump | plateau");
    mc->callback([&] { which = 3; });

    CLI::App* asym = app.add_subcommand("asymptotics", "orthonormal polynomial asymptotics");
    add_common(asym, cfg);
    asym->add_option("--point", cfg.exterior_point, "exterior evaluation point on the real axis");
    asym->add_option("--n-list", cfg.n_list, "degrees for the kernel scaling study");
    asym->callback([&] { which = 4; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    std::string message;
    const int rc = eqzero::run_with_exit_codes(
        [&]() -> int {
            eqzero::validate(cfg);
            switch (which) {
                case 1: return eqzero::cmd_basis(cfg);
                case 2: return eqzero::cmd_scaling_curves(cfg);
                case 3: return eqzero::cmd_montecarlo(cfg);
                default: return eqzero::cmd_asymptotics(cfg);
            }
        },
        &message);
    if (rc != 0) std::fprintf(stderr, "eqzero: error (exit %d): %s\n", rc, message.c_str());
    return rc;
}
