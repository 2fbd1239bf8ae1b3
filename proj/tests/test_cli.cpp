#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "eqzero/cli.hpp"

using namespace eqzero;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("eqzero_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// separation -> value from a two-column csv (skips comment + header lines)
double csv_lookup(const fs::path& p, double key, double key_tol = 1e-9) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '-')) continue;
        std::istringstream ss(line);
        double a, b;
        char comma;
        ss >> a >> comma >> b;
        if (std::abs(a - key) <= key_tol) return b;
    }
    FAIL("key not found in csv");
    return 0.0;
}

} // namespace

TEST_CASE("config validation maps to exit code 2") {
    RunConfig cfg;
    cfg.degree = 70;  // needs extended precision
    std::string msg;
    const int rc = run_with_exit_codes([&] { validate(cfg); return 0; }, &msg);
    CHECK(rc == 2);
    CHECK(msg.find("extended-precision") != std::string::npos);

    cfg.degree = 70;
    cfg.extended_precision = true;
    CHECK_NOTHROW(validate(cfg));

    RunConfig bad;
    bad.trials = 0;
    CHECK(run_with_exit_codes([&] { validate(bad); return 0; }) == 2);
}

TEST_CASE("domain files") {
    const fs::path dir = fresh_dir("domains");
    SECTION("round trip of a valid file") {
        const fs::path file = dir / "oval.txt";
        std::ofstream(file) << "# test domain\n"
                            << "label oval\n"
                            << "c 1.0\n"
                            << "c0 0.25 0.0\n"
                            << "tail 0.4 0.0\n"
                            << "weight exp_cos:0.5\n";
        const DomainFile df = parse_domain_file(file);
        CHECK(df.domain.label() == "oval");
        CHECK(df.domain.capacity() == 1.0);
        CHECK(df.domain.center() == Complex(0.25, 0.0));
        CHECK(df.weight.evaluator(0.0) == Approx(std::exp(0.5)));
    }
    SECTION("malformed file names the offending key") {
        const fs::path file = dir / "bad.txt";
        std::ofstream(file) << "c 1.0\nwobble 3\n";
        try {
            parse_domain_file(file);
            FAIL("expected ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("wobble") != std::string::npos);
        }
    }
    SECTION("missing capacity") {
        const fs::path file = dir / "nocap.txt";
        std::ofstream(file) << "label x\n";
        CHECK_THROWS_AS(parse_domain_file(file), ConfigError);
    }
    SECTION("non-univalent data is a config error") {
        const fs::path file = dir / "fold.txt";
        std::ofstream(file) << "c 1.0\ntail 2.0 0.0\n";
        CHECK_THROWS_AS(parse_domain_file(file), ConfigError);
    }
    SECTION("builtin names") {
        CHECK(resolve_domain("disk").domain.label() == "disk");
        CHECK(resolve_domain("ellipse:0.5").domain.tail()[0].real() == Approx(0.5));
        CHECK_THROWS_AS(resolve_domain("no-such-domain"), ConfigError);
    }
}

TEST_CASE("cmd_basis") {
    RunConfig cfg;
    cfg.domain_arg = "disk";
    cfg.weight_arg = "constant:0.15915494309189535";  // 1/(2 pi)
    cfg.degree = 5;
    cfg.out_dir = fresh_dir("basis").string();
    REQUIRE(cmd_basis(cfg) == 0);

    const auto gram = read_json(fs::path(cfg.out_dir) / "gram_residual.json");
    CHECK(gram["max_abs_residual"].get<double>() < 1e-8);

    // identity monomial rows: the (j, j) entries are 1, off-diagonals 0
    std::ifstream in(fs::path(cfg.out_dir) / "basis.csv");
    std::string line;
    int rows = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line[0] == 'j') continue;
        std::istringstream ss(line);
        double j, k, re, im;
        char c;
        ss >> j >> c >> k >> c >> re >> c >> im;
        ++rows;
        CHECK(re == Approx(j == k ? 1.0 : 0.0).margin(1e-12));
        CHECK(im == Approx(0.0).margin(1e-12));
    }
    CHECK(rows == 21);  // sum_{j<=5} (j+1)

    SECTION("ellipse gram residual stays small") {
        RunConfig e;
        e.domain_arg = "ellipse:0.5";
        e.degree = 20;
        e.out_dir = fresh_dir("basis_ell").string();
        REQUIRE(cmd_basis(e) == 0);
        CHECK(read_json(fs::path(e.out_dir) / "gram_residual.json")["max_abs_residual"]
                  .get<double>() < 1e-8);
    }
}

TEST_CASE("cmd_scaling_curves") {
    RunConfig cfg;
    cfg.grid_step = 1e-3;
    cfg.grid_max = 1.0;
    cfg.out_dir = fresh_dir("curves").string();
    REQUIRE(cmd_scaling_curves(cfg) == 0);
    const fs::path dir(cfg.out_dir);

    CHECK(csv_lookup(dir / "kappa_tangential.csv", 0.05) ==
          Approx(0.05 * 0.05 / 150.0).epsilon(1e-3));
    CHECK(csv_lookup(dir / "d_infinity.csv", 0.0) == Approx(0.026525823848649224).margin(1e-12));

    for (const char* name : {"kappa_tangential.svg", "kappa_normal.svg", "d_infinity.svg"}) {
        const std::string svg = slurp(dir / name);
        CHECK(svg.find("<?xml") == 0);
        CHECK(svg.find("</svg>") != std::string::npos);
        std::size_t polylines = 0, pos = 0;
        while ((pos = svg.find("<polyline", pos)) != std::string::npos) {
            ++polylines;
            ++pos;
        }
        CHECK(polylines == 1);
    }
}

TEST_CASE("cmd_montecarlo") {
    SECTION("density summary") {
        RunConfig cfg;
        cfg.experiment = "density";
        cfg.domain_arg = "ellipse:0.5";
        cfg.degree = 30;
        cfg.trials = 60;
        cfg.workers = 2;
        cfg.out_dir = fresh_dir("mc_density").string();
        REQUIRE(cmd_montecarlo(cfg) == 0);
        const auto summary = read_json(fs::path(cfg.out_dir) / "summary.json");
        CHECK(summary["ks_pass"].get<bool>());
        CHECK(summary["total_zeros"].get<std::uint64_t>() == 1800u);
        CHECK(slurp(fs::path(cfg.out_dir) / "density_hist.csv").find("bin_lo,bin_hi,count") !=
              std::string::npos);
    }
    SECTION("variance summary") {
        RunConfig cfg;
        cfg.experiment = "variance";
        cfg.trials = 400;
        cfg.n_list = {8, 16, 32, 64};
        cfg.out_dir = fresh_dir("mc_variance").string();
        REQUIRE(cmd_montecarlo(cfg) == 0);
        const auto summary = read_json(fs::path(cfg.out_dir) / "summary.json");
        const double slope = summary["fitted_slope"].get<double>();
        CHECK(slope > -2.6);
        CHECK(slope < -1.4);
        CHECK(summary["pass"].get<bool>());
    }
    SECTION("correlation determinism and exit 4 on starved statistics") {
        RunConfig cfg;
        cfg.experiment = "correlation";
        cfg.degree = 40;
        cfg.trials = 400;
        cfg.bins = 12;
        cfg.max_separation = 6.0;
        cfg.workers = 2;
        cfg.out_dir = fresh_dir("mc_corr1").string();
        REQUIRE(cmd_montecarlo(cfg) == 0);
        const std::string csv1 = slurp(fs::path(cfg.out_dir) / "pair_correlation.csv");

        cfg.out_dir = fresh_dir("mc_corr2").string();
        cfg.workers = 1;
        REQUIRE(cmd_montecarlo(cfg) == 0);
        CHECK(csv1 == slurp(fs::path(cfg.out_dir) / "pair_correlation.csv"));

        RunConfig starved = cfg;
        starved.trials = 1;
        starved.out_dir = fresh_dir("mc_corr3").string();
        const int rc = run_with_exit_codes([&] { return cmd_montecarlo(starved); });
        CHECK(rc == 4);
    }
    SECTION("unknown experiment") {
        RunConfig cfg;
        cfg.experiment = "frobnicate";
        cfg.out_dir = fresh_dir("mc_bad").string();
        CHECK(run_with_exit_codes([&] { return cmd_montecarlo(cfg); }) == 2);
    }
}

TEST_CASE("cmd_asymptotics") {
    RunConfig cfg;
    cfg.domain_arg = "ellipse:0.5";
    cfg.degree = 30;
    cfg.n_list = {20, 28, 40};
    cfg.out_dir = fresh_dir("asym").string();
    REQUIRE(cmd_asymptotics(cfg) == 0);
    const auto summary = read_json(fs::path(cfg.out_dir) / "summary.json");
    CHECK(summary["szego_log_error_slope"].get<double>() < -0.1);
    CHECK(summary["carleman_log_error_slope"].get<double>() < -0.1);
    CHECK(summary["kernel_scaling_loglog_slope"].get<double>() < -0.5);
    CHECK(fs::exists(fs::path(cfg.out_dir) / "szego_error.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "carleman_error.csv"));
    CHECK(fs::exists(fs::path(cfg.out_dir) / "kernel_scaling.csv"));
}

TEST_CASE("csv determinism") {
    RunConfig cfg;
    cfg.experiment = "density";
    cfg.degree = 20;
    cfg.trials = 30;
    cfg.out_dir = fresh_dir("det1").string();
    REQUIRE(cmd_montecarlo(cfg) == 0);
    const std::string a = slurp(fs::path(cfg.out_dir) / "density_hist.csv");
    cfg.out_dir = fresh_dir("det2").string();
    REQUIRE(cmd_montecarlo(cfg) == 0);
    CHECK(a == slurp(fs::path(cfg.out_dir) / "density_hist.csv"));
}

#ifdef EQZERO_CLI_PATH
TEST_CASE("binary exit codes") {
    const std::string bin = EQZERO_CLI_PATH;
    auto run = [&](const std::string& args) {
        const std::string cmd = bin + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("--help") == 0);
    CHECK(run("basis") != 0);  // missing required --out
    const fs::path dir = fresh_dir("bin");
    CHECK(run("basis --domain no-such-file --out " + (dir / "o").string()) == 2);
    CHECK(run("basis --domain disk --degree 99 --out " + (dir / "o2").string()) == 2);
    CHECK(run("basis --domain disk --degree 4 --out " + (dir / "o3").string()) == 0);
}
#endif
