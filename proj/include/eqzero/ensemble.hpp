#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <utility>
#include <vector>

#include "eqzero/domain.hpp"
#include "eqzero/numerics.hpp"
#include "eqzero/orthopoly.hpp"
#include "eqzero/rng.hpp"

namespace eqzero {

// ---------------------------------------------------------------------------
// Gaussian random polynomials f = sum_j a_j P_j with i.i.d. standard complex
// normal coefficients, their zero sets, and the Monte Carlo experiments built
// on them.

struct CoefficientVector {
    std::vector<Complex> a;
};

inline CoefficientVector sample_coefficients(int N, TrialRng& rng) {
    CoefficientVector out;
    out.a.resize(N + 1);
    for (Complex& c : out.a) c = rng.next_complex_gaussian();
    return out;
}

struct SeedRecord {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    int resamples = 0;
};

struct PolynomialSample {
    CoefficientVector coefficients;
    MonomialPolynomial monomial;
    std::vector<Complex> zeros;
    SeedRecord seed_record;
};

/// Monomial form of f = sum_j a_j P_j (a row combination of the basis
/// coefficient matrix).
inline MonomialPolynomial assemble_polynomial(const OrthonormalBasis& basis,
                                              const CoefficientVector& a) {
    const int N = basis.degree;
    if (static_cast<int>(a.a.size()) != N + 1)
        throw LengthMismatch("assemble_polynomial: coefficient count != N+1");
    std::vector<Complex> c(N + 1, Complex(0.0));
    for (int j = 0; j <= N; ++j) {
        const Complex aj = a.a[j];
        const auto& row = basis.monomial[j];
        for (int i = 0; i <= j; ++i) c[i] += aj * row[i];
    }
    return MonomialPolynomial(std::move(c));
}

/// Draws one random polynomial for the given basis and extracts all N zeros.
/// A degenerate leading coefficient (|lead| < 1e-14, probability ~0) triggers
/// a resample from the same per-trial stream, recorded in seed_record.
inline PolynomialSample sample_polynomial(const OrthonormalBasis& basis, std::uint64_t seed,
                                          std::uint64_t trial, double root_tol = 1e-10,
                                          int max_iter = 200) {
    TrialRng rng(seed, trial);
    PolynomialSample s;
    s.seed_record = {seed, trial, 0};
    for (;;) {
        s.coefficients = sample_coefficients(basis.degree, rng);
        MonomialPolynomial f = assemble_polynomial(basis, s.coefficients);
        if (std::abs(f.leading()) >= 1e-14) {
            s.monomial = std::move(f);
            break;
        }
        ++s.seed_record.resamples;
        if (s.seed_record.resamples > 8)
            throw NumericalBreakdown("sample_polynomial: persistent degenerate leading coeff");
    }
    s.zeros = find_roots(s.monomial, root_tol, max_iter);
    return s;
}

// ---------------------------------------------------------------------------
// Exact expected zero density of the circular (disk, rho = 1/2pi) ensemble.
//
// The density with respect to the area form (i/2pi) dz ^ dzbar is
//
//     1/(|z|^2-1)^2 - (N+1)^2 |z|^{2N} / (|z|^{2N+2}-1)^2
//   = g_N(rho) / |z|^2,   rho = 2 log |z|,
//
// where g_N = (log h_N)'' and h_N(rho) = sum_{n<=N} e^{n rho}.  The closed
// form cancels catastrophically near |z| = 1; inside |rho| < 1e-3 evaluation
// switches to the even series
//
//   g_N(rho) = sum_{k>=1} B_{2k} (2k-1) [(N+1)^{2k} - 1] rho^{2k-2} / (2k)!
//
// whose leading terms are ((N+1)^2-1)/12 - ((N+1)^4-1) rho^2/240 - ...
// Densities against Lebesgue measure dx dy differ by one factor 1/pi, applied
// exactly once by callers (this is the only conversion site in the library).

/// g_N(rho): series path for |rho| < 1e-3, closed form otherwise.
inline double disk_g(int N, double rho) {
    if (std::abs(rho) < 1e-3) {
        // B_{2k} (2k-1) / (2k)! for k = 1..10
        static constexpr double coeff[10] = {
            1.0 / 12.0,       -1.0 / 240.0,      1.0 / 6048.0,      -1.0 / 172800.0,
            1.0 / 5322240.0,  -691.0 / 118879488000.0,
            7.0 * 13.0 / (6.0 * 87178291200.0),          // B14*13/14!
            -3617.0 * 15.0 / (510.0 * 20922789888000.0), // B16*15/16!
            43867.0 * 17.0 / (798.0 * 6402373705728000.0),
            -174611.0 * 19.0 / (330.0 * 2432902008176640000.0)};
        const double np1 = static_cast<double>(N) + 1.0;
        double acc = 0.0;
        double rp = 1.0;            // rho^{2k-2}
        double qp = np1 * np1;      // (N+1)^{2k}
        const double r2 = rho * rho;
        for (int k = 0; k < 10; ++k) {
            acc += coeff[k] * (qp - 1.0) * rp;
            rp *= r2;
            qp *= np1 * np1;
        }
        return acc;
    }
    const double e1 = std::exp(rho);
    const double eN = std::exp((N + 1) * rho);
    const double np1 = static_cast<double>(N) + 1.0;
    return e1 / ((e1 - 1.0) * (e1 - 1.0)) - np1 * np1 * eN / ((eN - 1.0) * (eN - 1.0));
}

/// Expected zero density of the degree-N circular ensemble at z, with respect
/// to (i/2pi) dz ^ dzbar.
inline double exact_disk_density(int N, Complex z) {
    const double q = std::norm(z);
    if (q == 0.0) return 1.0;
    const double rho = std::log(q);  // = 2 log |z|
    if (std::abs(rho) < 1e-3) return disk_g(N, rho) / q;
    const double t1 = 1.0 / ((q - 1.0) * (q - 1.0));
    const double np1 = static_cast<double>(N) + 1.0;
    // (N+1)^2 q^N / (q^{N+1}-1)^2, organized to stay finite for large |z|.
    const double qn = std::pow(q, N);
    const double d = qn * q - 1.0;
    const double t2 = np1 * np1 * qn / (d * d);
    return t1 - t2;
}

// ---------------------------------------------------------------------------
// Radial test functions with closed-form Laplacians.  All are functions of
// s = |z - z0|^2, for which Delta phi = 4 f'(s) + 4 s f''(s) (with s measured
// from the center).

/// C^2 bump supported on the annulus a <= |z| <= b, normalized to peak 1.
struct RadialBump {
    double a2, b2, scale;

    RadialBump(double a, double b) : a2(a * a), b2(b * b) {
        const double smid = 0.5 * (a2 + b2);
        scale = 1.0 / (std::pow(smid - a2, 3) * std::pow(b2 - smid, 3));
    }
    double value(Complex z) const {
        const double s = std::norm(z);
        if (s <= a2 || s >= b2) return 0.0;
        return scale * std::pow(s - a2, 3) * std::pow(b2 - s, 3);
    }
    double laplacian(Complex z) const {
        const double s = std::norm(z);
        if (s <= a2 || s >= b2) return 0.0;
        const double u = s - a2, v = b2 - s;
        const double fp = scale * 3.0 * u * u * v * v * (v - u);
        const double fpp = scale * 6.0 * u * v * (v * v - 3.0 * u * v + u * u);
        return 4.0 * fp + 4.0 * s * fpp;
    }
};

/// C^2 plateau: 1 for |z| <= r0, quintic smoothstep down to 0 at |z| = r1.
struct RadialPlateau {
    double s0, s1;

    RadialPlateau(double r0, double r1) : s0(r0 * r0), s1(r1 * r1) {}
    double value(Complex z) const {
        const double s = std::norm(z);
        if (s <= s0) return 1.0;
        if (s >= s1) return 0.0;
        const double t = (s - s0) / (s1 - s0);
        return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
    }
    double laplacian(Complex z) const {
        const double s = std::norm(z);
        if (s <= s0 || s >= s1) return 0.0;
        const double w = s1 - s0;
        const double t = (s - s0) / w;
        const double Sp = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        const double Spp = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        const double fp = -Sp / w;
        const double fpp = -Spp / (w * w);
        return 4.0 * fp + 4.0 * s * fpp;
    }
};

/// exp(-|z - z0|^2 / sigma^2): smooth, non-harmonic, rapidly decaying.
struct GaussianBump {
    Complex z0;
    double inv_s2;

    explicit GaussianBump(Complex center = Complex(1.0), double sigma = 1.0)
        : z0(center), inv_s2(1.0 / (sigma * sigma)) {}
    double value(Complex z) const { return std::exp(-std::norm(z - z0) * inv_s2); }
    double laplacian(Complex z) const {
        const double s = std::norm(z - z0);
        const double f = std::exp(-s * inv_s2);
        return 4.0 * f * inv_s2 * (s * inv_s2 - 1.0);
    }
};

struct GridSpec {
    double x0, x1, y0, y1;
    double h;
};

/// Weak-form pairing of the expected zero distribution against a C^2 test
/// function:
///
///   (E Z_f, phi) = (1/4pi) int log S_N(z, z) Laplacian(phi)(z) dx dy,
///
/// evaluated by tensor-trapezoid on the grid.  No derivative of S_N is taken.
/// This equals the (i/2pi) d dbar log S_N pairing; the 1/4pi absorbs the
/// Lebesgue conversion.
template <class TestFn>
double expected_density_pairing(const OrthonormalBasis& basis, const TestFn& phi,
                                const GridSpec& grid) {
    if (!(grid.h > 0.0) || grid.h > 0.01 + 1e-12)
        throw GridTooCoarse("expected_density_pairing: grid resolution h <= 0.01 required");
    const int nx = static_cast<int>(std::floor((grid.x1 - grid.x0) / grid.h)) + 1;
    const int ny = static_cast<int>(std::floor((grid.y1 - grid.y0) / grid.h)) + 1;
    double acc = 0.0;
    for (int iy = 0; iy < ny; ++iy) {
        const double y = grid.y0 + iy * grid.h;
        const double wy = (iy == 0 || iy == ny - 1) ? 0.5 : 1.0;
        for (int ix = 0; ix < nx; ++ix) {
            const double x = grid.x0 + ix * grid.h;
            const Complex z(x, y);
            const double lap = phi.laplacian(z);
            if (lap == 0.0) continue;
            const double wx = (ix == 0 || ix == nx - 1) ? 0.5 : 1.0;
            acc += wx * wy * lap * std::log(kernel_diag(basis, z));
        }
    }
    return acc * grid.h * grid.h / (2.0 * tau);
}

// ---------------------------------------------------------------------------
// Deterministic parallel trial runner: contiguous trial ranges per worker,
// integer accumulators merged in worker order, so the result is identical for
// any worker count.

template <class Acc, class TrialFn>
void run_trials(std::int64_t trials, int workers, std::vector<Acc>& partials, TrialFn&& fn) {
    workers = static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(workers, trials)));
    partials.resize(workers);
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&](int w) {
        const std::int64_t lo = trials * w / workers;
        const std::int64_t hi = trials * (w + 1) / workers;
        try {
            for (std::int64_t t = lo; t < hi; ++t) fn(t, partials[w]);
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    if (workers == 1) {
        body(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
        for (std::thread& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Empirical zero distribution in the exterior-map coordinate.

struct EmpiricalMeasureSummary {
    std::vector<std::uint64_t> angular_histogram;  // arg Phi(zero) over [0, 2pi)
    std::vector<std::uint64_t> radial_histogram;   // |Phi(zero)| - 1 (optionally N-scaled)
    std::uint64_t radial_underflow = 0, radial_overflow = 0;
    std::uint64_t trials = 0;
    int N = 0;
    std::uint64_t total_zeros = 0;
    std::uint64_t inversion_failures = 0;  // zeros below the map collar
    std::uint64_t resamples = 0;
    std::uint64_t in_band = 0;             // zeros with ||Phi| - 1| < band
    double band = 0.1;
    double radial_range = 0.5;
    bool scale_radial = false;
    std::vector<double> angles;            // pooled mapped angles (feeds the KS test)
};

struct DensityOptions {
    int bins = 64;
    double band = 0.1;
    double radial_range = 0.5;
    bool scale_radial = false;
    int workers = 1;
};

inline EmpiricalMeasureSummary montecarlo_density(const OrthonormalBasis& basis,
                                                  const DomainSpec& domain, std::int64_t trials,
                                                  std::uint64_t seed,
                                                  const DensityOptions& opt = {}) {
    if (trials < 1) throw std::invalid_argument("montecarlo_density: trials >= 1");
    struct Acc {
        std::vector<std::uint64_t> ahist, rhist;
        std::uint64_t runder = 0, rover = 0, zeros = 0, fails = 0, resamples = 0, in_band = 0;
        std::vector<double> angles;
    };
    const int B = opt.bins;
    std::vector<Acc> partials;
    run_trials(trials, opt.workers, partials, [&](std::int64_t t, Acc& acc) {
        if (acc.ahist.empty()) {
            acc.ahist.assign(B, 0);
            acc.rhist.assign(B, 0);
        }
        const PolynomialSample s = sample_polynomial(basis, seed, static_cast<std::uint64_t>(t));
        acc.resamples += s.seed_record.resamples;
        for (const Complex& z : s.zeros) {
            ++acc.zeros;
            Complex w;
            try {
                w = exterior_map(domain, z);
            } catch (const MapInversionFailure&) {
                ++acc.fails;
                continue;
            }
            double ang = std::arg(w);
            if (ang < 0.0) ang += tau;
            acc.angles.push_back(ang);
            int ka = static_cast<int>(ang / tau * B);
            ka = std::clamp(ka, 0, B - 1);
            ++acc.ahist[ka];
            double r = std::abs(w) - 1.0;
            if (std::abs(r) < opt.band) ++acc.in_band;
            if (opt.scale_radial) r *= basis.degree;
            if (r < -opt.radial_range) {
                ++acc.runder;
            } else if (r >= opt.radial_range) {
                ++acc.rover;
            } else {
                const int kr = static_cast<int>((r + opt.radial_range) / (2.0 * opt.radial_range) * B);
                ++acc.rhist[std::clamp(kr, 0, B - 1)];
            }
        }
    });

    EmpiricalMeasureSummary out;
    out.angular_histogram.assign(B, 0);
    out.radial_histogram.assign(B, 0);
    out.trials = trials;
    out.N = basis.degree;
    out.band = opt.band;
    out.radial_range = opt.radial_range;
    out.scale_radial = opt.scale_radial;
    for (const Acc& a : partials) {
        if (a.ahist.empty()) continue;
        for (int k = 0; k < B; ++k) {
            out.angular_histogram[k] += a.ahist[k];
            out.radial_histogram[k] += a.rhist[k];
        }
        out.radial_underflow += a.runder;
        out.radial_overflow += a.rover;
        out.total_zeros += a.zeros;
        out.inversion_failures += a.fails;
        out.resamples += a.resamples;
        out.in_band += a.in_band;
        out.angles.insert(out.angles.end(), a.angles.begin(), a.angles.end());
    }
    return out;
}

/// Kolmogorov-Smirnov statistic of a sample against the uniform law on
/// [0, 2pi); sorts its argument in place.
inline double ks_uniform_statistic(std::vector<double>& angles) {
    std::sort(angles.begin(), angles.end());
    const std::size_t n = angles.size();
    if (n == 0) return 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = angles[i] / tau;
        d = std::max(d, std::abs((i + 1.0) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Variance of linear statistics (1/N) sum phi(zero).

struct VariancePoint {
    int N;
    double variance;
};

template <class Phi>
std::vector<VariancePoint> variance_experiment(const DomainSpec& domain, const WeightSpec& weight,
                                               const Phi& phi, std::span<const int> N_list,
                                               std::int64_t trials, std::uint64_t seed) {
    if (trials < 2) throw std::invalid_argument("variance_experiment: trials >= 2");
    for (int N : N_list)
        if (N < 4) throw std::invalid_argument("variance_experiment: every N must be >= 4");
    std::vector<VariancePoint> out;
    out.reserve(N_list.size());
    for (int N : N_list) {
        const OrthonormalBasis basis =
            build_boundary_basis(domain, weight, N, std::max(256, 8 * (N + 1)));
        // Welford accumulation of the per-trial statistic.
        double mean = 0.0, m2 = 0.0;
        for (std::int64_t t = 0; t < trials; ++t) {
            const PolynomialSample s = sample_polynomial(basis, seed, static_cast<std::uint64_t>(t));
            double stat = 0.0;
            for (const Complex& z : s.zeros) stat += phi.value(z);
            stat /= N;
            const double d = stat - mean;
            mean += d / (t + 1);
            m2 += d * (stat - mean);
        }
        out.push_back({N, m2 / (trials - 1)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Scaled two-point function estimation.
//
// Zeros are mapped to the scaled boundary coordinate zeta = N (Phi(z) - 1);
// writing w = Phi(z), the estimator works with u = N arg(w) (tangential
// position along a circle of circumference 2 pi N) and v = N (|w| - 1)
// (normal offset), so zeta ~ v + i u near the base point.  Pair counts are
// normalized by the product of empirical one-point intensities from the same
// run, which cancels constant factors exactly as in the definition of the
// correlation function.

struct PairCorrelationWindow {
    KappaKind kind = KappaKind::tangential;
    double band_halfwidth = 0.3;  // membership: |v| <= band_halfwidth
    double max_separation = 8.0;
    double u_window = 0.3;        // normal mode: tangential half-window |du| <= u_window

    // When non-empty, pairs are collected into windows [c - hw, c + hw)
    // centered at these separations instead of a regular grid (tangential
    // mode only); the `bins` argument is then ignored.
    std::vector<double> centers;
    double center_halfwidth = 0.2;
};

struct PairCorrelationEstimate {
    std::vector<double> separation;        // bin centers
    std::vector<double> value;             // K estimates (normalized)
    std::vector<std::uint64_t> pair_counts;
    std::uint64_t trials = 0;
    int N = 0;
    double mean_band_count = 0.0;
    std::uint64_t inversion_failures = 0;
    bool insufficient = false;             // a normalization bin had < 10 counts
};

inline PairCorrelationEstimate montecarlo_pair_correlation(const OrthonormalBasis& basis,
                                                           const DomainSpec& domain,
                                                           std::int64_t trials,
                                                           const PairCorrelationWindow& window,
                                                           int bins, std::uint64_t seed,
                                                           int workers = 1) {
    if (basis.degree < 30)
        throw std::invalid_argument("montecarlo_pair_correlation: N >= 30 required");
    if (trials < 1 || bins < 1)
        throw std::invalid_argument("montecarlo_pair_correlation: trials, bins >= 1");
    const int N = basis.degree;
    const double circumference = tau * N;
    const bool tangential = window.kind == KappaKind::tangential;
    const bool centered = tangential && !window.centers.empty();
    if (centered) bins = static_cast<int>(window.centers.size());
    // Tangential separations live on [0, max]; normal ones are signed.
    const double lo = tangential ? 0.0 : -window.max_separation;
    const double span = tangential ? window.max_separation : 2.0 * window.max_separation;
    const double bw = centered ? 2.0 * window.center_halfwidth : span / bins;

    struct Acc {
        std::vector<std::uint64_t> pairs;
        std::vector<std::uint64_t> vhist;   // one-point v histogram (normal mode)
        std::uint64_t band = 0, refs = 0, fails = 0, zeros = 0;
    };
    std::vector<Acc> partials;
    run_trials(trials, workers, partials, [&](std::int64_t t, Acc& acc) {
        if (acc.pairs.empty()) {
            acc.pairs.assign(bins, 0);
            acc.vhist.assign(bins, 0);
        }
        const PolynomialSample s = sample_polynomial(basis, seed, static_cast<std::uint64_t>(t));
        std::vector<std::pair<double, double>> uv;  // (u, v) for usable zeros
        uv.reserve(s.zeros.size());
        for (const Complex& z : s.zeros) {
            ++acc.zeros;
            Complex w;
            try {
                w = exterior_map(domain, z);
            } catch (const MapInversionFailure&) {
                ++acc.fails;
                continue;
            }
            double ang = std::arg(w);
            if (ang < 0.0) ang += tau;
            uv.emplace_back(N * ang, N * (std::abs(w) - 1.0));
        }
        if (tangential) {
            std::vector<double> us;
            for (const auto& [u, v] : uv)
                if (std::abs(v) <= window.band_halfwidth) us.push_back(u);
            acc.band += us.size();
            for (std::size_t i = 0; i < us.size(); ++i)
                for (std::size_t j = i + 1; j < us.size(); ++j) {
                    double d = std::abs(us[i] - us[j]);
                    d = std::min(d, circumference - d);
                    if (centered) {
                        for (int t = 0; t < bins; ++t)
                            if (std::abs(d - window.centers[t]) <= window.center_halfwidth)
                                ++acc.pairs[t];
                    } else {
                        const int k = static_cast<int>(d / bw);
                        if (k >= 0 && k < bins) ++acc.pairs[k];
                    }
                }
        } else {
            // one-point v histogram over the same bin grid, shifted to signed v
            for (const auto& [u, v] : uv) {
                const int k = static_cast<int>((v - lo) / bw);
                if (k >= 0 && k < bins) ++acc.vhist[k];
            }
            for (std::size_t i = 0; i < uv.size(); ++i) {
                if (std::abs(uv[i].second) > window.band_halfwidth) continue;
                ++acc.refs;
                for (std::size_t j = 0; j < uv.size(); ++j) {
                    if (j == i) continue;
                    double du = std::abs(uv[i].first - uv[j].first);
                    du = std::min(du, circumference - du);
                    if (du > window.u_window) continue;
                    const int k = static_cast<int>((uv[j].second - uv[i].second - lo) / bw);
                    if (k >= 0 && k < bins) ++acc.pairs[k];
                }
            }
        }
    });

    PairCorrelationEstimate out;
    out.trials = trials;
    out.N = N;
    out.separation.resize(bins);
    out.value.assign(bins, 0.0);
    out.pair_counts.assign(bins, 0);
    std::vector<std::uint64_t> vhist(bins, 0);
    std::uint64_t band = 0, refs = 0;
    for (const Acc& a : partials) {
        if (a.pairs.empty()) continue;
        for (int k = 0; k < bins; ++k) {
            out.pair_counts[k] += a.pairs[k];
            vhist[k] += a.vhist[k];
        }
        band += a.band;
        refs += a.refs;
        out.inversion_failures += a.fails;
    }
    for (int k = 0; k < bins; ++k)
        out.separation[k] = centered ? window.centers[k] : lo + (k + 0.5) * bw;

    const double T = static_cast<double>(trials);
    if (tangential) {
        const double nbar = static_cast<double>(band) / T;
        out.mean_band_count = nbar;
        out.insufficient = band < 10;
        // Independent uniform points: P(folded distance in a bin) = 2 bw / C,
        // so E[unordered pairs per trial] = (nbar^2 / 2)(2 bw / C).
        const double denom = nbar * nbar * bw / circumference;
        for (int k = 0; k < bins; ++k)
            out.value[k] = denom > 0.0 ? out.pair_counts[k] / (T * denom) : 0.0;
    } else {
        const double nrefs = static_cast<double>(refs) / T;
        out.mean_band_count = nrefs;
        out.insufficient = refs < 10;
        for (int k = 0; k < bins; ++k) {
            if (vhist[k] < 10) out.insufficient = true;
            const double lambda_bin = static_cast<double>(vhist[k]) / T / circumference;  // per unit u
            const double denom = nrefs * lambda_bin * 2.0 * window.u_window;
            out.value[k] = denom > 0.0 ? out.pair_counts[k] / (T * denom) : 0.0;
        }
    }
    return out;
}

} // namespace eqzero
