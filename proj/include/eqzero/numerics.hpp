#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "eqzero/errors.hpp"

namespace eqzero {

using Complex = std::complex<double>;

inline constexpr double tau = 2.0 * std::numbers::pi;

/// Section of the scaled boundary coordinate: along the curve or across it.
enum class KappaKind { tangential, normal };

// ---------------------------------------------------------------------------
// Polynomials in the monomial basis.

/// Dense polynomial c_0 + c_1 z + ... + c_d z^d.  The coefficient vector is
/// never empty; degree() == coeffs.size() - 1.
struct MonomialPolynomial {
    std::vector<Complex> coeffs;

    MonomialPolynomial() : coeffs(1, Complex(0.0)) {}
    explicit MonomialPolynomial(std::vector<Complex> c) : coeffs(std::move(c)) {
        if (coeffs.empty()) coeffs.assign(1, Complex(0.0));
    }
    MonomialPolynomial(std::initializer_list<Complex> c) : coeffs(c) {
        if (coeffs.empty()) coeffs.assign(1, Complex(0.0));
    }

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    Complex leading() const { return coeffs.back(); }
};

inline Complex horner_eval(std::span<const Complex> coeffs, Complex z) {
    Complex acc(0.0);
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * z + coeffs[i];
    return acc;
}

inline Complex horner_eval(const MonomialPolynomial& p, Complex z) {
    return horner_eval(std::span<const Complex>(p.coeffs), z);
}

/// Evaluates p and p' in a single Horner pass.
inline void horner_eval2(std::span<const Complex> c, Complex z, Complex& p, Complex& dp) {
    p = c.back();
    dp = Complex(0.0);
    for (std::size_t i = c.size() - 1; i-- > 0;) {
        dp = dp * z + p;
        p = p * z + c[i];
    }
}

// ---------------------------------------------------------------------------
// Root finding: Aberth-Ehrlich simultaneous iteration.

namespace detail {

/// Scaled residual |p(z)| / (max|c_k| * max(1,|z|)^d); roots are accepted when
/// this drops below the requested tolerance.
inline double scaled_residual(std::span<const Complex> c, Complex z, double cmax) {
    const int d = static_cast<int>(c.size()) - 1;
    const double pz = std::abs(horner_eval(c, z));
    return pz / (cmax * std::pow(std::max(1.0, std::abs(z)), d));
}

/// One Aberth-Ehrlich run from a deterministic starting circle.  `phase`
/// rotates the initial configuration so that restarts explore fresh geometry.
inline bool aberth_sweeps(std::span<const Complex> c, std::vector<Complex>& z,
                          double tol, int max_iter, double phase) {
    const int d = static_cast<int>(c.size()) - 1;
    double cmax = 0.0;
    for (const Complex& ck : c) cmax = std::max(cmax, std::abs(ck));

    // Starting circle: geometric mean of the root moduli, |c_0/c_d|^(1/d),
    // clamped to sane bounds; angles are equispaced with a fixed offset that
    // avoids aligning with the axes (root symmetry traps).
    double r0 = std::pow(std::abs(c[0] / c[d]), 1.0 / d);
    if (!(r0 > 1e-6)) r0 = 1e-6;
    if (!(r0 < 1e6)) r0 = 1e6;
    z.resize(d);
    for (int j = 0; j < d; ++j) {
        const double th = tau * j / d + 0.45 / d + 0.61803398875 + phase;
        z[j] = r0 * Complex(std::cos(th), std::sin(th));
    }

    std::vector<bool> locked(d, false);
    for (int it = 0; it < max_iter; ++it) {
        int nlocked = 0;
        for (int i = 0; i < d; ++i) {
            if (locked[i]) {
                ++nlocked;
                continue;
            }
            Complex p, dp;
            horner_eval2(c, z[i], p, dp);
            if (scaled_residual(c, z[i], cmax) < tol) {
                locked[i] = true;
                ++nlocked;
                continue;
            }
            Complex newton;
            if (std::abs(dp) > 0.0) {
                newton = p / dp;
            } else {
                // p' vanished at the iterate; nudge off the critical point.
                z[i] += Complex(1e-8, 1e-8) * (1.0 + std::abs(z[i]));
                continue;
            }
            Complex sum(0.0);
            for (int j = 0; j < d; ++j) {
                if (j == i) continue;
                const Complex dz = z[i] - z[j];
                if (std::abs(dz) < 1e-300) continue;
                sum += 1.0 / dz;
            }
            const Complex denom = 1.0 - newton * sum;
            const Complex step = (std::abs(denom) > 1e-300) ? newton / denom : newton;
            z[i] -= step;
            if (scaled_residual(c, z[i], cmax) < tol) {
                locked[i] = true;
                ++nlocked;
            }
        }
        if (nlocked == d) return true;
    }
    // Final check: the lock flags are conservative, so re-test everything.
    for (int i = 0; i < d; ++i)
        if (scaled_residual(c, z[i], cmax) >= tol) return false;
    return true;
}

} // namespace detail

/// All d roots (with multiplicity) of a degree >= 1 polynomial.  Exact zero
/// low-order coefficients are stripped first, so roots at the origin are
/// returned exactly.  Throws NonConvergence when the iteration fails within
/// max_iter even after deterministic restarts from rotated starting circles.
inline std::vector<Complex> find_roots(const MonomialPolynomial& p, double tol = 1e-10,
                                       int max_iter = 200) {
    const int d = p.degree();
    if (d < 1) throw std::invalid_argument("find_roots: degree must be >= 1");
    if (std::abs(p.leading()) == 0.0)
        throw std::invalid_argument("find_roots: leading coefficient is zero");

    // Strip exact zeros at the origin (e.g. c*z^N inputs).
    std::size_t strip = 0;
    while (strip < p.coeffs.size() - 1 && p.coeffs[strip] == Complex(0.0)) ++strip;
    std::vector<Complex> roots(strip, Complex(0.0));
    std::vector<Complex> c(p.coeffs.begin() + strip, p.coeffs.end());
    const int dr = static_cast<int>(c.size()) - 1;
    if (dr == 0) return roots;

    if (dr == 1) {
        roots.push_back(-c[0] / c[1]);
        return roots;
    }
    if (dr == 2) {
        // Stable quadratic formula.
        const Complex a = c[2], b = c[1], cc = c[0];
        const Complex disc = std::sqrt(b * b - 4.0 * a * cc);
        const Complex q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc)
                                                                  : -0.5 * (b - disc);
        roots.push_back(q / a);
        roots.push_back(cc / q);
        return roots;
    }

    std::vector<Complex> z;
    for (int restart = 0; restart < 3; ++restart) {
        if (detail::aberth_sweeps(c, z, tol, max_iter, 0.91 * restart)) {
            roots.insert(roots.end(), z.begin(), z.end());
            return roots;
        }
    }
    throw NonConvergence("find_roots: Aberth iteration failed to converge");
}

// ---------------------------------------------------------------------------
// Compensated (Neumaier) accumulation, used by the orthonormalizer when the
// doubled-working-precision flag is set.

struct CompensatedSum {
    double s = 0.0, c = 0.0;
    void add(double x) {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    double value() const { return s + c; }
};

/// sum_m a[m] * conj(b[m]) * w[m], optionally with compensated accumulation.
inline Complex weighted_dot(std::span<const Complex> a, std::span<const Complex> b,
                            std::span<const double> w, bool compensated = false) {
    if (a.size() != b.size() || a.size() != w.size())
        throw LengthMismatch("weighted_dot: size mismatch");
    if (!compensated) {
        Complex acc(0.0);
        for (std::size_t m = 0; m < a.size(); ++m) acc += a[m] * std::conj(b[m]) * w[m];
        return acc;
    }
    CompensatedSum re, im;
    for (std::size_t m = 0; m < a.size(); ++m) {
        const Complex t = a[m] * std::conj(b[m]) * w[m];
        re.add(t.real());
        im.add(t.imag());
    }
    return {re.value(), im.value()};
}

// ---------------------------------------------------------------------------
// Periodic-trapezoid boundary quadrature.
//
// Nodes sit at theta_m = 2 pi m / M on the curve z(theta) = Psi(e^{i theta}).
// For integrands analytic in a neighborhood of the curve the rule converges
// geometrically in M.

struct BoundaryQuadrature {
    std::vector<double> angles;    // theta_m
    std::vector<Complex> nodes;    // z(theta_m)
    std::vector<Complex> dz;       // complex line element: z'(theta_m) * (2 pi / M)
    std::vector<double> weights;   // arc-length element |dz|: |z'(theta_m)| * (2 pi / M)

    int node_count() const { return static_cast<int>(nodes.size()); }
    double length() const {
        double L = 0.0;
        for (double w : weights) L += w;
        return L;
    }
};

/// sum_m samples[m] * weight[m]: the discrete integral against |dz|.
inline Complex boundary_integral(std::span<const Complex> samples, const BoundaryQuadrature& quad) {
    if (static_cast<int>(samples.size()) != quad.node_count())
        throw LengthMismatch("boundary_integral: sample count != node count");
    Complex acc(0.0);
    for (std::size_t m = 0; m < samples.size(); ++m) acc += samples[m] * quad.weights[m];
    return acc;
}

/// Area integral of z^j conj(z)^k over the enclosed domain, reduced to the
/// boundary by the Green identity
///   int_Omega z^j zbar^k dA = 1/(2i(k+1)) oint z^j zbar^{k+1} dz.
inline Complex interior_monomial_integral(int j, int k, const BoundaryQuadrature& quad) {
    if (j < 0 || k < 0) throw std::invalid_argument("interior_monomial_integral: j,k >= 0");
    Complex acc(0.0);
    for (int m = 0; m < quad.node_count(); ++m) {
        const Complex z = quad.nodes[m];
        acc += std::pow(z, j) * std::pow(std::conj(z), k + 1) * quad.dz[m];
    }
    return acc / (Complex(0.0, 2.0) * static_cast<double>(k + 1));
}

} // namespace eqzero
