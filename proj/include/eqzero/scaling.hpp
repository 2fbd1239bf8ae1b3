#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "eqzero/domain.hpp"
#include "eqzero/orthopoly.hpp"

namespace eqzero {

// ---------------------------------------------------------------------------
// Universal scaling-limit objects.  Everything here is built from the entire
// function
//
//   G(z) = (e^z - 1) / z,
//
// its first two derivatives, and the scaled density D_inf.  The closed forms
// suffer catastrophic cancellation near z = 0 (second derivatives noticeably
// so below |z| ~ 0.5), so evaluation switches to 25-term Taylor series inside
// a hard radius of 0.5.

namespace detail {

inline constexpr int g_series_terms = 25;
inline constexpr double g_series_radius = 0.5;

} // namespace detail

/// G, G' or G'' (order 0, 1, 2).
inline Complex eval_G(Complex z, int order = 0) {
    if (order < 0 || order > 2) throw std::invalid_argument("eval_G: order must be 0, 1 or 2");
    if (std::abs(z) < detail::g_series_radius) {
        // G(z) = sum_{k>=0} z^k / (k+1)!, differentiated termwise.
        Complex acc(0.0);
        double fact = 1.0;   // running (k+1)!
        Complex zp(1.0);     // z^{k-order} for the surviving terms
        for (int k = 0; k < detail::g_series_terms; ++k) {
            fact *= (k + 1);
            if (k < order) continue;
            double mult = 1.0;
            for (int r = 0; r < order; ++r) mult *= (k - r);
            acc += mult * zp / fact;
            zp *= z;
        }
        return acc;
    }
    const Complex ez = std::exp(z);
    switch (order) {
        case 0: return (ez - 1.0) / z;
        case 1: return (ez * (z - 1.0) + 1.0) / (z * z);
        default: return (ez * (z * z - 2.0 * z + 2.0) - 2.0) / (z * z * z);
    }
}

/// (log G)''(z) = G''/G - (G'/G)^2, series-safe near 0.
inline Complex log_G_second(Complex z) {
    const Complex g = eval_G(z, 0);
    const Complex g1 = eval_G(z, 1);
    const Complex g2 = eval_G(z, 2);
    const Complex r = g1 / g;
    return g2 / g - r * r;
}

/// Scaled boundary zero density D_inf(tau) = (1/pi) (log G)''(2 tau).
/// Equivalent closed form: [e^{4t} - (2+4t^2) e^{2t} + 1] / [4 pi (e^{2t}-1)^2 t^2].
inline double d_infinity(double t) {
    return log_G_second(Complex(2.0 * t)).real() / std::numbers::pi;
}

// ---------------------------------------------------------------------------
// Pair correlation.

struct CorrelationMatrices {
    std::array<std::array<Complex, 2>, 2> A, B, C, Lambda;
    Complex detA;
};

/// The 2x2 kernel matrices at a scaled point pair:
///   A[j][k] = G(zeta_j + conj(zeta_k)), B = (G'), C = (G''),
///   Lambda = C - B* A^{-1} B.
/// Throws NearDiagonal when |det A| <= 1e-10 (the removable confluence
/// zeta_1 -> zeta_2, where the ratio formula degenerates).
inline CorrelationMatrices correlation_matrices(Complex z1, Complex z2) {
    CorrelationMatrices m;
    const std::array<Complex, 2> zs{z1, z2};
    for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
            const Complex u = zs[j] + std::conj(zs[k]);
            m.A[j][k] = eval_G(u, 0);
            m.B[j][k] = eval_G(u, 1);
            m.C[j][k] = eval_G(u, 2);
        }
    m.detA = m.A[0][0] * m.A[1][1] - m.A[0][1] * m.A[1][0];
    if (std::abs(m.detA) <= 1e-10)
        throw NearDiagonal("correlation_matrices: det A below 1e-10 (confluent points)");
    // A^{-1} by the 2x2 adjugate, then Lambda = C - B* A^{-1} B.
    const std::array<std::array<Complex, 2>, 2> Ainv{
        std::array<Complex, 2>{m.A[1][1] / m.detA, -m.A[0][1] / m.detA},
        std::array<Complex, 2>{-m.A[1][0] / m.detA, m.A[0][0] / m.detA}};
    std::array<std::array<Complex, 2>, 2> AinvB{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            AinvB[i][j] = Ainv[i][0] * m.B[0][j] + Ainv[i][1] * m.B[1][j];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            Complex acc(0.0);
            for (int l = 0; l < 2; ++l) acc += std::conj(m.B[l][i]) * AinvB[l][j];
            m.Lambda[i][j] = m.C[i][j] - acc;
        }
    return m;
}

/// Universal limit pair correlation
///
///   K2(z1, z2) = (L11 L22 + L12 L21) / (pi^2 D(Re z1) D(Re z2) det A).
///
/// The pi^2 comes from the two-point intensity formula; with it the
/// decorrelation limit K2 -> 1 at large separation holds, which fixes the
/// constant unambiguously (and is asserted in the tests).  The result is real
/// up to roundoff; an imaginary residue above 1e-10 throws.
inline double pair_correlation_K2(Complex z1, Complex z2) {
    const CorrelationMatrices m = correlation_matrices(z1, z2);
    const Complex num = m.Lambda[0][0] * m.Lambda[1][1] + m.Lambda[0][1] * m.Lambda[1][0];
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const Complex k = num / (pi2 * d_infinity(z1.real()) * d_infinity(z2.real()) * m.detA);
    if (std::abs(k.imag()) > 1e-10 * std::max(1.0, std::abs(k.real())))
        throw NumericalBreakdown("pair_correlation_K2: imaginary residue too large");
    return std::max(k.real(), 0.0);
}

/// Tabulates kappa^T(a) = K2(0, i a) or kappa^perp(t) = K2(0, t); the value at
/// separation 0 is defined as 0 (zero repulsion limit).
inline std::vector<std::pair<double, double>> kappa_curves(KappaKind kind,
                                                           std::span<const double> grid) {
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    for (double s : grid) {
        double v = 0.0;
        if (s != 0.0)
            v = (kind == KappaKind::tangential) ? pair_correlation_K2(Complex(0.0), Complex(0.0, s))
                                                : pair_correlation_K2(Complex(0.0), Complex(s, 0.0));
        out.emplace_back(s, v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite-N kernels against their scaling limits.

enum class KernelKind { szego, bergman };

/// For each N, the absolute error of the scaled partial kernel at the mapped
/// point pair z_i = Psi(1 + zeta_i / N) against its limit:
///
///   szego:   (1/N)   S_N(z_1, z_2)  vs  (|psi(z0)|^2 / L) G(zeta_1 + conj(zeta_2))
///   bergman: (1/N^2) B_N(z_1, z_2)  vs  (1/pi) |Phi'(z0)|^2 G'(zeta_1 + conj(zeta_2))
///
/// with z0 = Psi(1).  The Szego prefactor is |psi|^2/L for the same inner
/// product normalization reasons as in szego_prediction.  The Bergman limit
/// carries G' rather than G: the Carleman prefactor sqrt((k+1)/pi) weights the
/// kernel sum by (k+1), which integrates to G' in the scaling limit (exact on
/// the disk, where B_N is a closed-form sum).
inline std::vector<std::pair<int, double>> scaled_kernel_convergence(
    const DomainSpec& domain, const WeightSpec& weight, std::span<const int> N_list, Complex z1,
    Complex z2, KernelKind kind = KernelKind::szego, const BasisOptions& opts = {}) {
    const Complex z0 = domain.psi(Complex(1.0));
    Complex limit;
    if (kind == KernelKind::szego) {
        const OuterFunction outer = outer_function(domain, weight);
        const Complex psi0 = psi_factor(domain, outer, domain.length(), z0);
        limit = std::norm(psi0) / domain.length() * eval_G(z1 + std::conj(z2), 0);
    } else {
        const Complex phip0 = 1.0 / domain.dpsi(Complex(1.0));
        limit = std::norm(phip0) / std::numbers::pi * eval_G(z1 + std::conj(z2), 1);
    }

    std::vector<std::pair<int, double>> out;
    out.reserve(N_list.size());
    for (int N : N_list) {
        if (N < 8) throw std::invalid_argument("scaled_kernel_convergence: N too small");
        const Complex w1 = 1.0 + z1 / static_cast<double>(N);
        const Complex w2 = 1.0 + z2 / static_cast<double>(N);
        const Complex p1 = domain.psi(w1);
        const Complex p2 = domain.psi(w2);
        const int M = std::max(256, 8 * (N + 3));
        Complex scaled;
        if (kind == KernelKind::szego) {
            const OrthonormalBasis basis = build_boundary_basis(domain, weight, N, M, opts);
            scaled = partial_kernel(basis, p1, p2).value / static_cast<double>(N);
        } else {
            const OrthonormalBasis basis = build_interior_basis(domain, N, M, opts);
            scaled = partial_kernel(basis, p1, p2).value / (static_cast<double>(N) * N);
        }
        out.emplace_back(N, std::abs(scaled - limit));
    }
    return out;
}

} // namespace eqzero
