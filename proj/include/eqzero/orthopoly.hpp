#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "eqzero/domain.hpp"
#include "eqzero/numerics.hpp"

namespace eqzero {

enum class InnerProductKind { boundary, interior };

struct BasisOptions {
    bool compensated = false;  // doubled-working-precision inner products
};

// ---------------------------------------------------------------------------
// Orthonormal polynomial bases P_0..P_N built by the Arnoldi-Stieltjes
// recurrence: orthogonalize z*P_k against all previous basis vectors under a
// quadrature discretization of the inner product, with one reorthogonalization
// pass.  Raw monomial Gram matrices are exponentially ill-conditioned; the
// recurrence formulation is the standard stable construction.
//
// The monomial coefficient matrix is still materialized -- it feeds the root
// finder -- but evaluation goes through the recurrence (eval_basis), which
// stays accurate far beyond the monomial representation.

struct OrthonormalBasis {
    int degree = 0;                                   // N
    InnerProductKind kind = InnerProductKind::boundary;
    std::vector<std::vector<Complex>> hessenberg;     // hessenberg[k][j] = h_{j,k}, j = 0..k+1
    std::vector<std::vector<Complex>> monomial;       // monomial[j] = coeffs c_0..c_j of P_j
    double p0 = 1.0;                                  // P_0 value (leading coeff of P_0)
    std::string quad_provenance;

    /// Leading (monomial) coefficient of P_j; positive real by construction.
    double leading_coefficient(int j) const { return monomial[j][j].real(); }
};

struct KernelEvaluation {
    Complex value;
    int N = 0;
    enum class Kind { szego_partial, bergman_partial } kind = Kind::szego_partial;
};

/// (P_0(z), ..., P_N(z)) evaluated through the Arnoldi recurrence
///   P_{k+1}(z) = (z P_k(z) - sum_{j<=k} h_{j,k} P_j(z)) / h_{k+1,k}.
inline std::vector<Complex> eval_basis(const OrthonormalBasis& basis, Complex z) {
    std::vector<Complex> p(basis.degree + 1);
    p[0] = Complex(basis.p0);
    for (int k = 0; k < basis.degree; ++k) {
        const auto& h = basis.hessenberg[k];
        Complex acc = z * p[k];
        for (int j = 0; j <= k; ++j) acc -= h[j] * p[j];
        p[k + 1] = acc / h[k + 1];
    }
    return p;
}

/// Partial reproducing kernel sum_{k=0}^{N} P_k(z) conj(P_k(w)).
inline KernelEvaluation partial_kernel(const OrthonormalBasis& basis, Complex z, Complex w) {
    const std::vector<Complex> pz = eval_basis(basis, z);
    const std::vector<Complex> pw = (w == z) ? pz : eval_basis(basis, w);
    Complex acc(0.0);
    for (int k = 0; k <= basis.degree; ++k) acc += pz[k] * std::conj(pw[k]);
    return {acc, basis.degree,
            basis.kind == InnerProductKind::boundary ? KernelEvaluation::Kind::szego_partial
                                                     : KernelEvaluation::Kind::bergman_partial};
}

inline double kernel_diag(const OrthonormalBasis& basis, Complex z) {
    const std::vector<Complex> p = eval_basis(basis, z);
    double acc = 0.0;
    for (const Complex& v : p) acc += std::norm(v);
    return acc;
}

namespace detail {

// Shifts coefficients by one power of z and subtracts multiples of earlier
// rows; shared by both constructions.
inline std::vector<Complex> shift_coeffs(const std::vector<Complex>& c) {
    std::vector<Complex> out(c.size() + 1, Complex(0.0));
    for (std::size_t i = 0; i < c.size(); ++i) out[i + 1] = c[i];
    return out;
}

inline void axpy_coeffs(std::vector<Complex>& c, Complex a, const std::vector<Complex>& x) {
    for (std::size_t i = 0; i < x.size(); ++i) c[i] -= a * x[i];
}

inline void enforce_positive_leading(std::vector<Complex>& vals, std::vector<Complex>& coeffs) {
    Complex lead = coeffs.back();
    if (lead.imag() == 0.0 && lead.real() > 0.0) return;
    const Complex unimod = lead / std::abs(lead);
    for (Complex& v : vals) v /= unimod;
    for (Complex& c : coeffs) c /= unimod;
    coeffs.back() = Complex(std::abs(lead), 0.0);
}

} // namespace detail

/// Orthonormal basis for the boundary inner product
///   <f, g> = int_{boundary} f conj(g) rho |dz|
/// discretized on the periodic-trapezoid grid.  Requires M >= 8(N+1).
inline OrthonormalBasis build_boundary_basis(const DomainSpec& domain, const WeightSpec& weight,
                                             int N, int M, const BasisOptions& opts = {}) {
    if (N < 0) throw std::invalid_argument("build_boundary_basis: N >= 0 required");
    if (M < 8 * (N + 1))
        throw QuadratureTooCoarse("build_boundary_basis: M >= 8(N+1) required");

    const BoundaryQuadrature quad = make_boundary_quadrature(domain, M);
    std::vector<double> w(M);
    for (int m = 0; m < M; ++m) {
        const double rho = weight.evaluator(quad.angles[m]);
        if (!(rho > 0.0)) throw WeightNotPositive("build_boundary_basis: rho <= 0 on grid");
        w[m] = rho * quad.weights[m];
    }

    OrthonormalBasis basis;
    basis.degree = N;
    basis.kind = InnerProductKind::boundary;
    basis.quad_provenance = "trapezoid M=" + std::to_string(M) + " on " + domain.label() +
                            " weight " + weight.label;
    basis.hessenberg.resize(N);
    basis.monomial.resize(N + 1);

    std::vector<std::vector<Complex>> vals(N + 1, std::vector<Complex>(M));
    std::vector<Complex> v(M, Complex(1.0));
    const double norm0 = std::sqrt(weighted_dot(v, v, w, opts.compensated).real());
    if (!(norm0 > 1e-14)) throw NumericalBreakdown("build_boundary_basis: degenerate weight");
    basis.p0 = 1.0 / norm0;
    for (int m = 0; m < M; ++m) vals[0][m] = Complex(basis.p0);
    basis.monomial[0] = {Complex(basis.p0)};

    for (int k = 0; k < N; ++k) {
        for (int m = 0; m < M; ++m) v[m] = quad.nodes[m] * vals[k][m];
        std::vector<Complex> coeffs = detail::shift_coeffs(basis.monomial[k]);
        std::vector<Complex> h(k + 2, Complex(0.0));
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j <= k; ++j) {
                const Complex hj = weighted_dot(v, vals[j], w, opts.compensated);
                for (int m = 0; m < M; ++m) v[m] -= hj * vals[j][m];
                detail::axpy_coeffs(coeffs, hj, basis.monomial[j]);
                h[j] += hj;
            }
        }
        const double nu = std::sqrt(weighted_dot(v, v, w, opts.compensated).real());
        if (!(nu > 1e-14))
            throw NumericalBreakdown("build_boundary_basis: normalization underflow at degree " +
                                     std::to_string(k + 1));
        h[k + 1] = Complex(nu);
        for (int m = 0; m < M; ++m) vals[k + 1][m] = v[m] / nu;
        for (Complex& c : coeffs) c /= nu;
        detail::enforce_positive_leading(vals[k + 1], coeffs);
        basis.monomial[k + 1] = std::move(coeffs);
        basis.hessenberg[k] = std::move(h);
    }
    return basis;
}

/// Orthonormal basis for the interior (Lebesgue-area) inner product; the
/// products reduce to boundary integrals through the antiderivative identity
///   int_Omega u conj(v) dA = 1/(2i) oint u(z) conj(V(z)) dz,   V' = v,
/// evaluated on the same trapezoid grid.  Requires M >= 8(N+2).
inline OrthonormalBasis build_interior_basis(const DomainSpec& domain, int N, int M,
                                             const BasisOptions& opts = {}) {
    if (N < 0) throw std::invalid_argument("build_interior_basis: N >= 0 required");
    if (M < 8 * (N + 2))
        throw QuadratureTooCoarse("build_interior_basis: M >= 8(N+2) required");

    const BoundaryQuadrature quad = make_boundary_quadrature(domain, M);
    const Complex half_over_i(0.0, -0.5);  // 1/(2i)

    // <u, v> where `anti` holds grid values of v's antiderivative.
    auto green_dot = [&](const std::vector<Complex>& u, const std::vector<Complex>& anti) {
        if (!opts.compensated) {
            Complex acc(0.0);
            for (int m = 0; m < M; ++m) acc += u[m] * std::conj(anti[m]) * quad.dz[m];
            return half_over_i * acc;
        }
        CompensatedSum re, im;
        for (int m = 0; m < M; ++m) {
            const Complex t = u[m] * std::conj(anti[m]) * quad.dz[m];
            re.add(t.real());
            im.add(t.imag());
        }
        return half_over_i * Complex(re.value(), im.value());
    };
    auto antiderivative_values = [&](const std::vector<Complex>& coeffs) {
        std::vector<Complex> ac(coeffs.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < coeffs.size(); ++i)
            ac[i + 1] = coeffs[i] / static_cast<double>(i + 1);
        std::vector<Complex> out(M);
        for (int m = 0; m < M; ++m) out[m] = horner_eval(ac, quad.nodes[m]);
        return out;
    };

    OrthonormalBasis basis;
    basis.degree = N;
    basis.kind = InnerProductKind::interior;
    basis.quad_provenance = "green trapezoid M=" + std::to_string(M) + " on " + domain.label();
    basis.hessenberg.resize(N);
    basis.monomial.resize(N + 1);

    std::vector<std::vector<Complex>> vals(N + 1, std::vector<Complex>(M));
    std::vector<std::vector<Complex>> anti(N + 1);

    std::vector<Complex> v(M, Complex(1.0));
    std::vector<Complex> coeffs{Complex(1.0)};
    std::vector<Complex> av = antiderivative_values(coeffs);
    const double area = green_dot(v, av).real();
    if (!(area > 0.0)) throw NumericalBreakdown("build_interior_basis: nonpositive area");
    const double norm0 = std::sqrt(area);
    basis.p0 = 1.0 / norm0;
    for (int m = 0; m < M; ++m) {
        vals[0][m] = Complex(basis.p0);
        av[m] /= norm0;
    }
    anti[0] = std::move(av);
    basis.monomial[0] = {Complex(basis.p0)};

    for (int k = 0; k < N; ++k) {
        for (int m = 0; m < M; ++m) v[m] = quad.nodes[m] * vals[k][m];
        coeffs = detail::shift_coeffs(basis.monomial[k]);
        std::vector<Complex> h(k + 2, Complex(0.0));
        for (int pass = 0; pass < 2; ++pass) {
            for (int j = 0; j <= k; ++j) {
                const Complex hj = green_dot(v, anti[j]);
                for (int m = 0; m < M; ++m) v[m] -= hj * vals[j][m];
                detail::axpy_coeffs(coeffs, hj, basis.monomial[j]);
                h[j] += hj;
            }
        }
        std::vector<Complex> va = antiderivative_values(coeffs);
        const double nsq = green_dot(v, va).real();
        if (!(nsq > 0.0) || std::sqrt(nsq) < 1e-14)
            throw NumericalBreakdown("build_interior_basis: normalization underflow at degree " +
                                     std::to_string(k + 1));
        const double nu = std::sqrt(nsq);
        h[k + 1] = Complex(nu);
        for (int m = 0; m < M; ++m) {
            vals[k + 1][m] = v[m] / nu;
            va[m] /= nu;
        }
        for (Complex& c : coeffs) c /= nu;
        detail::enforce_positive_leading(vals[k + 1], coeffs);
        anti[k + 1] = std::move(va);
        basis.monomial[k + 1] = std::move(coeffs);
        basis.hessenberg[k] = std::move(h);
    }
    return basis;
}

// ---------------------------------------------------------------------------
// Asymptotic predictions.
//
// For the boundary basis (inner product int f conj(g) rho |dz|) the classical
// exterior asymptotics read
//
//   P_n(z) = (2 pi)^{-1/2} Delta_e(z)^{-1} Phi'(z)^{1/2} Phi(z)^n + O(delta^n)
//          = psi(z) Phi(z)^n / sqrt(L),
//
// with psi = sqrt(L/2pi) Delta_e^{-1} Phi'^{1/2}.  The 1/sqrt(L) is forced by
// the normalization of the inner product: the classical statement with the
// bare sqrt(L/2pi) prefactor holds for polynomials orthonormal against the
// length-averaged measure rho |dz| / L.  On the disk with rho = 1/(2 pi) the
// two conventions coincide and the prediction is exactly z^n.

inline Complex szego_prediction(const DomainSpec& domain, const OuterFunction& outer, int n,
                                Complex z) {
    const Complex w = exterior_map(domain, z);
    const Complex sqrt_phip = 1.0 / std::sqrt(domain.dpsi(w));
    return sqrt_phip / (outer.eval(w) * std::sqrt(tau)) * std::pow(w, n);
}

/// Interior (Lebesgue) asymptotics: ((n+1)/pi)^{1/2} Phi'(z) Phi(z)^n.
inline Complex carleman_prediction(const DomainSpec& domain, int n, Complex z) {
    const Complex w = exterior_map(domain, z);
    const Complex phip = 1.0 / domain.dpsi(w);
    return std::sqrt((n + 1) / std::numbers::pi) * phip * std::pow(w, n);
}

/// A_N(z) = S_N(z,z) / sum_{n=0}^N |Phi(z)|^{2n}.  Bounded above and below by
/// domain-dependent constants on the exterior-plus-collar region; converges to
/// |psi(z)|^2 / L at fixed exterior points.
inline double kernel_ratio(const OrthonormalBasis& basis, const DomainSpec& domain, Complex z) {
    const Complex w = exterior_map(domain, z);
    const double q = std::norm(w);
    double comparison = 0.0, t = 1.0;
    for (int n = 0; n <= basis.degree; ++n) {
        comparison += t;
        t *= q;
    }
    return kernel_diag(basis, z) / comparison;
}

} // namespace eqzero
