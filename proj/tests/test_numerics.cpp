#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <complex>
#include <numbers>
#include <vector>

#include "eqzero/domain.hpp"
#include "eqzero/numerics.hpp"
#include "eqzero/rng.hpp"

using namespace eqzero;
using Catch::Approx;

namespace {

// Independent power-sum evaluation used as the Horner oracle.
Complex powersum_eval(const std::vector<Complex>& c, Complex z) {
    Complex acc(0.0);
    for (std::size_t k = 0; k < c.size(); ++k) acc += c[k] * std::pow(z, static_cast<double>(k));
    return acc;
}

// Expand prod (z - r_k) to monomial coefficients.
std::vector<Complex> expand_roots(const std::vector<Complex>& roots) {
    std::vector<Complex> c{Complex(1.0)};
    for (const Complex& r : roots) {
        std::vector<Complex> next(c.size() + 1, Complex(0.0));
        for (std::size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    return c;
}

// Greedy multiset match: worst-case distance between found roots and targets.
double multiset_distance(std::vector<Complex> found, const std::vector<Complex>& target) {
    double worst = 0.0;
    for (const Complex& t : target) {
        auto best = std::min_element(found.begin(), found.end(), [&](Complex a, Complex b) {
            return std::abs(a - t) < std::abs(b - t);
        });
        REQUIRE(best != found.end());
        worst = std::max(worst, std::abs(*best - t));
        found.erase(best);
    }
    return worst;
}

} // namespace

TEST_CASE("horner evaluation") {
    CHECK(std::abs(horner_eval(MonomialPolynomial({{1, 0}, {0, 0}, {1, 0}}), Complex(0, 1))) <
          1e-15);
    CHECK(horner_eval(MonomialPolynomial({{1, 0}}), Complex(7, 3)) == Complex(1, 0));

    const std::vector<Complex> c{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
    const Complex z(0.5, 0.0);
    CHECK(std::abs(horner_eval(MonomialPolynomial(c), z) - powersum_eval(c, z)) < 1e-15);
    CHECK(horner_eval(MonomialPolynomial(c), z).real() == Approx(1.375).margin(1e-15));

    TrialRng rng(11, 0);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<Complex> rc(9);
        for (Complex& v : rc) v = rng.next_complex_gaussian();
        const Complex zz = 2.0 * rng.next_complex_gaussian();
        CHECK(std::abs(horner_eval(MonomialPolynomial(rc), zz) - powersum_eval(rc, zz)) <
              1e-12 * (1.0 + std::abs(powersum_eval(rc, zz))));
    }
}

TEST_CASE("find_roots on closed-form cases") {
    const auto r1 = find_roots(MonomialPolynomial({{1, 0}, {0, 0}, {1, 0}}));
    CHECK(multiset_distance(r1, {Complex(0, 1), Complex(0, -1)}) < 1e-12);

    // z^N - 1: the N-th roots of unity.
    const int N = 17;
    std::vector<Complex> c(N + 1, Complex(0.0));
    c[0] = Complex(-1.0);
    c[N] = Complex(1.0);
    const auto rn = find_roots(MonomialPolynomial(c));
    std::vector<Complex> target;
    for (int k = 0; k < N; ++k)
        target.push_back(Complex(std::cos(tau * k / N), std::sin(tau * k / N)));
    CHECK(multiset_distance(rn, target) < 1e-10);
}

TEST_CASE("find_roots plant-and-recover") {
    // degree 12 with well-separated planted roots
    std::vector<Complex> planted;
    TrialRng rng(5, 3);
    for (int k = 0; k < 12; ++k) {
        const double r = 0.5 + 0.12 * k;
        const double th = tau * k / 12.0 + 0.2;
        planted.push_back(r * Complex(std::cos(th), std::sin(th)));
    }
    const auto roots = find_roots(MonomialPolynomial(expand_roots(planted)), 1e-12, 300);
    CHECK(multiset_distance(roots, planted) < 1e-8);

    SECTION("residual certificate and degree 50") {
        std::vector<Complex> big;
        for (int k = 0; k < 50; ++k) {
            const double r = 0.6 + 0.5 * (k % 7) / 7.0;
            const double th = tau * k / 50.0 + 0.31;
            big.push_back(r * Complex(std::cos(th), std::sin(th)));
        }
        const MonomialPolynomial p(expand_roots(big));
        const auto roots50 = find_roots(p, 1e-10, 400);
        REQUIRE(roots50.size() == 50);
        CHECK(multiset_distance(roots50, big) < 1e-8);
        double cmax = 0.0;
        for (const Complex& ck : p.coeffs) cmax = std::max(cmax, std::abs(ck));
        for (const Complex& r : roots50) {
            const double res = std::abs(horner_eval(p, r)) /
                               (cmax * std::pow(std::max(1.0, std::abs(r)), p.degree()));
            CHECK(res < 1e-10);
        }
    }
}

TEST_CASE("find_roots edge cases") {
    // roots at the origin are stripped exactly
    std::vector<Complex> c(7, Complex(0.0));
    c[6] = Complex(3.0, 1.0);
    const auto r = find_roots(MonomialPolynomial(c));
    REQUIRE(r.size() == 6);
    for (const Complex& z : r) CHECK(std::abs(z) == 0.0);

    CHECK_THROWS_AS(find_roots(MonomialPolynomial({{1, 0}})), std::invalid_argument);
    CHECK_THROWS_AS(find_roots(MonomialPolynomial({{1, 0}, {0, 0}})), std::invalid_argument);
}

TEST_CASE("boundary quadrature basics") {
    const DomainSpec disk = DomainSpec::disk();
    const BoundaryQuadrature q = make_boundary_quadrature(disk, 128);
    CHECK(q.length() == Approx(tau).epsilon(1e-12));

    std::vector<Complex> ones(128, Complex(1.0));
    CHECK(boundary_integral(ones, q).real() == Approx(tau).epsilon(1e-13));

    // z^j conj(z)^k on the circle: 2 pi delta_jk
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            std::vector<Complex> f(128);
            for (int m = 0; m < 128; ++m)
                f[m] = std::pow(q.nodes[m], j) * std::pow(std::conj(q.nodes[m]), k);
            const Complex v = boundary_integral(f, q);
            CHECK(std::abs(v - (j == k ? Complex(tau) : Complex(0.0))) < 1e-12);
        }

    std::vector<Complex> wrong(5, Complex(0.0));
    CHECK_THROWS_AS(boundary_integral(wrong, q), LengthMismatch);
}

TEST_CASE("ellipse length against dense reference") {
    const DomainSpec ell = DomainSpec::ellipse(0.5);
    // |z|^2 against a dense-M reference run
    auto integral = [&](int M) {
        const BoundaryQuadrature q = make_boundary_quadrature(ell, M);
        std::vector<Complex> f(M);
        for (int m = 0; m < M; ++m) f[m] = q.nodes[m] * std::conj(q.nodes[m]);
        return boundary_integral(f, q);
    };
    const Complex ref = integral(4096);
    CHECK(std::abs(integral(128) - ref) < 1e-11 * std::abs(ref));
}

TEST_CASE("quadrature geometric convergence") {
    // analytic, non-polynomial integrand on the ellipse
    const DomainSpec ell = DomainSpec::ellipse(0.4);
    auto integral = [&](int M) {
        const BoundaryQuadrature q = make_boundary_quadrature(ell, M);
        std::vector<Complex> f(M);
        for (int m = 0; m < M; ++m) f[m] = std::exp(q.nodes[m].real());
        return boundary_integral(f, q).real();
    };
    const double ref = integral(8192);
    double prev = std::abs(integral(64) - ref);
    for (int M = 128; M <= 512; M *= 2) {
        const double err = std::abs(integral(M) - ref);
        if (prev < 1e-13) break;  // machine floor reached
        CHECK(err <= prev / 10.0);
        prev = err;
    }
}

TEST_CASE("interior monomial integrals via the Green identity") {
    const DomainSpec disk = DomainSpec::disk();
    const BoundaryQuadrature q = make_boundary_quadrature(disk, 256);
    const double pi = std::numbers::pi;

    CHECK(interior_monomial_integral(0, 0, q).real() == Approx(pi).epsilon(1e-13));
    CHECK(interior_monomial_integral(1, 1, q).real() == Approx(pi / 2).epsilon(1e-13));
    CHECK(std::abs(interior_monomial_integral(0, 1, q)) < 1e-13);

    // 2-D polar tensor-product oracle: int_0^1 int_0^2pi r^{j+k+1} e^{i(j-k)t} dt dr
    auto polar_oracle = [&](int j, int k) -> Complex {
        const int nr = 2000, nt = 256;
        Complex acc(0.0);
        for (int ir = 0; ir < nr; ++ir) {
            const double r = (ir + 0.5) / nr;  // midpoint rule in r
            Complex tacc(0.0);
            for (int it = 0; it < nt; ++it) {
                const double t = tau * it / nt;
                tacc += std::polar(1.0, (j - k) * t);
            }
            acc += std::pow(r, j + k + 1) * tacc * (tau / nt) * (1.0 / nr);
        }
        return acc;
    };
    for (int j = 0; j <= 10; ++j)
        for (int k = 0; k <= 10; k += 2) {
            const Complex lhs = interior_monomial_integral(j, k, q);
            const Complex rhs = polar_oracle(j, k);
            CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(rhs)));
        }
}

TEST_CASE("compensated dot matches plain accumulation") {
    TrialRng rng(3, 1);
    const int M = 300;
    std::vector<Complex> a(M), b(M);
    std::vector<double> w(M);
    for (int m = 0; m < M; ++m) {
        a[m] = rng.next_complex_gaussian();
        b[m] = rng.next_complex_gaussian();
        w[m] = 0.5 + rng.next_unit();
    }
    const Complex plain = weighted_dot(a, b, w, false);
    const Complex comp = weighted_dot(a, b, w, true);
    CHECK(std::abs(plain - comp) < 1e-12 * (1.0 + std::abs(plain)));
}
