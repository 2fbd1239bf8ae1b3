#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "eqzero/numerics.hpp"

namespace eqzero {

// ---------------------------------------------------------------------------
// Analytic simply connected domains, described by the Laurent data of the
// inverse exterior Riemann map
//
//   Psi(w) = c w + c0 + sum_{k=1..K} c_k w^{-k},   |w| >= 1,
//
// which maps the exterior of the unit disk conformally onto the exterior of
// the domain.  Phi denotes the inverse (the exterior map of the domain), with
// Phi'(infinity) = 1/c in R+.  All geometry below is derived from this data,
// so boundary points, tangents and the exterior map are available to machine
// precision without any mesh.

class DomainSpec {
public:
    /// Validates and constructs.  Throws DegenerateBoundary if the data fails
    /// the univalence checks (Psi' zero with |w| >= 1, or a self-intersecting
    /// boundary curve on a dense sample).
    DomainSpec(double capacity, Complex center, std::vector<Complex> tail,
               std::string label, double collar_width = 0.1)
        : capacity_(capacity),
          center_(center),
          tail_(std::move(tail)),
          label_(std::move(label)),
          collar_(collar_width) {
        if (!(capacity_ > 0.0))
            throw DegenerateBoundary("domain '" + label_ + "': capacity c must be positive");
        validate();
        length_ = compute_length();
    }

    static DomainSpec disk() { return DomainSpec(1.0, 0.0, {}, "disk", 0.2); }

    /// Joukowski ellipse Psi(w) = c (w + m/w), semi-axes c(1+m), c(1-m).
    static DomainSpec ellipse(double m, double c = 1.0) {
        if (!(m >= 0.0 && m < 1.0))
            throw DegenerateBoundary("ellipse parameter m must lie in [0,1)");
        return DomainSpec(c, 0.0, {Complex(c * m, 0.0)}, "ellipse-m" + format_param(m),
                          0.2 * (1.0 - m));
    }

    /// Psi(w) = w + 0.1 w^{-2}: a smooth non-elliptic perturbation of the disk.
    static DomainSpec perturbed_disk() {
        return DomainSpec(1.0, 0.0, {Complex(0.0), Complex(0.1, 0.0)}, "perturbed-disk", 0.15);
    }

    double capacity() const { return capacity_; }
    Complex center() const { return center_; }
    const std::vector<Complex>& tail() const { return tail_; }
    const std::string& label() const { return label_; }
    double collar_width() const { return collar_; }
    double length() const { return length_; }

    Complex psi(Complex w) const {
        Complex acc = capacity_ * w + center_;
        Complex wi(1.0);
        for (const Complex& ck : tail_) {
            wi /= w;
            acc += ck * wi;
        }
        return acc;
    }

    Complex dpsi(Complex w) const {
        Complex acc(capacity_);
        Complex wi = 1.0 / w;
        for (std::size_t k = 0; k < tail_.size(); ++k) {
            wi /= w;
            acc -= static_cast<double>(k + 1) * tail_[k] * wi;
        }
        return acc;
    }

private:
    static std::string format_param(double m) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", m);
        return buf;
    }

    void validate() const {
        // Psi' must not vanish on |w| >= 1: its zeros are roots of the
        // polynomial q(u) = c - sum k c_k u^{k+1} in u = 1/w, so reject any
        // root with |u| <= 1.
        if (!tail_.empty()) {
            std::vector<Complex> q(tail_.size() + 2, Complex(0.0));
            q[0] = Complex(capacity_);
            for (std::size_t k = 0; k < tail_.size(); ++k)
                q[k + 1 + 1] = -static_cast<double>(k + 1) * tail_[k];
            while (q.size() > 1 && std::abs(q.back()) == 0.0) q.pop_back();
            if (q.size() > 1) {
                for (const Complex& u : find_roots(MonomialPolynomial(q), 1e-12, 400))
                    if (std::abs(u) <= 1.0 + 1e-12)
                        throw DegenerateBoundary(
                            "domain '" + label_ + "': Psi' vanishes on |w| >= 1 (non-univalent data)");
            }
        }
        // The boundary curve must be simple.  Compare all sample pairs; the
        // chord |e^{i a} - e^{i b}| normalizes out mesh clustering.
        const int M = 512;
        std::vector<Complex> z(M), w(M);
        double scale = 0.0;
        for (int m = 0; m < M; ++m) {
            const double th = tau * m / M;
            w[m] = Complex(std::cos(th), std::sin(th));
            z[m] = psi(w[m]);
            scale = std::max(scale, std::abs(z[m]));
        }
        for (int i = 0; i < M; ++i)
            for (int j = i + 1; j < M; ++j) {
                const double chord = std::abs(w[i] - w[j]);
                if (std::abs(z[i] - z[j]) < 1e-6 * scale * chord)
                    throw DegenerateBoundary("domain '" + label_ +
                                             "': boundary curve self-intersects");
            }
    }

    double compute_length() const {
        const int M = 1024;
        double L = 0.0;
        for (int m = 0; m < M; ++m) {
            const double th = tau * m / M;
            L += std::abs(dpsi(Complex(std::cos(th), std::sin(th))));
        }
        return L * tau / M;
    }

    double capacity_;
    Complex center_;
    std::vector<Complex> tail_;
    std::string label_;
    double collar_;
    double length_ = 0.0;
};

inline Complex boundary_point(const DomainSpec& domain, double theta) {
    return domain.psi(Complex(std::cos(theta), std::sin(theta)));
}

/// |Psi'(e^{i theta})|, the arc-length element per unit angle.
inline double boundary_speed(const DomainSpec& domain, double theta) {
    const double s = std::abs(domain.dpsi(Complex(std::cos(theta), std::sin(theta))));
    if (s < 1e-12)
        throw DegenerateBoundary("boundary_speed: |Psi'| < 1e-12 (non-univalent data)");
    return s;
}

inline BoundaryQuadrature make_boundary_quadrature(const DomainSpec& domain, int M) {
    if (M < 8) throw QuadratureTooCoarse("make_boundary_quadrature: M >= 8 required");
    BoundaryQuadrature q;
    q.angles.resize(M);
    q.nodes.resize(M);
    q.dz.resize(M);
    q.weights.resize(M);
    const double h = tau / M;
    for (int m = 0; m < M; ++m) {
        const double th = h * m;
        const Complex w(std::cos(th), std::sin(th));
        const Complex dp = domain.dpsi(w);
        q.angles[m] = th;
        q.nodes[m] = domain.psi(w);
        q.dz[m] = Complex(0.0, 1.0) * w * dp * h;  // dz = i e^{i th} Psi' dtheta
        q.weights[m] = std::abs(dp) * h;
    }
    return q;
}

/// Exterior map w = Phi(z): Newton inversion of Psi seeded at (z - c0)/c.
/// Valid for z in the closed exterior or within the analyticity collar
/// |w| >= 1 - collar_width; deeper points raise MapInversionFailure.
inline Complex exterior_map(const DomainSpec& domain, Complex z) {
    Complex w = (z - domain.center()) / domain.capacity();
    if (std::abs(w) < 0.5) w = (std::abs(w) == 0.0) ? Complex(1.0) : w / std::abs(w);
    const double tol = 1e-12 * (1.0 + std::abs(z));
    for (int it = 0; it < 80; ++it) {
        const Complex r = domain.psi(w) - z;
        if (std::abs(r) < tol) {
            if (std::abs(w) < 1.0 - domain.collar_width() - 1e-9)
                throw MapInversionFailure("exterior_map: preimage below the collar");
            return w;
        }
        const Complex dp = domain.dpsi(w);
        if (std::abs(dp) < 1e-14)
            throw MapInversionFailure("exterior_map: Psi' vanished during Newton");
        w -= r / dp;
        if (!std::isfinite(w.real()) || !std::isfinite(w.imag()))
            throw MapInversionFailure("exterior_map: Newton diverged");
        // Keep the iterate on the sheet the seed belongs to.
        if (std::abs(w) < 0.05)
            throw MapInversionFailure("exterior_map: iterate collapsed toward w = 0");
    }
    throw MapInversionFailure("exterior_map: Newton failed to converge");
}

inline Complex phi_prime(const DomainSpec& domain, Complex w_preimage) {
    return 1.0 / domain.dpsi(w_preimage);
}

/// Pairing of a test function against the equilibrium measure
/// nu = Phi^* (uniform measure on S^1):  (1/M) sum phi(Psi(e^{i theta_m})).
template <class F>
double equilibrium_pairing(const DomainSpec& domain, F&& phi, int M) {
    if (M < 16) throw std::invalid_argument("equilibrium_pairing: M >= 16 required");
    double acc = 0.0;
    for (int m = 0; m < M; ++m) acc += phi(boundary_point(domain, tau * m / M));
    return acc / M;
}

// ---------------------------------------------------------------------------
// Boundary weights rho(theta) > 0, parametrized by the w-plane angle.

struct WeightSpec {
    std::function<double(double)> evaluator;  // rho(theta), 2 pi periodic
    int fourier_budget = 256;
    std::string label;

    static WeightSpec constant(double v) {
        return {[v](double) { return v; }, 256, "constant:" + to_plain(v)};
    }
    /// rho(theta) = exp(A cos theta).
    static WeightSpec exp_cos(double amplitude) {
        return {[amplitude](double th) { return std::exp(amplitude * std::cos(th)); }, 256,
                "exp_cos:" + to_plain(amplitude)};
    }

private:
    static std::string to_plain(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
};

// ---------------------------------------------------------------------------
// Outer function: the zero-free holomorphic D on |w| > 1 with |D|^2 = rho on
// the unit circle, represented through the Fourier tail of log D.

struct OuterFunction {
    std::vector<Complex> log_coeffs;  // a_0, a_1, ..., a_J of log D = a_0 + sum a_k w^{-k}

    Complex log_eval(Complex w) const {
        Complex acc = log_coeffs.empty() ? Complex(0.0) : log_coeffs[0];
        Complex wi(1.0);
        for (std::size_t k = 1; k < log_coeffs.size(); ++k) {
            wi /= w;
            acc += log_coeffs[k] * wi;
        }
        return acc;
    }
    Complex eval(Complex w) const { return std::exp(log_eval(w)); }
};

/// Builds D from rho: a_0 = b_0, a_k = 2 b_{-k} where b are the Fourier
/// coefficients of (1/2) log rho.  For analytic rho the coefficients decay
/// geometrically, so J = 256 modes reach double precision.
inline OuterFunction outer_function(const DomainSpec& /*domain*/, const WeightSpec& weight,
                                    int J = 256) {
    if (J < 0 || J > weight.fourier_budget)
        throw std::invalid_argument("outer_function: J must lie in [0, fourier_budget]");
    const int M = std::max(1024, 4 * J);
    std::vector<double> half_log(M);
    for (int m = 0; m < M; ++m) {
        const double rho = weight.evaluator(tau * m / M);
        if (!(rho > 0.0)) throw WeightNotPositive("outer_function: rho <= 0 on the grid");
        half_log[m] = 0.5 * std::log(rho);
    }
    OuterFunction out;
    out.log_coeffs.assign(J + 1, Complex(0.0));
    for (int k = 0; k <= J; ++k) {
        // b_{-k} = (1/M) sum half_log(theta_m) e^{+i k theta_m}
        Complex acc(0.0);
        for (int m = 0; m < M; ++m) {
            const double th = tau * m / M;
            acc += half_log[m] * Complex(std::cos(k * th), std::sin(k * th));
        }
        acc /= static_cast<double>(M);
        out.log_coeffs[k] = (k == 0) ? Complex(acc.real(), 0.0) : 2.0 * acc;
    }
    return out;
}

/// Szego amplitude psi(z) = sqrt(L / 2 pi) * D(Phi(z))^{-1} * Phi'(z)^{1/2}.
/// The square root of Phi' takes the principal branch of Psi'; for the
/// built-in domains Re Psi' > 0 on the collar so this branch is continuous
/// along the boundary starting from theta = 0.
inline Complex psi_factor(const DomainSpec& domain, const OuterFunction& outer, double L,
                          Complex z) {
    const Complex w = exterior_map(domain, z);
    const Complex sqrt_phip = 1.0 / std::sqrt(domain.dpsi(w));
    return std::sqrt(L / tau) * sqrt_phip / outer.eval(w);
}

inline Complex psi_factor(const DomainSpec& domain, const OuterFunction& outer, Complex z) {
    return psi_factor(domain, outer, domain.length(), z);
}

} // namespace eqzero
