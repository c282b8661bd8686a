#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>

#include "conetheta/common.hpp"

namespace conetheta {

/// Identifies the stable bundle of rank n, degree a and modulus mu on the
/// torus C / 2*pi*(Z + tau*Z). The modulus is kept together with its exact
/// decomposition mu = p + q*tau in the (1, tau) basis.
struct BundleDescriptor {
    int n = 1;
    int a = 0;
    cplx mu{0.0, 0.0};
    double p = 0.0;
    double q = 0.0;
    cplx tau{0.0, 1.0};

    double slope() const { return static_cast<double>(a) / n; }
};

inline BundleDescriptor make_bundle(int n, int a, cplx mu, const ModuliParams& params) {
    params.validate();
    if (n <= 0) throw std::invalid_argument("make_bundle: rank must be positive");
    if (gcd_ll(n, a) != 1)
        throw std::invalid_argument("make_bundle: rank and degree must be coprime (gcd(n,0)=n)");
    BundleDescriptor b;
    b.n = n;
    b.a = a;
    b.mu = mu;
    b.tau = params.tau;
    auto [p, q] = basis_coords(mu, params.tau);
    b.p = p;
    b.q = q;
    const cplx recomposed = cplx(p, 0.0) + cplx(q, 0.0) * params.tau;
    if (std::abs(recomposed - mu) > 1e-14 * (1.0 + std::abs(mu)))
        throw std::runtime_error("make_bundle: basis decomposition of mu failed");
    return b;
}

/// Transition matrices of the bundle: U = diag(1, w, ..., w^{n-1}) with
/// w = exp(2*pi*i/n), V the cyclic shift with ones on the superdiagonal and
/// in the lower-left corner. The x-direction transition is exp((a/n)*i*y)*V
/// and the y-direction transition is U^{-a}; they satisfy U^n = V^n = I and
/// V*U = w*U*V, which is what makes the corner cocycle close up.
struct TransitionData {
    Eigen::MatrixXcd U;
    Eigen::MatrixXcd V;
    int n = 1;
    int a = 0;

    Eigen::MatrixXcd x_transition(double y) const {
        return std::exp(cplx(0.0, static_cast<double>(a) / n * y)) * V;
    }
    Eigen::MatrixXcd y_transition() const {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n, n);
        const int e = ((-a) % n + n) % n;
        for (int i = 0; i < n; ++i)
            m(i, i) = std::exp(two_pi * iu * cplx(static_cast<double>(i) * e / n, 0.0));
        return m;
    }
};

inline TransitionData transitions(const BundleDescriptor& b) {
    TransitionData t;
    t.n = b.n;
    t.a = b.a;
    t.U = Eigen::MatrixXcd::Zero(b.n, b.n);
    t.V = Eigen::MatrixXcd::Zero(b.n, b.n);
    for (int i = 0; i < b.n; ++i) {
        t.U(i, i) = std::exp(two_pi * iu * cplx(static_cast<double>(i) / b.n, 0.0));
        t.V(i, (i + 1) % b.n) = 1.0;
    }
    return t;
}

/// Local connection one-form coefficient: A = -(i/2pi) * s(x) * dy * I_n
/// with s(x) = (a/n) x + mu/n. The curvature coefficient is the constant
/// -(i/2pi)(a/n) dx^dy, whose first Chern integral over [0,2pi]^2 is a.
struct ConnectionData {
    const BundleDescriptor* bundle;

    cplx s(double x) const {
        return cplx(bundle->slope() * x, 0.0) + bundle->mu / static_cast<double>(bundle->n);
    }
    cplx curvature_coefficient() const {
        return -iu / two_pi * bundle->slope();
    }
    double degree_integral() const {
        // integral of c1 = (i/2pi) tr F over the fundamental square
        const cplx c1 = iu / two_pi * (curvature_coefficient() * static_cast<double>(bundle->n));
        return (c1 * two_pi * two_pi).real();
    }
};

namespace detail {

// Residual of the corner cocycle condition T_x(y + 2pi) * T_y == T_y * T_x(y)
// for given transition matrices, sampled over one fiber period.
inline double cocycle_residual(int n, int a, const Eigen::MatrixXcd& V,
                               const Eigen::MatrixXcd& Ty, int samples = 13) {
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double y = two_pi * k / samples + 0.1;
        const cplx fx = std::exp(cplx(0.0, static_cast<double>(a) / n * y));
        const cplx fx2 = std::exp(cplx(0.0, static_cast<double>(a) / n * (y + two_pi)));
        const Eigen::MatrixXcd lhs = (fx2 * V) * Ty;
        const Eigen::MatrixXcd rhs = Ty * (fx * V);
        worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace detail

inline bool cocycle_check(const BundleDescriptor& b) {
    const TransitionData t = transitions(b);
    return detail::cocycle_residual(b.n, b.a, t.V, t.y_transition()) < 1e-13;
}

/// (dim H^0, dim H^1) between two descriptors over the same tau.
/// For distinct (n,a) pairs this is the slope-stability count driven by
/// b*n - a*m; for equal pairs H^0 is 1 exactly when the moduli agree modulo
/// the lattice, and H^1 matches H^0 since the Euler characteristic vanishes.
inline std::pair<int, int> hom_dims(const BundleDescriptor& b1, const BundleDescriptor& b2) {
    if (std::abs(b1.tau - b2.tau) > 1e-12)
        throw std::invalid_argument("hom_dims: descriptors live over different moduli");
    const long long cross = static_cast<long long>(b2.a) * b1.n -
                            static_cast<long long>(b1.a) * b2.n;
    if (b1.n != b2.n || b1.a != b2.a) {
        const int h0 = cross > 0 ? static_cast<int>(cross) : 0;
        const int h1 = cross < 0 ? static_cast<int>(-cross) : 0;
        return {h0, h1};
    }
    const int h0 = is_lattice_point(b1.mu - b2.mu, b1.tau) ? 1 : 0;
    return {h0, h0};
}

inline bool iso_class_equal(const BundleDescriptor& b1, const BundleDescriptor& b2) {
    if (std::abs(b1.tau - b2.tau) > 1e-12) return false;
    if (b1.n != b2.n || b1.a != b2.a) return false;
    return is_lattice_point(b1.mu - b2.mu, b1.tau);
}

/// Explicit non-trivial holomorphic map E_{(a/n,mu/n)} -> E_{(a/n,nu/n)}
/// when the two are isomorphic: a scalar phase
/// exp(-(k/n) i x + i I y + ((l-1)/n) a i y) times a two-block matrix of
/// powers of w = exp(2*pi*i/n), where nu - mu = 2*pi*(n*I + a*(l-1)) +
/// 2*pi*k*tau fixes (l, I, k).
struct IsoWitness {
    int n = 1;
    int l = 1;   // block split position, 1..n
    int I = 0;   // surviving x-direction Fourier index
    int k = 0;   // lattice shift of the holonomy coefficient
    int a = 0;

    Eigen::MatrixXcd eval(double x, double y) const {
        const cplx pref = std::exp(iu * (-static_cast<double>(k) / n * x +
                                         static_cast<double>(I) * y +
                                         static_cast<double>(l - 1) / n * a * y));
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        auto omega_pow = [&](long long e) {
            return std::exp(two_pi * iu * cplx(static_cast<double>(e) / n, 0.0));
        };
        const int top = n - l + 1;  // order of the first block
        for (int r = 0; r < top; ++r)
            m(r, (l - 1) + r) = omega_pow(-static_cast<long long>(r) * k);
        for (int r = 0; r < l - 1; ++r)
            m(top + r, r) = omega_pow(-static_cast<long long>(top + r) * k);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) *= pref;
        return m;
    }
};

inline std::optional<IsoWitness> iso_witness(const BundleDescriptor& b1,
                                             const BundleDescriptor& b2) {
    if (!iso_class_equal(b1, b2)) return std::nullopt;
    auto [dp, dq] = basis_coords(b2.mu - b1.mu, b1.tau);
    const long long D = std::llround(dp / two_pi);
    const long long k = std::llround(dq / two_pi);
    // Solve D = n*I + a*(l-1) with l in 1..n; coprimality makes a invertible
    // mod n, and for a = 0 the rank is forced to 1 so l = 1 works.
    int l = 1;
    if (b1.n > 1) {
        long long ainv = 0;
        const long long am = ((b1.a % b1.n) + b1.n) % b1.n;
        for (long long c = 0; c < b1.n; ++c)
            if ((am * c) % b1.n == (1 % b1.n)) { ainv = c; break; }
        const long long Dm = ((D % b1.n) + b1.n) % b1.n;
        l = static_cast<int>((ainv * Dm) % b1.n) + 1;
    }
    const long long I = (D - static_cast<long long>(b1.a) * (l - 1)) / b1.n;
    IsoWitness w;
    w.n = b1.n;
    w.l = l;
    w.I = static_cast<int>(I);
    w.k = static_cast<int>(k);
    w.a = b1.a;
    return w;
}

}  // namespace conetheta
