#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "conetheta/common.hpp"

namespace conetheta {

/// Real characteristics (alpha, beta) of the theta series
///   theta_{alpha,beta}(z, w) = sum_l exp(pi*i*(l+alpha)^2*w
///                                        + 2*pi*i*(l+alpha)*(z+beta)).
/// The canonical values are 0 and 1/2 but any finite reals are accepted.
struct ThetaChar {
    double alpha = 0.0;
    double beta = 0.0;
};

namespace detail {

// Log-magnitude bound for the |l| = k tail term at argument z: the Gaussian
// factor dominated by exp(-pi*Im(w)*(k-|alpha|)^2) times the worst-case
// oscillation growth exp(2*pi*(k+|alpha|)*|Im z|).
inline double theta_tail_log_bound(int k, double alpha, cplx z, cplx w) {
    const double aa = std::abs(alpha);
    const double g = -pi * w.imag() * (k - aa) * (k - aa);
    const double osc = two_pi * (k + aa) * std::abs(z.imag());
    return g + osc + std::log(2.0);
}

inline void check_theta_domain(cplx w) {
    if (!(w.imag() > 0.0))
        throw std::domain_error("theta: modular argument must have positive imaginary part");
    if (w.imag() < 0.05)
        throw std::domain_error("theta: Im of modular argument below 0.05 is not supported");
}

// Verifies the Gaussian tail rule exp(-pi*Im(w)*(N-1/2)^2) < tol/10 at the
// requested cutoff, extended with the oscillation factor for complex z.
inline void check_theta_cutoff(const ThetaChar& c, cplx z, const ModuliParams& p, cplx w) {
    const int n = p.series_cutoff;
    const double g0 = theta_tail_log_bound(n, c.alpha, z, w);
    const double g1 = theta_tail_log_bound(n + 1, c.alpha, z, w);
    if (!(g0 < std::log(p.tol / 10.0)) || !(g1 < g0 - std::log(2.0))) {
        throw std::runtime_error(
            "theta: series_cutoff " + std::to_string(n) +
            " cannot reach tol " + std::to_string(p.tol) +
            " at Im(w) = " + std::to_string(w.imag()) +
            "; raise series_cutoff or loosen tol");
    }
}

}  // namespace detail

/// Smallest cutoff satisfying the Gaussian tail rule for tolerance tol at a
/// modular argument with imaginary part im_w.
inline int theta_cutoff_for(double im_w, double tol) {
    int n = 2;
    while (std::exp(-pi * im_w * (n - 0.5) * (n - 0.5)) >= tol / 10.0 && n < 100000) ++n;
    return n;
}

/// theta_{alpha,beta}(z, w), truncated at |l| <= params.series_cutoff with
/// the symmetric summation order l = 0, +1, -1, +2, -2, ... and compensated
/// accumulation. Throws if w is outside the supported half-plane or the
/// cutoff cannot meet params.tol.
inline cplx theta(const ThetaChar& c, cplx z, const ModuliParams& params, cplx w) {
    detail::check_theta_domain(w);
    detail::check_theta_cutoff(c, z, params, w);
    auto term = [&](int l) {
        const double la = l + c.alpha;
        return std::exp(pi * iu * la * la * w + two_pi * iu * la * (z + c.beta));
    };
    KahanSum acc;
    acc.add(term(0));
    for (int l = 1; l <= params.series_cutoff; ++l) {
        acc.add(term(l));
        acc.add(term(-l));
    }
    return acc.value();
}

/// d/dz theta_{alpha,beta}(z, w), the term-by-term derivative of the series,
/// with the same truncation contract as theta(). Differentiation in z and in
/// the second characteristic agree since the series depends on z + beta.
inline cplx theta_dz(const ThetaChar& c, cplx z, const ModuliParams& params, cplx w) {
    detail::check_theta_domain(w);
    detail::check_theta_cutoff(c, z, params, w);
    auto term = [&](int l) {
        const double la = l + c.alpha;
        return two_pi * iu * la *
               std::exp(pi * iu * la * la * w + two_pi * iu * la * (z + c.beta));
    };
    KahanSum acc;
    acc.add(term(0));
    for (int l = 1; l <= params.series_cutoff; ++l) {
        acc.add(term(l));
        acc.add(term(-l));
    }
    return acc.value();
}

/// -pi * theta_{0,0}(0,w) * theta_{0,1/2}(0,w) * theta_{1/2,0}(0,w).
/// By the Jacobi derivative formula this equals d/dz theta_{1/2,1/2}(z,w)
/// at z = 0, and it never vanishes on the upper half-plane.
inline cplx jacobi_null_product(const ModuliParams& params, cplx w) {
    const cplx t00 = theta(ThetaChar{0.0, 0.0}, 0.0, params, w);
    const cplx t0h = theta(ThetaChar{0.0, 0.5}, 0.0, params, w);
    const cplx th0 = theta(ThetaChar{0.5, 0.0}, 0.0, params, w);
    return -pi * t00 * t0h * th0;
}

}  // namespace conetheta
