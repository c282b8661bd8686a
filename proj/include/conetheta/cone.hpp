#pragma once

#include <Eigen/Dense>
#include <quadmath.h>

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include "conetheta/common.hpp"
#include "conetheta/theta.hpp"

namespace conetheta {

enum class BumpProfile { RaisedCosine, Quartic };

namespace detail {

inline double bump_profile_value(BumpProfile p, double w, double eps) {
    if (w <= -eps || w >= eps) return 0.0;
    const double u = w / eps;
    switch (p) {
        case BumpProfile::RaisedCosine: return 0.5 * (1.0 + std::cos(pi * u));
        case BumpProfile::Quartic: {
            const double v = 1.0 - u * u;
            return v * v;
        }
    }
    return 0.0;
}

template <typename F>
cplx adaptive_simpson_rec(const F& f, double a, double b, cplx fa, cplx fm, cplx fb,
                          cplx whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const cplx fl = f(0.5 * (a + m));
    const cplx fr = f(0.5 * (m + b));
    const cplx left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
    const cplx right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
    const cplx err = (left + right - whole) / 15.0;
    if (std::abs(err) <= tol || depth <= 0) {
        if (depth <= 0 && std::abs(err) > tol)
            throw std::runtime_error("adaptive_simpson: recursion depth exhausted before reaching tolerance");
        return left + right + err;
    }
    return adaptive_simpson_rec(f, a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
}

template <typename F>
cplx adaptive_simpson(const F& f, double a, double b, double tol, int maxdepth = 40) {
    const cplx fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const cplx whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, maxdepth);
}

// 7-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 7> gl7_x = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972, 0.0,
    0.4058451513773972, 0.7415311855993945, 0.9491079123427585};
inline constexpr std::array<double, 7> gl7_w = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189, 0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

template <typename F>
cplx gauss7(const F& f, double a, double b) {
    const double h = 0.5 * (b - a), m = 0.5 * (a + b);
    cplx acc{0.0, 0.0};
    for (int k = 0; k < 7; ++k) acc += gl7_w[k] * f(m + h * gl7_x[k]);
    return h * acc;
}

}  // namespace detail

/// The normalized partial integral theta_eps: a smooth complex-valued cutoff
/// that is exactly 0 below the bump support and exactly 1 above it,
///   theta_eps(w) = (1/normalizer) * int_{-eps}^{w} W(x0+u) B(u) du,
/// with W the Gaussian weight attached to the H = 0 intersection point.
/// Stored as a dense table with Hermite-cubic interpolation between nodes.
class CutoffIntegral {
  public:
    CutoffIntegral(double eps, double x0, cplx weight_quadratic, cplx weight_linear,
                   BumpProfile profile, int intervals = 4096)
        : eps_(eps), x0_(x0), wq_(weight_quadratic), wl_(weight_linear), profile_(profile) {
        const int m = intervals;
        nodes_.resize(m + 1);
        vals_.resize(m + 1);
        derivs_.resize(m + 1);
        const double h = 2.0 * eps / m;
        for (int k = 0; k <= m; ++k) nodes_[k] = -eps + h * k;
        std::vector<cplx> cum(m + 1);
        cum[0] = 0.0;
        auto f = [&](double u) { return integrand(u); };
        for (int k = 0; k < m; ++k)
            cum[k + 1] = cum[k] + detail::gauss7(f, nodes_[k], nodes_[k + 1]);
        normalizer_ = cum[m];
        if (std::abs(normalizer_) < 1e-14)
            throw std::runtime_error("CutoffIntegral: weighted bump integral is numerically degenerate");
        for (int k = 0; k <= m; ++k) {
            vals_[k] = cum[k] / normalizer_;
            derivs_[k] = integrand(nodes_[k]) / normalizer_;
        }
        vals_.front() = 0.0;
        vals_.back() = 1.0;
    }

    cplx eval(double w) const {
        if (w <= -eps_) return cplx(0.0, 0.0);
        if (w >= eps_) return cplx(1.0, 0.0);
        const double h = nodes_[1] - nodes_[0];
        int k = static_cast<int>((w - nodes_[0]) / h);
        if (k < 0) k = 0;
        if (k >= static_cast<int>(nodes_.size()) - 1) k = static_cast<int>(nodes_.size()) - 2;
        const double t = (w - nodes_[k]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * vals_[k] + h10 * h * derivs_[k] + h01 * vals_[k + 1] + h11 * h * derivs_[k + 1];
    }

    cplx integrand(double u) const {
        const double x = x0_ + u;
        return std::exp(wq_ * x * x + wl_ * x) * detail::bump_profile_value(profile_, u, eps_);
    }

    cplx normalizer() const { return normalizer_; }
    double epsilon() const { return eps_; }

  private:
    double eps_;
    double x0_;
    cplx wq_, wl_;  // weight exponent: exp(wq*x^2 + wl*x)
    BumpProfile profile_;
    cplx normalizer_;
    std::vector<double> nodes_;
    std::vector<cplx> vals_;
    std::vector<cplx> derivs_;
};

/// The degree-1 bump morphism psi between E_(0,mu) and E_(1,nu): one bump of
/// width eps per intersection point x_H = -2*pi*H + p - s, with the complex
/// amplitude fixed so the H = 0 weighted integral equals lambda_{tau,0}. The
/// translated integrals then match lambda_{tau,H} automatically, so a single
/// normalized cutoff function serves every H.
struct BumpMorphism {
    double epsilon = pi / 2;
    double p = 0, q = 0, s = 0, t = 0;
    cplx tau{0.0, 1.0};
    BumpProfile profile = BumpProfile::RaisedCosine;
    cplx amplitude{1.0, 0.0};
    cplx lambda0{1.0, 0.0};
    std::shared_ptr<const CutoffIntegral> theta_eps;

    double center(int H) const { return -two_pi * H + p - s; }

    double profile_value(double w) const {
        return detail::bump_profile_value(profile, w, epsilon);
    }

    cplx psi(double x, int H) const {
        return amplitude * profile_value(x - center(H));
    }

    // Gaussian weight of the Ext^1 pairing at index H.
    cplx weight(double x, int H) const {
        const cplx cH = cplx((-p + s) / two_pi, 0.0) + (t - q) / two_pi * tau + cplx(H, 0.0);
        return std::exp(-iu / tau * (x * x / (2.0 * two_pi) + cH * x));
    }

    // lambda_{tau,H} = exp((i/tau)(pi H^2 + (-p+s-q tau+t tau) H + lambda)),
    // lambda = -(pi/2) tau - pi/4 at the cone class v = q + t + pi.
    cplx lambda_H(int H) const {
        const cplx lin = cplx(-p + s, 0.0) + (t - q) * tau;
        const cplx lambda = -0.5 * pi * tau - cplx(pi / 4.0, 0.0);
        return std::exp(iu / tau * (pi * static_cast<double>(H) * H + lin * static_cast<double>(H) + lambda));
    }

    // Quadrature of the weighted bump at index H (test surface; the
    // construction guarantees this equals lambda_H).
    cplx weighted_integral(int H) const {
        const double xc = center(H);
        auto f = [&](double x) { return weight(x, H) * psi(x, H); };
        return detail::adaptive_simpson(f, xc - epsilon, xc + epsilon, 1e-13);
    }
};

inline BumpMorphism make_bump(double epsilon, cplx mu, cplx nu, const ModuliParams& params,
                              BumpProfile profile = BumpProfile::RaisedCosine) {
    params.validate();
    if (!(epsilon > 0.0 && epsilon < pi))
        throw std::domain_error("make_bump: epsilon must lie in (0, pi)");
    BumpMorphism b;
    b.epsilon = epsilon;
    b.tau = params.tau;
    b.profile = profile;
    auto [p, q] = basis_coords(mu, params.tau);
    auto [s, t] = basis_coords(nu, params.tau);
    b.p = p;
    b.q = q;
    b.s = s;
    b.t = t;

    const cplx wq = -iu / params.tau / (2.0 * two_pi);
    const cplx wl = -iu / params.tau *
                    (cplx((-p + s) / two_pi, 0.0) + (t - q) / two_pi * params.tau);
    auto table = std::make_shared<CutoffIntegral>(epsilon, b.center(0), wq, wl, profile);

    // Cross-check the table's fixed-order quadrature against an independent
    // adaptive pass; disagreement means the integrand was not resolved.
    auto f = [&](double u) { return table->integrand(u); };
    const cplx check = detail::adaptive_simpson(f, -epsilon, epsilon, 1e-13);
    if (std::abs(check - table->normalizer()) > 1e-11 * (1.0 + std::abs(check)))
        throw std::runtime_error("make_bump: bump quadrature failed to converge");

    b.lambda0 = b.lambda_H(0);
    b.amplitude = b.lambda0 / table->normalizer();
    b.theta_eps = std::move(table);
    return b;
}

/// The mapping cone of the bump morphism: the direct sum of the two line
/// bundles with the upper-triangular differential [[d0, psi], [0, d1]].
/// Its only non-trivial transition is diag(1, e^{i y}) across the base seam.
struct ConeData {
    cplx mu{pi, 0.0};  // modulus of the degree-0 summand
    cplx nu{0.0, 0.0};  // modulus of the degree-1 summand
    BumpMorphism psi;

    Eigen::Matrix2cd x_transition(double y) const {
        Eigen::Matrix2cd m;
        m << 1.0, 0.0, 0.0, std::exp(iu * y);
        return m;
    }
};

inline ConeData make_cone(cplx mu, cplx nu, double epsilon, const ModuliParams& params,
                          BumpProfile profile = BumpProfile::RaisedCosine) {
    return ConeData{mu, nu, make_bump(epsilon, mu, nu, params, profile)};
}

/// Shared evaluation parameters of the explicit cone morphisms.
struct FieldConfig {
    cplx tau{0.0, 1.0};
    double p = pi, q = 0, s = 0, t = 0;
    double epsilon = pi / 2;
    int cutoff = 25;
    double tol = 1e-10;
    BumpProfile profile = BumpProfile::RaisedCosine;

    ModuliParams moduli() const { return ModuliParams(tau, cutoff, tol); }
    cplx mu() const { return cplx(p, 0.0) + q * tau; }
    cplx nu() const { return cplx(s, 0.0) + t * tau; }
    // The cone class parameters, substituted unreduced into every series.
    double u() const { return p + s + pi; }
    double v() const { return q + t + pi; }
    cplx eta() const { return cplx(u(), 0.0) + v() * tau; }
};

/// One of the two explicit morphisms between E_(1/2,eta/2) and the cone:
/// Kind::Tilde is the map into the cone, Kind::Plain the map out of it.
/// Each matrix entry is a truncated theta-like series in the covering
/// coordinates; the entries that carry the cutoff integral are evaluated in
/// the subtracted form (bump cutoff minus its Gaussian-center reference),
/// which keeps every term bounded by a decaying Gaussian.
class MorphismField {
  public:
    enum class Kind { Tilde, Plain };

    MorphismField(Kind kind, const FieldConfig& cfg)
        : MorphismField(kind, cfg, make_bump(cfg.epsilon, cfg.mu(), cfg.nu(), cfg.moduli(), cfg.profile)) {}

    MorphismField(Kind kind, const FieldConfig& cfg, BumpMorphism bump)
        : kind_(kind), cfg_(cfg), bump_(std::move(bump)) {
        if (cfg_.cutoff < 10)
            throw std::invalid_argument("MorphismField: mode cutoff must be at least 10");
        const double kc = cfg_.tau.imag() / std::norm(cfg_.tau);
        // Mode tail of every component decays like exp(-2*pi*kc*I^2); refuse
        // configurations whose cutoff cannot reach the requested tolerance.
        if (std::exp(-two_pi * kc * (cfg_.cutoff - 1) * (cfg_.cutoff - 1)) > cfg_.tol / 10.0)
            throw std::runtime_error("MorphismField: cutoff too small for target tolerance");
        build_components();
    }

    Kind kind() const { return kind_; }
    const FieldConfig& config() const { return cfg_; }
    const BumpMorphism& bump() const { return bump_; }

    Eigen::Matrix2cd eval(double x, double y) const {
        Eigen::Matrix2cd m;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c) m(r, c) = component(r, c, x, y);
        return m;
    }

    cplx component(int r, int c, double x, double y) const {
        const Spec& sp = specs_[2 * r + c];
        KahanSum acc;
        for (int mode = -cfg_.cutoff; mode <= cfg_.cutoff; ++mode) {
            const cplx cf = coefficient_unprefixed(sp, mode, x);
            acc.add(cf * std::exp(iu * static_cast<double>(mode) * y));
        }
        cplx pre = sp.const_pref * std::exp(sp.x_lin * x);
        if (sp.half_mode) pre *= std::exp(0.5 * iu * y);
        return pre * acc.value();
    }

    /// Fourier coefficient of the (r,c) entry at the given integer mode:
    /// entry(x,y) = [exp(i y/2) if half-mode] * sum_mode coeff(mode,x) e^{i mode y}.
    cplx coefficient(int r, int c, int mode, double x) const {
        const Spec& sp = specs_[2 * r + c];
        return sp.const_pref * std::exp(sp.x_lin * x) * coefficient_unprefixed(sp, mode, x);
    }

  private:
    struct Spec {
        bool double_sum = false;
        double delta = 0.5;  // Gaussian center c = 2*mode + delta
        bool half_mode = false;
        cplx const_pref{1.0, 0.0};
        cplx x_lin{0.0, 0.0};
    };

    cplx coefficient_unprefixed(const Spec& sp, int mode, double x) const {
        const double xi = cfg_.q - cfg_.t;
        const cplx mode_phase = ((mode & 1) ? -1.0 : 1.0) *
                                std::exp(-iu * xi * static_cast<double>(mode));
        const double c = 2.0 * mode + sp.delta;
        if (!sp.double_sum) {
            const double X = x - two_pi * c - (cfg_.p - cfg_.s);
            return mode_phase * std::exp(-iu / (4.0 * two_pi * cfg_.tau) * X * X);
        }
        return mode_phase * bracket_sum(c, x);
    }

    // sum_H (-1)^H exp(-(pi i/tau)(H-c)^2 + (i/8 pi tau) X^2)
    //       * [theta_eps(x - x_H) - theta_eps(X)],   X = x + 2 pi c - (p - s).
    // The bracket vanishes identically outside a window of H values, and the
    // combined exponent has non-positive growth, so terms are generated only
    // where they matter and never overflow.
    cplx bracket_sum(double c, double x) const {
        const double ps = cfg_.p - cfg_.s;
        const double X = x + two_pi * c - ps;
        const cplx ref = bump_.theta_eps->eval(X);
        const cplx quad = -pi * iu / cfg_.tau;                       // (H-c)^2 factor
        const cplx xg = iu / (4.0 * two_pi * cfg_.tau) * (X * X);    // constant in H
        auto term = [&](int H) -> cplx {
            const cplx th = bump_.theta_eps->eval(x + two_pi * H - ps);
            const cplx dtheta = th - ref;
            if (dtheta == cplx(0.0, 0.0)) return cplx(0.0, 0.0);
            const double d = H - c;
            const cplx w = quad * (d * d) + xg;
            if (w.real() < -700.0) return cplx(0.0, 0.0);
            return ((H & 1) ? -1.0 : 1.0) * std::exp(w) * dtheta;
        };
        const double kc = cfg_.tau.imag() / std::norm(cfg_.tau);
        const int W = static_cast<int>(std::ceil(std::sqrt(60.0 / (pi * kc)))) + 2;
        KahanSum acc;
        if (ref == cplx(1.0, 0.0) || ref == cplx(0.0, 0.0)) {
            // Saturated reference: walk away from the bump window until the
            // Gaussian tail is spent. dtheta == 0 cuts the other direction.
            const int Hhi = static_cast<int>(std::floor((ps - x + cfg_.epsilon) / two_pi)) + 1;
            const int Hlo = static_cast<int>(std::ceil((ps - x - cfg_.epsilon) / two_pi)) - 1;
            const int guard = 4 * cfg_.cutoff + 64;
            if (ref == cplx(1.0, 0.0)) {
                for (int H = Hhi; H >= Hhi - guard; --H) {
                    const cplx t = term(H);
                    acc.add(t);
                    if (H < Hlo && H < c - W) break;
                }
            } else {
                for (int H = Hlo; H <= Hlo + guard; ++H) {
                    const cplx t = term(H);
                    acc.add(t);
                    if (H > Hhi && H > c + W) break;
                }
            }
        } else {
            const int lo = static_cast<int>(std::floor(c)) - W;
            const int hi = static_cast<int>(std::ceil(c)) + W;
            for (int H = lo; H <= hi; ++H) acc.add(term(H));
        }
        return acc.value();
    }

    void build_components() {
        const double xi = cfg_.q - cfg_.t;
        const double ps = cfg_.p - cfg_.s;
        const cplx tau = cfg_.tau;
        const cplx kappa = (std::conj(tau) - tau) / (2.0 * tau);
        const cplx g_minus = std::exp(-iu / (4.0 * two_pi * tau) * (ps - pi) * (ps - pi));
        const cplx g_plus = std::exp(-iu / (4.0 * two_pi * tau) * (ps + pi) * (ps + pi));
        const cplx hol = std::exp(-0.5 * iu * xi);
        const cplx lin_m = -iu / (2.0 * two_pi) * (xi - pi);  // e^{-(i/4pi)(xi-pi)x}
        const cplx lin_p = -iu / (2.0 * two_pi) * (xi + pi);

        auto single = [&](double delta, cplx pref, cplx lin, bool half) {
            Spec s;
            s.double_sum = false;
            s.delta = delta;
            s.const_pref = pref;
            s.x_lin = lin;
            s.half_mode = half;
            return s;
        };
        auto doubled = [&](double delta, cplx pref, cplx lin, bool half) {
            Spec s = single(delta, pref, lin, half);
            s.double_sum = true;
            return s;
        };

        if (kind_ == Kind::Tilde) {
            specs_[0] = doubled(0.5, -kappa * iu * g_minus, lin_m, false);             // 11
            specs_[1] = doubled(1.5, -kappa * g_minus * hol, lin_m, true);             // 12
            specs_[2] = single(0.5, 1.0 / g_plus, -lin_p, false);                      // 21
            specs_[3] = single(1.5, -iu / g_plus * hol, -lin_p, true);                 // 22
        } else {
            specs_[0] = single(-0.5, 1.0 / g_minus, -lin_m, false);                    // 11
            specs_[1] = doubled(-0.5, kappa * iu * g_plus, lin_p, false);              // 12
            // The x-linear rate of the (2,1) entry is mode-independent and
            // equals the (1,1) one; the coefficient relation
            // 21_P(x + 2 pi) = 11_P(x) fixes it to (xi - pi).
            specs_[2] = single(0.5, iu / g_minus * hol, -lin_m, true);                 // 21
            specs_[3] = doubled(0.5, -kappa * g_plus * hol, lin_p, true);              // 22
        }
    }

    Kind kind_;
    FieldConfig cfg_;
    BumpMorphism bump_;
    std::array<Spec, 4> specs_;
};

/// Evaluate the morphism into the cone at one covering-plane point.
inline Eigen::Matrix2cd phi_tilde(std::array<double, 2> point, const FieldConfig& cfg) {
    return MorphismField(MorphismField::Kind::Tilde, cfg).eval(point[0], point[1]);
}

/// Evaluate the morphism out of the cone at one covering-plane point.
inline Eigen::Matrix2cd phi(std::array<double, 2> point, const FieldConfig& cfg) {
    return MorphismField(MorphismField::Kind::Plain, cfg).eval(point[0], point[1]);
}

enum class CTauRoute { Direct, Jacobi };

/// The scalar c_tau with phi*phi_tilde = c_tau * I. Direct route sums the
/// alternating derivative series; the Jacobi route goes through the triple
/// theta-null product.
inline cplx c_tau(const ModuliParams& params, CTauRoute route) {
    params.validate();
    const cplx tau = params.tau;
    const cplx w = -1.0 / tau;
    if (route == CTauRoute::Jacobi)
        return -(std::conj(tau) - tau) / (4.0 * pi * tau) * iu * jacobi_null_product(params, w);
    const double imw = w.imag();
    const int L = params.series_cutoff;
    if (std::exp(-pi * imw * (L - 0.5) * (L - 0.5)) * (2.0 * L + 1.0) >= params.tol / 10.0)
        throw std::runtime_error("c_tau: series_cutoff too small for tol at this tau");
    KahanSum acc;
    auto term = [&](int l) {
        const double lh = l + 0.5;
        return ((l & 1) ? -1.0 : 1.0) * (2.0 * l + 1.0) *
               std::exp(-pi * iu / tau * lh * lh);
    };
    acc.add(term(0));
    for (int l = 1; l <= L; ++l) {
        acc.add(term(l));
        acc.add(term(-l));
    }
    return (std::conj(tau) - tau) / (4.0 * tau) * iu * acc.value();
}

/// Representative of mu + nu + pi + pi*tau with both lattice coefficients
/// reduced to [0, 2*pi).
inline cplx eta_class(cplx mu, cplx nu, const ModuliParams& params) {
    return lattice_reduce(mu + nu + cplx(pi, 0.0) + pi * params.tau, params.tau);
}

struct GridResidualRow {
    double x, y;
    std::array<double, 4> res;  // per-entry residual of phi*phi_tilde - c I
};

struct ConeReport {
    cplx eta_used{0.0, 0.0};
    cplx c_tau_direct{0.0, 0.0};
    cplx c_tau_jacobi{0.0, 0.0};
    cplx normalizer{1.0, 0.0};  // principal sqrt(c_tau); phi/normalizer is unitary-normalized
    double residual_phi_phitilde = 0.0;
    double residual_phitilde_phi = 0.0;
    double offdiag_max = 0.0;
    double diag_spread_max = 0.0;
    bool applicable = true;
    bool verdict = false;
};

/// Full verification of the mapping-cone isomorphism at one configuration:
/// evaluates phi*phi_tilde and phi_tilde*phi over a uniform grid on the
/// fundamental square and compares both against c_tau * I.
inline ConeReport verify_cone(cplx mu, cplx nu, const ModuliParams& params, int grid, int cutoff,
                              double tol, BumpProfile profile = BumpProfile::RaisedCosine,
                              std::vector<GridResidualRow>* dump = nullptr) {
    if (grid < 16) throw std::invalid_argument("verify_cone: grid must be at least 16x16");
    if (tol < 1e-8) throw std::invalid_argument("verify_cone: tol below 1e-8 is not supported");
    FieldConfig cfg;
    cfg.tau = params.tau;
    auto [p, q] = basis_coords(mu, params.tau);
    auto [s, t] = basis_coords(nu, params.tau);
    cfg.p = p;
    cfg.q = q;
    cfg.s = s;
    cfg.t = t;
    cfg.cutoff = cutoff;
    cfg.tol = params.tol;
    cfg.profile = profile;

    BumpMorphism bump = make_bump(cfg.epsilon, mu, nu, params, profile);
    const MorphismField tilde(MorphismField::Kind::Tilde, cfg, bump);
    const MorphismField plain(MorphismField::Kind::Plain, cfg, bump);

    ConeReport rep;
    rep.eta_used = eta_class(mu, nu, params);
    rep.c_tau_direct = c_tau(params, CTauRoute::Direct);
    rep.c_tau_jacobi = c_tau(params, CTauRoute::Jacobi);
    rep.normalizer = std::sqrt(rep.c_tau_direct);
    const cplx c = rep.c_tau_direct;

    const Eigen::Matrix2cd cI = c * Eigen::Matrix2cd::Identity();
    for (int i = 0; i < grid; ++i) {
        const double x = two_pi * i / grid;
        for (int j = 0; j < grid; ++j) {
            const double y = two_pi * j / grid;
            const Eigen::Matrix2cd ft = tilde.eval(x, y);
            const Eigen::Matrix2cd f = plain.eval(x, y);
            const Eigen::Matrix2cd prod1 = f * ft;
            const Eigen::Matrix2cd prod2 = ft * f;
            const Eigen::Matrix2cd r1 = prod1 - cI;
            const Eigen::Matrix2cd r2 = prod2 - cI;
            rep.residual_phi_phitilde = std::max(rep.residual_phi_phitilde, r1.cwiseAbs().maxCoeff());
            rep.residual_phitilde_phi = std::max(rep.residual_phitilde_phi, r2.cwiseAbs().maxCoeff());
            rep.offdiag_max = std::max({rep.offdiag_max, std::abs(prod1(0, 1)), std::abs(prod1(1, 0)),
                                        std::abs(prod2(0, 1)), std::abs(prod2(1, 0))});
            rep.diag_spread_max = std::max({rep.diag_spread_max, std::abs(prod1(0, 0) - prod1(1, 1)),
                                            std::abs(prod2(0, 0) - prod2(1, 1))});
            if (dump)
                dump->push_back({x, y,
                                 {std::abs(r1(0, 0)), std::abs(r1(0, 1)), std::abs(r1(1, 0)),
                                  std::abs(r1(1, 1))}});
        }
    }
    rep.verdict = rep.residual_phi_phitilde < tol && rep.residual_phitilde_phi < tol &&
                  rep.offdiag_max < tol && rep.diag_spread_max < tol &&
                  std::abs(rep.c_tau_direct) > 1e-8;
    return rep;
}

/// y-Fourier magnitudes of det(phi_tilde): the determinant has a single
/// surviving half-shifted mode, det = e^{i y/2} Phi_a(x) e^{i a y} with
/// a = -1 and Phi_{-1} proportional to e^{i x/2}.
inline std::map<int, double> det_spectrum(const MorphismField& tilde,
                                          const std::vector<double>& xs, int mode_range = 6,
                                          int y_samples = 256) {
    std::map<int, double> mag;
    for (int a = -mode_range; a <= mode_range; ++a) mag[a] = 0.0;
    for (double x : xs) {
        std::vector<cplx> f(y_samples);
        for (int j = 0; j < y_samples; ++j) {
            const double y = two_pi * j / y_samples;
            const Eigen::Matrix2cd m = tilde.eval(x, y);
            f[j] = (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)) * std::exp(-0.5 * iu * y);
        }
        for (int a = -mode_range; a <= mode_range; ++a) {
            KahanSum acc;
            for (int j = 0; j < y_samples; ++j) {
                const double y = two_pi * j / y_samples;
                acc.add(f[j] * std::exp(-iu * static_cast<double>(a) * y));
            }
            mag[a] = std::max(mag[a], std::abs(acc.value()) / y_samples);
        }
    }
    return mag;
}

/// Complex profile of one det mode across x-samples (used to test the
/// e^{i x/2} law of the surviving mode).
inline std::vector<cplx> det_mode_profile(const MorphismField& tilde, int a,
                                          const std::vector<double>& xs, int y_samples = 256) {
    std::vector<cplx> out;
    out.reserve(xs.size());
    for (double x : xs) {
        KahanSum acc;
        for (int j = 0; j < y_samples; ++j) {
            const double y = two_pi * j / y_samples;
            const Eigen::Matrix2cd m = tilde.eval(x, y);
            const cplx d = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            acc.add(d * std::exp(-iu * (0.5 + a) * y));
        }
        out.push_back(acc.value() / static_cast<double>(y_samples));
    }
    return out;
}

namespace detail {

// Minimal complex arithmetic over __float128. The determinant identity sums
// terms of magnitude up to exp(pi*a^2*Im(tau)/|tau|^2) that cancel exactly,
// which is out of reach of double accumulation for |a| >= 2.
struct qcplx {
    __float128 re, im;
};

inline qcplx qmul(qcplx a, qcplx b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline qcplx qadd(qcplx a, qcplx b) { return {a.re + b.re, a.im + b.im}; }
inline qcplx qexp(qcplx z) {
    const __float128 m = expq(z.re);
    return {m * cosq(z.im), m * sinq(z.im)};
}
inline qcplx qfrom(cplx z) { return {static_cast<__float128>(z.real()), static_cast<__float128>(z.imag())}; }
inline qcplx qinv(qcplx z) {
    const __float128 d = z.re * z.re + z.im * z.im;
    return {z.re / d, -z.im / d};
}

}  // namespace detail

/// The double-sum vanishing identity behind the determinant computation:
///   sum_k e^{2 pi i k a / tau} sum_l (-1)^l e^{-(pi i/tau)(l+1/2)^2}
///     [theta_eps(x + 2 pi k + 2 pi l - (p-s)) - theta_eps(x + 2 pi k - (p-s) - pi)]
/// equals 0 for every nonzero integer a; with allow_a0 the hypothesis-violating
/// a = 0 value is returned instead (it equals half the c_tau series).
/// The cutoff values are read once per integer argument so equal arguments
/// share bitwise-equal samples, and the accumulation runs in quad precision;
/// both are needed because the terms cancel across k at a scale far above
/// the final value. The cancellation scale grows like
/// exp(pi a^2 Im(tau)/|tau|^2), so the residual floor rises with |a|:
/// about 1e-9 for |a| = 3 at Im(tau)/|tau|^2 near 1.1, and unusable well
/// before |a| = 6.
inline cplx identity_id_sum(int a, const BumpMorphism& bump, const ModuliParams& params, double x,
                            bool allow_a0 = false) {
    if (a == 0 && !allow_a0)
        throw std::invalid_argument("identity_id_sum: a must be a nonzero integer");
    const cplx tau = params.tau;
    const double ps = bump.p - bump.s;
    const double kc = tau.imag() / std::norm(tau);
    const int W = static_cast<int>(std::ceil(std::sqrt(80.0 / (pi * kc)))) + 2;
    const int K = std::abs(a) + W + 6;
    const int L = W + std::abs(a) + 2;
    const auto& th = *bump.theta_eps;

    // theta_eps at x + 2*pi*j - (p-s), indexed by j = k + l.
    std::vector<cplx> th1(2 * (K + L) + 1);
    for (int j = -(K + L); j <= K + L; ++j)
        th1[j + K + L] = th.eval(x + two_pi * j - ps);
    std::vector<cplx> th2(2 * K + 1);
    for (int k = -K; k <= K; ++k)
        th2[k + K] = th.eval(x + two_pi * k - ps - pi);

    const detail::qcplx qtau = detail::qfrom(tau);
    const detail::qcplx inv_tau = detail::qinv(qtau);
    const __float128 qpi = 2 * acosq(0);
    detail::qcplx total{0, 0};
    for (int k = -K; k <= K; ++k) {
        const cplx ref = th2[k + K];
        for (int l = -L; l <= L; ++l) {
            const cplx dtheta = th1[k + l + K + L] - ref;
            if (dtheta == cplx(0.0, 0.0)) continue;
            // exponent: 2*pi*i*k*a/tau - pi*i*(l+1/2)^2/tau
            const __float128 lh = static_cast<__float128>(l) + static_cast<__float128>(0.5);
            const __float128 coef = 2 * qpi * k * a - qpi * lh * lh;
            detail::qcplx e = detail::qmul({0, coef}, inv_tau);
            if (static_cast<double>(e.re) < -11000.0) continue;
            detail::qcplx t = detail::qmul(detail::qexp(e), detail::qfrom(dtheta));
            if (l & 1) t = {-t.re, -t.im};
            total = detail::qadd(total, t);
        }
    }
    return cplx(static_cast<double>(total.re), static_cast<double>(total.im));
}

}  // namespace conetheta
