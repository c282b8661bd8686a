#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "conetheta/common.hpp"
#include "conetheta/theta.hpp"

namespace conetheta {

/// An affine Lagrangian brane on the symplectic torus: the line
/// y = (a/n) x + p/n carrying a flat U(1) connection d - (i/2pi)(q/n) dx.
/// The pair (p, q) is shared verbatim with the mirror bundle modulus
/// mu = p + q*tau.
struct BraneDescriptor {
    int n = 1;
    int a = 0;
    double p = 0.0;
    double q = 0.0;

    double slope() const { return static_cast<double>(a) / n; }
    double position() const { return p / n; }
    double holonomy() const { return q / n; }
};

inline BraneDescriptor make_brane(int n, int a, double p, double q) {
    if (n <= 0) throw std::invalid_argument("make_brane: winding n must be positive");
    if (gcd_ll(n, a) != 1)
        throw std::invalid_argument("make_brane: (n, a) must be coprime");
    return BraneDescriptor{n, a, p, q};
}

/// Intersection points of two branes inside the fundamental square
/// [0, 2pi)^2; there are exactly |b*n - a*m| of them for distinct slopes.
inline std::vector<std::array<double, 2>> intersections(const BraneDescriptor& l1,
                                                        const BraneDescriptor& l2) {
    const long long cross = static_cast<long long>(l2.a) * l1.n -
                            static_cast<long long>(l1.a) * l2.n;
    if (cross == 0)
        throw std::invalid_argument(
            "intersections: equal slopes are non-transversal; use the m3 structure constant");
    const long long count = std::llabs(cross);
    std::vector<std::array<double, 2>> pts;
    pts.reserve(count);
    // (a1/n1 - a2/n2) x = p2/n2 - p1/n1 + 2 pi k
    const double dslope = l1.slope() - l2.slope();
    const double off = l2.position() - l1.position();
    for (long long k = 0; k < count; ++k) {
        double x = (off + two_pi * k) / dslope;
        x -= two_pi * std::floor(x / two_pi);
        double y = l1.slope() * x + l1.position();
        y -= two_pi * std::floor(y / two_pi);
        pts.push_back({x, y});
    }
    return pts;
}

/// Holonomy of the brane's flat connection along a straight edge lying on
/// one of the brane's covering-plane lifts: exp((i/2pi)(q/n) * dx).
inline cplx holonomy_factor(const BraneDescriptor& brane, std::array<double, 2> from,
                            std::array<double, 2> to) {
    const double period = two_pi / brane.n;  // lift offsets of the immersed circle
    auto offset = [&](std::array<double, 2> pt) {
        const double r = pt[1] - brane.slope() * pt[0] - brane.position();
        return r - period * std::round(r / period);
    };
    if (std::abs(offset(from)) > 1e-10 || std::abs(offset(to)) > 1e-10)
        throw std::invalid_argument("holonomy_factor: edge endpoints are off the brane line");
    const double dx = to[0] - from[0];
    if (std::abs((to[1] - from[1]) - brane.slope() * dx) > 1e-10 * (1.0 + std::abs(dx)))
        throw std::invalid_argument("holonomy_factor: edge is not parallel to the brane");
    return std::exp(iu / two_pi * brane.holonomy() * dx);
}

/// One member of the triangle family bounded by the slope-{0, 1, 1/2}
/// branes and their covering-plane copies.
struct TriangleDatum {
    int index = 0;                                   // family member n
    std::array<std::array<double, 2>, 3> vertices;   // e1, e2, e3 order
    double area_euclid = 0.0;
    cplx area_sympl{0.0, 0.0};                       // -(1/tau) * euclidean area
    cplx holonomy{1.0, 0.0};                         // boundary path product
    int sign = 1;                                    // (-1)^index pair parity
    cplx term{0.0, 0.0};                             // contribution to m2
};

/// Positions and holonomies of the three-brane configuration entering the
/// degree-one product: L_(0,p), L_(1,s) and the middle brane L_(1/2,u/2)
/// with holonomy v/2.
struct TriangleConfig {
    double p = pi, q = 0.0;
    double s = 0.0, t = 0.0;
    double u = 0.0, v = 0.0;
};

/// Enumerate the triangles with vertices e1 = L_(1/2) cap L_(1,s),
/// e2 = L_(1,s) cap L_(0,p), e3 = L_(1/2) cap L_(0,p) in the covering
/// plane. Member k is bounded by the lift y = x/2 + u/2 + pi*k; its base
/// length is |u - p - s + 2 pi k| and its Euclidean area is base^2/2.
inline std::vector<TriangleDatum> enumerate_triangles(const TriangleConfig& c,
                                                      const ModuliParams& params, int range) {
    params.validate();
    const BraneDescriptor l0 = make_brane(1, 0, c.p, c.q);
    const BraneDescriptor l1 = make_brane(1, 1, c.s, c.t);
    const BraneDescriptor lh = make_brane(2, 1, c.u, c.v);
    const bool on_class = std::abs(std::remainder(c.u - c.p - c.s - pi, two_pi)) < 1e-9;
    std::vector<TriangleDatum> out;
    out.reserve(2 * range + 1);
    for (int k = -range; k <= range; ++k) {
        TriangleDatum tr;
        const double beta = c.u - c.p - c.s + two_pi * k;
        // e2 is shared by every member; e3 and e1 move with the lift index.
        const std::array<double, 2> e2 = {c.p - c.s, c.p};
        const std::array<double, 2> e3 = {2.0 * c.p - c.u - two_pi * k, c.p};
        const std::array<double, 2> e1 = {c.u - 2.0 * c.s + two_pi * k,
                                          c.u - c.s + two_pi * k};
        tr.vertices = {e1, e2, e3};
        tr.index = on_class ? static_cast<int>(std::lround((beta - pi) / two_pi)) : k;
        tr.sign = (tr.index % 2 == 0) ? 1 : -1;
        // Shoelace area from the vertex coordinates.
        tr.area_euclid = 0.5 * std::abs((e2[0] - e1[0]) * (e3[1] - e1[1]) -
                                        (e3[0] - e1[0]) * (e2[1] - e1[1]));
        tr.area_sympl = -tr.area_euclid / params.tau;
        const cplx h1 = holonomy_factor(l1, e1, e2);
        const cplx h0 = holonomy_factor(l0, e2, e3);
        const cplx hh = holonomy_factor(lh, e3, e1);
        tr.holonomy = h1 * h0 * hh;
        tr.term = std::exp(iu / two_pi * tr.area_sympl) * tr.holonomy;
        out.push_back(tr);
    }
    return out;
}

enum class M2Route { Triangles, ClosedForm };

/// Structure constant of the degree-one product on the three-brane
/// configuration. The triangle route sums exp((i/2pi) * symplectic area)
/// times the boundary holonomy over the family; the closed form evaluates
///   sum_k exp(-(i/4 pi tau) beta_k^2 + (i/2pi)(v - q - t) beta_k),
/// beta_k = u - p - s + 2 pi k, the same series organized by base length.
/// At u = p+s+pi, v = q+t+pi this is the vanishing theta null.
inline cplx m2_constant(const TriangleConfig& c, const ModuliParams& params, M2Route route) {
    params.validate();
    const int range = params.series_cutoff;
    KahanSum acc;
    if (route == M2Route::Triangles) {
        for (const TriangleDatum& tr : enumerate_triangles(c, params, range)) acc.add(tr.term);
        return acc.value();
    }
    auto term = [&](int k) {
        const double beta = c.u - c.p - c.s + two_pi * k;
        return std::exp(-iu / (2.0 * two_pi * params.tau) * beta * beta +
                        iu / two_pi * (c.v - c.q - c.t) * beta);
    };
    acc.add(term(0));
    for (int k = 1; k <= range; ++k) {
        acc.add(term(k));
        acc.add(term(-k));
    }
    return acc.value();
}

/// Structure constant of the non-transversal triple product at the unique
/// self-intersection datum: sum_l (-1)^l pi (2l+1)
/// exp((i/2pi)(-1/tau)(pi^2/2)(2l+1)^2), the negative of the theta
/// derivative null at -1/tau. The l-th coefficient pi(2l+1) is the base
/// edge length of the l-th triangle.
inline cplx m3_nontransversal_constant(const ModuliParams& params) {
    params.validate();
    const cplx w = -1.0 / params.tau;
    const int L = params.series_cutoff;
    if (std::exp(-pi * w.imag() * (L - 0.5) * (L - 0.5)) * (2.0 * L + 1.0) >= params.tol / 10.0)
        throw std::runtime_error("m3_nontransversal_constant: cutoff too small for tol");
    KahanSum acc;
    auto term = [&](int l) {
        const double tl = 2.0 * l + 1.0;
        return ((l & 1) ? -1.0 : 1.0) * pi * tl *
               std::exp(iu / two_pi * w * (pi * pi / 2.0) * tl * tl);
    };
    acc.add(term(0));
    for (int l = 1; l <= L; ++l) {
        acc.add(term(l));
        acc.add(term(-l));
    }
    return acc.value();
}

}  // namespace conetheta
