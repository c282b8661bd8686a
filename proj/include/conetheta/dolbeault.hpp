#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "conetheta/bundle.hpp"
#include "conetheta/common.hpp"
#include "conetheta/cone.hpp"

namespace conetheta {

/// Result of a numerical kernel-dimension computation: the dimension after
/// growth screening, the singular values that produced it, and whether the
/// spectral gaps were clean enough to trust the answer.
struct KernelEstimate {
    int dimension = 0;
    int nullity = 0;  // before growth screening
    std::vector<double> singular_values;  // descending, row-normalized system
    double threshold = 0.0;
    double spectral_gap = std::numeric_limits<double>::infinity();
    double screening_gap = std::numeric_limits<double>::infinity();
    bool conclusive = true;
    std::string note;
};

namespace detail {

// Fixed-step RK4 for a small linear system v' = deriv(x, v) over [0, 2pi].
inline std::vector<cplx> rk4_propagate(
    const std::function<std::vector<cplx>(double, const std::vector<cplx>&)>& deriv,
    std::vector<cplx> v, int steps) {
    const double h = two_pi / steps;
    const auto axpy = [](const std::vector<cplx>& a, double c, const std::vector<cplx>& b) {
        std::vector<cplx> r(a.size());
        for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + c * b[i];
        return r;
    };
    for (int s = 0; s < steps; ++s) {
        const double x = h * s;
        const auto k1 = deriv(x, v);
        const auto k2 = deriv(x + 0.5 * h, axpy(v, 0.5 * h, k1));
        const auto k3 = deriv(x + 0.5 * h, axpy(v, 0.5 * h, k2));
        const auto k4 = deriv(x + h, axpy(v, h, k3));
        for (size_t i = 0; i < v.size(); ++i)
            v[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return v;
}

// Nullity of the boundary-condition system with growth screening: kernel
// directions whose mass concentrates within three base translates of the
// truncation edge are artifacts of solutions that diverge on the covering
// plane, so they are rejected (the decay condition as a boundary-fraction
// test).
inline KernelEstimate kernel_estimate(Eigen::MatrixXcd rows, const std::vector<int>& boundary_idx) {
    KernelEstimate est;
    const int D = static_cast<int>(rows.cols());
    const int E = static_cast<int>(rows.rows());
    for (int r = 0; r < E; ++r) {
        const double nrm = rows.row(r).norm();
        if (nrm > 0.0) rows.row(r) /= nrm;
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(rows, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    est.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    est.threshold = 1e-6 * smax;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > est.threshold) ++rank;
    const int nullity = D - rank;
    est.nullity = nullity;
    if (rank > 0 && rank < sv.size()) {
        est.spectral_gap = sv(rank - 1) / std::max(sv(rank), 1e-300);
        if (est.spectral_gap < 10.0) {
            est.conclusive = false;
            est.note = "no spectral gap between retained and discarded singular values";
        }
    }
    if (nullity == 0) {
        est.dimension = 0;
        return est;
    }

    const Eigen::MatrixXcd kernel = svd.matrixV().rightCols(nullity);
    Eigen::MatrixXcd bnd(boundary_idx.size(), nullity);
    for (size_t r = 0; r < boundary_idx.size(); ++r) bnd.row(r) = kernel.row(boundary_idx[r]);
    Eigen::JacobiSVD<Eigen::MatrixXcd> bsvd(bnd);
    const auto& bsv = bsvd.singularValues();
    // Kernel columns are orthonormal, so these singular values are the
    // extremal boundary-mass fractions over the kernel subspace.
    const double reject_frac = 1e-3;
    int rejected = 0;
    while (rejected < bsv.size() && bsv(rejected) >= reject_frac) ++rejected;
    est.dimension = nullity - rejected;
    if (rejected > 0 && rejected < bsv.size()) {
        est.screening_gap = bsv(rejected - 1) / std::max(bsv(rejected), 1e-300);
        if (est.screening_gap < 10.0) {
            est.conclusive = false;
            est.note = "growth screening could not separate kernel directions";
        }
    }
    return est;
}

}  // namespace detail

/// Truncated per-mode discretization of a Hom space: which component/mode
/// pairs are retained, how one base translate permutes them, and which of
/// them sit close enough to the truncation edge to be flagged as boundary.
/// The translate map is a bijection on the retained set except where it
/// walks out of the mode range.
struct FourierModeSystem {
    int m = 1, n = 1;  // target and source ranks
    int a = 0, b = 0;  // source and target degrees
    int N = 12;        // retained modes I in [-N, N]

    int modes() const { return 2 * N + 1; }
    int size() const { return m * n * modes(); }
    int index(int i, int j, int I) const { return (i * n + j) * modes() + (I + N); }
    int shift(int i, int j) const { return (j == n - 1 ? a : 0) - (i == m - 1 ? b : 0); }

    struct Key {
        int i, j, I;
    };
    Key successor(Key k) const {
        return {(k.i + 1) % m, (k.j + 1) % n, k.I + shift(k.i, k.j)};
    }
    Key predecessor(Key k) const {
        const int pi_ = (k.i + m - 1) % m, pj = (k.j + n - 1) % n;
        return {pi_, pj, k.I - shift(pi_, pj)};
    }
    bool in_range(Key k) const { return std::abs(k.I) <= N; }

    // Within three base translates of leaving the retained range, in either
    // direction; this is where truncation artifacts of divergent solutions
    // concentrate.
    bool is_boundary(Key k) const {
        if (std::abs(k.I) >= N - 2) return true;
        Key f = k, p = k;
        for (int step = 0; step < 3; ++step) {
            f = successor(f);
            p = predecessor(p);
            if (!in_range(f) || !in_range(p)) return true;
        }
        return false;
    }
};

/// Brute-force dim H^0(B1, B2): expand morphisms in fiber Fourier modes,
/// integrate each per-mode holomorphy ODE across one base period with RK4,
/// and impose the transition-permutation boundary conditions as a linear
/// system whose numerical kernel is the space of global sections.
inline KernelEstimate solve_h0(const BundleDescriptor& b1, const BundleDescriptor& b2, int N = 12,
                               int steps = 512) {
    if (std::abs(b1.tau - b2.tau) > 1e-12)
        throw std::invalid_argument("solve_h0: descriptors live over different moduli");
    if (b1.n > 3 || b2.n > 3)
        throw std::invalid_argument("solve_h0: ranks above 3 are out of scope");
    const long long cross = static_cast<long long>(b2.a) * b1.n -
                            static_cast<long long>(b1.a) * b2.n;
    if (std::llabs(cross) > 6)
        throw std::invalid_argument("solve_h0: |b*n - a*m| above 6 is out of scope");
    if (N < 6 || N > 30) throw std::invalid_argument("solve_h0: mode cutoff out of range");

    const cplx tau = b1.tau;
    FourierModeSystem sys;
    sys.n = b1.n;
    sys.m = b2.n;
    sys.a = b1.a;
    sys.b = b2.a;
    // One base translate shifts the mode index by up to max(|a|,|b|,|a-b|);
    // the growth screen looks three translates deep, so the retained range
    // must leave an interior beyond that.
    const int maxstep =
        std::max({std::abs(sys.a), std::abs(sys.b), std::abs(sys.a - sys.b), 1});
    sys.N = std::max(N, 3 * maxstep + 5);

    const cplx dmod = b2.mu / static_cast<double>(sys.m) - b1.mu / static_cast<double>(sys.n);
    const double dslope = static_cast<double>(sys.b) / sys.m - static_cast<double>(sys.a) / sys.n;

    Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(sys.size(), sys.size());
    int nrows = 0;
    std::vector<int> boundary;
    for (int i = 0; i < sys.m; ++i) {
        for (int j = 0; j < sys.n; ++j) {
            const double theta_ij = -static_cast<double>(sys.b) * i / sys.m +
                                    static_cast<double>(sys.a) * j / sys.n;
            for (int I = -sys.N; I <= sys.N; ++I) {
                const FourierModeSystem::Key key{i, j, I};
                if (sys.is_boundary(key)) boundary.push_back(sys.index(i, j, I));
                auto deriv = [&](double x, const std::vector<cplx>& v) {
                    const cplx rate = iu / tau *
                                      (cplx(theta_ij + I, 0.0) -
                                       (cplx(dslope * x, 0.0) + dmod) / two_pi);
                    return std::vector<cplx>{rate * v[0]};
                };
                const cplx mult = detail::rk4_propagate(deriv, {cplx(1.0, 0.0)}, steps)[0];
                const auto tgt = sys.successor(key);
                if (!sys.in_range(tgt)) continue;  // boundary equation dropped
                rows(nrows, sys.index(i, j, I)) += mult;
                rows(nrows, sys.index(tgt.i, tgt.j, tgt.I)) -= 1.0;
                ++nrows;
            }
        }
    }
    return detail::kernel_estimate(rows.topRows(nrows), boundary);
}

enum class ConeHomDirection { IntoCone, OutOfCone };

/// Brute-force Hom dimension between E_(1/2,eta/2) and the mapping cone of
/// the bump morphism. The four matrix entries give four towers of per-mode
/// ODEs; the bump couples the homogeneous towers into the driven ones, and
/// the boundary conditions tie the towers together across one base period.
/// eta = (u, v) in the (1, tau) basis; off the cone class the only kernel
/// directions are boundary artifacts and the screened dimension is 0.
inline KernelEstimate solve_cone_h0(ConeHomDirection dir, double u, double v,
                                    const BumpMorphism& bump, const ModuliParams& params,
                                    int N = 14, int steps = 512) {
    params.validate();
    if (N < 6 || N > 30) throw std::invalid_argument("solve_cone_h0: mode cutoff out of range");
    const cplx tau = params.tau;
    const double p = bump.p, q = bump.q, s = bump.s, t = bump.t;
    const int modes = 2 * N + 1;
    const int D = 4 * modes;
    auto idx = [&](int fam, int I) { return fam * modes + (I + N); };

    // Active bump translates on [0, 2 pi].
    std::vector<int> activeH;
    {
        const int h_lo = static_cast<int>(std::floor((p - s - bump.epsilon) / two_pi)) - 1;
        const int h_hi = static_cast<int>(std::ceil((p - s + bump.epsilon) / two_pi)) + 1;
        for (int H = h_lo; H <= h_hi; ++H) {
            const double c = bump.center(H);
            if (c + bump.epsilon >= 0.0 && c - bump.epsilon <= two_pi) activeH.push_back(H);
        }
    }

    const cplx kappa = (std::conj(tau) - tau) / (2.0 * tau);
    const bool into = (dir == ConeHomDirection::IntoCone);
    // Mode rate of family fam at integer mode I; the half-integer shift of
    // the antiperiodic entries is folded in here.
    auto rate = [&](int fam, int I, double x) -> cplx {
        const double half = (fam == 1 || fam == 3) ? 0.5 : 0.0;
        if (into) {
            if (fam <= 1)
                return iu / tau * (cplx(I + half + x / (2.0 * two_pi) - p / two_pi + u / (2.0 * two_pi), 0.0) +
                                   tau * (-q / two_pi + v / (2.0 * two_pi)));
            return iu / tau * (cplx(I + half - x / (2.0 * two_pi) - s / two_pi + u / (2.0 * two_pi), 0.0) +
                               tau * (-t / two_pi + v / (2.0 * two_pi)));
        }
        if (fam == 0 || fam == 2)
            return iu / tau * (cplx(I + half - x / (2.0 * two_pi) - u / (2.0 * two_pi) + p / two_pi, 0.0) +
                               tau * (-v / (2.0 * two_pi) + q / two_pi));
        return iu / tau * (cplx(I + half + x / (2.0 * two_pi) - u / (2.0 * two_pi) + s / two_pi, 0.0) +
                           tau * (-v / (2.0 * two_pi) + t / two_pi));
    };
    // Coupling: for the into-cone map families (2,3) drive (0,1) with +kappa;
    // out of the cone families (0,2) drive (1,3) with -kappa.
    const int src_of[4] = {into ? 2 : -1, into ? 3 : 0, into ? -1 : -1, into ? -1 : 2};
    const cplx drive = into ? kappa : -kappa;

    Eigen::MatrixXcd transfer = Eigen::MatrixXcd::Zero(D, D);
    for (int fam = 0; fam < 4; ++fam) {
        const int drv = [&] {
            for (int d = 0; d < 4; ++d)
                if (src_of[d] == fam) return d;
            return -1;
        }();
        for (int S = -N; S <= N; ++S) {
            std::vector<int> targets;
            if (drv >= 0)
                for (int H : activeH)
                    if (std::abs(S + H) <= N) targets.push_back(S + H);
            auto deriv = [&](double x, const std::vector<cplx>& vst) {
                std::vector<cplx> d(vst.size());
                d[0] = rate(fam, S, x) * vst[0];
                for (size_t k = 0; k < targets.size(); ++k)
                    d[1 + k] = rate(drv, targets[k], x) * vst[1 + k] +
                               drive * bump.psi(x, targets[k] - S) * vst[0];
                return d;
            };
            std::vector<cplx> v0(1 + targets.size(), cplx(0.0, 0.0));
            v0[0] = 1.0;
            const auto v1 = detail::rk4_propagate(deriv, v0, steps);
            transfer(idx(fam, S), idx(fam, S)) = v1[0];
            for (size_t k = 0; k < targets.size(); ++k)
                transfer(idx(drv, targets[k]), idx(fam, S)) += v1[1 + k];
        }
    }
    // value at 2 pi of (fam, I) equals value at 0 of bc(fam, I).
    auto bc = [&](int fam, int I) -> std::pair<int, int> {
        if (into) {
            switch (fam) {
                case 0: return {1, I};
                case 1: return {0, I + 1};
                case 2: return {3, I - 1};
                default: return {2, I};
            }
        }
        switch (fam) {
            case 0: return {2, I - 1};
            case 1: return {3, I};
            case 2: return {0, I};
            default: return {1, I + 1};
        }
    };
    Eigen::MatrixXcd rows = Eigen::MatrixXcd::Zero(D, D);
    int nrows = 0;
    for (int fam = 0; fam < 4; ++fam) {
        for (int I = -N; I <= N; ++I) {
            const auto [tf, tI] = bc(fam, I);
            if (std::abs(tI) > N) continue;
            rows.row(nrows) = transfer.row(idx(fam, I));
            rows(nrows, idx(tf, tI)) -= 1.0;
            ++nrows;
        }
    }
    std::vector<int> boundary;
    for (int fam = 0; fam < 4; ++fam)
        for (int I = -N; I <= N; ++I)
            if (std::abs(I) >= N - 2) boundary.push_back(idx(fam, I));
    return detail::kernel_estimate(rows.topRows(nrows), boundary);
}

/// Hom dimension between E_(1/2, eta/2) and a prepared mapping cone, with
/// eta = u + v*tau given by its basis coefficients.
inline KernelEstimate solve_cone_h0(ConeHomDirection dir, cplx eta, const ConeData& cone,
                                    const ModuliParams& params, int N = 14, int steps = 512) {
    auto [u, v] = basis_coords(eta, params.tau);
    return solve_cone_h0(dir, u, v, cone.psi, params, N, steps);
}

}  // namespace conetheta
