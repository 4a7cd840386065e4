// Grain kinematics: decomposition of a skew matrix into crystallographic
// slip systems, the boundary-supported slip field that makes a rotated grain
// cost only boundary energy, the gauge-equivalent bounded-displacement
// representation, and the vertical strip grain of the triangular lattice.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <queue>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "aolat/energy.hpp"
#include "aolat/forms.hpp"

namespace aolat {

enum class Rounding { Floor, Nearest };

inline std::int64_t round_slip(double x, Rounding r) {
    return r == Rounding::Floor ? std::int64_t(std::floor(x)) : std::int64_t(std::floor(x + 0.5));
}

// One slip system: slip vector b_l (lattice index) and plane normal m_n
// (dual index; in 3D index 3 means m4 = m1+m2+m3).
struct SlipSystem {
    int l;
    int n;
};

template <int D>
struct SlipSystemDecomposition {
    std::vector<SlipSystem> systems;
    std::vector<double> xi;

    Mat<D> reconstruct() const {
        Mat<D> s{};
        for (std::size_t i = 0; i < systems.size(); ++i) {
            Vec<D> b = LatticeTraits<D>::basis(systems[i].l);
            Vec<D> m = LatticeTraits<D>::dual(systems[i].n);
            s += xi[i] * outer(b, m);
        }
        return s;
    }
};

template <int D>
inline void check_skew(const Mat<D>& s) {
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j)
            if (std::abs(s(i, j) + s(j, i)) > 1e-12 * (1.0 + frob_norm(s)))
                throw std::invalid_argument("slip_decompose: matrix not skew");
}

// The standard 12 FCC slip systems, with amplitudes grouped by the
// independent entries S12, S13, S23 of the skew matrix.
inline SlipSystemDecomposition<3> slip_decompose(const Mat<3>& s) {
    check_skew(s);
    const double c = 1.0 / (4.0 * std::numbers::pi);
    const double s12 = s(0, 1), s13 = s(0, 2), s23 = s(1, 2);
    SlipSystemDecomposition<3> out;
    out.systems = {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1},
                   {3, 0}, {3, 3}, {4, 1}, {4, 3}, {5, 2}, {5, 3}};
    out.xi = {c * s23, -c * s23, c * s13, -c * s13, c * s12, -c * s12,
              c * s23, c * s23,  -c * s13, -c * s13, c * s12, c * s12};
    return out;
}

// 2D: S(theta) = theta/(2 pi) (b1 (x) m2 - b2 (x) m1 + b3 (x) m3) with
// S = sqrt3 theta [[0,1],[-1,0]].
inline SlipSystemDecomposition<2> slip_decompose(const Mat<2>& s) {
    check_skew(s);
    const double theta = s(0, 1) / std::sqrt(3.0);
    const double c = theta / (2.0 * std::numbers::pi);
    SlipSystemDecomposition<2> out;
    out.systems = {{0, 1}, {1, 0}, {2, 2}};
    out.xi = {c, -c, c};
    return out;
}

template <int D>
struct GrainSpec {
    std::unordered_set<int> region;  // vertex ids of the grain
    Mat<D> S{};
    Vec<D> tau{};
    Rounding rounding = Rounding::Floor;
};

template <int D>
inline bool region_connected(const CellComplex<D>& cx, const std::unordered_set<int>& region) {
    if (region.empty()) return true;
    std::unordered_set<int> seen;
    std::queue<int> q;
    q.push(*region.begin());
    seen.insert(*region.begin());
    while (!q.empty()) {
        int v = q.front();
        q.pop();
        for (const auto& e : cx.coboundary_of[0][v]) {
            for (const auto& be : cx.boundary_of[1][e.cell]) {
                if (be.cell != v && region.count(be.cell) && !seen.count(be.cell)) {
                    seen.insert(be.cell);
                    q.push(be.cell);
                }
            }
        }
    }
    return seen.size() == region.size();
}

// Unordered boundary bonds of the region: canonical edges with exactly one
// endpoint inside.
template <int D>
inline int boundary_bond_count(const CellComplex<D>& cx, const std::unordered_set<int>& region) {
    int count = 0;
    for (int e = 0; e < cx.n_cells(1); ++e) {
        const auto& row = cx.boundary_of[1][e];
        int inside = 0;
        for (const auto& en : row)
            if (region.count(en.cell)) ++inside;
        if (inside == 1 && row.size() == 2) ++count;
        if (row.size() == 1 && inside == 1) ++count;  // Dirichlet bond leaving the box vertex set
    }
    return count;
}

// The lattice-valued slip accumulated at a grain vertex x:
//   v(x) = - sum_(l,n) b_l round(xi_(l,n) x.m_n)
// (integer coefficients in the b basis; b4,b5,b6 are expanded).
template <int D>
inline IVec<D> grain_site_slip(const SlipSystemDecomposition<D>& dec, const Vec<D>& x, Rounding r) {
    IVec<D> acc{};
    for (std::size_t i = 0; i < dec.systems.size(); ++i) {
        std::int64_t k = round_slip(dec.xi[i] * dot(x, LatticeTraits<D>::dual(dec.systems[i].n)), r);
        if (k == 0) continue;
        const int l = dec.systems[i].l;
        IVec<D> b{};
        if constexpr (D == 3) {
            switch (l) {
                case 0: b = IVec<3>{{1, 0, 0}}; break;
                case 1: b = IVec<3>{{0, 1, 0}}; break;
                case 2: b = IVec<3>{{0, 0, 1}}; break;
                case 3: b = IVec<3>{{0, -1, 1}}; break;   // b4 = b3 - b2
                case 4: b = IVec<3>{{1, 0, -1}}; break;   // b5 = b1 - b3
                case 5: b = IVec<3>{{-1, 1, 0}}; break;   // b6 = b2 - b1
            }
        } else {
            switch (l) {
                case 0: b = IVec<2>{{1, 0}}; break;
                case 1: b = IVec<2>{{0, 1}}; break;
                case 2: b = IVec<2>{{-1, -1}}; break;     // b3 = -b1 - b2
            }
        }
        acc -= k * b;
    }
    return acc;
}

template <int D>
struct Grain {
    PForm<D> u;         // u_S: S x + tau on the grain, 0 outside
    SlipField<D> sigma;  // supported on the boundary bonds
    int boundary_bonds = 0;
};

// Construct (u_S, sigma_S).  Every bond leaving the grain must exist in the
// complex; otherwise the grain touches the box boundary.
template <int D>
inline Grain<D> build_grain(const CellComplex<D>& cx, const GrainSpec<D>& spec) {
    if (!region_connected(cx, spec.region)) throw std::invalid_argument("build_grain: region not connected");
    auto dec = slip_decompose(spec.S);
    Grain<D> g{PForm<D>(cx, 0), SlipField<D>(cx, 1), 0};
    for (int v : spec.region) g.u.values[v] = spec.S * cx.vertex_pos[v] + spec.tau;

    for (int v : spec.region) {
        // all 2*n_edge_types bonds at v must be present
        int incident = int(cx.coboundary_of[0][v].size());
        if (incident != 2 * LatticeTraits<D>::n_edge_types)
            throw std::invalid_argument("build_grain: grain touches the box boundary");
    }
    for (int e = 0; e < cx.n_cells(1); ++e) {
        const auto& row = cx.boundary_of[1][e];
        if (row.size() != 2) continue;
        int tail = -1, head = -1;
        for (const auto& en : row) (en.sign < 0 ? tail : head) = en.cell;
        bool tin = spec.region.count(tail), hin = spec.region.count(head);
        if (tin == hin) continue;
        ++g.boundary_bonds;
        int x = tin ? tail : head;
        IVec<D> val = grain_site_slip(dec, cx.vertex_pos[x], spec.rounding);
        // canonical edge runs tail -> head; sigma(x,y) with x inside
        g.sigma.values[e] = tin ? val : IVec<D>{} - val;
    }
    return g;
}

// Gauge transformation by v_S = grain slip on the grain: yields |u| <= 6 on
// the grain, u = 0 outside, and slip supported on interior bonds.
template <int D>
inline std::pair<PForm<D>, SlipField<D>> bounded_representative(const CellComplex<D>& cx,
                                                                const GrainSpec<D>& spec,
                                                                const Grain<D>& g) {
    auto dec = slip_decompose(spec.S);
    LatForm<D> v(cx, 0);
    for (int vid : spec.region) v.values[vid] = grain_site_slip(dec, cx.vertex_pos[vid], spec.rounding);
    return gauge_transform(g.u, g.sigma, v);
}

// min over tau of H(u_S, 0): the naive (slip-free) grain.  Quadratic in tau;
// returns the minimizing energy.
template <int D>
inline double naive_grain_energy(const CellComplex<D>& cx, const std::unordered_set<int>& region,
                                 const Mat<D>& S) {
    Mat<D> m{};
    Vec<D> rhs{};
    double c0 = 0;
    for (int e = 0; e < cx.n_cells(1); ++e) {
        const auto& row = cx.boundary_of[1][e];
        if (row.size() != 2) continue;
        int tail = -1, head = -1;
        for (const auto& en : row) (en.sign < 0 ? tail : head) = en.cell;
        bool tin = region.count(tail), hin = region.count(head);
        if (tin == hin) continue;
        int x = tin ? tail : head;
        const Vec<D>& nvec = cx.edge_delta[e];
        double sx = dot(S * cx.vertex_pos[x], nvec);
        m += outer(nvec, nvec);
        rhs -= sx * nvec;
        c0 += sx * sx;
    }
    Vec<D> tau{};
    if (std::abs(det(m)) > 1e-9) tau = inverse(m) * rhs;
    // H(tau) = 1/2 sum (sx + tau.n)^2 = 1/2 c0 - tau.rhs + 1/2 tau.M tau
    return 0.5 * (c0 + dot(tau, m * tau)) - dot(tau, rhs);
}

// Left-wall slip of the vertical strip grain at vertical index n2:
//   sigma = -b1 (<2 theta n2> + <theta n2>),   <x> = floor(x + 1/2).
inline std::int64_t strip_wall_slip(double theta, std::int64_t n2) {
    return -(round_slip(2.0 * theta * double(n2), Rounding::Nearest) +
             round_slip(theta * double(n2), Rounding::Nearest));
}

// Vertical strip grain of width n on a 2D box: region, and the boundary slip
// field built from the per-site slip-system formula with nearest-integer
// rounding.  theta = 0 gives the zero field.
inline std::pair<std::unordered_set<int>, SlipField<2>> strip_grain_2d(const CellComplex<2>& cx, int n,
                                                                       double theta) {
    std::unordered_set<int> region;
    for (int v = 0; v < cx.n_cells(0); ++v) {
        const Coord& c = cx.cell(0, v).anchor;
        int base = (c[1] >= 0) ? c[1] / 2 : -((-c[1] + 1) / 2);  // floor(c2/2)
        int n1 = c[0] - base;
        if (n1 >= 0 && n1 <= n) region.insert(v);
    }
    Mat<2> s{};
    s(0, 1) = std::sqrt(3.0) * theta;
    s(1, 0) = -std::sqrt(3.0) * theta;
    auto dec = slip_decompose(s);
    SlipField<2> sigma(cx, 1);
    for (int e = 0; e < cx.n_cells(1); ++e) {
        const auto& row = cx.boundary_of[1][e];
        if (row.size() != 2) continue;
        int tail = -1, head = -1;
        for (const auto& en : row) (en.sign < 0 ? tail : head) = en.cell;
        bool tin = region.count(tail), hin = region.count(head);
        if (tin == hin) continue;
        int x = tin ? tail : head;
        IVec<2> val = grain_site_slip(dec, cx.vertex_pos[x], Rounding::Nearest);
        sigma.values[e] = tin ? val : IVec<2>{} - val;
    }
    return {region, sigma};
}

}  // namespace aolat
