// Constructive integer lift n of a closed lattice-valued 2-form q: d n = q,
// with n lattice-valued and supported inside the smallest b-axis-aligned
// coordinate box containing supp q.
//
// Both constructions are deterministic and verify d n = q exactly before
// returning:
//
//  2D  charge routing.  Faces are grouped into cells (c,r): the up triangle
//      U(c,r) = (x, x+b1, x+b1+b2) and the down triangle W(c,r) =
//      (x+b2, x, x+b1+b2), x = c*b1 + r*b2.  Cells are processed with r
//      descending, then c descending.  In every strip above the bottom one,
//      W flushes its charge into U across the cell diagonal and U flushes
//      down into W(c,r-1) across its bottom edge; in the bottom strip, U
//      flushes into W across the diagonal and W flushes left into U(c-1,r)
//      across its left edge.  The final face must end at zero, which
//      requires total charge zero (the H^2 obstruction of the plane).
//
//  3D  exact integer elimination.  The unknowns are the slips on the edges
//      inside the box; every face containing such an edge contributes the
//      equation (d n)(f) = q(f).  Unit pivots are always available in
//      practice (the matrix is a signed incidence matrix), eliminations are
//      integer-exact, and a spanning-tree gauge argument shows the system
//      has an integer solution whenever the lift exists; never-pivoted
//      columns are gauge directions and stay zero.
#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "aolat/forms.hpp"

namespace aolat {

struct LiftStats {
    double max_slip_norm = 0.0;  // max_e |n(e)| (Cartesian)
    double charge_inner = 0.0;   // <q,q> (Cartesian)
};

namespace detail {

template <int D>
struct CoordBox {
    Coord lo{0, 0, 0}, hi{0, 0, 0};
    bool contains(const Coord& n) const {
        for (int i = 0; i < D; ++i)
            if (n[i] < lo[i] || n[i] > hi[i]) return false;
        return true;
    }
};

template <int D>
inline CoordBox<D> support_box(const CellComplex<D>& cx, const ChargeField<D>& q) {
    CoordBox<D> b;
    bool first = true;
    for (int f = 0; f < q.size(); ++f) {
        if (q.values[f].is_zero()) continue;
        for (const Coord& v : cx.vertices_of(2, f)) {
            if (first) {
                b.lo = b.hi = v;
                first = false;
            } else {
                for (int i = 0; i < D; ++i) {
                    b.lo[i] = std::min(b.lo[i], v[i]);
                    b.hi[i] = std::max(b.hi[i], v[i]);
                }
            }
        }
    }
    return b;
}

// Flush the whole residual of face f across edge e onto the other faces of e.
template <int D>
inline void flush(const CellComplex<D>& cx, std::vector<IVec<D>>& resid, SlipField<D>& n, int f, int e) {
    int inc_fe = 0;
    for (const auto& en : cx.boundary_of[2][f])
        if (en.cell == e) inc_fe = en.sign;
    if (inc_fe == 0) throw std::logic_error("poincare_lift: face does not contain designated edge");
    IVec<D> delta = (inc_fe > 0) ? resid[f] : IVec<D>{} - resid[f];
    n.values[e] += delta;
    for (const auto& cb : cx.coboundary_of[1][e]) {
        IVec<D> change = (cb.sign > 0) ? delta : IVec<D>{} - delta;
        resid[cb.cell] -= change;
    }
}

inline SlipField<2> lift_2d(const ChargeField<2>& q) {
    const CellComplex<2>& cx = *q.cx;
    SlipField<2> n(cx, 1);
    bool empty = true;
    IVec<2> total{};
    for (const auto& v : q.values) {
        total += v;
        if (!v.is_zero()) empty = false;
    }
    if (empty) return n;
    if (!total.is_zero())
        throw std::invalid_argument("poincare_lift: 2D charge has nonzero total (H^2 obstruction)");

    CoordBox<2> box = support_box(cx, q);
    std::vector<IVec<2>> resid = q.values;

    auto face_id = [&](int type, int c, int r) {
        // U(c,r) = type0 @ (c,r); W(c,r) = type1 @ (c,r+1)
        Coord a = (type == 0) ? Coord{c, r, 0} : Coord{c, r + 1, 0};
        int id = cx.index_of(2, CellKey{a, type});
        if (id < 0) throw std::invalid_argument("poincare_lift: support box leaves the complex");
        return id;
    };
    auto edge_id = [&](const Coord& a, const Coord& b) {
        auto [k, s] = CellComplex<2>::canonical_edge(a, b);
        int id = cx.index_of(1, k);
        if (id < 0) throw std::invalid_argument("poincare_lift: support box leaves the complex");
        (void)s;
        return id;
    };

    const int A1 = box.lo[0], B1 = box.hi[0], A2 = box.lo[1], B2 = box.hi[1];
    for (int r = B2 - 1; r >= A2; --r) {
        for (int c = B1 - 1; c >= A1; --c) {
            const Coord x{c, r, 0};
            const Coord xp1{c + 1, r, 0}, xd{c + 1, r + 1, 0}, xb2{c, r + 1, 0};
            int U = face_id(0, c, r), W = face_id(1, c, r);
            if (r > A2) {
                if (!resid[W].is_zero()) flush(cx, resid, n, W, edge_id(x, xd));      // diagonal
                if (!resid[U].is_zero()) flush(cx, resid, n, U, edge_id(x, xp1));     // bottom edge
            } else {
                if (!resid[U].is_zero()) flush(cx, resid, n, U, edge_id(x, xd));      // diagonal
                if (c > A1) {
                    if (!resid[W].is_zero()) flush(cx, resid, n, W, edge_id(x, xb2));  // left edge
                } else if (!resid[W].is_zero()) {
                    throw std::logic_error("poincare_lift: leftover charge in final cell");
                }
            }
        }
    }
    for (const auto& v : resid)
        if (!v.is_zero()) throw std::logic_error("poincare_lift: nonzero residual after sweep");
    return n;
}

// 3D lift by exact integer elimination of the box system.  Unknowns are the
// edges inside the bounding box of supp q; every face containing such an
// edge contributes the equation (d n)(f) = q(f) (faces sticking out of the
// box carry q = 0 there).  Closedness makes the system consistent, and a
// spanning-tree gauge argument shows it has an integer solution; elimination
// with unit pivots (Markowitz-style fill control) finds it exactly.  Free
// columns are gauge directions and stay zero.
inline SlipField<3> lift_3d(const ChargeField<3>& q) {
    const CellComplex<3>& cx = *q.cx;
    SlipField<3> n(cx, 1);

    {
        LatForm<3> dq = d(q);
        for (const auto& v : dq.values)
            if (!v.is_zero()) throw std::invalid_argument("poincare_lift: charge not closed");
    }

    bool empty = true;
    for (const auto& v : q.values)
        if (!v.is_zero()) empty = false;
    if (empty) return n;

    CoordBox<3> box = support_box(cx, q);

    std::vector<int> edge_col(cx.n_cells(1), -1);
    std::vector<int> col_edge;
    for (int e = 0; e < cx.n_cells(1); ++e) {
        bool inside = true;
        for (const Coord& v : cx.vertices_of(1, e))
            if (!box.contains(v)) inside = false;
        if (inside) {
            edge_col[e] = int(col_edge.size());
            col_edge.push_back(e);
        }
    }
    const int ncols = int(col_edge.size());

    struct Row {
        std::vector<std::pair<int, std::int64_t>> a;  // (col, coefficient), sorted
        IVec<3> rhs;
        bool live = true;
    };
    std::vector<Row> rows;
    for (int f = 0; f < cx.n_cells(2); ++f) {
        Row r;
        for (const auto& ee : cx.boundary_of[2][f])
            if (edge_col[ee.cell] >= 0) r.a.push_back({edge_col[ee.cell], ee.sign});
        if (r.a.empty()) {
            if (!q.values[f].is_zero())
                throw std::invalid_argument("poincare_lift: charge support leaves its own box");
            continue;
        }
        std::sort(r.a.begin(), r.a.end());
        r.rhs = q.values[f];
        rows.push_back(std::move(r));
    }

    std::vector<std::vector<int>> col_rows(ncols);
    for (int i = 0; i < int(rows.size()); ++i)
        for (const auto& [c, v] : rows[i].a) col_rows[c].push_back(i);

    std::vector<std::pair<int, int>> pivots;  // (row, col) in elimination order
    std::vector<char> col_done(ncols, 0);
    for (int step = 0; step < ncols; ++step) {
        // Markowitz-ish: among unit entries of live rows, smallest
        // (row_nnz - 1) * (col_count - 1); ties by (col, row) for determinism
        long best = -1;
        int prow = -1, pcol = -1;
        for (int c = 0; c < ncols; ++c) {
            if (col_done[c]) continue;
            int ccount = 0;
            for (int ri : col_rows[c])
                if (rows[ri].live) ++ccount;
            if (ccount == 0) continue;
            for (int ri : col_rows[c]) {
                if (!rows[ri].live) continue;
                std::int64_t coef = 0;
                for (const auto& [cc, v] : rows[ri].a)
                    if (cc == c) coef = v;
                if (coef != 1 && coef != -1) continue;
                long cost = long(rows[ri].a.size() - 1) * long(ccount - 1);
                if (best < 0 || cost < best) {
                    best = cost;
                    prow = ri;
                    pcol = c;
                }
            }
        }
        if (prow < 0) break;  // no unit pivot left: remaining columns are free
        col_done[pcol] = 1;
        rows[prow].live = false;
        pivots.push_back({prow, pcol});
        std::int64_t pc = 0;
        for (const auto& [cc, v] : rows[prow].a)
            if (cc == pcol) pc = v;
        for (int ri : col_rows[pcol]) {
            if (!rows[ri].live) continue;
            std::int64_t rc = 0;
            for (const auto& [cc, v] : rows[ri].a)
                if (cc == pcol) rc = v;
            if (rc == 0) continue;
            // row_i -= (rc/pc) * pivot_row  (pc is +-1)
            std::int64_t m = rc * pc;  // rc / pc since pc^2 = 1
            std::vector<std::pair<int, std::int64_t>> merged;
            merged.reserve(rows[ri].a.size() + rows[prow].a.size());
            auto ita = rows[ri].a.begin();
            auto itb = rows[prow].a.begin();
            while (ita != rows[ri].a.end() || itb != rows[prow].a.end()) {
                if (itb == rows[prow].a.end() ||
                    (ita != rows[ri].a.end() && ita->first < itb->first)) {
                    merged.push_back(*ita++);
                } else if (ita == rows[ri].a.end() || itb->first < ita->first) {
                    std::int64_t nv = -m * itb->second;
                    if (nv != 0) merged.push_back({itb->first, nv});
                    ++itb;
                } else {
                    std::int64_t nv = ita->second - m * itb->second;
                    if (nv != 0) merged.push_back({ita->first, nv});
                    ++ita;
                    ++itb;
                }
            }
            for (const auto& [cc, v] : merged) {
                bool had = false;
                for (const auto& [oc, ov] : rows[ri].a)
                    if (oc == cc) had = true;
                if (!had) col_rows[cc].push_back(ri);
            }
            rows[ri].a = std::move(merged);
            rows[ri].rhs -= m * rows[prow].rhs;
            if (rows[ri].a.empty()) {
                if (!rows[ri].rhs.is_zero())
                    throw std::logic_error("poincare_lift: inconsistent box system");
                rows[ri].live = false;
            }
        }
    }
    for (const auto& r : rows)
        if (r.live && r.a.empty() && !r.rhs.is_zero())
            throw std::logic_error("poincare_lift: inconsistent box system");

    // live rows with entries only in free (never-pivoted) columns must be
    // homogeneous-consistent with those columns set to zero
    std::vector<IVec<3>> sol(ncols);
    for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
        auto [ri, c] = *it;
        IVec<3> acc = rows[ri].rhs;
        std::int64_t pc = 0;
        for (const auto& [cc, v] : rows[ri].a) {
            if (cc == c) {
                pc = v;
                continue;
            }
            acc -= v * sol[cc];
        }
        sol[c] = (pc > 0) ? acc : IVec<3>{} - acc;  // pc = +-1
    }
    for (int c = 0; c < ncols; ++c) n.values[col_edge[c]] = sol[c];
    // the wrapper re-checks d n = q exactly, covering rows never used as
    // pivots (they are implied by closedness when the system is consistent)
    return n;
}

}  // namespace detail

// Lift a closed, finitely supported charge to an integer slip field with
// d n = q and supp n inside the bounding box of supp q.  Dirichlet and
// Neumann complexes only; every cell of the support box must exist in the
// stored complex.
template <int D>
inline SlipField<D> poincare_lift(const ChargeField<D>& q) {
    if (q.p != 2) throw std::invalid_argument("poincare_lift: q must be a 2-form");
    if (q.cx->spec.bc == Bc::Periodic)
        throw std::invalid_argument("poincare_lift: periodic boxes carry nontrivial H^2");
    SlipField<D> n;
    if constexpr (D == 2)
        n = detail::lift_2d(q);
    else
        n = detail::lift_3d(q);
    // round-trip guarantee, exact in integer arithmetic
    LatForm<D> dn = d(n);
    for (int i = 0; i < dn.size(); ++i)
        if (!(dn.values[i] - q.values[i]).is_zero())
            throw std::logic_error("poincare_lift: d(lift) != q");
    return n;
}

template <int D>
inline LiftStats lift_stats(const ChargeField<D>& q, const SlipField<D>& n) {
    LiftStats s;
    for (const auto& v : n.values) s.max_slip_norm = std::max(s.max_slip_norm, norm(to_cartesian<D>(v)));
    for (const auto& v : q.values) s.charge_inner += lattice_norm2<D>(v);
    return s;
}

}  // namespace aolat
