// Discrete p-forms and the operators d, d*, Laplacian.
//
// A Form stores one value per canonical cell; orientation-flipped access
// negates the value.  The value type is either Vec<D> (real forms) or
// IVec<D> (lattice-valued forms, exact integer arithmetic in the basis
// {b_i}).  The inner product is the canonical unweighted sum of Euclidean
// dot products over canonical cells.
#pragma once

#include <stdexcept>
#include <vector>

#include "aolat/complex.hpp"

namespace aolat {

template <int D, class V>
struct Form {
    const CellComplex<D>* cx = nullptr;
    int p = 0;
    std::vector<V> values;

    Form() = default;
    Form(const CellComplex<D>& c, int degree) : cx(&c), p(degree), values(c.n_cells(degree)) {}

    int size() const { return int(values.size()); }
    V& operator[](int i) { return values[i]; }
    const V& operator[](int i) const { return values[i]; }

    // value of the cell in the requested orientation
    V get(int i, int sign) const { return sign >= 0 ? values[i] : V{} - values[i]; }
    void add(int i, int sign, const V& x) {
        if (sign >= 0)
            values[i] += x;
        else
            values[i] -= x;
    }

    Form& operator+=(const Form& o) {
        for (int i = 0; i < size(); ++i) values[i] += o.values[i];
        return *this;
    }
    Form& operator-=(const Form& o) {
        for (int i = 0; i < size(); ++i) values[i] -= o.values[i];
        return *this;
    }
    friend Form operator+(Form a, const Form& b) { return a += b; }
    friend Form operator-(Form a, const Form& b) { return a -= b; }
};

template <int D>
using PForm = Form<D, Vec<D>>;          // real-valued
template <int D>
using LatForm = Form<D, IVec<D>>;       // lattice-valued (integer coefficients)
template <int D>
using SlipField = LatForm<D>;           // p = 1
template <int D>
using ChargeField = LatForm<D>;         // p = 2, closed

template <int D, class V>
inline void check_same_complex(const Form<D, V>& a, const Form<D, V>& b) {
    if (a.cx != b.cx) throw std::invalid_argument("forms live on different complexes");
}

// Exterior derivative.  d_p u(c) = sum over the signed boundary of c of u;
// for p = D the convention d_D := 0 yields the zero form on an empty table.
template <int D, class V>
inline Form<D, V> d(const Form<D, V>& u) {
    const CellComplex<D>& cx = *u.cx;
    if (u.p >= D) throw std::invalid_argument("d: form degree exceeds complex dimension");
    Form<D, V> out(cx, u.p + 1);
    for (int i = 0; i < out.size(); ++i) {
        V acc{};
        for (const auto& e : cx.boundary_of[u.p + 1][i])
            acc += (e.sign > 0 ? u.values[e.cell] : V{} - u.values[e.cell]);
        out.values[i] = acc;
    }
    return out;
}

// Codifferential, the adjoint of d with respect to the canonical inner
// product: (d* w)(c) = sum over (p+1)-cells containing c, with the incidence
// sign.  p = 0 maps to the zero convention.
template <int D, class V>
inline Form<D, V> codifferential(const Form<D, V>& w) {
    const CellComplex<D>& cx = *w.cx;
    if (w.p == 0) return Form<D, V>(cx, 0);  // d*_{-1} := 0 convention: zero form
    Form<D, V> out(cx, w.p - 1);
    for (int i = 0; i < out.size(); ++i) {
        V acc{};
        for (const auto& e : cx.coboundary_of[w.p - 1][i])
            acc += (e.sign > 0 ? w.values[e.cell] : V{} - w.values[e.cell]);
        out.values[i] = acc;
    }
    return out;
}

template <int D>
inline double inner(const PForm<D>& a, const PForm<D>& b) {
    check_same_complex(a, b);
    double s = 0;
    for (int i = 0; i < a.size(); ++i) s += dot(a.values[i], b.values[i]);
    return s;
}

template <int D>
inline double form_norm(const PForm<D>& a) {
    return std::sqrt(inner(a, a));
}

template <int D>
inline PForm<D> to_real(const LatForm<D>& u) {
    PForm<D> out(*u.cx, u.p);
    for (int i = 0; i < u.size(); ++i) out.values[i] = to_cartesian<D>(u.values[i]);
    return out;
}

// Laplacian Delta_p = d_{p-1} d*_{p-1} + d*_p d_p (with the boundary
// conventions d_{-1} = 0 and d_D = 0).
template <int D>
inline PForm<D> laplacian(const PForm<D>& u) {
    PForm<D> out(*u.cx, u.p);
    if (u.p > 0) {
        PForm<D> a = d(codifferential(u));
        out += a;
    }
    if (u.p < D) {
        PForm<D> b = codifferential(d(u));
        out += b;
    }
    return out;
}

// Dislocation charge of a slip field, q = d sigma, in exact integer
// arithmetic.  The closure dq = 0 is asserted on 3D complexes.
template <int D>
inline ChargeField<D> dislocation_charge(const SlipField<D>& sigma) {
    if (sigma.p != 1) throw std::invalid_argument("dislocation_charge: sigma must be a 1-form");
    ChargeField<D> q = d(sigma);
    if constexpr (D == 3) {
        LatForm<D> dq = d(q);
        for (const auto& v : dq.values)
            if (!v.is_zero()) throw std::logic_error("dislocation_charge: d(d sigma) != 0");
    }
    return q;
}

}  // namespace aolat
