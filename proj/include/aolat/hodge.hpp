// Matrix-free conjugate-gradient solves for the SPD lattice operators, the
// Hodge decomposition, and kernel deflation for the semidefinite Neumann
// cases.
#pragma once

#include <functional>
#include <stdexcept>
#include <vector>

#include "aolat/forms.hpp"

namespace aolat {

struct SolveStats {
    int iterations = 0;
    double relative_residual = 0.0;
};

struct SolveOptions {
    double tol = 1e-11;      // relative residual target
    int max_iterations = 0;  // 0: choose from problem size
};

template <int D>
using FormOp = std::function<PForm<D>(const PForm<D>&)>;

namespace detail {

template <int D>
inline void axpy(PForm<D>& y, double a, const PForm<D>& x) {
    for (int i = 0; i < y.size(); ++i) y.values[i] += a * x.values[i];
}

template <int D>
inline void scale_add(PForm<D>& p, double beta, const PForm<D>& r) {
    for (int i = 0; i < p.size(); ++i) p.values[i] = r.values[i] + beta * p.values[i];
}

}  // namespace detail

// Orthonormal basis helper for kernel deflation (modified Gram-Schmidt).
template <int D>
inline std::vector<PForm<D>> orthonormalize(std::vector<PForm<D>> basis) {
    std::vector<PForm<D>> out;
    for (auto& v : basis) {
        for (const auto& u : out) detail::axpy(v, -inner(u, v), u);
        double n = form_norm(v);
        if (n > 1e-12) {
            for (auto& x : v.values) x *= 1.0 / n;
            out.push_back(std::move(v));
        }
    }
    return out;
}

template <int D>
inline void project_out(PForm<D>& v, const std::vector<PForm<D>>& onb) {
    for (const auto& u : onb) detail::axpy(v, -inner(u, v), u);
}

// Conjugate gradients on an SPD (or PSD with deflated kernel) operator.
template <int D>
inline PForm<D> cg_solve(const FormOp<D>& apply, const PForm<D>& rhs, const SolveOptions& opt,
                         SolveStats* stats = nullptr, const std::vector<PForm<D>>& kernel_onb = {}) {
    PForm<D> b = rhs;
    if (!kernel_onb.empty()) project_out(b, kernel_onb);
    PForm<D> x(*rhs.cx, rhs.p);
    PForm<D> r = b;
    PForm<D> p = r;
    double rr = inner(r, r);
    const double b2 = std::sqrt(inner(b, b));
    if (b2 == 0.0) {
        if (stats) *stats = {0, 0.0};
        return x;
    }
    const int n = rhs.size() * D;
    const int maxit = opt.max_iterations > 0 ? opt.max_iterations : 40 * n + 200;
    int it = 0;
    for (; it < maxit; ++it) {
        if (std::sqrt(rr) <= opt.tol * b2) break;
        PForm<D> ap = apply(p);
        if (!kernel_onb.empty()) project_out(ap, kernel_onb);
        double pap = inner(p, ap);
        if (pap <= 0) throw std::runtime_error("cg_solve: operator not positive definite on subspace");
        double alpha = rr / pap;
        detail::axpy(x, alpha, p);
        detail::axpy(r, -alpha, ap);
        double rr_new = inner(r, r);
        detail::scale_add(p, rr_new / rr, r);
        rr = rr_new;
        if ((it & 63) == 63 && !kernel_onb.empty()) project_out(r, kernel_onb);
    }
    if (std::sqrt(rr) > opt.tol * b2 * 10)
        throw std::runtime_error("cg_solve: did not converge");
    if (stats) *stats = {it, std::sqrt(rr) / b2};
    return x;
}

// Apply Delta_p^{-1} by CG.  Requires the Laplacian to be invertible on the
// form space (H^p = 0: Dirichlet/Neumann for p = 1..D-1, Dirichlet p = 0).
template <int D>
inline PForm<D> laplacian_inverse(const PForm<D>& rhs, const SolveOptions& opt = {},
                                  SolveStats* stats = nullptr) {
    return cg_solve<D>([](const PForm<D>& u) { return laplacian(u); }, rhs, opt, stats);
}

// Hodge splitting u = exact + coexact for p-forms with H^p = {0}.
template <int D>
inline std::pair<PForm<D>, PForm<D>> hodge_decompose(const PForm<D>& u, const SolveOptions& opt = {}) {
    const CellComplex<D>& cx = *u.cx;
    if (cx.spec.bc == Bc::Periodic && u.p >= 1 && u.p <= D - 1)
        throw std::invalid_argument("hodge_decompose: nontrivial cohomology (periodic box)");
    PForm<D> z = laplacian_inverse(u, opt);
    PForm<D> exact(cx, u.p), coexact(cx, u.p);
    if (u.p > 0) exact = d(codifferential(z));
    if (u.p < D) coexact = codifferential(d(z));
    return {exact, coexact};
}

}  // namespace aolat
