// Desk-scale Gibbs sampler for the measure
//   exp(-beta (H(u, sigma) + W(d sigma))),   W(q) = w0 sum_f |q(f)|^2,
// on a Dirichlet box: exact heat-bath resampling of each displacement from
// its conditional Gaussian, Metropolis updates of each slip from a finite
// proposal set.  The slip field is sampled directly (not by gauge-class
// representatives); every recorded observable is gauge invariant, so the
// induced distribution on observables is the same.
//
// The RNG is counter-based (splitmix-style hashing of seed/stream/counter):
// runs are bitwise reproducible for a given seed and sweep schedule.
#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "aolat/energy.hpp"
#include "aolat/forms.hpp"

namespace aolat {

namespace rng {

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t hash3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return splitmix(splitmix(seed ^ 0x8BADF00D5EEDull * stream) ^ 0xD1B54A32D192ED03ull * counter);
}

inline double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    return double(hash3(seed, stream, counter) >> 11) * 0x1.0p-53;
}

// standard normal via Box-Muller on two hashed uniforms
inline double normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
    double a = u01(seed, stream, 2 * counter);
    double b = u01(seed, stream, 2 * counter + 1);
    if (a <= 0) a = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(a)) * std::cos(2.0 * std::numbers::pi * b);
}

}  // namespace rng

template <int D>
struct GibbsConfig {
    double beta = 8.0;
    double w0 = 1.0;
    std::vector<IVec<D>> proposals;  // slip values; default nearest-neighbor set
    int sweeps = 1000;
    int burnin = 200;
    std::uint64_t seed = 1;
    std::vector<char> sigma_mask;  // optional: edges with 0 are frozen

    static std::vector<IVec<D>> default_proposals() {
        std::vector<IVec<D>> p;
        p.push_back(IVec<D>{});
        auto push_pm = [&p](IVec<D> v) {
            p.push_back(v);
            p.push_back(IVec<D>{} - v);
        };
        if constexpr (D == 3) {
            push_pm(IVec<3>{{1, 0, 0}});
            push_pm(IVec<3>{{0, 1, 0}});
            push_pm(IVec<3>{{0, 0, 1}});
            push_pm(IVec<3>{{0, -1, 1}});
            push_pm(IVec<3>{{1, 0, -1}});
            push_pm(IVec<3>{{-1, 1, 0}});
        } else {
            push_pm(IVec<2>{{1, 0}});
            push_pm(IVec<2>{{0, 1}});
            push_pm(IVec<2>{{-1, -1}});
        }
        return p;
    }
};

template <int D>
struct ChainState {
    const CellComplex<D>* cx = nullptr;
    PForm<D> u;
    SlipField<D> sigma;
    ChargeField<D> q;  // cached d sigma
    std::uint64_t sweep_count = 0;
    std::uint64_t proposed = 0, accepted = 0;
};

template <int D>
inline ChainState<D> make_chain(const CellComplex<D>& cx) {
    if (cx.spec.bc != Bc::Dirichlet)
        throw std::invalid_argument("gibbs: the sampler runs on Dirichlet boxes");
    ChainState<D> st;
    st.cx = &cx;
    st.u = PForm<D>(cx, 0);
    st.sigma = SlipField<D>(cx, 1);
    st.q = ChargeField<D>(cx, 2);
    return st;
}

template <int D>
inline double chain_hamiltonian(const ChainState<D>& st, const GibbsConfig<D>& cfg) {
    double w = 0;
    for (const auto& qv : st.q.values) w += lattice_norm2<D>(qv);
    return ao_energy(st.u, st.sigma) + cfg.w0 * w;
}

template <int D>
inline const std::vector<IVec<D>>& default_proposals_cache() {
    static const std::vector<IVec<D>> p = GibbsConfig<D>::default_proposals();
    return p;
}

// One full sweep: heat-bath over vertices, then Metropolis over edges.
template <int D>
inline void sweep(ChainState<D>& st, const GibbsConfig<D>& cfg) {
    const CellComplex<D>& cx = *st.cx;
    const double beta = cfg.beta;
    const auto& proposals = cfg.proposals.empty() ? default_proposals_cache<D>() : cfg.proposals;
    const std::uint64_t sw = st.sweep_count;

    // (a) heat-bath on u
    for (int v = 0; v < cx.n_cells(0); ++v) {
        Mat<D> p{};
        Vec<D> rhs{};
        for (const auto& ie : cx.coboundary_of[0][v]) {
            const int e = ie.cell;
            const Vec<D>& nv = cx.edge_delta[e];
            // locate the other endpoint (absent under Dirichlet: u = 0 there)
            Vec<D> other{};
            for (const auto& be : cx.boundary_of[1][e])
                if (be.cell != v) other = st.u.values[be.cell];
            Vec<D> sig = to_cartesian<D>(st.sigma.values[e]);
            // bond term ((u(head)-u(tail) - sig).n)^2; v enters with its sign
            Vec<D> w = (ie.sign > 0) ? other + sig : other - sig;
            p += outer(nv, nv);
            rhs += dot(w, nv) * nv;
        }
        Mat<D> l = cholesky(p);
        // mean: solve P mu = rhs
        Vec<D> y{}, mu{};
        for (int i = 0; i < D; ++i) {
            double s = rhs[i];
            for (int j = 0; j < i; ++j) s -= l(i, j) * y[j];
            y[i] = s / l(i, i);
        }
        for (int i = D - 1; i >= 0; --i) {
            double s = y[i];
            for (int j = i + 1; j < D; ++j) s -= l(j, i) * mu[j];
            mu[i] = s / l(i, i);
        }
        // draw: u = mu + L^{-T} z / sqrt(beta)
        Vec<D> z{};
        for (int i = 0; i < D; ++i) z[i] = rng::normal(cfg.seed, std::uint64_t(v), sw * 4 + i);
        Vec<D> x{};
        for (int i = D - 1; i >= 0; --i) {
            double s = z[i];
            for (int j = i + 1; j < D; ++j) s -= l(j, i) * x[j];
            x[i] = s / l(i, i);
        }
        st.u.values[v] = mu + (1.0 / std::sqrt(beta)) * x;
    }

    // (b) Metropolis on sigma
    PForm<D> du = d(st.u);
    for (int e = 0; e < cx.n_cells(1); ++e) {
        if (!cfg.sigma_mask.empty() && !cfg.sigma_mask[e]) continue;
        const std::uint64_t stream = std::uint64_t(cx.n_cells(0)) + std::uint64_t(e);
        int pick = int(rng::u01(cfg.seed, stream, sw * 4) * double(proposals.size()));
        if (pick >= int(proposals.size())) pick = int(proposals.size()) - 1;
        IVec<D> prop = proposals[pick];
        if (prop == st.sigma.values[e]) continue;
        const Vec<D>& nv = cx.edge_delta[e];
        double t_old = dot(du.values[e] - to_cartesian<D>(st.sigma.values[e]), nv);
        double t_new = dot(du.values[e] - to_cartesian<D>(prop), nv);
        double dh = 0.5 * (t_new * t_new - t_old * t_old);
        IVec<D> dq = prop - st.sigma.values[e];
        for (const auto& fe : cx.coboundary_of[1][e]) {
            IVec<D> qold = st.q.values[fe.cell];
            IVec<D> qnew = qold + (fe.sign > 0 ? dq : IVec<D>{} - dq);
            dh += cfg.w0 * (lattice_norm2<D>(qnew) - lattice_norm2<D>(qold));
        }
        ++st.proposed;
        bool accept = dh <= 0 || rng::u01(cfg.seed, stream, sw * 4 + 1) < std::exp(-beta * dh);
        if (accept) {
            ++st.accepted;
            for (const auto& fe : cx.coboundary_of[1][e])
                st.q.values[fe.cell] += (fe.sign > 0 ? dq : IVec<D>{} - dq);
            st.sigma.values[e] = prop;
        }
    }
    ++st.sweep_count;
}

struct Estimate {
    double mean = 0;
    double stderr_ = 0;
    int batches = 0;
    bool reliable = true;  // false when too few effective batches
};

// Batched-means estimate of a scalar time series.
inline Estimate batched_mean(const std::vector<double>& xs) {
    Estimate e;
    const int n = int(xs.size());
    if (n == 0) return {0, 0, 0, false};
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= n;
    e.mean = mean;
    int nb = 20;
    int bs = std::max(1, n / nb);
    nb = n / bs;
    double var = 0;
    for (int b = 0; b < nb; ++b) {
        double m = 0;
        for (int i = 0; i < bs; ++i) m += xs[b * bs + i];
        m /= bs;
        var += (m - mean) * (m - mean);
    }
    if (nb > 1) var /= (nb - 1) * nb;
    e.stderr_ = std::sqrt(var);
    e.batches = nb;
    e.reliable = nb >= 10;
    return e;
}

// The positional-order observable cos((u(y)-u(x)).v0).
template <int D>
inline double order_observable(const ChainState<D>& st, int x, int y, const Vec<D>& v0) {
    return std::cos(dot(st.u.values[y] - st.u.values[x], v0));
}

// Run a chain and estimate E[cos((u(y)-u(x)).v0)] with batched-means errors.
template <int D>
inline Estimate estimate_order(ChainState<D>& st, const GibbsConfig<D>& cfg, int x, int y,
                               const Vec<D>& v0) {
    if (v0.v == Vec<D>{}.v) return {1.0, 0.0, 0, true};  // v0 = 0: observable is exactly 1
    std::vector<double> series;
    series.reserve(cfg.sweeps);
    for (int i = 0; i < cfg.burnin; ++i) sweep(st, cfg);
    for (int i = 0; i < cfg.sweeps; ++i) {
        sweep(st, cfg);
        series.push_back(order_observable(st, x, y, v0));
    }
    return batched_mean(series);
}

}  // namespace aolat
