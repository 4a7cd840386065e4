#include <doctest.h>

#include <map>

#include "aolat/gibbs.hpp"
#include "aolat/hodge.hpp"

using namespace aolat;

namespace {

// <g, A_Lambda^{-1} g> for g = (1_x - 1_y) v0 on a Dirichlet box
template <int D>
double gaussian_pair_quadform(const CellComplex<D>& cx, int x, int y, const Vec<D>& v0) {
    PForm<D> g(cx, 0);
    g.values[x] += v0;
    g.values[y] -= v0;
    PForm<D> z = cg_solve<D>([](const PForm<D>& u) { return apply_A(u); }, g, SolveOptions{1e-11, 0});
    return inner(g, z);
}

}  // namespace

TEST_CASE("v0 = 0 gives exactly 1; observables stay in [-1, 1]") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 3, Bc::Dirichlet});
    GibbsConfig<2> cfg;
    cfg.beta = 2.0;
    cfg.sweeps = 50;
    cfg.burnin = 10;
    auto st = make_chain(cx);
    auto est = estimate_order(st, cfg, 0, 1, Vec<2>{});
    CHECK(est.mean == 1.0);
    CHECK(est.stderr_ == 0.0);

    auto st2 = make_chain(cx);
    GibbsConfig<2> cfg2 = cfg;
    for (int i = 0; i < 50; ++i) {
        sweep(st2, cfg2);
        double o = order_observable(st2, 0, 1, LatticeTraits<2>::dual(0));
        CHECK(o >= -1.0);
        CHECK(o <= 1.0);
    }
}

TEST_CASE("beta -> infinity with frozen slips drives u to the Dirichlet minimizer 0") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 3, Bc::Dirichlet});
    GibbsConfig<3> cfg;
    cfg.beta = 1e8;
    cfg.proposals = {IVec<3>{}};  // slips frozen at zero
    auto st = make_chain(cx);
    for (int i = 0; i < 100; ++i) sweep(st, cfg);
    double worst = 0;
    for (const auto& v : st.u.values) worst = std::max(worst, norm(v));
    CHECK(worst < 1e-2);
}

TEST_CASE("frozen-slip chain is an exact Gaussian sampler (covariance oracle)") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 3, Bc::Dirichlet});
    int x = cx.index_of(0, CellKey{{0, 0, 0}, 0});
    int y = cx.index_of(0, CellKey{{1, 1, 1}, 0});
    REQUIRE(x >= 0);
    REQUIRE(y >= 0);
    Vec<3> v0 = 0.25 * LatticeTraits<3>::dual(0);  // scaled to keep cos well away from wrap
    const double beta = 2.0;
    double target = gaussian_pair_quadform(cx, x, y, v0) / beta;

    GibbsConfig<3> cfg;
    cfg.beta = beta;
    cfg.proposals = {IVec<3>{}};
    cfg.seed = 7;
    auto st = make_chain(cx);
    for (int i = 0; i < 200; ++i) sweep(st, cfg);
    std::vector<double> z2;
    for (int i = 0; i < 6000; ++i) {
        sweep(st, cfg);
        double z = dot(st.u.values[x] - st.u.values[y], v0);
        z2.push_back(z * z);
    }
    auto est = batched_mean(z2);
    CHECK(est.reliable);
    CHECK(std::abs(est.mean - target) <= 3.0 * est.stderr_ + 0.02 * target);
}

TEST_CASE("acceptance rate of slip moves decreases with beta (10 seeds)") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 3, Bc::Dirichlet});
    std::vector<double> betas{0.5, 1.0, 2.0, 4.0};
    std::vector<double> rates;
    for (double beta : betas) {
        double acc = 0;
        for (int seed = 1; seed <= 10; ++seed) {
            GibbsConfig<2> cfg;
            cfg.beta = beta;
            cfg.seed = std::uint64_t(seed);
            auto st = make_chain(cx);
            for (int i = 0; i < 150; ++i) sweep(st, cfg);
            acc += double(st.accepted) / double(st.proposed);
        }
        rates.push_back(acc / 10.0);
    }
    for (std::size_t i = 0; i + 1 < rates.size(); ++i) CHECK(rates[i + 1] < rates[i]);
}

TEST_CASE("H + W is invariant under gauge transforms of the chain state") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 4, Bc::Dirichlet});
    GibbsConfig<2> cfg;
    cfg.beta = 1.0;
    cfg.seed = 3;
    auto st = make_chain(cx);
    for (int i = 0; i < 20; ++i) sweep(st, cfg);
    double h0 = chain_hamiltonian(st, cfg);
    std::uint64_t s = 5;
    LatForm<2> v(cx, 0);
    for (auto& val : v.values)
        for (int i = 0; i < 2; ++i) {
            s = s * 6364136223846793005ull + 1442695040888963407ull;
            val[i] = std::int64_t(s >> 62) - 1;
        }
    auto [u2, sig2] = gauge_transform(st.u, st.sigma, v);
    ChainState<2> st2 = st;
    st2.u = u2;
    st2.sigma = sig2;
    st2.q = dislocation_charge(sig2);
    CHECK(chain_hamiltonian(st2, cfg) == doctest::Approx(h0).epsilon(1e-10));
}

TEST_CASE("toy system: stationary slip marginal matches exact enumeration") {
    // two active interior edges on a tiny Dirichlet box; slips restricted to
    // {0, +-b1}; the u-marginalized target is exp(-beta (E_min + W)) up to a
    // sigma-independent Gaussian normalization
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 2, Bc::Dirichlet});
    int e1 = cx.index_of(1, CellKey{{0, 0, 0}, 0});
    int e2 = cx.index_of(1, CellKey{{0, 0, 0}, 1});
    REQUIRE(e1 >= 0);
    REQUIRE(e2 >= 0);
    GibbsConfig<2> cfg;
    cfg.beta = 1.0;
    cfg.w0 = 0.4;
    cfg.seed = 11;
    cfg.proposals = {IVec<2>{}, IVec<2>{{1, 0}}, IVec<2>{{-1, 0}}};
    cfg.sigma_mask.assign(cx.n_cells(1), 0);
    cfg.sigma_mask[e1] = 1;
    cfg.sigma_mask[e2] = 1;

    auto key_of = [&](const SlipField<2>& s) {
        return int(s.values[e1][0] + 1) * 3 + int(s.values[e2][0] + 1);
    };
    // exact target over the 9 states
    std::map<int, double> target;
    double zsum = 0;
    for (int a = -1; a <= 1; ++a)
        for (int b = -1; b <= 1; ++b) {
            SlipField<2> s(cx, 1);
            s.values[e1] = IVec<2>{{a, 0}};
            s.values[e2] = IVec<2>{{b, 0}};
            double e = relax(s, SolveOptions{1e-11, 0}).energy;
            double w = 0;
            ChargeField<2> q = dislocation_charge(s);
            for (const auto& qv : q.values) w += cfg.w0 * lattice_norm2<2>(qv);
            double wgt = std::exp(-cfg.beta * (e + w));
            target[(a + 1) * 3 + (b + 1)] = wgt;
            zsum += wgt;
        }
    for (auto& [k, v] : target) v /= zsum;

    auto st = make_chain(cx);
    for (int i = 0; i < 500; ++i) sweep(st, cfg);
    std::map<int, int> counts;
    const int T = 60000;
    for (int i = 0; i < T; ++i) {
        sweep(st, cfg);
        counts[key_of(st.sigma)]++;
    }
    for (const auto& [k, p] : target) {
        double freq = double(counts[k]) / T;
        // generous band: multinomial error inflated for autocorrelation
        double se = std::sqrt(p * (1 - p) / T) * 8 + 0.004;
        CHECK(std::abs(freq - p) <= 5 * se);
    }
}

TEST_CASE("large beta: order estimate matches the finite-box Gaussian oracle") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 4, Bc::Dirichlet});
    int x = cx.index_of(0, CellKey{{0, 0, 0}, 0});
    int y = cx.index_of(0, CellKey{{2, 0, 0}, 0});  // |x - y| = 2
    REQUIRE(x >= 0);
    REQUIRE(y >= 0);
    Vec<3> v0 = LatticeTraits<3>::dual(0);
    const double beta = 24.0;
    double quad = gaussian_pair_quadform(cx, x, y, v0);
    double oracle = std::exp(-quad / (2 * beta));

    GibbsConfig<3> cfg;
    cfg.beta = beta;
    cfg.seed = 17;
    cfg.sweeps = 4000;
    cfg.burnin = 300;
    auto st = make_chain(cx);
    auto est = estimate_order(st, cfg, x, y, v0);
    CHECK(est.reliable);
    CHECK(std::abs(est.mean - oracle) <= 3 * est.stderr_ + 0.01);
    MESSAGE("estimate ", est.mean, " +- ", est.stderr_, " vs Gaussian oracle ", oracle);
}

TEST_CASE("sampler requires a Dirichlet box") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 3, Bc::Neumann});
    CHECK_THROWS_AS(make_chain(cx), std::invalid_argument);
}

TEST_CASE("proposal truncation bias: radius-1 vs radius-2 slip sets agree at desk scale") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 3, Bc::Dirichlet});
    int x = cx.index_of(0, CellKey{{0, 0, 0}, 0});
    int y = cx.index_of(0, CellKey{{1, 1, 0}, 0});
    REQUIRE(x >= 0);
    REQUIRE(y >= 0);
    Vec<2> v0 = LatticeTraits<2>::dual(0);
    auto run = [&](bool radius2, std::uint64_t seed) {
        GibbsConfig<2> cfg;
        cfg.beta = 3.0;
        cfg.w0 = 1.0;
        cfg.seed = seed;
        cfg.sweeps = 4000;
        cfg.burnin = 300;
        cfg.proposals = GibbsConfig<2>::default_proposals();
        if (radius2) {
            // add the norm-sqrt3 and norm-2 lattice vectors
            for (auto base : {IVec<2>{{1, -1}}, IVec<2>{{2, 1}}, IVec<2>{{1, 2}}, IVec<2>{{2, 0}},
                              IVec<2>{{0, 2}}, IVec<2>{{2, 2}}}) {
                cfg.proposals.push_back(base);
                cfg.proposals.push_back(IVec<2>{} - base);
            }
        }
        auto st = make_chain(cx);
        return estimate_order(st, cfg, x, y, v0);
    };
    auto e1 = run(false, 21), e2 = run(true, 22);
    double band = 3 * (e1.stderr_ + e2.stderr_) + 0.01;
    MESSAGE("radius-1 ", e1.mean, " +- ", e1.stderr_, "; radius-2 ", e2.mean, " +- ", e2.stderr_);
    CHECK(std::abs(e1.mean - e2.mean) <= band);
}

TEST_CASE("the cached charge always equals d sigma exactly") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 4, Bc::Dirichlet});
    GibbsConfig<2> cfg;
    cfg.beta = 0.8;  // hot chain, many accepted slips
    cfg.seed = 99;
    auto st = make_chain(cx);
    for (int i = 0; i < 200; ++i) sweep(st, cfg);
    ChargeField<2> q = dislocation_charge(st.sigma);
    for (int f = 0; f < q.size(); ++f) CHECK((q.values[f] - st.q.values[f]).is_zero());
    CHECK(st.accepted > 0);
}
