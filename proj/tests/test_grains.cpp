#include <doctest.h>

#include <cmath>

#include "aolat/grains.hpp"

using namespace aolat;

namespace {

std::uint64_t state = 99;
double urand() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return double(state >> 11) * 0x1.0p-53;
}

// random connected region grown by BFS from the box center
template <int D>
std::unordered_set<int> random_region(const CellComplex<D>& cx, int target) {
    Coord c{0, 0, 0};
    int start = cx.index_of(0, CellKey{c, 0});
    REQUIRE(start >= 0);
    std::unordered_set<int> region{start};
    std::vector<int> frontier{start};
    while (int(region.size()) < target && !frontier.empty()) {
        int pick = int(urand() * frontier.size());
        if (pick >= int(frontier.size())) pick = int(frontier.size()) - 1;
        int v = frontier[pick];
        bool grow = false;
        for (const auto& e : cx.coboundary_of[0][v]) {
            for (const auto& be : cx.boundary_of[1][e.cell]) {
                if (be.cell == v || region.count(be.cell)) continue;
                // keep the region away from the box boundary
                bool interior = true;
                const Coord& a = cx.cell(0, be.cell).anchor;
                for (int i = 0; i < D; ++i)
                    if (a[i] < cx.spec.lo() + 1 || a[i] > cx.spec.hi() - 1) interior = false;
                if (!interior) continue;
                region.insert(be.cell);
                frontier.push_back(be.cell);
                grow = true;
                break;
            }
            if (grow) break;
        }
        if (!grow) frontier.erase(frontier.begin() + pick);
    }
    return region;
}

template <int D>
Mat<D> random_skew(double scale) {
    Mat<D> s{};
    if constexpr (D == 3) {
        double a = (2 * urand() - 1) * scale, b = (2 * urand() - 1) * scale,
               c = (2 * urand() - 1) * scale;
        s(0, 1) = a;
        s(1, 0) = -a;
        s(0, 2) = b;
        s(2, 0) = -b;
        s(1, 2) = c;
        s(2, 1) = -c;
    } else {
        double a = (2 * urand() - 1) * scale;
        s(0, 1) = a;
        s(1, 0) = -a;
    }
    return s;
}

}  // namespace

TEST_CASE("slip decomposition reconstructs skew matrices exactly") {
    for (int rep = 0; rep < 20; ++rep) {
        Mat<3> s = random_skew<3>(1.0);
        auto dec = slip_decompose(s);
        CHECK(dec.systems.size() == 12);
        CHECK(frob_norm(dec.reconstruct() - s) <= 1e-12 * (1 + frob_norm(s)));
        Mat<2> s2 = random_skew<2>(1.0);
        auto dec2 = slip_decompose(s2);
        CHECK(dec2.systems.size() == 3);
        CHECK(frob_norm(dec2.reconstruct() - s2) <= 1e-12 * (1 + frob_norm(s2)));
    }
    Mat<3> z{};
    auto dz = slip_decompose(z);
    for (double xi : dz.xi) CHECK(xi == 0.0);
    Mat<3> bad{};
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(slip_decompose(bad), std::invalid_argument);
}

TEST_CASE("S12-only skew activates exactly the b3 and b6 systems") {
    Mat<3> s{};
    s(0, 1) = 1.0;
    s(1, 0) = -1.0;
    auto dec = slip_decompose(s);
    for (std::size_t i = 0; i < dec.systems.size(); ++i) {
        bool active = std::abs(dec.xi[i]) > 0;
        bool is_b3_or_b6 = dec.systems[i].l == 2 || dec.systems[i].l == 5;
        CHECK(active == is_b3_or_b6);
    }
}

TEST_CASE("2D decomposition of S(theta): amplitudes (theta/2pi)(+1,-1,+1)") {
    const double theta = 0.2;
    Mat<2> s{};
    s(0, 1) = std::sqrt(3.0) * theta;
    s(1, 0) = -std::sqrt(3.0) * theta;
    auto dec = slip_decompose(s);
    const double c = theta / (2 * std::numbers::pi);
    REQUIRE(dec.systems.size() == 3);
    CHECK(dec.xi[0] == doctest::Approx(c));
    CHECK(dec.xi[1] == doctest::Approx(-c));
    CHECK(dec.xi[2] == doctest::Approx(c));
    CHECK(dec.systems[0].l == 0);
    CHECK(dec.systems[0].n == 1);
    CHECK(dec.systems[1].l == 1);
    CHECK(dec.systems[1].n == 0);
    CHECK(dec.systems[2].l == 2);
    CHECK(dec.systems[2].n == 2);
}

TEST_CASE("build_grain: zero S, boundary support, energy bound, boundary formula") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 6, Bc::Dirichlet});
    auto region = random_region(cx, 40);
    {
        GrainSpec<3> gs;
        gs.region = region;
        auto g = build_grain(cx, gs);
        CHECK(ao_energy(g.u, g.sigma) == 0.0);
        for (const auto& v : g.sigma.values) CHECK(v.is_zero());
    }
    GrainSpec<3> gs;
    gs.region = region;
    gs.S = random_skew<3>(0.8);
    auto g = build_grain(cx, gs);
    // support on boundary bonds only
    for (int e = 0; e < cx.n_cells(1); ++e) {
        if (g.sigma.values[e].is_zero()) continue;
        const auto& row = cx.boundary_of[1][e];
        int inside = 0;
        for (const auto& en : row) inside += region.count(en.cell);
        CHECK(inside == 1);
    }
    double h = ao_energy(g.u, g.sigma);
    CHECK(h <= 6.0 * g.boundary_bonds);
    // the boundary-bond reduction: every bond term is
    // [sum_(l,n) (x-y).b_l frac_(l,n)(x)]^2 with frac in [0,1)
    auto dec = slip_decompose(gs.S);
    double h2 = 0;
    for (int e = 0; e < cx.n_cells(1); ++e) {
        const auto& row = cx.boundary_of[1][e];
        if (row.size() != 2) continue;
        int tail = -1, head = -1;
        for (const auto& en : row) (en.sign < 0 ? tail : head) = en.cell;
        bool tin = region.count(tail), hin = region.count(head);
        if (tin == hin) continue;
        int x = tin ? tail : head;
        int y = tin ? head : tail;
        double term = 0;
        for (std::size_t i = 0; i < dec.systems.size(); ++i) {
            double a = dec.xi[i] * dot(cx.vertex_pos[x], LatticeTraits<3>::dual(dec.systems[i].n));
            double frac = a - std::floor(a);
            CHECK(frac >= 0.0);
            CHECK(frac <= 1.0);  // [0,1) up to floating-point at the boundary
            term += dot(cx.vertex_pos[x] - cx.vertex_pos[y], LatticeTraits<3>::basis(dec.systems[i].l)) * frac;
        }
        h2 += 0.5 * term * term;
    }
    CHECK(h == doctest::Approx(h2).epsilon(1e-10));
}

TEST_CASE("grain touching the box boundary is rejected") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 4, Bc::Neumann});
    GrainSpec<3> gs;
    gs.S = random_skew<3>(0.5);
    // region including a box-corner vertex lacks bonds in the Neumann complex
    gs.region = {cx.index_of(0, CellKey{{cx.spec.lo(), cx.spec.lo(), cx.spec.lo()}, 0})};
    CHECK_THROWS_AS(build_grain(cx, gs), std::invalid_argument);
}

TEST_CASE("bounded representative: |u| <= 6 on the grain, slip interior, energy kept") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 6, Bc::Dirichlet});
    for (int rep = 0; rep < 20; ++rep) {
        GrainSpec<3> gs;
        gs.region = random_region(cx, 30 + int(urand() * 170));
        gs.S = random_skew<3>(1.0 / std::sqrt(3.0));  // ||S|| <= 1
        auto g = build_grain(cx, gs);
        auto [u, sig] = bounded_representative(cx, gs, g);
        double h0 = ao_energy(g.u, g.sigma), h1 = ao_energy(u, sig);
        CHECK(h1 == doctest::Approx(h0).epsilon(1e-12));
        for (int v = 0; v < cx.n_cells(0); ++v) {
            if (gs.region.count(v)) {
                CHECK(norm(u.values[v]) <= 6.0);
            } else {
                CHECK(norm(u.values[v]) == 0.0);
            }
        }
        for (int e = 0; e < cx.n_cells(1); ++e) {
            if (sig.values[e].is_zero()) continue;
            const auto& row = cx.boundary_of[1][e];
            int inside = 0;
            for (const auto& en : row) inside += gs.region.count(en.cell);
            CHECK(inside == int(row.size()));  // interior bonds only
        }
        // identical charges
        ChargeField<3> q0 = dislocation_charge(g.sigma);
        ChargeField<3> q1 = dislocation_charge(sig);
        for (int f = 0; f < q0.size(); ++f) CHECK((q0.values[f] - q1.values[f]).is_zero());
    }
}

TEST_CASE("naive slip-free grain energy grows superlinearly with the region") {
    auto cx = build_complex<3>(LatticeSpec{LatticeKind::FCC3D, 16, Bc::Dirichlet});
    Mat<3> s = random_skew<3>(0.5);
    std::vector<double> per_site;
    std::vector<int> sizes;
    for (int L : {3, 4, 5, 6}) {
        std::unordered_set<int> cube;
        for (int i = 0; i < L; ++i)
            for (int j = 0; j < L; ++j)
                for (int k = 0; k < L; ++k) {
                    int v = cx.index_of(0, CellKey{{i - L / 2, j - L / 2, k - L / 2}, 0});
                    REQUIRE(v >= 0);
                    cube.insert(v);
                }
        per_site.push_back(naive_grain_energy(cx, cube, s) / double(cube.size()));
        sizes.push_back(int(cube.size()));
    }
    // superlinear in |G|: energy per site increases along the ladder
    for (std::size_t i = 0; i + 1 < per_site.size(); ++i) CHECK(per_site[i + 1] > per_site[i]);
}

TEST_CASE("2D grain with the Fig.-1 rotation: relax lowers the energy, charge support fixed") {
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 16, Bc::Neumann});
    GrainSpec<2> gs;
    gs.S(0, 1) = -1.0 / 5.0;
    gs.S(1, 0) = 1.0 / 5.0;
    // hexagon-ish region around the center
    for (int v = 0; v < cx.n_cells(0); ++v) {
        if (norm(cx.vertex_pos[v]) < 4.2) gs.region.insert(v);
        const Coord& a = cx.cell(0, v).anchor;
        for (int i = 0; i < 2; ++i)
            if (a[i] < cx.spec.lo() + 1 || a[i] > cx.spec.hi() - 1) gs.region.erase(v);
    }
    REQUIRE(region_connected(cx, gs.region));
    auto g = build_grain(cx, gs);
    auto [u, sig] = bounded_representative(cx, gs, g);
    double h_before = ao_energy(u, sig);
    auto r = relax(sig, SolveOptions{1e-10, 0});
    CHECK(r.energy <= h_before + 1e-9);
    CHECK(h_before <= 6.0 * g.boundary_bonds);
    // charge support: only faces meeting the grain boundary carry dq
    ChargeField<2> q = dislocation_charge(sig);
    int support = 0;
    for (int f = 0; f < q.size(); ++f) {
        if (q.values[f].is_zero()) continue;
        ++support;
        bool touches_in = false, touches_out = false;
        for (const Coord& vv : cx.vertices_of(2, f)) {
            int vid = cx.index_of(0, CellKey{vv, 0});
            (gs.region.count(vid) ? touches_in : touches_out) = true;
        }
        CHECK(touches_in);
        CHECK(touches_out);
    }
    CHECK(support > 0);
    CHECK(support < 2 * int(gs.region.size()));
}

TEST_CASE("strip grain: zero angle, wall slip statistics, O(theta) row agreement") {
    {
        auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 10, Bc::Neumann});
        auto [region, sigma] = strip_grain_2d(cx, 3, 0.0);
        for (const auto& v : sigma.values) CHECK(v.is_zero());
    }
    // average |charge| per row over a tall wall equals 3 theta
    const double theta = 1.0 / 30.0;
    const int H = 600;
    double total_jump = 0;
    for (int r = 0; r < H; ++r)
        total_jump += std::abs(double(strip_wall_slip(theta, r + 1) - strip_wall_slip(theta, r)));
    CHECK(total_jump / H == doctest::Approx(3 * theta).epsilon(0.05));

    // on a real box: isolated charges of size 1 or 2 in units of b1
    auto cx = build_complex<2>(LatticeSpec{LatticeKind::TRI2D, 24, Bc::Neumann});
    auto [region, sigma] = strip_grain_2d(cx, 4, theta);
    ChargeField<2> q = dislocation_charge(sigma);
    for (int f = 0; f < q.size(); ++f) {
        if (q.values[f].is_zero()) continue;
        CHECK(q.values[f][1] == 0);
        CHECK(std::abs(q.values[f][0]) <= 2);
    }
    // left-wall slips at consecutive rows agree up to O(theta) corrections
    int diffs = 0, rows = 0;
    for (int r = -200; r < 200; ++r) {
        ++rows;
        if (strip_wall_slip(theta, r) != strip_wall_slip(theta, r + 1)) ++diffs;
    }
    CHECK(double(diffs) / rows <= 3.5 * theta);
}
