// Cellular complexes of the FCC and triangular lattices on finite boxes.
//
// Cells are stored once, in a canonical orientation, ordered lexicographically
// by anchor coordinates (n1,n2,n3) and then by type index.  Forms store one
// value per stored cell and apply a sign when a cell is accessed with the
// opposite orientation.  Signed incidence tables realize the boundary maps
//   edge (x1,x2)        -> {x1,x2} with signs (-,+),
//   face (x1,x2,x3)     -> {(x1,x2),(x2,x3),(x3,x1)},
//   volume v            -> faces f with sign[(G(f)-G(v)).o(f)] = o(v),
// and the composition of two boundary maps vanishes identically.
//
// Boundary conditions:
//   Dirichlet  cells of the infinite lattice whose vertex set meets the box;
//              references to cells entirely outside are dropped, which pins
//              form values there to zero.
//   Neumann    cells with all vertices inside the box.
//   Periodic   anchors wrap with period N in every lattice direction.
#pragma once

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "aolat/lattice.hpp"
#include "aolat/vec.hpp"

namespace aolat {

struct CellKey {
    Coord anchor{0, 0, 0};
    int type = 0;
    friend bool operator==(const CellKey& a, const CellKey& b) {
        return a.anchor == b.anchor && a.type == b.type;
    }
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& k) const {
        std::uint64_t h = 1469598103934665603ull;
        auto mix = [&h](std::uint64_t x) {
            h ^= x;
            h *= 1099511628211ull;
        };
        mix(std::uint64_t(std::uint32_t(k.anchor[0])));
        mix(std::uint64_t(std::uint32_t(k.anchor[1])));
        mix(std::uint64_t(std::uint32_t(k.anchor[2])));
        mix(std::uint64_t(std::uint32_t(k.type)));
        return std::size_t(h);
    }
};

struct IncidenceEntry {
    std::int32_t cell = -1;  // index into the (p-1)-cell table
    std::int8_t sign = 0;    // +-1
};

// A (cell id, orientation sign) pair, used when an operation needs to talk
// about a cell in a non-canonical orientation.
struct SignedCell {
    std::int32_t cell = -1;
    std::int8_t sign = 0;
};

template <int D>
class CellComplex {
  public:
    using Traits = LatticeTraits<D>;

    LatticeSpec spec;

    // cells[p]: canonical cells of dimension p.
    std::array<std::vector<CellKey>, 4> cells;
    // boundary[p]: for each p-cell, its signed (p-1)-boundary entries (p>=1).
    std::array<std::vector<std::vector<IncidenceEntry>>, 4> boundary_of;
    // coboundary[p]: for each p-cell, signed (p+1)-cells containing it.
    std::array<std::vector<std::vector<IncidenceEntry>>, 4> coboundary_of;

    // cached geometry
    std::vector<Vec<D>> edge_delta;    // y-x per canonical edge, |delta| = 1
    std::vector<Vec<D>> vertex_pos;    // Cartesian position per vertex
    std::vector<Vec<D>> face_normal;   // orientation vector o(f) per face (3D: cross; 2D: unused)

    int pmax() const { return D; }
    int n_cells(int p) const { return int(cells[p].size()); }

    int index_of(int p, const CellKey& key) const {
        auto it = index_[p].find(canonical_key(key));
        return it == index_[p].end() ? -1 : it->second;
    }

    const CellKey& cell(int p, int i) const { return cells[p][i]; }

    // Ordered vertex coordinate list of a cell, in its canonical orientation.
    std::vector<Coord> vertices_of(int p, int i) const {
        const CellKey& k = cells[p][i];
        std::vector<Coord> out;
        if (p == 0) {
            out.push_back(k.anchor);
        } else if (p == 1) {
            out.push_back(k.anchor);
            out.push_back(coord_add(k.anchor, Traits::edge_dir[k.type]));
        } else if (p == 2) {
            for (const Coord& off : Traits::face_verts[k.type]) out.push_back(coord_add(k.anchor, off));
        } else {
            for (const Coord& off : vol_verts(k.type)) out.push_back(coord_add(k.anchor, off));
        }
        return out;
    }

    // Signed boundary of the i-th p-cell.  p = 0 has no boundary.
    const std::vector<IncidenceEntry>& boundary(int p, int i) const {
        if (p == 0) throw std::invalid_argument("boundary: 0-cells have no boundary");
        return boundary_of[p][i];
    }

    bool in_box(const Coord& n) const {
        for (int i = 0; i < D; ++i)
            if (n[i] < spec.lo() || n[i] > spec.hi()) return false;
        return true;
    }

    // --- construction -----------------------------------------------------

    static CellComplex build(const LatticeSpec& spec) {
        spec.validate();
        if ((spec.kind == LatticeKind::FCC3D) != (D == 3))
            throw std::invalid_argument("build_complex: lattice kind does not match dimension");
        CellComplex cx;
        cx.spec = spec;
        cx.build_tables();
        cx.build_incidence();
        cx.cache_geometry();
        return cx;
    }

    // Canonicalize an ordered pair of vertex coordinates into (edge key, sign).
    static std::pair<CellKey, int> canonical_edge(const Coord& a, const Coord& b) {
        Coord d = coord_sub(b, a);
        for (int l = 0; l < Traits::n_edge_types; ++l) {
            if (d == Traits::edge_dir[l]) return {CellKey{a, l}, +1};
            Coord neg = coord_sub(Coord{0, 0, 0}, Traits::edge_dir[l]);
            if (d == neg) return {CellKey{b, l}, -1};
        }
        throw std::invalid_argument("canonical_edge: not a nearest-neighbor pair");
    }

    // Canonicalize an ordered vertex triple into (face key, orientation sign).
    static std::pair<CellKey, int> canonical_face(const Coord& a, const Coord& b, const Coord& c) {
        for (int t = 0; t < Traits::n_face_types; ++t) {
            for (const Coord& v : {a, b, c}) {
                bool match = true;
                // the face type at anchor v must reproduce the vertex set
                std::array<Coord, 3> w;
                for (int i = 0; i < 3; ++i) w[i] = coord_add(v, Traits::face_verts[t][i]);
                for (const Coord& x : {a, b, c}) {
                    if (x != w[0] && x != w[1] && x != w[2]) {
                        match = false;
                        break;
                    }
                }
                if (!match) continue;
                int sign = orientation_match(std::array<Coord, 3>{a, b, c}, w);
                return {CellKey{v, t}, sign};
            }
        }
        throw std::invalid_argument("canonical_face: not a lattice face");
    }

    std::string summary_json() const;
    std::uint64_t content_hash() const;

  private:
    std::array<std::unordered_map<CellKey, int, CellKeyHash, std::equal_to<CellKey>>, 4> index_;

    static const std::vector<Coord>& vol_verts(int t) {
        static const std::vector<Coord> r(LatticeTraits<3>::rtet.begin(), LatticeTraits<3>::rtet.end());
        static const std::vector<Coord> g(LatticeTraits<3>::gtet.begin(), LatticeTraits<3>::gtet.end());
        static const std::vector<Coord> o(LatticeTraits<3>::oct.begin(), LatticeTraits<3>::oct.end());
        static const std::vector<Coord>* table[3] = {&r, &g, &o};
        return *table[t];
    }

    // +1 if the ordered triple u has the same orientation as w, else -1.
    static int orientation_match(const std::array<Coord, 3>& u, const std::array<Coord, 3>& w) {
        if constexpr (D == 3) {
            Vec<3> nu = cross(Traits::cartesian(u[1]) - Traits::cartesian(u[0]),
                              Traits::cartesian(u[2]) - Traits::cartesian(u[0]));
            Vec<3> nw = cross(Traits::cartesian(w[1]) - Traits::cartesian(w[0]),
                              Traits::cartesian(w[2]) - Traits::cartesian(w[0]));
            double s = dot(nu, nw);
            if (std::abs(s) < 1e-9) throw std::logic_error("degenerate face orientation");
            return s > 0 ? +1 : -1;
        } else {
            double su = cross_z(Traits::cartesian(u[1]) - Traits::cartesian(u[0]),
                                Traits::cartesian(u[2]) - Traits::cartesian(u[0]));
            double sw = cross_z(Traits::cartesian(w[1]) - Traits::cartesian(w[0]),
                                Traits::cartesian(w[2]) - Traits::cartesian(w[0]));
            return su * sw > 0 ? +1 : -1;
        }
    }

    Coord wrap(Coord n) const {
        if (spec.bc != Bc::Periodic) return n;
        const int lo = spec.lo(), N = spec.N;
        for (int i = 0; i < D; ++i) {
            int r = (n[i] - lo) % N;
            if (r < 0) r += N;
            n[i] = lo + r;
        }
        return n;
    }

    CellKey canonical_key(CellKey k) const {
        k.anchor = wrap(k.anchor);
        if constexpr (D == 2) k.anchor[2] = 0;
        return k;
    }

    bool vertex_in_lambda(const Coord& n) const {
        if (spec.bc == Bc::Periodic) return true;
        return in_box(n);
    }

    template <class VertRange>
    bool cell_present(const VertRange& verts) const {
        int inside = 0, total = 0;
        for (const Coord& v : verts) {
            ++total;
            if (vertex_in_lambda(v)) ++inside;
        }
        if (spec.bc == Bc::Dirichlet) return inside > 0;
        if (spec.bc == Bc::Neumann) return inside == total;
        return true;  // periodic: anchor-filtered elsewhere
    }

    void add_cell(int p, const CellKey& key) {
        CellKey k = canonical_key(key);
        if (index_[p].count(k)) return;
        index_[p][k] = int(cells[p].size());
        cells[p].push_back(k);
    }

    void build_tables() {
        const int lo = spec.lo(), hi = spec.hi();
        const int margin = (spec.bc == Bc::Periodic) ? 0 : 2;
        Coord n{0, 0, 0};
        const int zlo = (D == 3) ? lo - margin : 0, zhi = (D == 3) ? hi + margin : 0;
        for (n[0] = lo - margin; n[0] <= hi + margin; ++n[0])
        for (n[1] = lo - margin; n[1] <= hi + margin; ++n[1])
        for (n[2] = zlo; n[2] <= zhi; ++n[2]) {
            if (spec.bc == Bc::Periodic && !in_box(n)) continue;
            // vertices
            if (vertex_in_lambda(n) || spec.bc == Bc::Periodic) {
                if (cell_present(std::array<Coord, 1>{n})) add_cell(0, CellKey{n, 0});
            }
            // edges
            for (int t = 0; t < Traits::n_edge_types; ++t) {
                std::array<Coord, 2> vv{n, coord_add(n, Traits::edge_dir[t])};
                if (spec.bc == Bc::Periodic || cell_present(vv)) add_cell(1, CellKey{n, t});
            }
            // faces
            for (int t = 0; t < Traits::n_face_types; ++t) {
                std::array<Coord, 3> vv;
                for (int i = 0; i < 3; ++i) vv[i] = coord_add(n, Traits::face_verts[t][i]);
                if (spec.bc == Bc::Periodic || cell_present(vv)) add_cell(2, CellKey{n, t});
            }
            // volumes
            if constexpr (D == 3) {
                for (int t = 0; t < Traits::n_vol_types; ++t) {
                    const auto& off = vol_verts(t);
                    std::vector<Coord> vv;
                    vv.reserve(off.size());
                    for (const Coord& o : off) vv.push_back(coord_add(n, o));
                    if (spec.bc == Bc::Periodic || cell_present(vv)) add_cell(3, CellKey{n, t});
                }
            }
        }
    }

    void push_incidence(int p, int parent, const CellKey& child, int sign) {
        int ci = index_of(p - 1, child);
        if (ci < 0) {
            if (spec.bc == Bc::Neumann)
                throw std::logic_error("Neumann complex: missing boundary cell");
            return;  // Dirichlet: value pinned to zero outside
        }
        boundary_of[p][parent].push_back(IncidenceEntry{std::int32_t(ci), std::int8_t(sign)});
    }

    void build_incidence() {
        for (int p = 1; p <= D; ++p) boundary_of[p].assign(cells[p].size(), {});

        // edges -> vertices: d0 u(e) = u(y) - u(x)
        for (int i = 0; i < n_cells(1); ++i) {
            const CellKey& k = cells[1][i];
            push_incidence(1, i, CellKey{k.anchor, 0}, -1);
            push_incidence(1, i, CellKey{coord_add(k.anchor, Traits::edge_dir[k.type]), 0}, +1);
        }
        // faces -> edges
        for (int i = 0; i < n_cells(2); ++i) {
            const CellKey& k = cells[2][i];
            std::array<Coord, 3> v;
            for (int j = 0; j < 3; ++j) v[j] = coord_add(k.anchor, Traits::face_verts[k.type][j]);
            for (int j = 0; j < 3; ++j) {
                auto [ek, s] = canonical_edge(v[j], v[(j + 1) % 3]);
                push_incidence(2, i, ek, s);
            }
        }
        // volumes -> faces, via the outward-orientation sign test
        if constexpr (D == 3) {
            static const auto stencil = volume_face_stencils();
            for (int i = 0; i < n_cells(3); ++i) {
                const CellKey& k = cells[3][i];
                for (const auto& [fk, s] : stencil[k.type]) {
                    CellKey shifted{coord_add(k.anchor, fk.anchor), fk.type};
                    push_incidence(3, i, shifted, s);
                }
            }
        }

        for (int p = 0; p < D; ++p) {
            coboundary_of[p].assign(cells[p].size(), {});
            for (int i = 0; i < n_cells(p + 1); ++i)
                for (const auto& e : boundary_of[p + 1][i])
                    coboundary_of[p][e.cell].push_back(IncidenceEntry{std::int32_t(i), e.sign});
        }
    }

    // For each volume type: list of (face key relative to the anchor, sign).
    static std::array<std::vector<std::pair<CellKey, int>>, 3> volume_face_stencils()
        requires(D == 3)
    {
        std::array<std::vector<std::pair<CellKey, int>>, 3> out;
        for (int t = 0; t < 3; ++t) {
            const auto& verts = vol_verts(t);
            Vec<3> gv{};
            for (const Coord& v : verts) gv += Traits::cartesian(v);
            gv *= 1.0 / double(verts.size());
            const int n = int(verts.size());
            for (int a = 0; a < n; ++a)
                for (int b = a + 1; b < n; ++b)
                    for (int c = b + 1; c < n; ++c) {
                        // keep only triangles of mutually nearest-neighbor vertices
                        if (!is_bond(verts[a], verts[b]) || !is_bond(verts[b], verts[c]) ||
                            !is_bond(verts[a], verts[c]))
                            continue;
                        auto [fk, orient] = canonical_face(verts[a], verts[b], verts[c]);
                        // orientation vector of the canonical face
                        std::array<Coord, 3> w;
                        for (int i = 0; i < 3; ++i)
                            w[i] = coord_add(fk.anchor, Traits::face_verts[fk.type][i]);
                        Vec<3> of = cross(Traits::cartesian(w[1]) - Traits::cartesian(w[0]),
                                          Traits::cartesian(w[2]) - Traits::cartesian(w[0]));
                        Vec<3> gf = (1.0 / 3.0) * (Traits::cartesian(w[0]) + Traits::cartesian(w[1]) +
                                                   Traits::cartesian(w[2]));
                        double s = dot(gf - gv, of);
                        if (std::abs(s) < 1e-9) throw std::logic_error("volume face sign test degenerate");
                        out[t].push_back({fk, s > 0 ? +1 : -1});
                    }
            if (out[t].size() != (verts.size() == 4 ? 4u : 8u))
                throw std::logic_error("volume boundary enumeration failed");
        }
        return out;
    }

    static bool is_bond(const Coord& a, const Coord& b) {
        Coord d = coord_sub(b, a);
        for (int l = 0; l < Traits::n_edge_types; ++l) {
            if (d == Traits::edge_dir[l]) return true;
            if (d == coord_sub(Coord{0, 0, 0}, Traits::edge_dir[l])) return true;
        }
        return false;
    }

    void cache_geometry() {
        vertex_pos.resize(cells[0].size());
        for (int i = 0; i < n_cells(0); ++i) vertex_pos[i] = Traits::cartesian(cells[0][i].anchor);
        edge_delta.resize(cells[1].size());
        for (int i = 0; i < n_cells(1); ++i)
            edge_delta[i] = Traits::cartesian(Traits::edge_dir[cells[1][i].type]);
        if constexpr (D == 3) {
            face_normal.resize(cells[2].size());
            for (int i = 0; i < n_cells(2); ++i) {
                auto v = vertices_of(2, i);
                face_normal[i] = cross(Traits::cartesian(v[1]) - Traits::cartesian(v[0]),
                                       Traits::cartesian(v[2]) - Traits::cartesian(v[0]));
            }
        }
    }
};

// FNV-1a over the full cell/incidence tables; used for golden tests and run
// manifests.
template <int D>
inline std::uint64_t CellComplex<D>::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::int64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= std::uint64_t((x >> (8 * i)) & 0xff);
            h *= 1099511628211ull;
        }
    };
    mix(int(spec.kind));
    mix(spec.N);
    mix(int(spec.bc));
    for (int p = 0; p <= D; ++p) {
        mix(n_cells(p));
        for (const CellKey& k : cells[p]) {
            mix(k.anchor[0]);
            mix(k.anchor[1]);
            mix(k.anchor[2]);
            mix(k.type);
        }
        if (p >= 1)
            for (const auto& row : boundary_of[p])
                for (const auto& e : row) {
                    mix(e.cell);
                    mix(e.sign);
                }
    }
    return h;
}

template <int D>
inline std::string CellComplex<D>::summary_json() const {
    std::ostringstream os;
    os << "{\"lattice\":\"" << to_string(spec.kind) << "\",\"N\":" << spec.N << ",\"bc\":\""
       << to_string(spec.bc) << "\",\"cells\":[";
    for (int p = 0; p <= D; ++p) os << (p ? "," : "") << n_cells(p);
    os << "],\"content_hash\":\"";
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(content_hash()));
    os << buf << "\"}";
    return os.str();
}

template <int D>
inline CellComplex<D> build_complex(const LatticeSpec& spec) {
    return CellComplex<D>::build(spec);
}

}  // namespace aolat
