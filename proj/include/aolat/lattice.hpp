// Lattice geometry: FCC (3D) and triangular (2D) bases, dual bases, and the
// fundamental cell stencils of the associated cellular complexes.
//
// FCC basis (all |b_l| = 1):
//   b1 = (0,1,1)/sqrt2, b2 = (1,0,1)/sqrt2, b3 = (1,1,0)/sqrt2,
//   b4 = b3-b2, b5 = b1-b3, b6 = b2-b1.
// Dual basis m_j with b_i.m_j = 2*pi*delta_ij:
//   m1 = sqrt2*pi*(-1,1,1), m2 = sqrt2*pi*(1,-1,1), m3 = sqrt2*pi*(1,1,-1),
//   and m4 = m1+m2+m3.
//
// Triangular basis: b1 = (1,0), b2 = (-1/2, sqrt3/2), b3 = -b1-b2.
// Dual: m1 = (2*pi, 2*pi/sqrt3), m2 = (0, 4*pi/sqrt3), m3 = m1-m2.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

#include "aolat/vec.hpp"

namespace aolat {

enum class LatticeKind { FCC3D, TRI2D };
enum class Bc { Dirichlet, Neumann, Periodic };

inline const char* to_string(Bc bc) {
    switch (bc) {
        case Bc::Dirichlet: return "dirichlet";
        case Bc::Neumann: return "neumann";
        case Bc::Periodic: return "periodic";
    }
    return "?";
}

inline const char* to_string(LatticeKind k) { return k == LatticeKind::FCC3D ? "fcc3d" : "tri2d"; }

// Coordinates of lattice points are integer triples/pairs n with
// x = sum_i n_i b_i.  Coord always carries 3 slots; 2D uses the first two.
using Coord = std::array<int, 3>;

inline Coord coord_add(const Coord& a, const Coord& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Coord coord_sub(const Coord& a, const Coord& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <int D>
struct LatticeTraits;

template <>
struct LatticeTraits<3> {
    static constexpr int dim = 3;
    static constexpr int n_edge_types = 6;   // bond directions b1..b6
    static constexpr int n_face_types = 8;   // f1..f8 of the FCC complex
    static constexpr int n_vol_types = 3;    // r-tet, g-tet, octahedron
    static constexpr int faces_per_edge = 4; // triangles sharing a bond

    // bond directions in lattice coordinates
    static constexpr std::array<Coord, 6> edge_dir = {
        Coord{1, 0, 0},  Coord{0, 1, 0},  Coord{0, 0, 1},
        Coord{0, -1, 1}, Coord{1, 0, -1}, Coord{-1, 1, 0}};

    // face types as ordered vertex offsets (orientation of the stored cell)
    static constexpr std::array<std::array<Coord, 3>, 8> face_verts = {{
        {Coord{0, 0, 0}, Coord{0, 1, 0}, Coord{0, 0, 1}},     // f1 = (0,b2,b3)
        {Coord{0, 0, 0}, Coord{0, -1, 0}, Coord{0, 0, -1}},   // f2 = (0,-b2,-b3)
        {Coord{0, 0, 0}, Coord{0, 0, 1}, Coord{1, 0, 0}},     // f3 = (0,b3,b1)
        {Coord{0, 0, 0}, Coord{0, 0, -1}, Coord{-1, 0, 0}},   // f4 = (0,-b3,-b1)
        {Coord{0, 0, 0}, Coord{1, 0, 0}, Coord{0, 1, 0}},     // f5 = (0,b1,b2)
        {Coord{0, 0, 0}, Coord{-1, 0, 0}, Coord{0, -1, 0}},   // f6 = (0,-b1,-b2)
        {Coord{0, 0, 0}, Coord{-1, 1, 0}, Coord{-1, 0, 1}},   // f7 = (0,b6,-b5)
        {Coord{0, 0, 0}, Coord{1, -1, 0}, Coord{1, 0, -1}},   // f8 = (0,-b6,b5)
    }};

    // volume types as vertex offset lists (size 4,4,6)
    static constexpr std::array<Coord, 4> rtet = {Coord{0, 0, 0}, Coord{1, 0, 0}, Coord{0, 1, 0},
                                                  Coord{0, 0, 1}};
    static constexpr std::array<Coord, 4> gtet = {Coord{0, 0, 0}, Coord{-1, 0, 0}, Coord{0, -1, 0},
                                                  Coord{0, 0, -1}};
    static constexpr std::array<Coord, 6> oct = {Coord{1, 0, 0}, Coord{0, 1, 0}, Coord{0, 0, 1},
                                                 Coord{1, 1, 0}, Coord{1, 0, 1}, Coord{0, 1, 1}};

    static Vec<3> basis(int l) {
        const double s = 1.0 / std::sqrt(2.0);
        static const std::array<Vec<3>, 6> b = {
            Vec<3>{{0, s, s}},  Vec<3>{{s, 0, s}},  Vec<3>{{s, s, 0}},
            Vec<3>{{s, s, 0}} - Vec<3>{{s, 0, s}},   // b4 = b3-b2
            Vec<3>{{0, s, s}} - Vec<3>{{s, s, 0}},   // b5 = b1-b3
            Vec<3>{{s, 0, s}} - Vec<3>{{0, s, s}}};  // b6 = b2-b1
        return b[l];
    }

    // dual basis; index 3 is m4 = m1+m2+m3
    static Vec<3> dual(int j) {
        const double c = std::sqrt(2.0) * std::numbers::pi;
        static const std::array<Vec<3>, 4> m = {Vec<3>{{-c, c, c}}, Vec<3>{{c, -c, c}},
                                                Vec<3>{{c, c, -c}}, Vec<3>{{c, c, c}}};
        return m[j];
    }

    static Vec<3> cartesian(const Coord& n) {
        return double(n[0]) * basis(0) + double(n[1]) * basis(1) + double(n[2]) * basis(2);
    }
};

template <>
struct LatticeTraits<2> {
    static constexpr int dim = 2;
    static constexpr int n_edge_types = 3;
    static constexpr int n_face_types = 2;
    static constexpr int n_vol_types = 0;
    static constexpr int faces_per_edge = 2;

    static constexpr std::array<Coord, 3> edge_dir = {Coord{1, 0, 0}, Coord{0, 1, 0},
                                                      Coord{-1, -1, 0}};

    // type 1: (x, x+b1, x-b3); type 2: (x, x-b2, x+b1).  Both counterclockwise.
    static constexpr std::array<std::array<Coord, 3>, 2> face_verts = {{
        {Coord{0, 0, 0}, Coord{1, 0, 0}, Coord{1, 1, 0}},
        {Coord{0, 0, 0}, Coord{0, -1, 0}, Coord{1, 0, 0}},
    }};

    static Vec<2> basis(int l) {
        static const std::array<Vec<2>, 3> b = {Vec<2>{{1.0, 0.0}},
                                                Vec<2>{{-0.5, std::sqrt(3.0) / 2.0}},
                                                Vec<2>{{-0.5, -std::sqrt(3.0) / 2.0}}};
        return b[l];
    }

    static Vec<2> dual(int j) {
        const double pi = std::numbers::pi;
        static const std::array<Vec<2>, 3> m = {Vec<2>{{2 * pi, 2 * pi / std::sqrt(3.0)}},
                                                Vec<2>{{0.0, 4 * pi / std::sqrt(3.0)}},
                                                Vec<2>{{2 * pi, -2 * pi / std::sqrt(3.0)}}};
        return m[j];
    }

    static Vec<2> cartesian(const Coord& n) {
        return double(n[0]) * basis(0) + double(n[1]) * basis(1);
    }
};

// Cartesian vector of an integer lattice value.
template <int D>
inline Vec<D> to_cartesian(const IVec<D>& c) {
    Vec<D> r{};
    for (int i = 0; i < D; ++i) r += double(c[i]) * LatticeTraits<D>::basis(i);
    return r;
}

// |v|^2 for a lattice value, via the Gram matrix of the basis (exact up to
// the half-integer arithmetic of the FCC Gram matrix).
template <int D>
inline double lattice_norm2(const IVec<D>& c) {
    return norm2(to_cartesian(c));
}

struct LatticeSpec {
    LatticeKind kind = LatticeKind::FCC3D;
    int N = 2;
    Bc bc = Bc::Dirichlet;

    void validate() const {
        if (N < 2) throw std::invalid_argument("LatticeSpec: N must be >= 2");
    }
    int dim() const { return kind == LatticeKind::FCC3D ? 3 : 2; }

    // Box coordinate range of Lambda^(N): n_i = floor(-N/2+1) .. floor(N/2).
    int lo() const { return static_cast<int>(std::floor(-N / 2.0 + 1)); }
    int hi() const { return N / 2; }
};

}  // namespace aolat
