// Brillouin-zone symbols and quadrature.
//
// Closed forms implemented here:
//   A_hat(k) = 2 sum_l (b_l (x) b_l) (1 - cos(k.b_l))           (both lattices)
//   A0(k)    = sum_l (k.b_l)^2 (b_l (x) b_l)                    (3D quadratic symbol)
//   F(k)     = w(k)* A_hat(k)^{-1} w(k),
//              w(k) = (e^{i k.b2}-1) b2 - (1 - e^{-i k.b3}) b3  (2D)
//   E_dip(n)       = -(1/8) int K_n(k1) (F(k)-2) dxi            (tensorial dipole)
//   E_grain(n,m)   = 1/(32 sqrt3 pi m^2) sum_j int K_n (2-F(k1,p_j)) dk1
//   scalar model   : 9-|Omega|^2 = 4 [sin^2(k.b1/2)+sin^2(k.b2/2)+sin^2(k.b3/2)]
//   C0             = int_B dk/|B| v0 . A_hat^{-1}(k) v0         (3D)
// with K_n(t) = (1-cos n t)/(1-cos t) and p_j = 2 pi j/(m sqrt3).
//
// All quadrature is deterministic: fixed Gauss-Legendre panels with dyadic
// refinement toward singular points and a points-per-period cap on
// oscillatory factors.  Trig identities (1-cos t = 2 sin^2(t/2), etc.) keep
// full relative precision near the symbol zeros.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "aolat/lattice.hpp"
#include "aolat/vec.hpp"

namespace aolat {
namespace fourier {

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------- GL rules

struct GlRule {
    std::vector<double> x, w;  // nodes/weights on [-1,1]
};

inline const GlRule& gl_rule(int order) {
    static std::vector<GlRule> cache(64);
    if (order < 2 || order >= 64) throw std::invalid_argument("gl_rule: order out of range");
    GlRule& r = cache[order];
    if (!r.x.empty()) return r;
    r.x.resize(order);
    r.w.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(pi * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
            }
            double dp = order * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int j = 0; j < order; ++j) {
            double p2 = p1;
            p1 = p0;
            p0 = ((2 * j + 1) * x * p1 - j * p2) / (j + 1);
        }
        double dp = order * (x * p0 - p1) / (x * x - 1.0);
        r.x[i] = x;
        r.w[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

template <class F>
inline auto integrate_gl(const F& f, double a, double b, int order) -> decltype(f(0.0)) {
    const GlRule& r = gl_rule(order);
    decltype(f(0.0)) s{};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) s += r.w[i] * f(mid + half * r.x[i]);
    return half * s;
}

// Panels of [a,b] refined dyadically toward an interior point s (panel size
// halves until min_size).  The interval is split at s when s lies inside.
inline std::vector<std::pair<double, double>> panels_toward(double a, double b, double s,
                                                            double min_size) {
    std::vector<std::pair<double, double>> out;
    auto one_side = [&](double from, double to) {
        // from is the singular end
        double len = std::abs(to - from);
        if (len <= 0) return;
        double step = len / 2;
        double hi = to;
        while (step > min_size && std::abs(hi - from) > 2 * min_size) {
            double lo = from + (hi - from) * 0.5;
            out.push_back({std::min(lo, hi), std::max(lo, hi)});
            hi = lo;
            step *= 0.5;
        }
        out.push_back({std::min(from, hi), std::max(from, hi)});
    };
    if (s <= a || s >= b) {
        double anchor = (std::abs(s - a) < std::abs(s - b)) ? a : b;
        one_side(anchor, anchor == a ? b : a);
    } else {
        one_side(s, a);
        one_side(s, b);
    }
    return out;
}

// Integrate f over [a,b] with refinement toward s and at most
// points-per-period resolution for an oscillation of frequency freq (cycles
// per unit length).
template <class F>
inline auto integrate_refined(const F& f, double a, double b, double s, double min_size, double freq,
                              int order) -> decltype(f(0.0)) {
    decltype(f(0.0)) total{};
    const double cap = freq > 0 ? 1.0 / (6.0 * freq) : (b - a);
    for (auto [lo, hi] : panels_toward(a, b, s, min_size)) {
        int parts = std::max(1, int(std::ceil((hi - lo) / cap)));
        double w = (hi - lo) / parts;
        for (int i = 0; i < parts; ++i) total += integrate_gl(f, lo + i * w, lo + (i + 1) * w, order);
    }
    return total;
}

// ------------------------------------------------------------- Chebyshev

struct Cheb1D {
    double a = 0, b = 1;
    std::vector<double> coef;

    double eval(double x) const {
        double t = (2 * x - a - b) / (b - a);
        double b0 = 0, b1 = 0;
        for (int i = int(coef.size()) - 1; i >= 1; --i) {
            double tmp = 2 * t * b0 - b1 + coef[i];
            b1 = b0;
            b0 = tmp;
        }
        return t * b0 - b1 + coef[0];
    }
};

template <class F>
inline Cheb1D build_cheb(const F& f, double a, double b, int deg) {
    Cheb1D c;
    c.a = a;
    c.b = b;
    const int n = deg + 1;
    std::vector<double> fv(n);
    for (int i = 0; i < n; ++i) {
        double t = std::cos(pi * (i + 0.5) / n);
        fv[i] = f(0.5 * (a + b) + 0.5 * (b - a) * t);
    }
    c.coef.resize(n);
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += fv[i] * std::cos(pi * j * (i + 0.5) / n);
        c.coef[j] = (j == 0 ? 1.0 : 2.0) * s / n;
    }
    return c;
}

// -------------------------------------------------------------- symbols

// Fejer-style kernel (1 - cos(n t))/(1 - cos t), stable for all t.
inline double kernel_K(int n, double t) {
    double sh = std::sin(0.5 * t);
    double den = 2.0 * sh * sh;
    if (den < 1e-24) {
        return double(n) * double(n);  // limit at t = 0 mod 2 pi
    }
    double sn = std::sin(0.5 * n * t);
    return 2.0 * sn * sn / den;
}

// A_hat for either lattice, directly from the projector sum.
template <int D>
inline Mat<D> symbol_A(const Vec<D>& k) {
    Mat<D> a{};
    for (int l = 0; l < LatticeTraits<D>::n_edge_types; ++l) {
        Vec<D> b = LatticeTraits<D>::basis(l);
        double sh = std::sin(0.5 * dot(k, b));
        a += (4.0 * sh * sh) * outer(b, b);  // 2 (1 - cos) = 4 sin^2
    }
    return a;
}

// Quadratic small-k symbol A0(k) = sum (k.b_l)^2 b_l (x) b_l (3D).
inline Mat<3> symbol_A0(const Vec<3>& k) {
    Mat<3> a{};
    for (int l = 0; l < 6; ++l) {
        Vec<3> b = LatticeTraits<3>::basis(l);
        double t = dot(k, b);
        a += (t * t) * outer(b, b);
    }
    return a;
}

// det A_hat (3D) from the alpha-products over the 16 independent bond
// triples; all terms are nonnegative.
inline double det_A3_alpha(const Vec<3>& k) {
    double al[6];
    for (int l = 0; l < 6; ++l) {
        double sh = std::sin(0.5 * dot(k, LatticeTraits<3>::basis(l)));
        al[l] = 2.0 * sh * sh;
    }
    static const int triples[16][3] = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}, {0, 2, 3}, {0, 2, 5},
                                       {0, 3, 4}, {0, 3, 5}, {0, 4, 5}, {1, 2, 4}, {1, 2, 5},
                                       {1, 3, 4}, {1, 3, 5}, {1, 4, 5}, {2, 3, 4}, {2, 3, 5},
                                       {2, 4, 5}};
    double s = 0;
    for (auto& t : triples) s += al[t[0]] * al[t[1]] * al[t[2]];
    return 4.0 * s;
}

struct SymA2 {
    double a11, a12, a22, det;
};

// Entries of the 2D symbol in fully cancellation-free form:
//   a11 = 4 sin^2(k1/2) + [2 sin^2(k1/4) + 2 cos(k1/2) sin^2(sqrt3 k2/4)]
//   a22 = 3 [2 sin^2(k1/4) + 2 cos(k1/2) sin^2(sqrt3 k2/4)]
//   a12 = sqrt3 sin(k1/2) sin(sqrt3 k2/2)
//   det = 3 (cos(k1/2) - cos(sqrt3 k2/2))^2
//         + 6 (1 - cos(k1/2) cos(sqrt3 k2/2)) (1 - cos k1)
inline SymA2 symbol_A2_stable(const Vec<2>& k) {
    const double k1 = k[0], k2 = k[1];
    const double s3 = std::sqrt(3.0);
    double onemcc = 2 * std::sin(0.25 * k1) * std::sin(0.25 * k1) +
                    std::cos(0.5 * k1) * 2 * std::sin(0.25 * s3 * k2) * std::sin(0.25 * s3 * k2);
    SymA2 a;
    a.a11 = 4 * std::sin(0.5 * k1) * std::sin(0.5 * k1) + onemcc;
    a.a22 = 3 * onemcc;
    a.a12 = s3 * std::sin(0.5 * k1) * std::sin(0.5 * s3 * k2);
    double cdiff = -2 * std::sin(0.25 * (k1 + s3 * k2)) * std::sin(0.25 * (k1 - s3 * k2));
    a.det = 3 * cdiff * cdiff + 6 * onemcc * 2 * std::sin(0.5 * k1) * std::sin(0.5 * k1);
    return a;
}

inline bool near_dual_lattice(const Vec<2>& k, double tol = 1e-11) {
    // k in L* iff k.b1 and k.b2 are multiples of 2 pi
    double t1 = dot(k, LatticeTraits<2>::basis(0)) / (2 * pi);
    double t2 = dot(k, LatticeTraits<2>::basis(1)) / (2 * pi);
    return std::abs(t1 - std::round(t1)) < tol && std::abs(t2 - std::round(t2)) < tol;
}

// F(k) = w* A^{-1} w; real, even, bounded; singular set k = 0 mod L*.
inline double F_of_k(const Vec<2>& k) {
    if (near_dual_lattice(k)) throw std::invalid_argument("F_of_k: singular at k = 0 mod dual lattice");
    using C = std::complex<double>;
    const Vec<2> b2 = LatticeTraits<2>::basis(1), b3 = LatticeTraits<2>::basis(2);
    const C i(0, 1);
    C f2 = std::exp(i * dot(k, b2)) - 1.0;
    C f3 = 1.0 - std::exp(-i * dot(k, b3));
    std::array<C, 2> w{f2 * b2[0] - f3 * b3[0], f2 * b2[1] - f3 * b3[1]};
    SymA2 a = symbol_A2_stable(k);
    double num = a.a22 * std::norm(w[0]) - 2 * a.a12 * std::real(std::conj(w[0]) * w[1]) +
                 a.a11 * std::norm(w[1]);
    return num / a.det;
}

// Closed form for 2 - F on the line k2 = 0 (removable cancellations).
inline double two_minus_F_line0(double k1) {
    double s4 = std::sin(0.25 * k1), s2 = std::sin(0.5 * k1);
    double num = 2 * s4 * s4;
    double den = 4 * s2 * s2 + 2 * s4 * s4;
    if (den == 0) return 0.0;
    return num * (1.0 - num / den);
}

// scalar (B = identity) model: 9 - |Omega(k)|^2 in positive form.
inline double nine_minus_omega2(const Vec<2>& k) {
    double s = 0;
    for (int l = 0; l < 3; ++l) {
        double sh = std::sin(0.5 * dot(k, LatticeTraits<2>::basis(l)));
        s += sh * sh;
    }
    return 4.0 * s;
}

inline std::complex<double> omega_symbol(const Vec<2>& k) {
    using C = std::complex<double>;
    const C i(0, 1);
    return 1.0 + std::exp(-i * dot(k, LatticeTraits<2>::basis(1))) +
           std::exp(i * dot(k, LatticeTraits<2>::basis(2)));
}

// k from zone coordinates xi in [-1/2,1/2)^2: k = xi1 m1 + xi2 m2.
inline Vec<2> k_of_xi(double xi1, double xi2) {
    return xi1 * LatticeTraits<2>::dual(0) + xi2 * LatticeTraits<2>::dual(1);
}

// ----------------------------------------------------- 2D energy integrals

struct QuadResult {
    double value = 0;
    double error = 0;  // heuristic (two-resolution difference)
};

// Table of the inner integrals over xi2, on dyadic xi1 panels toward 0:
//   psi(xi1)  = int (F - 2) dxi2           (tensorial model)
//   phic(xi1) = int 1/(9-|Omega|^2) dxi2   (scalar model)
class ZoneLineTable {
  public:
    // The scalar integrand behaves like const/xi1 toward the zone center, so
    // the table stores xi1 * phi there and divides on evaluation; the
    // tensorial psi vanishes linearly and is stored raw.
    ZoneLineTable(bool scalar, int max_n, int cheb_deg = 28) : weighted_(scalar) {
        levels_ = std::max(16, int(std::ceil(std::log2(double(std::max(2, max_n))))) + 7);
        double hi = 0.5;
        for (int j = 0; j < levels_; ++j) {
            double lo = (j + 1 == levels_) ? 0.0 : hi * 0.5;
            panels_.push_back(build_cheb(
                [&](double x) { return weighted_ ? x * inner(scalar, x) : inner(scalar, x); }, lo, hi,
                cheb_deg));
            hi = lo;
        }
    }

    double eval(double xi1) const {
        double x = std::abs(xi1);
        for (const auto& p : panels_) {
            if (x >= p.a || &p == &panels_.back()) {
                double v = p.eval(std::max(x, p.a));
                return weighted_ ? v / std::max(x, 1e-300) : v;
            }
        }
        return 0.0;
    }

  private:
    bool weighted_;
    int levels_;
    std::vector<Cheb1D> panels_;

    static double inner(bool scalar, double xi1) {
        if (xi1 <= 0) xi1 = 1e-300;
        const double sing = -0.5 * xi1;  // closest approach to k = 0
        auto f = [&](double xi2) {
            Vec<2> k = k_of_xi(xi1, xi2);
            return scalar ? 1.0 / nine_minus_omega2(k) : F_of_k(k) - 2.0;
        };
        return integrate_refined(f, -0.5, 0.5, sing, std::max(xi1 / 16.0, 1e-12), 0.0, 16);
    }
};

namespace detail {

// int_0^(1/2) K_n(2 pi xi) g(xi) dxi with oscillation-resolving panels.
inline double kernel_line_integral(int n, const ZoneLineTable& tab, int gl_order, double ppp) {
    double total = 0;
    const double cap = 1.0 / (ppp * n);
    for (auto [lo, hi] : panels_toward(0.0, 0.5, 0.0, std::min(0.25 / n, 1e-4))) {
        int parts = std::max(1, int(std::ceil((hi - lo) / cap)));
        double w = (hi - lo) / parts;
        for (int i = 0; i < parts; ++i)
            total += integrate_gl(
                [&](double xi) { return kernel_K(n, 2 * pi * xi) * tab.eval(xi); }, lo + i * w,
                lo + (i + 1) * w, gl_order);
    }
    return total;
}

}  // namespace detail

// Dislocation dipole energy E_dip(n) = n/4 - (1/8) int K_n F  (evaluated in
// the cancellation-free form -(1/8) int K_n (F-2)).
class DipoleIntegrator {
  public:
    explicit DipoleIntegrator(int max_n) : table_(false, max_n) {}

    QuadResult energy(int n, double tol = 1e-6) const {
        if (n < 1) throw std::invalid_argument("dipole_energy: n >= 1");
        double lo = -0.25 * detail::kernel_line_integral(n, table_, 10, 6.0);
        double hi = -0.25 * detail::kernel_line_integral(n, table_, 14, 9.0);
        QuadResult r{hi, std::abs(hi - lo)};
        if (!(r.error < tol * std::max(1.0, std::abs(r.value)) * 10))
            throw std::runtime_error("dipole_energy: quadrature failed its error target (n=" +
                                     std::to_string(n) + ", err=" + std::to_string(r.error) + ")");
        return r;
    }

  private:
    ZoneLineTable table_;  // psi(xi1): the factor 2 from xi1<0 is in the -1/4 prefactor
};

// Scalar-model dipole energy  E(n) = 3 int (1-cos(2 pi n xi1)) / (9-|Omega|^2) dxi.
class CapacitorIntegrator {
  public:
    explicit CapacitorIntegrator(int max_n) : table_(true, max_n) {}

    QuadResult energy(int n, double tol = 1e-6) const {
        double lo = line(n, 10, 6.0), hi = line(n, 14, 9.0);
        QuadResult r{hi, std::abs(hi - lo)};
        if (!(r.error < tol * std::max(1.0, std::abs(r.value)) * 10))
            throw std::runtime_error("capacitor_energy: quadrature failed its error target");
        return r;
    }

  private:
    ZoneLineTable table_;

    double line(int n, int gl_order, double ppp) const {
        double total = 0;
        const double cap = 1.0 / (ppp * n);
        for (auto [lo, hi] : panels_toward(0.0, 0.5, 0.0, std::min(0.25 / n, 1e-5))) {
            int parts = std::max(1, int(std::ceil((hi - lo) / cap)));
            double w = (hi - lo) / parts;
            for (int i = 0; i < parts; ++i)
                total += integrate_gl(
                    [&](double xi) {
                        double c = std::sin(pi * n * xi);
                        return 2.0 * c * c * table_.eval(xi);
                    },
                    lo + i * w, lo + (i + 1) * w, gl_order);
        }
        return 2.0 * 3.0 * total;  // both signs of xi1
    }
};

// Wall line ordinates p_j = 2 pi j / (m sqrt3).
inline double wall_line_p(int m, int j) { return 2.0 * pi * j / (double(m) * std::sqrt(3.0)); }

// (2 - F)(k1, p_j), stable on the j = 0 line.
inline double two_minus_F_line(int m, int j, double k1) {
    if (j == 0) return two_minus_F_line0(k1);
    return 2.0 - F_of_k(Vec<2>{{k1, wall_line_p(m, j)}});
}

// E_grain(n, m): two parallel dislocation walls at separation n, dipole
// spacing m; and its n -> infinity limit.
inline QuadResult grain_wall_energy(int n, int m, double /*tol*/ = 1e-6) {
    if (n < 1 || m < 1) throw std::invalid_argument("grain_wall_energy: n, m >= 1");
    auto run = [&](int gl_order, double ppp) {
        double s = 0;
        for (int j = 0; j < 2 * m; ++j) {
            double refine_to = (j == 0) ? std::min(0.1 / n, 1e-4) : std::min(wall_line_p(m, j), pi) / 8;
            auto f = [&](double k1) { return kernel_K(n, k1) * two_minus_F_line(m, j, k1); };
            double cap = 2 * pi / (ppp * n);
            for (auto [lo, hi] : panels_toward(-pi, pi, 0.0, refine_to)) {
                int parts = std::max(1, int(std::ceil((hi - lo) / cap)));
                double w = (hi - lo) / parts;
                for (int i = 0; i < parts; ++i) s += integrate_gl(f, lo + i * w, lo + (i + 1) * w, gl_order);
            }
        }
        return s / (32.0 * std::sqrt(3.0) * pi * m * m);
    };
    double lo = run(10, 6.0), hi = run(14, 9.0);
    return {hi, std::abs(hi - lo)};
}

inline QuadResult grain_wall_energy_limit(int m) {
    if (m < 1) throw std::invalid_argument("grain_wall_energy_limit: m >= 1");
    auto run = [&](int gl_order) {
        double s = 0;
        for (int j = 0; j < 2 * m; ++j) {
            double refine_to = (j == 0) ? 1e-6 : std::min(wall_line_p(m, j), pi) / 8;
            auto f = [&](double k1) {
                double sh = std::sin(0.5 * k1);
                return two_minus_F_line(m, j, k1) / (2.0 * sh * sh);
            };
            s += integrate_refined(f, -pi, pi, 0.0, refine_to, 0.0, gl_order);
        }
        return s / (32.0 * std::sqrt(3.0) * pi * m * m);
    };
    double lo = run(12), hi = run(16);
    return {hi, std::abs(hi - lo)};
}

// Scalar-model wall energy (the capacitor):
//   E(n,m) = sqrt3/(4 pi m^2) sum_j int (1 - cos(n k1)) / (9-|Omega(k1,p_j)|^2) dk1.
inline QuadResult capacitor_wall_energy(int n, int m) {
    auto run = [&](int gl_order, double ppp) {
        double s = 0;
        for (int j = 0; j < 2 * m; ++j) {
            double refine_to = (j == 0) ? std::min(0.1 / n, 1e-5) : std::min(wall_line_p(m, j), pi) / 8;
            auto f = [&](double k1) {
                double sn = std::sin(0.5 * n * k1);
                return 2.0 * sn * sn / nine_minus_omega2(Vec<2>{{k1, wall_line_p(m, j)}});
            };
            double cap = 2 * pi / (ppp * n);
            for (auto [lo, hi] : panels_toward(-pi, pi, 0.0, refine_to)) {
                int parts = std::max(1, int(std::ceil((hi - lo) / cap)));
                double w = (hi - lo) / parts;
                for (int i = 0; i < parts; ++i) s += integrate_gl(f, lo + i * w, lo + (i + 1) * w, gl_order);
            }
        }
        return s * std::sqrt(3.0) / (4.0 * pi * m * m);
    };
    double lo = run(10, 6.0), hi = run(14, 9.0);
    return {hi, std::abs(hi - lo)};
}

// --------------------------------------------------------- symbol bounds

struct SymbolScan {
    double min_low_ratio = 0;   // min over grid of lambda_min(A0)/k^2
    double max_high_ratio = 0;  // max over grid of lambda_max(A0)/k^2
    double min_b0_ratio = 0;    // min over grid of lambda_min(A0 - k^2/2)/k^2
    double min_det = 0;         // min det A_hat over the grid (off-singular)
};

inline SymbolScan c0_bound_scan(int res) {
    SymbolScan s;
    bool first = true;
    for (int i1 = 0; i1 < res; ++i1)
        for (int i2 = 0; i2 < res; ++i2)
            for (int i3 = 0; i3 < res; ++i3) {
                double xi1 = (i1 + 0.5) / res - 0.5;
                double xi2 = (i2 + 0.5) / res - 0.5;
                double xi3 = (i3 + 0.5) / res - 0.5;
                Vec<3> k = xi1 * LatticeTraits<3>::dual(0) + xi2 * LatticeTraits<3>::dual(1) +
                           xi3 * LatticeTraits<3>::dual(2);
                double k2 = norm2(k);
                if (k2 < 1e-12) continue;
                auto ev = sym_eigenvalues(symbol_A0(k));
                Mat<3> b0 = symbol_A0(k);
                for (int d = 0; d < 3; ++d) b0(d, d) -= 0.5 * k2;
                auto evb = sym_eigenvalues(b0);
                double detA = det_A3_alpha(k);
                if (first) {
                    s.min_low_ratio = ev[0] / k2;
                    s.max_high_ratio = ev[2] / k2;
                    s.min_b0_ratio = evb[0] / k2;
                    s.min_det = detA;
                    first = false;
                } else {
                    s.min_low_ratio = std::min(s.min_low_ratio, ev[0] / k2);
                    s.max_high_ratio = std::max(s.max_high_ratio, ev[2] / k2);
                    s.min_b0_ratio = std::min(s.min_b0_ratio, evb[0] / k2);
                    s.min_det = std::min(s.min_det, detA);
                }
            }
    return s;
}

// ------------------------------------------------------- 3D zone integrals

namespace detail {

// v0 . A_hat^{-1}(k) v0 for the FCC symbol.
inline double a_inv_quadform(const Vec<3>& k, const Vec<3>& v0) {
    Mat<3> a = symbol_A<3>(k);
    double dt = det(a);
    if (dt <= 0) throw std::runtime_error("a_inv_quadform: singular symbol");
    Vec<3> av = adjugate(a) * v0;
    return dot(v0, av) / dt;
}

// Recursive octree integration over xi in [-1/2,1/2]^3 of
// f(k(xi)) * exp(-2 pi i (c . xi)); refinement toward xi = 0.
struct Octree3 {
    Vec<3> r{};                 // oscillation vector c (lattice steps)
    const Vec<3>* v0 = nullptr;
    double min_cell = 1.0 / (1 << 20);
    int order = 4;

    std::complex<double> integrate(const std::array<double, 3>& lo,
                                   const std::array<double, 3>& hi) const {
        double size = hi[0] - lo[0];
        bool contains0 = true;
        double dist = 0;
        for (int i = 0; i < 3; ++i) {
            if (lo[i] > 0 || hi[i] < 0) contains0 = false;
            double d = std::max({lo[i] > 0 ? lo[i] : 0.0, hi[i] < 0 ? -hi[i] : 0.0});
            dist = std::max(dist, d);
        }
        double osc = std::max({std::abs(r[0]), std::abs(r[1]), std::abs(r[2])});
        double cap = osc > 0 ? 1.0 / (5.0 * osc) : 1.0;
        bool refine = (size > cap) || (contains0 && size > min_cell) ||
                      (!contains0 && dist < size && size > min_cell);
        if (refine) {
            std::complex<double> s{};
            for (int oct = 0; oct < 8; ++oct) {
                std::array<double, 3> l2, h2;
                for (int i = 0; i < 3; ++i) {
                    double mid = 0.5 * (lo[i] + hi[i]);
                    if (oct & (1 << i)) {
                        l2[i] = mid;
                        h2[i] = hi[i];
                    } else {
                        l2[i] = lo[i];
                        h2[i] = mid;
                    }
                }
                s += integrate(l2, h2);
            }
            return s;
        }
        // tensor GL
        const GlRule& g = gl_rule(order);
        std::complex<double> s{};
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j)
                for (int kk = 0; kk < order; ++kk) {
                    double x1 = 0.5 * (lo[0] + hi[0]) + 0.5 * (hi[0] - lo[0]) * g.x[i];
                    double x2 = 0.5 * (lo[1] + hi[1]) + 0.5 * (hi[1] - lo[1]) * g.x[j];
                    double x3 = 0.5 * (lo[2] + hi[2]) + 0.5 * (hi[2] - lo[2]) * g.x[kk];
                    Vec<3> k = x1 * LatticeTraits<3>::dual(0) + x2 * LatticeTraits<3>::dual(1) +
                               x3 * LatticeTraits<3>::dual(2);
                    if (norm2(k) < 1e-24) continue;
                    double phase = -2 * pi * (r[0] * x1 + r[1] * x2 + r[2] * x3);
                    s += g.w[i] * g.w[j] * g.w[kk] * a_inv_quadform(k, *v0) *
                         std::complex<double>(std::cos(phase), std::sin(phase));
                }
        double vol = 0.125 * (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
        return vol * s;
    }
};

}  // namespace detail

// Spin-wave constant C0 = int dk/|B| v0 . A_hat^{-1}(k) v0 (3D only; the 2D
// analogue diverges logarithmically).
inline QuadResult spin_wave_constant(const Vec<2>&, int = 0) {
    throw std::invalid_argument("spin_wave_constant: logarithmically divergent in two dimensions");
}

inline QuadResult spin_wave_constant(const Vec<3>& v0, int min_cell_log2 = 20) {
    detail::Octree3 oc;
    oc.v0 = &v0;
    oc.min_cell = 1.0 / double(1 << min_cell_log2);
    double lo_val = 0, hi_val = 0;
    {
        oc.order = 4;
        lo_val = oc.integrate({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}).real();
        oc.order = 5;
        oc.min_cell *= 0.5;
        hi_val = oc.integrate({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}).real();
    }
    return {hi_val, std::abs(hi_val - lo_val) + 1e-12};
}

namespace detail {

// 2D companion of the octree: integrate f over (xi2, xi3) in [-1/2,1/2]^2
// with refinement toward (0,0) down to max(scale, min_cell) and a
// points-per-period cap on the phase frequencies.
struct Quadtree2 {
    double xi1 = 0;
    const Vec<3>* v0 = nullptr;
    double c2 = 0, c3 = 0;
    double min_cell = 1.0 / (1 << 16);
    int order = 4;

    std::complex<double> integrate(double lo2, double hi2, double lo3, double hi3) const {
        double size = hi2 - lo2;
        bool near0 = !(lo2 > 0 || hi2 < 0 || lo3 > 0 || hi3 < 0);
        double dist = std::max({lo2 > 0 ? lo2 : 0.0, hi2 < 0 ? -hi2 : 0.0, lo3 > 0 ? lo3 : 0.0,
                                hi3 < 0 ? -hi3 : 0.0});
        double resolve = std::max(std::abs(xi1), min_cell);
        double osc = std::max(std::abs(c2), std::abs(c3));
        double cap = osc > 0 ? 1.0 / (5.0 * osc) : 1.0;
        bool refine = size > cap || (near0 && size > resolve) || (!near0 && dist < size && size > resolve);
        if (refine) {
            double m2 = 0.5 * (lo2 + hi2), m3 = 0.5 * (lo3 + hi3);
            return integrate(lo2, m2, lo3, m3) + integrate(m2, hi2, lo3, m3) +
                   integrate(lo2, m2, m3, hi3) + integrate(m2, hi2, m3, hi3);
        }
        const GlRule& g = gl_rule(order);
        std::complex<double> s{};
        for (int i = 0; i < order; ++i)
            for (int j = 0; j < order; ++j) {
                double x2 = 0.5 * (lo2 + hi2) + 0.5 * (hi2 - lo2) * g.x[i];
                double x3 = 0.5 * (lo3 + hi3) + 0.5 * (hi3 - lo3) * g.x[j];
                Vec<3> k = xi1 * LatticeTraits<3>::dual(0) + x2 * LatticeTraits<3>::dual(1) +
                           x3 * LatticeTraits<3>::dual(2);
                if (norm2(k) < 1e-24) continue;
                double phase = -2 * pi * (c2 * x2 + c3 * x3);
                s += g.w[i] * g.w[j] * a_inv_quadform(k, *v0) *
                     std::complex<double>(std::cos(phase), std::sin(phase));
            }
        return 0.25 * (hi2 - lo2) * (hi3 - lo3) * s;
    }
};

}  // namespace detail

// Oscillatory companion J(r) = int dk/|B| cos(k.r) v0 . A_hat^{-1} v0 for a
// lattice separation r = sum c_i b_i.  Separable: the phase in xi1 factors
// out of the inner (xi2, xi3) integral.
inline QuadResult spin_wave_oscillatory(const Vec<3>& v0, const IVec<3>& c, int min_cell_log2 = 16) {
    auto run = [&](int order, double ppp) {
        detail::Quadtree2 qt;
        qt.v0 = &v0;
        qt.c2 = double(c[1]);
        qt.c3 = double(c[2]);
        qt.min_cell = 1.0 / double(1 << min_cell_log2);
        qt.order = order;
        std::complex<double> total{};
        const double freq = std::abs(double(c[0]));
        const double cap = freq > 0 ? 1.0 / (ppp * freq) : 1.0;
        for (auto [lo, hi] : panels_toward(-0.5, 0.5, 0.0, qt.min_cell)) {
            int parts = std::max(1, int(std::ceil((hi - lo) / cap)));
            double w = (hi - lo) / parts;
            for (int p = 0; p < parts; ++p) {
                double a = lo + p * w, b = a + w;
                const GlRule& g = gl_rule(8);
                for (int i = 0; i < 8; ++i) {
                    double xi1 = 0.5 * (a + b) + 0.5 * (b - a) * g.x[i];
                    qt.xi1 = xi1;
                    double phase = -2 * pi * double(c[0]) * xi1;
                    total += 0.5 * (b - a) * g.w[i] *
                             std::complex<double>(std::cos(phase), std::sin(phase)) *
                             qt.integrate(-0.5, 0.5, -0.5, 0.5);
                }
            }
        }
        return total.real();
    };
    double lo_val = run(4, 5.0);
    double hi_val = run(5, 7.0);
    return {hi_val, std::abs(hi_val - lo_val) + 1e-12};
}

// <g, A^{-1} g> = 2 C0 - 2 J(x - y), and the spin-wave two-point value
// exp(-<g, A^{-1} g>/(2 beta)).
struct SpinWave {
    Vec<3> v0;
    QuadResult c0;

    explicit SpinWave(const Vec<3>& v) : v0(v), c0(spin_wave_constant(v)) {}

    QuadResult g_inner(const IVec<3>& separation) const {
        if (separation.is_zero()) throw std::invalid_argument("spin_wave: x = y");
        QuadResult j = spin_wave_oscillatory(v0, separation);
        return {2 * c0.value - 2 * j.value, 2 * c0.error + 2 * j.error};
    }

    double correlation(const IVec<3>& separation, double beta) const {
        return std::exp(-g_inner(separation).value / (2 * beta));
    }
};

// --------------------------------------------------------------- fitting

struct LinearFit {
    double slope = 0, intercept = 0, slope_stderr = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = int(x.size());
    if (n < 2 || y.size() != x.size()) throw std::invalid_argument("linear_fit: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double denom = n * sxx - sx * sx;
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        double r = y[i] - f.slope * x[i] - f.intercept;
        ss += r * r;
    }
    if (n > 2) f.slope_stderr = std::sqrt(ss / (n - 2) * n / denom);
    return f;
}

}  // namespace fourier
}  // namespace aolat
