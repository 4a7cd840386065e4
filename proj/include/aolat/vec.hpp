// Small fixed-size vectors and matrices used throughout the lattice code.
// Dimensions are 2 or 3; nothing here allocates.
#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace aolat {

template <int D>
struct Vec {
    std::array<double, D> v{};

    double& operator[](int i) { return v[i]; }
    double operator[](int i) const { return v[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < D; ++i) v[i] += o.v[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < D; ++i) v[i] -= o.v[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < D; ++i) v[i] *= s;
        return *this;
    }
    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator-(Vec a) {
        for (int i = 0; i < D; ++i) a.v[i] = -a.v[i];
        return a;
    }
};

template <int D>
inline double dot(const Vec<D>& a, const Vec<D>& b) {
    double s = 0;
    for (int i = 0; i < D; ++i) s += a.v[i] * b.v[i];
    return s;
}

template <int D>
inline double norm2(const Vec<D>& a) {
    return dot(a, a);
}

template <int D>
inline double norm(const Vec<D>& a) {
    return std::sqrt(norm2(a));
}

inline Vec<3> cross(const Vec<3>& a, const Vec<3>& b) {
    return Vec<3>{{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]}};
}

// z-component of the 2D cross product; sign gives the orientation of a triangle.
inline double cross_z(const Vec<2>& a, const Vec<2>& b) { return a[0] * b[1] - a[1] * b[0]; }

// Integer coefficient vector in the lattice basis {b_1,..,b_D}.  Lattice-valued
// slips and charges are stored this way so that d, gauge transforms and charge
// accumulation stay exact.
template <int D>
struct IVec {
    std::array<std::int64_t, D> c{};

    std::int64_t& operator[](int i) { return c[i]; }
    std::int64_t operator[](int i) const { return c[i]; }

    IVec& operator+=(const IVec& o) {
        for (int i = 0; i < D; ++i) c[i] += o.c[i];
        return *this;
    }
    IVec& operator-=(const IVec& o) {
        for (int i = 0; i < D; ++i) c[i] -= o.c[i];
        return *this;
    }
    friend IVec operator+(IVec a, const IVec& b) { return a += b; }
    friend IVec operator-(IVec a, const IVec& b) { return a -= b; }
    friend IVec operator-(IVec a) {
        for (int i = 0; i < D; ++i) a.c[i] = -a.c[i];
        return a;
    }
    friend IVec operator*(std::int64_t s, IVec a) {
        for (int i = 0; i < D; ++i) a.c[i] *= s;
        return a;
    }
    friend bool operator==(const IVec& a, const IVec& b) { return a.c == b.c; }
    bool is_zero() const {
        for (int i = 0; i < D; ++i)
            if (c[i] != 0) return false;
        return true;
    }
};

template <int D>
struct Mat {
    // row-major
    std::array<double, D * D> a{};

    double& operator()(int i, int j) { return a[i * D + j]; }
    double operator()(int i, int j) const { return a[i * D + j]; }

    static Mat identity() {
        Mat m;
        for (int i = 0; i < D; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat zero() { return Mat{}; }

    Mat& operator+=(const Mat& o) {
        for (int i = 0; i < D * D; ++i) a[i] += o.a[i];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        for (int i = 0; i < D * D; ++i) a[i] -= o.a[i];
        return *this;
    }
    Mat& operator*=(double s) {
        for (int i = 0; i < D * D; ++i) a[i] *= s;
        return *this;
    }
    friend Mat operator+(Mat x, const Mat& y) { return x += y; }
    friend Mat operator-(Mat x, const Mat& y) { return x -= y; }
    friend Mat operator*(double s, Mat x) { return x *= s; }

    Vec<D> operator*(const Vec<D>& x) const {
        Vec<D> r;
        for (int i = 0; i < D; ++i) {
            double s = 0;
            for (int j = 0; j < D; ++j) s += (*this)(i, j) * x[j];
            r[i] = s;
        }
        return r;
    }
};

template <int D>
inline Mat<D> outer(const Vec<D>& a, const Vec<D>& b) {
    Mat<D> m;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) m(i, j) = a[i] * b[j];
    return m;
}

template <int D>
inline double frob_norm(const Mat<D>& m) {
    double s = 0;
    for (double x : m.a) s += x * x;
    return std::sqrt(s);
}

inline double det(const Mat<2>& m) { return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0); }

inline double det(const Mat<3>& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

inline Mat<2> adjugate(const Mat<2>& m) {
    Mat<2> r;
    r(0, 0) = m(1, 1);
    r(0, 1) = -m(0, 1);
    r(1, 0) = -m(1, 0);
    r(1, 1) = m(0, 0);
    return r;
}

inline Mat<3> adjugate(const Mat<3>& m) {
    Mat<3> r;
    r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
    r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
    r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
    r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
    r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
    r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
    r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
    r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
    r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    return r;
}

template <int D>
inline Mat<D> inverse(const Mat<D>& m) {
    double d = det(m);
    if (d == 0.0) throw std::domain_error("singular matrix");
    Mat<D> r = adjugate(m);
    r *= 1.0 / d;
    return r;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps.  Returned in
// ascending order; inputs of dimension 2 and 3 only.
template <int D>
inline std::array<double, D> sym_eigenvalues(Mat<D> m) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int i = 0; i < D; ++i)
            for (int j = i + 1; j < D; ++j) off += m(i, j) * m(i, j);
        if (off < 1e-30 * (1.0 + frob_norm(m))) break;
        for (int p = 0; p < D; ++p) {
            for (int q = p + 1; q < D; ++q) {
                if (std::abs(m(p, q)) < 1e-300) continue;
                double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                Mat<D> r = m;
                for (int k = 0; k < D; ++k) {
                    r(p, k) = c * m(p, k) - s * m(q, k);
                    r(q, k) = s * m(p, k) + c * m(q, k);
                }
                m = r;
                for (int k = 0; k < D; ++k) {
                    r(k, p) = c * m(k, p) - s * m(k, q);
                    r(k, q) = s * m(k, p) + c * m(k, q);
                }
                m = r;
            }
        }
    }
    std::array<double, D> ev;
    for (int i = 0; i < D; ++i) ev[i] = m(i, i);
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j)
            if (ev[j] < ev[i]) std::swap(ev[i], ev[j]);
    return ev;
}

// Cholesky factor L (lower) of an SPD matrix.
template <int D>
inline Mat<D> cholesky(const Mat<D>& m) {
    Mat<D> l;
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j <= i; ++j) {
            double s = m(i, j);
            for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            if (i == j) {
                if (s <= 0) throw std::domain_error("matrix not positive definite");
                l(i, i) = std::sqrt(s);
            } else {
                l(i, j) = s / l(j, j);
            }
        }
    }
    return l;
}

}  // namespace aolat
