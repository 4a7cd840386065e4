// Cohomology dimensions of the scalar chain complex, via exact integer rank
// computation of the incidence matrices (fraction-free elimination; the
// incidence matrices admit +-1 pivots throughout, so entries stay small).
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aolat/complex.hpp"

namespace aolat {

namespace detail {

// Exact rank of a sparse integer matrix.  Prefers +-1 pivots; falls back to
// fraction-free (Bareiss) updates when none is available.
class IntRank {
  public:
    IntRank(int rows, int cols) : rows_(rows), cols_(cols), m_(rows) {}

    void add(int r, int c, std::int64_t v) {
        if (v != 0) m_[r].push_back({c, v});
    }

    int rank() {
        std::vector<char> col_used(cols_, 0);
        int rank = 0;
        std::int64_t denom = 1;
        for (int iter = 0; iter < rows_; ++iter) {
            // pick an unused row, preferring one with a +-1 entry
            int pr = -1, pc = -1;
            for (int r = 0; r < rows_; ++r) {
                if (row_used_.size() > std::size_t(r) && row_used_[r]) continue;
                if (m_[r].empty()) continue;
                for (const auto& [c, v] : m_[r]) {
                    if (v == 1 || v == -1) {
                        pr = r;
                        pc = c;
                        break;
                    }
                }
                if (pr >= 0) break;
                if (pc < 0) {
                    pr = r;
                    pc = m_[r].front().first;
                }
            }
            if (pr < 0) break;
            if (row_used_.size() < std::size_t(rows_)) row_used_.assign(rows_, 0);
            std::int64_t piv = value(pr, pc);
            row_used_[pr] = 1;
            col_used[pc] = 1;
            ++rank;
            for (int r = 0; r < rows_; ++r) {
                if (row_used_[r] || m_[r].empty()) continue;
                std::int64_t f = value(r, pc);
                if (f == 0) continue;
                // row_r <- (piv*row_r - f*row_pr)/denom   (fraction-free)
                eliminate(r, pr, piv, f, denom);
            }
            denom = piv < 0 ? -piv : piv;  // Bareiss denominator magnitude
        }
        return rank;
    }

  private:
    int rows_, cols_;
    std::vector<std::vector<std::pair<int, std::int64_t>>> m_;
    std::vector<char> row_used_;

    std::int64_t value(int r, int c) const {
        for (const auto& [cc, v] : m_[r])
            if (cc == c) return v;
        return 0;
    }

    void eliminate(int r, int pr, std::int64_t piv, std::int64_t f, std::int64_t denom) {
        std::vector<std::pair<int, std::int64_t>> out;
        out.reserve(m_[r].size() + m_[pr].size());
        auto a = m_[r].begin(), b = m_[pr].begin();
        auto emit = [&](int c, __int128 v) {
            if (denom != 1) v /= denom;
            if (v != 0) {
                if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rank: entry overflow");
                out.push_back({c, std::int64_t(v)});
            }
        };
        // merge sorted-by-insertion rows; sort first for the merge
        std::sort(m_[r].begin(), m_[r].end());
        std::sort(m_[pr].begin(), m_[pr].end());
        a = m_[r].begin();
        b = m_[pr].begin();
        while (a != m_[r].end() || b != m_[pr].end()) {
            if (b == m_[pr].end() || (a != m_[r].end() && a->first < b->first)) {
                emit(a->first, __int128(piv) * a->second);
                ++a;
            } else if (a == m_[r].end() || b->first < a->first) {
                emit(b->first, -__int128(f) * b->second);
                ++b;
            } else {
                emit(a->first, __int128(piv) * a->second - __int128(f) * b->second);
                ++a;
                ++b;
            }
        }
        m_[r] = std::move(out);
    }
};

template <int D>
inline int incidence_rank(const CellComplex<D>& cx, int p) {
    // rank of d_p : C^p -> C^{p+1} on the scalar complex
    if (p >= D) return 0;
    IntRank m(cx.n_cells(p + 1), cx.n_cells(p));
    for (int i = 0; i < cx.n_cells(p + 1); ++i)
        for (const auto& e : cx.boundary_of[p + 1][i]) m.add(i, e.cell, e.sign);
    return m.rank();
}

}  // namespace detail

// Per-scalar-copy cohomology dimensions (dim H^0, .., dim H^3); the trailing
// entry is zero for the 2D complex.
template <int D>
inline std::array<int, 4> cohomology_dims(const CellComplex<D>& cx) {
    std::array<int, 4> h{0, 0, 0, 0};
    std::array<int, 4> rank{0, 0, 0, 0};
    for (int p = 0; p < D; ++p) rank[p] = detail::incidence_rank(cx, p);
    for (int p = 0; p <= D; ++p) {
        int null_dp = (p < D) ? cx.n_cells(p) - rank[p] : cx.n_cells(p);
        int range_prev = (p > 0) ? rank[p - 1] : 0;
        h[p] = null_dp - range_prev;
    }
    return h;
}

}  // namespace aolat
