#include "nilflux/linalg.hpp"
#include "nilflux/errors.hpp"

#include <algorithm>

namespace nilflux {

RationalMatrix identity_matrix(std::size_t n) {
    RationalMatrix m(n, RationalVector(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

RationalVector mat_vec(const RationalMatrix& a, const RationalVector& v) {
    RationalVector out(a.size(), Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            out[i] += a[i][j] * v[j];
    return out;
}

RationalMatrix mat_mul(const RationalMatrix& a, const RationalMatrix& b) {
    std::size_t n = a.size(), k = b.size(), m = b.empty() ? 0 : b[0].size();
    RationalMatrix out(n, RationalVector(m, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < k; ++l)
            if (a[i][l] != 0)
                for (std::size_t j = 0; j < m; ++j)
                    out[i][j] += a[i][l] * b[l][j];
    return out;
}

namespace {

// Row echelon reduction in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& a) {
    std::vector<std::size_t> pivots;
    if (a.empty()) return pivots;
    std::size_t rows = a.size(), cols = a[0].size(), r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && a[p][c] == 0) ++p;
        if (p == rows) continue;
        std::swap(a[p], a[r]);
        Rational inv = Rational(1) / a[r][c];
        for (std::size_t j = c; j < cols; ++j) a[r][j] *= inv;
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == r || a[i][c] == 0) continue;
            Rational f = a[i][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

Rational determinant(RationalMatrix a) {
    std::size_t n = a.size();
    Rational det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return Rational(0);
        if (p != c) { std::swap(a[p], a[c]); det = -det; }
        det *= a[c][c];
        Rational inv = Rational(1) / a[c][c];
        for (std::size_t i = c + 1; i < n; ++i) {
            if (a[i][c] == 0) continue;
            Rational f = a[i][c] * inv;
            for (std::size_t j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

std::optional<RationalMatrix> invert(const RationalMatrix& a) {
    std::size_t n = a.size();
    RationalMatrix aug(n, RationalVector(2 * n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
        aug[i][n + i] = 1;
    }
    auto pivots = rref(aug);
    if (pivots.size() != n || pivots.back() != n - 1) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i)
        if (pivots[i] != i) return std::nullopt;
    RationalMatrix inv(n, RationalVector(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
    return inv;
}

std::size_t rank(RationalMatrix a) { return rref(a).size(); }

std::optional<RationalVector> solve(const RationalMatrix& a, const RationalVector& b) {
    std::size_t rows = a.size(), cols = rows == 0 ? 0 : a[0].size();
    RationalMatrix aug(rows, RationalVector(cols + 1));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) aug[i][j] = a[i][j];
        aug[i][cols] = b[i];
    }
    auto pivots = rref(aug);
    if (!pivots.empty() && pivots.back() == cols) return std::nullopt; // 0 = 1 row
    RationalVector x(cols, Rational(0));
    for (std::size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][cols];
    return x;
}

std::vector<RationalVector> kernel_basis(const RationalMatrix& a) {
    std::size_t rows = a.size(), cols = rows == 0 ? 0 : a[0].size();
    RationalMatrix m = a;
    auto pivots = rref(m);
    std::vector<bool> is_pivot(cols, false);
    for (auto c : pivots) is_pivot[c] = true;
    std::vector<RationalVector> basis;
    for (std::size_t free = 0; free < cols; ++free) {
        if (is_pivot[free]) continue;
        RationalVector v(cols, Rational(0));
        v[free] = 1;
        for (std::size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m[r][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

std::vector<std::size_t> complement_indices(const std::vector<RationalVector>& have,
                                            const std::vector<RationalVector>& candidates) {
    RationalMatrix m;
    for (const auto& v : have) m.push_back(v);
    std::size_t current_rank = rank(m);
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        m.push_back(candidates[i]);
        std::size_t r = rank(m);
        if (r > current_rank) {
            chosen.push_back(i);
            current_rank = r;
        } else {
            m.pop_back();
        }
    }
    return chosen;
}

bool in_span(const std::vector<RationalVector>& basis, const RationalVector& v) {
    if (basis.empty())
        return std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; });
    // Solve basis^T c = v.
    std::size_t dim = v.size();
    RationalMatrix a(dim, RationalVector(basis.size()));
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) a[i][j] = basis[j][i];
    return solve(a, v).has_value();
}

HermiteResult hermite_columns(IntegerMatrix a) {
    std::size_t rows = a.size(), cols = rows == 0 ? 0 : a[0].size();
    IntegerMatrix u(cols, IntegerVector(cols, 0));
    for (std::size_t i = 0; i < cols; ++i) u[i][i] = 1;

    auto col_op_sub = [&](std::size_t dst, std::size_t src, const Integer& q) {
        for (std::size_t i = 0; i < rows; ++i) a[i][dst] -= q * a[i][src];
        for (std::size_t i = 0; i < cols; ++i) u[i][dst] -= q * u[i][src];
    };
    auto col_swap = [&](std::size_t i, std::size_t j) {
        for (std::size_t r = 0; r < rows; ++r) std::swap(a[r][i], a[r][j]);
        for (std::size_t r = 0; r < cols; ++r) std::swap(u[r][i], u[r][j]);
    };
    auto col_negate = [&](std::size_t j) {
        for (std::size_t r = 0; r < rows; ++r) a[r][j] = -a[r][j];
        for (std::size_t r = 0; r < cols; ++r) u[r][j] = -u[r][j];
    };

    std::vector<std::size_t> pivot_rows;
    std::size_t c = 0;
    for (std::size_t r = 0; r < rows && c < cols; ++r) {
        // Euclid across columns c..cols-1 on row r.
        while (true) {
            std::size_t best = cols;
            for (std::size_t j = c; j < cols; ++j)
                if (a[r][j] != 0 && (best == cols || abs(a[r][j]) < abs(a[r][best])))
                    best = j;
            if (best == cols) break; // row r is zero on the working columns
            col_swap(c, best);
            if (a[r][c] < 0) col_negate(c);
            bool reduced = true;
            for (std::size_t j = c + 1; j < cols; ++j) {
                if (a[r][j] == 0) continue;
                Integer q = a[r][j] / a[r][c];
                col_op_sub(j, c, q);
                if (a[r][j] != 0) reduced = false;
            }
            if (reduced) break;
        }
        if (c < cols && a[r][c] != 0) {
            // Reduce entries to the left of the pivot.
            for (std::size_t j = 0; j < c; ++j) {
                Integer q = a[r][j] / a[r][c];
                if (a[r][j] - q * a[r][c] < 0) q -= 1; // floor division remainder
                if (q != 0) col_op_sub(j, c, q);
            }
            pivot_rows.push_back(r);
            ++c;
        }
    }
    return HermiteResult{std::move(a), std::move(u), std::move(pivot_rows)};
}

std::optional<IntegerSolveResult> integer_solve(const IntegerMatrix& a, const IntegerVector& b) {
    std::size_t rows = a.size(), cols = rows == 0 ? 0 : a[0].size();
    auto hr = hermite_columns(a);
    // Forward-substitute H y = b column by column.
    IntegerVector y(cols, 0);
    IntegerVector residual = b;
    std::size_t col = 0;
    for (; col < hr.pivot_rows.size(); ++col) {
        std::size_t r = hr.pivot_rows[col];
        Integer p = hr.h[r][col];
        if (residual[r] % p != 0) return std::nullopt;
        y[col] = residual[r] / p;
        for (std::size_t i = 0; i < rows; ++i) residual[i] -= y[col] * hr.h[i][col];
    }
    for (std::size_t i = 0; i < rows; ++i)
        if (residual[i] != 0) return std::nullopt;

    IntegerSolveResult out;
    out.particular.assign(cols, 0);
    for (std::size_t i = 0; i < cols; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out.particular[i] += hr.u[i][j] * y[j];
    for (std::size_t j = hr.pivot_rows.size(); j < cols; ++j) {
        IntegerVector v(cols, 0);
        for (std::size_t i = 0; i < cols; ++i) v[i] = hr.u[i][j];
        out.lattice.push_back(std::move(v));
    }
    return out;
}

} // namespace nilflux
