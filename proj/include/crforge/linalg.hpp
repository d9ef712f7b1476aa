#pragma once

#include <optional>
#include <vector>

#include "rational.hpp"

namespace crforge {

/* Dense exact linear algebra over Q(i). Row-major. */
using QVec = std::vector<ComplexRational>;
using QMat = std::vector<QVec>;

/* Incremental row-space maintenance in reduced form.  Rows are inserted one
 * at a time; each kept row has a pivot column not used by any other row and
 * pivot value 1.  Supports span queries and rank. */
class RowSpace {
  public:
    explicit RowSpace(int cols) : cols_(cols) {}

    /* reduce v against the basis in place; returns first nonzero column or -1 */
    int reduce(QVec& v) const {
        for (const auto& row : rows_) {
            const ComplexRational& c = v[row.pivot];
            if (c.is_zero()) continue;
            ComplexRational factor = c;
            for (int j = 0; j < cols_; ++j)
                if (!row.vec[j].is_zero()) v[j] -= factor * row.vec[j];
        }
        for (int j = 0; j < cols_; ++j)
            if (!v[j].is_zero()) return j;
        return -1;
    }

    /* returns true if v enlarged the span */
    bool insert(QVec v) {
        int p = reduce(v);
        if (p < 0) return false;
        ComplexRational inv = v[p].inv();
        for (auto& x : v) x *= inv;
        /* back-substitute into existing rows */
        for (auto& row : rows_) {
            const ComplexRational& c = row.vec[p];
            if (c.is_zero()) continue;
            ComplexRational factor = c;
            for (int j = 0; j < cols_; ++j)
                if (!v[j].is_zero()) row.vec[j] -= factor * v[j];
        }
        rows_.push_back({p, std::move(v)});
        return true;
    }

    bool contains(QVec v) const { return reduce(v) < 0; }
    int rank() const { return static_cast<int>(rows_.size()); }
    std::vector<int> pivot_columns() const {
        std::vector<int> p;
        for (const auto& r : rows_) p.push_back(r.pivot);
        return p;
    }

  private:
    struct Row {
        int pivot;
        QVec vec;
    };
    int cols_;
    std::vector<Row> rows_;
};

inline int matrix_rank(const QMat& m) {
    if (m.empty()) return 0;
    RowSpace rs(static_cast<int>(m[0].size()));
    for (const auto& row : m) rs.insert(row);
    return rs.rank();
}

/* Solve A x = b exactly; returns one solution (free variables set to 0), or
 * nullopt when inconsistent. */
inline std::optional<QVec> solve_linear(QMat a, QVec b) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
    std::vector<int> pivot_col_of_row;
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int sel = -1;
        for (int i = r; i < rows; ++i)
            if (!a[i][c].is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(a[sel], a[r]);
        std::swap(b[sel], b[r]);
        ComplexRational inv = a[r][c].inv();
        for (int j = c; j < cols; ++j) a[r][j] *= inv;
        b[r] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            ComplexRational f = a[i][c];
            for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
            b[i] -= f * b[r];
        }
        pivot_col_of_row.push_back(c);
        ++r;
    }
    for (int i = r; i < rows; ++i)
        if (!b[i].is_zero()) return std::nullopt;
    QVec x(cols);
    for (int i = 0; i < r; ++i) x[pivot_col_of_row[i]] = b[i];
    return x;
}

/* One nontrivial kernel vector of A, or nullopt if the kernel is trivial. */
inline std::optional<QVec> kernel_vector(QMat a) {
    const int rows = static_cast<int>(a.size());
    const int cols = rows == 0 ? 0 : static_cast<int>(a[0].size());
    if (cols == 0) return std::nullopt;
    std::vector<int> pivot_col_of_row;
    std::vector<bool> is_pivot(cols, false);
    int r = 0;
    for (int c = 0; c < cols && r < rows; ++c) {
        int sel = -1;
        for (int i = r; i < rows; ++i)
            if (!a[i][c].is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) continue;
        std::swap(a[sel], a[r]);
        ComplexRational inv = a[r][c].inv();
        for (int j = c; j < cols; ++j) a[r][j] *= inv;
        for (int i = 0; i < rows; ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            ComplexRational f = a[i][c];
            for (int j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivot_col_of_row.push_back(c);
        is_pivot[c] = true;
        ++r;
    }
    int free_col = -1;
    for (int c = 0; c < cols; ++c)
        if (!is_pivot[c]) {
            free_col = c;
            break;
        }
    if (free_col < 0) return std::nullopt;
    QVec x(cols);
    x[free_col] = rat(1);
    for (int i = 0; i < r; ++i) x[pivot_col_of_row[i]] = -a[i][free_col];
    return x;
}

inline ComplexRational det_exact(QMat a) {
    const int n = static_cast<int>(a.size());
    ComplexRational det = rat(1);
    for (int c = 0; c < n; ++c) {
        int sel = -1;
        for (int i = c; i < n; ++i)
            if (!a[i][c].is_zero()) {
                sel = i;
                break;
            }
        if (sel < 0) return ComplexRational();
        if (sel != c) {
            std::swap(a[sel], a[c]);
            det = -det;
        }
        det *= a[c][c];
        ComplexRational inv = a[c][c].inv();
        for (int i = c + 1; i < n; ++i) {
            if (a[i][c].is_zero()) continue;
            ComplexRational f = a[i][c] * inv;
            for (int j = c; j < n; ++j) a[i][j] -= f * a[c][j];
        }
    }
    return det;
}

}  // namespace crforge
