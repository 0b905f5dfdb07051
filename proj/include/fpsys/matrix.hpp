#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/vector.hpp"

namespace fpsys {

/// Dense row-major matrix over F_p.
class FpMatrix {
public:
    FpMatrix() = default;
    FpMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}

    FpMatrix(std::size_t rows, std::size_t cols, std::vector<Residue> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw DimensionMismatch("matrix data has wrong length");
        }
    }

    /// Stacks vectors as rows. An empty list gives a 0 x n matrix.
    static FpMatrix from_rows(std::span<const FpVector> rows, std::size_t n) {
        FpMatrix m(rows.size(), n);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != n) {
                throw DimensionMismatch("row " + std::to_string(r) + " has dimension " +
                                        std::to_string(rows[r].size()) + ", expected " +
                                        std::to_string(n));
            }
            std::copy(rows[r].begin(), rows[r].end(), m.data_.begin() + static_cast<std::ptrdiff_t>(r * n));
        }
        return m;
    }

    static FpMatrix identity(std::size_t n) {
        FpMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1;
        }
        return m;
    }

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    Residue& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    [[nodiscard]] Residue operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    [[nodiscard]] FpVector row(std::size_t r) const {
        return FpVector(std::vector<Residue>(data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
                                             data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)));
    }

    [[nodiscard]] bool is_reduced(const Field& f) const noexcept {
        return std::all_of(data_.begin(), data_.end(), [&](Residue v) { return v < f.p(); });
    }

    [[nodiscard]] FpMatrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
        FpMatrix s(rows.size(), cols.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            for (std::size_t j = 0; j < cols.size(); ++j) {
                if (rows[i] >= rows_ || cols[j] >= cols_) {
                    throw std::out_of_range("submatrix index out of range");
                }
                s(i, j) = (*this)(rows[i], cols[j]);
            }
        }
        return s;
    }

    friend bool operator==(const FpMatrix&, const FpMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Residue> data_;
};

/// Brings m to reduced row echelon form in place and returns the pivot columns.
/// Zero rows end up at the bottom.
inline std::vector<std::size_t> rref_in_place(const Field& f, FpMatrix& m) {
    std::vector<std::size_t> pivots;
    std::size_t lead_row = 0;
    for (std::size_t c = 0; c < m.cols() && lead_row < m.rows(); ++c) {
        std::size_t sel = lead_row;
        while (sel < m.rows() && m(sel, c) == 0) {
            ++sel;
        }
        if (sel == m.rows()) {
            continue;
        }
        if (sel != lead_row) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(sel, j), m(lead_row, j));
            }
        }
        const Residue inv = f.inv(m(lead_row, c));
        for (std::size_t j = c; j < m.cols(); ++j) {
            m(lead_row, j) = f.mul(m(lead_row, j), inv);
        }
        for (std::size_t r = 0; r < m.rows(); ++r) {
            if (r == lead_row || m(r, c) == 0) {
                continue;
            }
            const Residue factor = m(r, c);
            for (std::size_t j = c; j < m.cols(); ++j) {
                m(r, j) = f.sub(m(r, j), f.mul(factor, m(lead_row, j)));
            }
        }
        pivots.push_back(c);
        ++lead_row;
    }
    return pivots;
}

inline std::size_t rank(const Field& f, FpMatrix m) { return rref_in_place(f, m).size(); }

inline std::size_t rank_of(const Field& f, std::span<const FpVector> vectors) {
    if (vectors.empty()) {
        return 0;
    }
    return rank(f, FpMatrix::from_rows(vectors, vectors.front().size()));
}

/// True iff the square submatrix on (rows, cols) is nonsingular.
inline bool minor_nonsingular(const Field& f, const FpMatrix& m, std::span<const std::size_t> rows,
                              std::span<const std::size_t> cols) {
    if (rows.size() != cols.size()) {
        throw std::invalid_argument("minor needs as many rows as columns");
    }
    if (rows.size() > std::min(m.rows(), m.cols())) {
        throw std::out_of_range("minor larger than matrix");
    }
    return rank(f, m.submatrix(rows, cols)) == rows.size();
}

/// Inverse of a square matrix, or nullopt when singular.
inline std::optional<FpMatrix> inverse(const Field& f, const FpMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("inverse of a non-square matrix");
    }
    const std::size_t n = m.rows();
    FpMatrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, n + i) = 1;
    }
    const auto pivots = rref_in_place(f, aug);
    if (pivots.size() < n || (n > 0 && pivots[n - 1] >= n)) {
        return std::nullopt;
    }
    FpMatrix inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            inv(i, j) = aug(i, n + j);
        }
    }
    return inv;
}

}  // namespace fpsys
