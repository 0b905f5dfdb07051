#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/matrix.hpp"
#include "fpsys/rng.hpp"
#include "fpsys/vector.hpp"

namespace fpsys {

using BigInt = boost::multiprecision::cpp_int;

/// A subspace of F_p^n held by its RREF basis. Two subspaces are equal iff
/// their bases are identical, so equality and hashing are structural.
class Subspace {
public:
    static Subspace zero(const Field& f, std::size_t n) { return Subspace(f, n, FpMatrix(0, n), {}); }

    static Subspace full(const Field& f, std::size_t n) {
        std::vector<std::size_t> pivots(n);
        for (std::size_t i = 0; i < n; ++i) {
            pivots[i] = i;
        }
        return Subspace(f, n, FpMatrix::identity(n), std::move(pivots));
    }

    /// span(vectors) in F_p^n. An empty list gives the zero subspace.
    static Subspace span(const Field& f, std::span<const FpVector> vectors, std::size_t n) {
        FpMatrix m = FpMatrix::from_rows(vectors, n);
        auto pivots = rref_in_place(f, m);
        FpMatrix basis(pivots.size(), n);
        for (std::size_t r = 0; r < pivots.size(); ++r) {
            for (std::size_t c = 0; c < n; ++c) {
                basis(r, c) = m(r, c);
            }
        }
        return Subspace(f, n, std::move(basis), std::move(pivots));
    }

    /// Wraps a matrix already known to be in RREF with nonzero rows.
    static Subspace from_canonical(const Field& f, FpMatrix basis, std::vector<std::size_t> pivots) {
        const std::size_t n = basis.cols();
        return Subspace(f, n, std::move(basis), std::move(pivots));
    }

    [[nodiscard]] const Field& field() const noexcept { return field_; }
    [[nodiscard]] std::size_t ambient_dim() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return basis_.rows(); }
    [[nodiscard]] const FpMatrix& basis() const noexcept { return basis_; }
    [[nodiscard]] const std::vector<std::size_t>& pivots() const noexcept { return pivots_; }

    [[nodiscard]] std::vector<FpVector> basis_vectors() const {
        std::vector<FpVector> out;
        out.reserve(dim());
        for (std::size_t r = 0; r < dim(); ++r) {
            out.push_back(basis_.row(r));
        }
        return out;
    }

    /// Canonical coset representative of x + U: x with every pivot coordinate
    /// cleared. Linear in x, and zero iff x lies in U.
    [[nodiscard]] FpVector reduce(FpVector x) const {
        if (x.size() != n_) {
            throw DimensionMismatch("vector of dimension " + std::to_string(x.size()) +
                                    " reduced against subspace of F_p^" + std::to_string(n_));
        }
        for (std::size_t r = 0; r < pivots_.size(); ++r) {
            const Residue c = x[pivots_[r]];
            if (c == 0) {
                continue;
            }
            const Residue nc = field_.neg(c);
            for (std::size_t j = pivots_[r]; j < n_; ++j) {
                x[j] = field_.add(x[j], field_.mul(nc, basis_(r, j)));
            }
        }
        return x;
    }

    [[nodiscard]] bool contains(const FpVector& x) const { return reduce(x).is_zero(); }

    [[nodiscard]] bool contains(const Subspace& other) const {
        for (std::size_t r = 0; r < other.dim(); ++r) {
            if (!contains(other.basis_.row(r))) {
                return false;
            }
        }
        return true;
    }

    /// All p^dim elements, in odometer order over basis coefficients.
    [[nodiscard]] std::vector<FpVector> elements() const {
        const std::uint64_t count = space_size(field_, dim());
        std::vector<FpVector> out;
        out.reserve(count);
        for (std::uint64_t code = 0; code < count; ++code) {
            const FpVector coeffs = decode(field_, code, dim());
            FpVector v(n_);
            for (std::size_t r = 0; r < dim(); ++r) {
                axpy(field_, coeffs[r], basis_.row(r), v);
            }
            out.push_back(std::move(v));
        }
        return out;
    }

    friend bool operator==(const Subspace& a, const Subspace& b) noexcept {
        return a.n_ == b.n_ && a.basis_ == b.basis_;
    }

    [[nodiscard]] std::size_t hash() const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL ^ n_;
        for (std::size_t r = 0; r < basis_.rows(); ++r) {
            for (std::size_t c = 0; c < basis_.cols(); ++c) {
                h = (h ^ basis_(r, c)) * 0x100000001b3ULL;
            }
        }
        return static_cast<std::size_t>(h);
    }

private:
    Subspace(const Field& f, std::size_t n, FpMatrix basis, std::vector<std::size_t> pivots)
        : field_(f), n_(n), basis_(std::move(basis)), pivots_(std::move(pivots)) {}

    Field field_;
    std::size_t n_;
    FpMatrix basis_;
    std::vector<std::size_t> pivots_;
};

struct SubspaceHash {
    std::size_t operator()(const Subspace& s) const noexcept { return s.hash(); }
};

/// proj_{V/U}(x), held as the canonical coset representative.
struct QuotientVector {
    FpVector representative;
    Subspace modulo;

    [[nodiscard]] bool is_zero() const noexcept { return representative.is_zero(); }
};

inline QuotientVector quotient_project(const FpVector& x, const Subspace& u) {
    return QuotientVector{u.reduce(x), u};
}

/// span(proj_{V/U}(x)) as a projective point: the reduced representative
/// scaled so that its leading nonzero coordinate is 1. Lines of the same
/// quotient are equal iff their directions are equal.
struct QuotientLine {
    FpVector direction;

    friend auto operator<=>(const QuotientLine&, const QuotientLine&) = default;
    friend bool operator==(const QuotientLine&, const QuotientLine&) = default;
};

inline QuotientLine normalize_line(const Field& f, FpVector rep) {
    const std::size_t lead = rep.leading_index();
    if (lead == rep.size()) {
        throw DegenerateLine("zero vector spans no line");
    }
    const Residue s = f.inv(rep[lead]);
    for (std::size_t i = lead; i < rep.size(); ++i) {
        rep[i] = f.mul(rep[i], s);
    }
    return QuotientLine{std::move(rep)};
}

inline QuotientLine quotient_line(const FpVector& x, const Subspace& u) {
    FpVector rep = u.reduce(x);
    if (rep.is_zero()) {
        throw DegenerateLine("vector lies in the subspace; its projection spans no line");
    }
    return normalize_line(u.field(), std::move(rep));
}

/// Number of d-dimensional subspaces of F_p^n.
inline BigInt gaussian_binomial(std::uint64_t p, std::size_t n, std::size_t d) {
    if (d > n) {
        return 0;
    }
    BigInt num = 1;
    BigInt den = 1;
    const BigInt bp = p;
    for (std::size_t i = 0; i < d; ++i) {
        num *= boost::multiprecision::pow(bp, static_cast<unsigned>(n)) - boost::multiprecision::pow(bp, static_cast<unsigned>(i));
        den *= boost::multiprecision::pow(bp, static_cast<unsigned>(d)) - boost::multiprecision::pow(bp, static_cast<unsigned>(i));
    }
    return num / den;
}

inline constexpr std::uint64_t kDefaultSubspaceCap = 1'000'000;

/// Calls visit(subspace) for every d-dimensional subspace of F_p^n, each once,
/// ordered by pivot set (lexicographic) and then by free entries (odometer).
template <class Visit>
void for_each_subspace(const Field& f, std::size_t n, std::size_t d, Visit&& visit,
                       std::uint64_t cap = kDefaultSubspaceCap) {
    if (d > n) {
        throw std::invalid_argument("subspace dimension exceeds ambient dimension");
    }
    if (gaussian_binomial(f.p(), n, d) > cap) {
        throw CapExceeded("Gaussian binomial exceeds enumeration cap of " + std::to_string(cap));
    }
    std::vector<std::size_t> pivots(d);
    for (std::size_t i = 0; i < d; ++i) {
        pivots[i] = i;
    }
    while (true) {
        // Free slots: row r, column c > pivots[r] with c not a pivot column.
        std::vector<std::pair<std::size_t, std::size_t>> slots;
        std::vector<bool> is_pivot(n, false);
        for (std::size_t c : pivots) {
            is_pivot[c] = true;
        }
        for (std::size_t r = 0; r < d; ++r) {
            for (std::size_t c = pivots[r] + 1; c < n; ++c) {
                if (!is_pivot[c]) {
                    slots.emplace_back(r, c);
                }
            }
        }
        std::vector<Residue> digits(slots.size(), 0);
        while (true) {
            FpMatrix basis(d, n);
            for (std::size_t r = 0; r < d; ++r) {
                basis(r, pivots[r]) = 1;
            }
            for (std::size_t s = 0; s < slots.size(); ++s) {
                basis(slots[s].first, slots[s].second) = digits[s];
            }
            visit(Subspace::from_canonical(f, std::move(basis), pivots));
            bool wrapped = true;
            for (std::size_t pos = slots.size(); pos-- > 0;) {
                if (++digits[pos] < f.p()) {
                    wrapped = false;
                    break;
                }
                digits[pos] = 0;
            }
            if (wrapped) {
                break;
            }
        }
        // Next pivot combination.
        std::size_t i = d;
        while (i > 0 && pivots[i - 1] == n - d + i - 1) {
            --i;
        }
        if (i == 0) {
            break;
        }
        ++pivots[i - 1];
        for (std::size_t j = i; j < d; ++j) {
            pivots[j] = pivots[j - 1] + 1;
        }
    }
}

inline std::vector<Subspace> enumerate_subspaces(const Field& f, std::size_t n, std::size_t d,
                                                 std::uint64_t cap = kDefaultSubspaceCap) {
    std::vector<Subspace> out;
    for_each_subspace(f, n, d, [&](Subspace s) { out.push_back(std::move(s)); }, cap);
    return out;
}

/// Uniform d-dimensional subspace: rows of a uniform d x n matrix, resampled
/// until the rank is d. Every subspace has the same number of generating
/// matrices, so acceptance preserves uniformity.
inline Subspace random_subspace(const Field& f, std::size_t n, std::size_t d, Rng& rng) {
    if (d > n) {
        throw std::invalid_argument("subspace dimension exceeds ambient dimension");
    }
    if (d == 0) {
        return Subspace::zero(f, n);
    }
    while (true) {
        std::vector<FpVector> rows(d, FpVector(n));
        for (auto& row : rows) {
            for (std::size_t c = 0; c < n; ++c) {
                row[c] = static_cast<Residue>(uniform_below(rng, f.p()));
            }
        }
        Subspace s = Subspace::span(f, rows, n);
        if (s.dim() == d) {
            return s;
        }
    }
}

}  // namespace fpsys
