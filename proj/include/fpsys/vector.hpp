#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"

namespace fpsys {

/// A vector of F_p^n. Coordinates are residues in [0, p); the field is
/// carried by the operations, not by the vector.
class FpVector {
public:
    FpVector() = default;
    explicit FpVector(std::size_t n) : coords_(n, 0) {}
    FpVector(std::initializer_list<Residue> coords) : coords_(coords) {}
    explicit FpVector(std::vector<Residue> coords) : coords_(std::move(coords)) {}

    /// Builds a vector from arbitrary integers, reducing every coordinate mod p.
    static FpVector reduced(const Field& f, std::span<const std::int64_t> raw) {
        FpVector v(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            v.coords_[i] = f.reduce(raw[i]);
        }
        return v;
    }

    static FpVector unit(std::size_t n, std::size_t i) {
        FpVector v(n);
        v.coords_.at(i) = 1;
        return v;
    }

    [[nodiscard]] std::size_t size() const noexcept { return coords_.size(); }
    [[nodiscard]] Residue operator[](std::size_t i) const noexcept { return coords_[i]; }
    Residue& operator[](std::size_t i) noexcept { return coords_[i]; }
    [[nodiscard]] std::span<const Residue> coords() const noexcept { return coords_; }
    [[nodiscard]] auto begin() const noexcept { return coords_.begin(); }
    [[nodiscard]] auto end() const noexcept { return coords_.end(); }

    [[nodiscard]] bool is_zero() const noexcept {
        for (Residue c : coords_) {
            if (c != 0) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] bool is_reduced(const Field& f) const noexcept {
        for (Residue c : coords_) {
            if (c >= f.p()) {
                return false;
            }
        }
        return true;
    }

    /// Index of the first nonzero coordinate, or size() for the zero vector.
    [[nodiscard]] std::size_t leading_index() const noexcept {
        std::size_t i = 0;
        while (i < coords_.size() && coords_[i] == 0) {
            ++i;
        }
        return i;
    }

    // Lexicographic on coordinates.
    friend auto operator<=>(const FpVector&, const FpVector&) = default;
    friend bool operator==(const FpVector&, const FpVector&) = default;

    [[nodiscard]] std::string to_string() const {
        std::string s;
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (i) {
                s += ' ';
            }
            s += std::to_string(coords_[i]);
        }
        return s;
    }

private:
    std::vector<Residue> coords_;
};

inline void require_same_dim(const FpVector& a, const FpVector& b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch("vector dimensions differ: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
    }
}

inline FpVector add(const Field& f, const FpVector& a, const FpVector& b) {
    require_same_dim(a, b);
    FpVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = f.add(a[i], b[i]);
    }
    return r;
}

inline FpVector sub(const Field& f, const FpVector& a, const FpVector& b) {
    require_same_dim(a, b);
    FpVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = f.sub(a[i], b[i]);
    }
    return r;
}

inline FpVector scale(const Field& f, Residue c, const FpVector& a) {
    FpVector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        r[i] = f.mul(c, a[i]);
    }
    return r;
}

/// acc += c * a
inline void axpy(const Field& f, Residue c, const FpVector& a, FpVector& acc) {
    if (c == 0) {
        return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc[i] = f.add(acc[i], f.mul(c, a[i]));
    }
}

/// Base-p integer code of a vector; coordinate 0 is the most significant digit.
/// Only meaningful while p^n fits in 64 bits.
inline std::uint64_t encode(const Field& f, const FpVector& v) noexcept {
    std::uint64_t code = 0;
    for (Residue c : v) {
        code = code * f.p() + c;
    }
    return code;
}

inline FpVector decode(const Field& f, std::uint64_t code, std::size_t n) {
    FpVector v(n);
    for (std::size_t i = n; i-- > 0;) {
        v[i] = static_cast<Residue>(code % f.p());
        code /= f.p();
    }
    return v;
}

/// p^n as an unsigned integer, throwing CapExceeded if it overflows 64 bits.
inline std::uint64_t space_size(const Field& f, std::size_t n) {
    std::uint64_t s = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (s > UINT64_MAX / f.p()) {
            throw CapExceeded("p^n does not fit in 64 bits");
        }
        s *= f.p();
    }
    return s;
}

/// All of F_p^n in code order.
inline std::vector<FpVector> all_vectors(const Field& f, std::size_t n) {
    const std::uint64_t total = space_size(f, n);
    std::vector<FpVector> out;
    out.reserve(total);
    for (std::uint64_t c = 0; c < total; ++c) {
        out.push_back(decode(f, c, n));
    }
    return out;
}

struct FpVectorHash {
    std::size_t operator()(const FpVector& v) const noexcept {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (Residue c : v) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        h ^= v.size();
        return static_cast<std::size_t>(h);
    }
};

}  // namespace fpsys

template <>
struct std::hash<fpsys::FpVector> : fpsys::FpVectorHash {};
