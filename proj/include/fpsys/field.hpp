#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fpsys/errors.hpp"

namespace fpsys {

using Residue = std::uint32_t;

/// The prime field F_p, 2 <= p <= 2^31 - 1.
///
/// Inverses come from a precomputed table for p < 2^16 and from the extended
/// Euclidean algorithm otherwise. The table is shared between copies.
class Field {
public:
    static constexpr std::uint64_t kMaxPrime = (std::uint64_t{1} << 31) - 1;
    static constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 16;

    explicit Field(std::uint64_t p) : p_(static_cast<Residue>(p)) {
        if (p < 2 || p > kMaxPrime) {
            throw std::invalid_argument("field characteristic out of range: " + std::to_string(p));
        }
        if (!is_prime(p)) {
            throw std::invalid_argument("field characteristic is not prime: " + std::to_string(p));
        }
        if (p < kTableLimit) {
            auto table = std::make_shared<std::vector<Residue>>(p, 0);
            (*table)[1] = 1;
            for (std::uint64_t a = 2; a < p; ++a) {
                // inv(a) = -(p / a) * inv(p mod a)
                const std::uint64_t q = p / a;
                (*table)[a] = static_cast<Residue>((p - q) * (*table)[p % a] % p);
            }
            inverses_ = std::move(table);
        }
    }

    [[nodiscard]] Residue p() const noexcept { return p_; }

    [[nodiscard]] Residue reduce(std::int64_t a) const noexcept {
        const auto m = static_cast<std::int64_t>(p_);
        std::int64_t r = a % m;
        return static_cast<Residue>(r < 0 ? r + m : r);
    }

    [[nodiscard]] Residue add(Residue a, Residue b) const noexcept {
        const std::uint64_t s = std::uint64_t{a} + b;
        return static_cast<Residue>(s >= p_ ? s - p_ : s);
    }
    [[nodiscard]] Residue sub(Residue a, Residue b) const noexcept {
        return a >= b ? a - b : static_cast<Residue>(std::uint64_t{a} + p_ - b);
    }
    [[nodiscard]] Residue neg(Residue a) const noexcept { return a == 0 ? 0 : p_ - a; }
    [[nodiscard]] Residue mul(Residue a, Residue b) const noexcept {
        return static_cast<Residue>(std::uint64_t{a} * b % p_);
    }

    [[nodiscard]] Residue inv(Residue a) const {
        if (a == 0) {
            throw std::domain_error("inverse of zero in F_p");
        }
        if (inverses_) {
            return (*inverses_)[a];
        }
        std::int64_t r0 = p_, r1 = a, s0 = 0, s1 = 1;
        while (r1 != 0) {
            const std::int64_t q = r0 / r1;
            std::int64_t t = r0 - q * r1;
            r0 = r1;
            r1 = t;
            t = s0 - q * s1;
            s0 = s1;
            s1 = t;
        }
        return reduce(s0);
    }

    [[nodiscard]] Residue pow(Residue base, std::uint64_t e) const noexcept {
        std::uint64_t result = 1 % p_;
        std::uint64_t b = base % p_;
        while (e > 0) {
            if (e & 1U) {
                result = result * b % p_;
            }
            b = b * b % p_;
            e >>= 1U;
        }
        return static_cast<Residue>(result);
    }

    friend bool operator==(const Field& a, const Field& b) noexcept { return a.p_ == b.p_; }

    static bool is_prime(std::uint64_t n) noexcept {
        if (n < 2) {
            return false;
        }
        for (std::uint64_t d = 2; d * d <= n; ++d) {
            if (n % d == 0) {
                return false;
            }
        }
        return true;
    }

private:
    Residue p_;
    std::shared_ptr<const std::vector<Residue>> inverses_;
};

}  // namespace fpsys
