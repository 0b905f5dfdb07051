#pragma once

#include <cstddef>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

namespace fpsys {

namespace detail {

/// Calls f(args...) and reports whether iteration should continue. Callbacks
/// may return void (always continue) or bool (false stops).
template <class F, class... Args>
bool keep_going(F& f, Args&&... args) {
    if constexpr (std::is_same_v<std::invoke_result_t<F&, Args...>, void>) {
        f(std::forward<Args>(args)...);
        return true;
    } else {
        return static_cast<bool>(f(std::forward<Args>(args)...));
    }
}

}  // namespace detail

/// Visits every r-subset of {0..n-1} as an increasing index list, in
/// lexicographic order. Returns false if the visitor stopped early.
template <class Visit>
bool for_each_combination(std::size_t n, std::size_t r, Visit&& visit) {
    if (r > n) {
        return true;
    }
    std::vector<std::size_t> idx(r);
    for (std::size_t i = 0; i < r; ++i) {
        idx[i] = i;
    }
    while (true) {
        if (!detail::keep_going(visit, std::span<const std::size_t>(idx))) {
            return false;
        }
        std::size_t i = r;
        while (i > 0 && idx[i - 1] == n - r + i - 1) {
            --i;
        }
        if (i == 0) {
            return true;
        }
        ++idx[i - 1];
        for (std::size_t j = i; j < r; ++j) {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Visits every digit string in [0, base)^len in odometer order (last digit
/// fastest). len == 0 visits the empty string once.
template <class Visit>
bool for_each_digits(std::size_t base, std::size_t len, Visit&& visit) {
    if (base == 0 && len > 0) {
        return true;
    }
    std::vector<std::size_t> digits(len, 0);
    while (true) {
        if (!detail::keep_going(visit, std::span<const std::size_t>(digits))) {
            return false;
        }
        std::size_t pos = len;
        while (pos > 0) {
            --pos;
            if (++digits[pos] < base) {
                break;
            }
            digits[pos] = 0;
            if (pos == 0) {
                return true;
            }
        }
        if (len == 0) {
            return true;
        }
    }
}

/// Complement of a sorted index set within {0..n-1}.
inline std::vector<std::size_t> complement(std::span<const std::size_t> set, std::size_t n) {
    std::vector<bool> in(n, false);
    for (std::size_t i : set) {
        in.at(i) = true;
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i) {
        if (!in[i]) {
            out.push_back(i);
        }
    }
    return out;
}

}  // namespace fpsys
