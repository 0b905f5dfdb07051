#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fpsys/errors.hpp"
#include "fpsys/field.hpp"
#include "fpsys/linear_system.hpp"
#include "fpsys/slice_rank.hpp"
#include "fpsys/vector.hpp"

// Text formats. Blank lines and lines starting with '#' are ignored.
//
//   vectors:  p=<p> n=<n>            then one vector per line, coordinates separated by spaces
//   system:   p=<p> m=<m> k=<k>      then m rows of k coefficients, optionally "b:" and m vectors
//   tensor:   <p> <L> <k>            then "i1 ... ik value" lines, indices 1-based

namespace fpsys {

namespace detail {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-blank, non-comment line, or nullopt at end of input.
    std::optional<std::string> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++number_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos || line[first] == '#') {
                continue;
            }
            const auto last = line.find_last_not_of(" \t\r");
            return line.substr(first, last - first + 1);
        }
        return std::nullopt;
    }

    std::string require(const std::string& what) {
        auto line = next();
        if (!line) {
            throw ParseError("unexpected end of input: expected " + what);
        }
        return *line;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(number_) + ": " + msg);
    }

    [[nodiscard]] std::size_t line_number() const noexcept { return number_; }

private:
    std::istream& in_;
    std::size_t number_ = 0;
};

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    std::string tok;
    while (ss >> tok) {
        out.push_back(tok);
    }
    return out;
}

inline std::int64_t parse_int(const LineReader& r, std::string_view tok) {
    std::int64_t v = 0;
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        r.fail("not an integer: '" + std::string(tok) + "'");
    }
    return v;
}

/// Parses "key=value" pairs; every key in `keys` must appear exactly once.
inline std::map<std::string, std::int64_t> parse_header(const LineReader& r, const std::string& line,
                                                        const std::vector<std::string>& keys) {
    std::map<std::string, std::int64_t> out;
    for (const auto& tok : split_ws(line)) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) {
            r.fail("header token '" + tok + "' is not key=value");
        }
        const std::string key = tok.substr(0, eq);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            r.fail("unknown header key '" + key + "'");
        }
        if (!out.emplace(key, parse_int(r, std::string_view(tok).substr(eq + 1))).second) {
            r.fail("duplicate header key '" + key + "'");
        }
    }
    for (const auto& k : keys) {
        if (out.count(k) == 0) {
            r.fail("header is missing '" + k + "='");
        }
    }
    return out;
}

inline Field parse_field(const LineReader& r, std::int64_t p) {
    if (p < 2 || !Field::is_prime(static_cast<std::uint64_t>(p))) {
        r.fail("p=" + std::to_string(p) + " is not a prime");
    }
    try {
        return Field(static_cast<std::uint64_t>(p));
    } catch (const std::invalid_argument& e) {
        r.fail(e.what());
    }
}

inline std::size_t parse_count(const LineReader& r, std::int64_t v, const std::string& name, std::int64_t min) {
    if (v < min) {
        r.fail(name + " must be at least " + std::to_string(min));
    }
    return static_cast<std::size_t>(v);
}

inline FpVector parse_vector(const LineReader& r, const Field& f, const std::string& line, std::size_t n) {
    const auto toks = split_ws(line);
    if (toks.size() != n) {
        r.fail("expected " + std::to_string(n) + " coordinates, found " + std::to_string(toks.size()));
    }
    FpVector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t v = parse_int(r, toks[i]);
        if (v < 0 || static_cast<std::uint64_t>(v) >= f.p()) {
            r.fail("coordinate " + toks[i] + " outside [0, p)");
        }
        x[i] = static_cast<Residue>(v);
    }
    return x;
}

}  // namespace detail

struct VectorList {
    Field field;
    std::size_t n;
    std::vector<FpVector> vectors;  // in file order, duplicates allowed
};

inline VectorList read_vector_list(std::istream& in) {
    detail::LineReader r(in);
    const auto header = detail::parse_header(r, r.require("header 'p=<p> n=<n>'"), {"p", "n"});
    const Field f = detail::parse_field(r, header.at("p"));
    const std::size_t n = detail::parse_count(r, header.at("n"), "n", 0);
    VectorList out{f, n, {}};
    while (auto line = r.next()) {
        out.vectors.push_back(detail::parse_vector(r, f, *line, n));
    }
    return out;
}

inline PointSet read_point_set(std::istream& in) {
    VectorList list = read_vector_list(in);
    PointSet a(list.field, list.n);
    for (auto& x : list.vectors) {
        if (a.contains(x)) {
            throw ParseError("duplicate point " + x.to_string());
        }
        a.insert(std::move(x));
    }
    return a;
}

inline void write_vectors(std::ostream& out, const Field& f, std::size_t n, std::span<const FpVector> vectors) {
    out << "p=" << f.p() << " n=" << n << '\n';
    for (const auto& x : vectors) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            out << (i == 0 ? "" : " ") << x[i];
        }
        out << '\n';
    }
}

inline void write_point_set(std::ostream& out, const PointSet& a) {
    write_vectors(out, a.field(), a.n(), a.points());
}

inline SystemSpec read_system(std::istream& in) {
    detail::LineReader r(in);
    const auto header = detail::parse_header(r, r.require("header 'p=<p> m=<m> k=<k>'"), {"p", "m", "k"});
    const Field f = detail::parse_field(r, header.at("p"));
    const std::size_t m = detail::parse_count(r, header.at("m"), "m", 1);
    const std::size_t k = detail::parse_count(r, header.at("k"), "k", 2);
    FpMatrix coeffs(m, k);
    for (std::size_t j = 0; j < m; ++j) {
        const auto toks = detail::split_ws(r.require("coefficient row " + std::to_string(j + 1)));
        if (toks.size() != k) {
            r.fail("expected " + std::to_string(k) + " coefficients, found " + std::to_string(toks.size()));
        }
        for (std::size_t i = 0; i < k; ++i) {
            coeffs(j, i) = f.reduce(detail::parse_int(r, toks[i]));
        }
    }
    std::optional<std::vector<FpVector>> constants;
    if (auto marker = r.next()) {
        if (*marker != "b:") {
            r.fail("expected 'b:' or end of input");
        }
        std::vector<FpVector> b;
        for (std::size_t j = 0; j < m; ++j) {
            const std::string line = r.require("constant vector " + std::to_string(j + 1));
            const std::size_t n = j == 0 ? detail::split_ws(line).size() : b.front().size();
            b.push_back(detail::parse_vector(r, f, line, n));
        }
        if (r.next()) {
            r.fail("trailing content after constant block");
        }
        constants = std::move(b);
    }
    return SystemSpec(f, std::move(coeffs), std::move(constants));
}

inline void write_system(std::ostream& out, const SystemSpec& sys) {
    out << "p=" << sys.field().p() << " m=" << sys.m() << " k=" << sys.k() << '\n';
    for (std::size_t j = 0; j < sys.m(); ++j) {
        for (std::size_t i = 0; i < sys.k(); ++i) {
            out << (i == 0 ? "" : " ") << sys.coeff(j, i);
        }
        out << '\n';
    }
    if (sys.constants()) {
        out << "b:\n";
        for (const auto& b : *sys.constants()) {
            for (std::size_t i = 0; i < b.size(); ++i) {
                out << (i == 0 ? "" : " ") << b[i];
            }
            out << '\n';
        }
    }
}

inline Tensor read_tensor(std::istream& in) {
    detail::LineReader r(in);
    const auto head = detail::split_ws(r.require("header '<p> <L> <k>'"));
    if (head.size() != 3) {
        r.fail("tensor header must be '<p> <L> <k>'");
    }
    const Field f = detail::parse_field(r, detail::parse_int(r, head[0]));
    const std::size_t side = detail::parse_count(r, detail::parse_int(r, head[1]), "L", 1);
    const std::size_t order = detail::parse_count(r, detail::parse_int(r, head[2]), "k", 2);
    Tensor t(f, side, order);
    MultiIndex idx(order);
    while (auto line = r.next()) {
        const auto toks = detail::split_ws(*line);
        if (toks.size() != order + 1) {
            r.fail("expected " + std::to_string(order) + " indices and a value");
        }
        for (std::size_t i = 0; i < order; ++i) {
            const std::int64_t v = detail::parse_int(r, toks[i]);
            if (v < 1 || static_cast<std::uint64_t>(v) > side) {
                r.fail("index " + toks[i] + " outside [1, L]");
            }
            idx[i] = static_cast<std::size_t>(v - 1);
        }
        t.set(idx, f.reduce(detail::parse_int(r, toks[order])));
    }
    return t;
}

inline void write_tensor(std::ostream& out, const Tensor& t) {
    out << t.field().p() << ' ' << t.side() << ' ' << t.order() << '\n';
    for (const auto& idx : t.support()) {
        for (std::size_t v : idx) {
            out << v + 1 << ' ';
        }
        out << t.at(idx) << '\n';
    }
}

/// Opens a file for reading, throwing ParseError if it cannot be opened.
inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    return in;
}

}  // namespace fpsys
