#pragma once

// Advice functions, prefix advice, advice-to-real encoders and the p(n, k)
// counting function.

#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "physcomp/numerics.hpp"

namespace physcomp {

inline constexpr char kSeparator = 'e';

struct Growth {
    enum class Kind { Poly, Log, Other };
    Kind kind = Kind::Other;
    Rational c = 1;
    unsigned a = 1;  // degree, for Poly
};

struct AdviceFunction {
    std::function<std::string(std::size_t)> eval;
    Growth growth;
};

/// An infinite symbol stream with a length schedule: g(n) is the first
/// length(n) symbols.
class PrefixAdvice {
public:
    using SymbolFn = std::function<char(std::size_t)>;
    using LengthFn = std::function<std::size_t(std::size_t)>;

    PrefixAdvice(SymbolFn symbols, LengthFn length, std::string name = {})
        : symbols_(std::move(symbols)), length_(std::move(length)), name_(std::move(name)) {}

    /// Stream of the given symbols forever repeating `cycle` (none when the
    /// cycle is empty: reading past the end throws).
    static PrefixAdvice from_string(std::string prefix, std::string cycle = {}, std::string name = {}) {
        auto src = [prefix, cycle](std::size_t k) -> char {
            if (k < prefix.size()) {
                return prefix[k];
            }
            if (cycle.empty()) {
                throw InvalidParameter("advice stream exhausted at index " + std::to_string(k));
            }
            return cycle[(k - prefix.size()) % cycle.size()];
        };
        PrefixAdvice g(src, [](std::size_t n) { return n; }, std::move(name));
        g.literal_ = std::make_pair(std::move(prefix), std::move(cycle));
        return g;
    }

    /// Symbols read from a text file, one block per line, concatenated.
    static PrefixAdvice from_file(const std::string& path, std::string name = {}) {
        std::ifstream in(path);
        if (!in) {
            throw InvalidParameter("cannot read advice file " + path);
        }
        std::string all;
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
                line.pop_back();
            }
            all += line;
        }
        return from_string(all, {}, std::move(name));
    }

    char symbol(std::size_t k) const { return symbols_(k); }
    std::size_t length(std::size_t n) const { return length_(n); }
    const std::string& name() const { return name_; }

    /// (prefix, cycle) for streams built by from_string.
    const std::optional<std::pair<std::string, std::string>>& literal() const { return literal_; }

    std::string prefix(std::size_t len) const {
        std::string out;
        out.reserve(len);
        for (std::size_t k = 0; k < len; ++k) {
            out.push_back(symbol(k));
        }
        return out;
    }

    /// g(n).
    std::string at(std::size_t n) const { return prefix(length(n)); }

private:
    SymbolFn symbols_;
    LengthFn length_;
    std::string name_;
    std::optional<std::pair<std::string, std::string>> literal_;
};

/// g(0) = f(0), g(n+1) = g(n) e f(n+1).  The separator 'e' may not occur
/// in f.
inline PrefixAdvice prefixize(const AdviceFunction& f) {
    struct State {
        std::mutex m;
        std::string stream;            // g(n) for the largest n built so far
        std::vector<std::size_t> ends;  // ends[n] = |g(n)|
    };
    auto st = std::make_shared<State>();
    auto fn = f.eval;
    auto extend_to_length = [st, fn](std::size_t need_len, std::size_t need_n) {
        while (st->ends.empty() || st->ends.back() < need_len || st->ends.size() <= need_n) {
            const std::size_t n = st->ends.size();
            const std::string piece = fn(n);
            if (piece.find(kSeparator) != std::string::npos) {
                throw InvalidParameter("advice value contains the reserved separator 'e'");
            }
            if (n > 0) {
                st->stream.push_back(kSeparator);
            }
            st->stream += piece;
            st->ends.push_back(st->stream.size());
        }
    };
    auto symbols = [st, extend_to_length](std::size_t k) -> char {
        std::lock_guard<std::mutex> lock(st->m);
        extend_to_length(k + 1, 0);
        return st->stream[k];
    };
    auto length = [st, extend_to_length](std::size_t n) -> std::size_t {
        std::lock_guard<std::mutex> lock(st->m);
        extend_to_length(0, n);
        return st->ends[n];
    };
    return PrefixAdvice(symbols, length, "prefixized");
}

enum class Encoding { Binary, TernaryInterleaved };

/// The real 0.g(inf) in base 2, or in base 3 with a 2 after every symbol.
///
/// The first 64 symbols are checked up front; later ones as they are read.
/// Literal streams give exact rationals; a literal with no cycle is read as
/// the terminating expansion.
inline std::shared_ptr<const StreamReal> encode_advice_real(const PrefixAdvice& g, Encoding scheme,
                                                            std::string origin = {}) {
    if (const auto& lit = g.literal()) {
        auto digits = [scheme](const std::string& s) {
            std::vector<unsigned> out;
            for (std::size_t k = 0; k < s.size(); ++k) {
                if (s[k] != '0' && s[k] != '1') {
                    throw SymbolOutsideScheme(std::string("'") + s[k] + "'");
                }
                out.push_back(static_cast<unsigned>(s[k] - '0'));
                if (scheme == Encoding::TernaryInterleaved) {
                    out.push_back(2);
                }
            }
            return out;
        };
        return StreamReal::pattern(scheme == Encoding::Binary ? 2 : 3, digits(lit->first), digits(lit->second),
                                   std::move(origin));
    }
    auto digit_of = [g](std::size_t k) -> unsigned {
        const char s = g.symbol(k);
        if (s != '0' && s != '1') {
            throw SymbolOutsideScheme(std::string("'") + s + "' at index " + std::to_string(k));
        }
        return static_cast<unsigned>(s - '0');
    };
    for (std::size_t k = 0; k < 64; ++k) {
        try {
            digit_of(k);
        } catch (const InvalidParameter&) {
            break;  // finite stream shorter than the check window
        }
    }
    if (scheme == Encoding::Binary) {
        return std::make_shared<StreamReal>(2, digit_of, std::move(origin));
    }
    return std::make_shared<StreamReal>(
        3, [digit_of](std::size_t k) -> unsigned { return k % 2 == 1 ? 2U : digit_of(k / 2); }, std::move(origin));
}

/// p(1..n, k) by p(n, 1) = 1 and p(n, k) = sum_{l=1..n} p(l, k-1).
class PartitionCounter {
public:
    Integer operator()(std::size_t n, std::size_t k) {
        if (n < 1 || k < 1) {
            throw InvalidParameter("p(n, k) needs n >= 1 and k >= 1");
        }
        if (k == 1) {
            return Integer(1);
        }
        const auto key = std::make_pair(n, k);
        std::lock_guard<std::recursive_mutex> lock(m_);
        if (const auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        Integer sum = 0;
        for (std::size_t l = 1; l <= n; ++l) {
            sum += (*this)(l, k - 1);
        }
        memo_.emplace(key, sum);
        return sum;
    }

private:
    std::recursive_mutex m_;
    std::map<std::pair<std::size_t, std::size_t>, Integer> memo_;
};

inline Integer partition_count(std::size_t n, std::size_t k) {
    static PartitionCounter counter;
    return counter(n, k);
}

}  // namespace physcomp
