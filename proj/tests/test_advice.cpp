#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "physcomp/advice.hpp"

using namespace physcomp;

namespace {

// Number of ordered k-tuples of naturals summing to s, by enumeration.
long count_compositions(long s, long k) {
    if (k == 1) {
        return 1;
    }
    long total = 0;
    for (long first = 0; first <= s; ++first) {
        total += count_compositions(s - first, k - 1);
    }
    return total;
}

// Digits 0..n-1 of a stream read back through refinement.
std::string read_back(const StreamReal& s, std::size_t n, bool drop_twos) {
    const Interval iv = refine(s, n);
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), s.base(), n);
    Integer v = floor_of(Rational(iv.lo * scale));
    std::string digits(n, '?');
    for (std::size_t i = n; i-- > 0;) {
        const Integer r = v % s.base();
        digits[i] = static_cast<char>('0' + r.get_ui());
        v /= s.base();
    }
    if (!drop_twos) {
        return digits;
    }
    std::string out;
    for (std::size_t i = 0; i < n; i += 2) {
        EXPECT_EQ(digits[i + 1], '2');
        out.push_back(digits[i]);
    }
    return out;
}

AdviceFunction random_function(std::uint64_t seed) {
    return AdviceFunction{[seed](std::size_t n) {
                              std::mt19937_64 rng(seed * 1000003 + n);
                              std::string w(rng() % 5, '0');
                              for (auto& c : w) {
                                  c = "01ab"[rng() % 4];
                              }
                              return w;
                          },
                          {}};
}

}  // namespace

TEST(Prefixize, SeparatesValues) {
    AdviceFunction f{[](std::size_t n) { return n == 0 ? std::string("a") : n == 1 ? std::string("bc") : std::string("d"); },
                     {}};
    const PrefixAdvice g = prefixize(f);
    EXPECT_EQ(g.at(0), "a");
    EXPECT_EQ(g.at(1), "aebc");
    EXPECT_EQ(g.at(3), "aebceded");
    const PrefixAdvice empty = prefixize(AdviceFunction{[](std::size_t) { return std::string(); }, {}});
    EXPECT_EQ(empty.at(4), "eeee");
}

TEST(Prefixize, PrefixPropertyAndGrowth) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const AdviceFunction f = random_function(seed);
        const PrefixAdvice g = prefixize(f);
        std::size_t longest = 0;
        for (std::size_t n = 0; n <= 40; ++n) {
            longest = std::max(longest, f.eval(n).size());
            const std::string gn = g.at(n);
            EXPECT_LE(gn.size(), (n + 1) * (1 + longest));
            for (std::size_t m = 0; m < n; ++m) {
                EXPECT_EQ(gn.rfind(g.at(m), 0), 0U) << seed << " " << m << " " << n;
            }
        }
    }
}

TEST(Prefixize, SeparatorInValueRejected) {
    const PrefixAdvice g = prefixize(AdviceFunction{[](std::size_t n) { return n == 2 ? std::string("1e") : std::string("1"); }, {}});
    EXPECT_EQ(g.at(1), "1e1");
    EXPECT_THROW(g.at(2), InvalidParameter);
}

TEST(Encoding, BinaryAndTernaryValues) {
    const PrefixAdvice g = PrefixAdvice::from_string("101", "1");
    const auto b = encode_advice_real(g, Encoding::Binary);
    const Interval iv = refine(*b, 3);
    EXPECT_EQ(iv.lo, Rational(5, 8));
    EXPECT_EQ(iv.hi, Rational(3, 4));
    const auto t = encode_advice_real(PrefixAdvice::from_string("10", "0"), Encoding::TernaryInterleaved);
    EXPECT_EQ(refine(*t, 2).lo, Rational(5, 9));
    EXPECT_EQ(refine(*t, 2).hi, Rational(2, 3));
    const auto z = encode_advice_real(PrefixAdvice::from_string("", "0"), Encoding::Binary);
    EXPECT_EQ(*z->exact(), 0);
    EXPECT_EQ(refine(*z, 7).hi, power_of(2, -7));
}

TEST(Encoding, LiteralStreamsAreExact) {
    const auto b = encode_advice_real(PrefixAdvice::from_string("1", "01"), Encoding::Binary);
    EXPECT_EQ(*b->exact(), Rational(2, 3));  // 0.1010...
    const auto t = encode_advice_real(PrefixAdvice::from_string("1", "0"), Encoding::TernaryInterleaved);
    EXPECT_EQ(*t->exact(), Rational(7, 12));  // digits 1 2 0 2 0 2 ...
}

TEST(Encoding, RoundTripOfRandomStreams) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<char> bits(512);
        for (auto& c : bits) {
            c = rng() % 2 ? '1' : '0';
        }
        const PrefixAdvice g([bits](std::size_t k) { return bits.at(k); }, [](std::size_t n) { return n; });
        const std::string want(bits.begin(), bits.begin() + 256);
        EXPECT_EQ(read_back(*encode_advice_real(g, Encoding::Binary), 256, false), want);
        EXPECT_EQ(read_back(*encode_advice_real(g, Encoding::TernaryInterleaved), 512, true), want);
    }
}

TEST(Encoding, SymbolOutsideScheme) {
    EXPECT_THROW(encode_advice_real(PrefixAdvice::from_string("01e1"), Encoding::Binary), SymbolOutsideScheme);
    const PrefixAdvice late([](std::size_t k) { return k == 100 ? 'e' : '0'; }, [](std::size_t n) { return n; });
    const auto s = encode_advice_real(late, Encoding::Binary);
    EXPECT_NO_THROW(refine(*s, 100));
    EXPECT_THROW(refine(*s, 101), SymbolOutsideScheme);
}

TEST(AdviceStreams, FromFileConcatenatesLines) {
    const std::string path = ::testing::TempDir() + "advice.txt";
    {
        std::ofstream out(path);
        out << "0110\n10 \r\n\n1\n";
    }
    const PrefixAdvice g = PrefixAdvice::from_file(path, "g");
    EXPECT_EQ(g.prefix(7), "0110101");
    EXPECT_THROW(g.symbol(7), InvalidParameter);
    std::remove(path.c_str());
    EXPECT_THROW(PrefixAdvice::from_file(path), InvalidParameter);
}

TEST(PartitionCount, SmallValues) {
    EXPECT_EQ(partition_count(5, 1), 1);
    EXPECT_EQ(partition_count(3, 2), 3);
    EXPECT_EQ(partition_count(1, 7), 1);
    EXPECT_THROW(partition_count(0, 1), InvalidParameter);
}

TEST(PartitionCount, CountsCompositionsOfNMinusOne) {
    for (long n = 1; n <= 10; ++n) {
        for (long k = 1; k <= 10; ++k) {
            EXPECT_EQ(partition_count(n, k), count_compositions(n - 1, k)) << n << "," << k;
            if (k >= 2) {
                // sums of k naturals equal to n itself are strictly more
                EXPECT_LT(partition_count(n, k), count_compositions(n, k));
            }
        }
    }
}

TEST(PartitionCount, MonotoneAndPolynomiallyBounded) {
    for (std::size_t n = 1; n <= 20; ++n) {
        for (std::size_t k = 1; k <= 20; ++k) {
            Integer bound;
            mpz_ui_pow_ui(bound.get_mpz_t(), n + 1, k);
            EXPECT_LE(partition_count(n, k), bound);
            if (n > 1) {
                EXPECT_GE(partition_count(n, k), partition_count(n - 1, k));
            }
            if (k > 1) {
                EXPECT_GE(partition_count(n, k), partition_count(n, k - 1));
            }
        }
    }
}
