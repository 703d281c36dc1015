#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "physcomp/numerics.hpp"

using namespace physcomp;

namespace {

// Independent ordering of p1/q1 and p2/q2 with 128-bit cross products.
int oracle_order(long p1, long q1, long p2, long q2) {
    const __int128 l = static_cast<__int128>(p1) * q2;
    const __int128 r = static_cast<__int128>(p2) * q1;
    return l < r ? -1 : (l > r ? 1 : 0);
}

Ordering from_sign(int s) { return s < 0 ? Ordering::Less : (s > 0 ? Ordering::Greater : Ordering::Equal); }

RealValue sqrt_of(long n) { return *rat_pow(RealValue(n), Rational(1, 2)); }

}  // namespace

TEST(Rationals, ZeroDenominatorRejected) {
    EXPECT_THROW(make_rational(1, 0), InvalidParameter);
    EXPECT_EQ(make_rational(6, -4), Rational(-3, 2));
}

TEST(Rationals, FloorAndCeil) {
    EXPECT_EQ(floor_of(Rational(-7, 2)), -4);
    EXPECT_EQ(ceil_of(Rational(-7, 2)), -3);
    EXPECT_EQ(floor_of(Rational(6, 3)), 2);
    EXPECT_EQ(ceil_of(Rational(6, 3)), 2);
}

TEST(Rationals, Powers) {
    EXPECT_EQ(power_of(2, -3), Rational(1, 8));
    EXPECT_EQ(pow_int(Rational(-2, 3), 3), Rational(-8, 27));
    EXPECT_EQ(pow_int(Rational(2, 3), -2), Rational(9, 4));
}

TEST(Intervals, RejectsInvertedBounds) { EXPECT_THROW(Interval(Rational(1), Rational(0)), InvalidParameter); }

TEST(Intervals, ProductCoversAllSignCombinations) {
    const Interval a(Rational(-2), Rational(3));
    const Interval b(Rational(-5), Rational(1));
    const Interval p = a * b;
    EXPECT_EQ(p.lo, -15);
    EXPECT_EQ(p.hi, 10);
}

TEST(Compare, RandomRationalsMatchCrossMultiplication) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<long> num(-1000000, 1000000);
    std::uniform_int_distribution<long> den(1, 1000000);
    for (int i = 0; i < 2000; ++i) {
        const long p1 = num(rng), q1 = den(rng), p2 = num(rng), q2 = den(rng);
        EXPECT_EQ(cmp(RealValue(make_rational(p1, q1)), RealValue(make_rational(p2, q2))),
                  from_sign(oracle_order(p1, q1, p2, q2)));
    }
}

TEST(Compare, LazyValuesAgainstDoubles) {
    // sqrt(n) versus p/q where the double gap is far above rounding error
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> n(2, 5000);
    std::uniform_int_distribution<long> q(1, 1000);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        const long v = n(rng);
        const long den = q(rng);
        const long p = static_cast<long>(std::floor(std::sqrt(static_cast<double>(v)) * den));
        const double gap = std::sqrt(static_cast<double>(v)) - static_cast<double>(p) / den;
        if (std::abs(gap) < 1e-9) {
            continue;
        }
        EXPECT_EQ(cmp(sqrt_of(v), RealValue(make_rational(p, den))), gap > 0 ? Ordering::Greater : Ordering::Less);
        ++checked;
    }
    EXPECT_GT(checked, 400);
}

TEST(Compare, EqualLazyValuesStayUndecided) {
    const RealValue r = sqrt_of(2);
    EXPECT_EQ(cmp(r * r, RealValue(2), 128), Ordering::Undecided);
}

TEST(Compare, PrecisionCapLimitsRefinement) {
    // 0.000...01 (60 zeros) against 0: needs depth above 60
    auto s = StreamReal::pattern(2, std::vector<unsigned>(60, 0U), {}, {});
    auto tiny = std::make_shared<StreamReal>(
        2, [](std::size_t k) -> unsigned { return k == 60 ? 1U : 0U; }, "tiny");
    EXPECT_EQ(cmp(RealValue(LazyPtr(tiny)), RealValue(0), 32), Ordering::Undecided);
    EXPECT_EQ(cmp(RealValue(LazyPtr(tiny)), RealValue(0), 64), Ordering::Greater);
    {
        PrecisionCapGuard guard(16);
        EXPECT_EQ(precision_cap(), 16U);
        EXPECT_EQ(cmp(RealValue(LazyPtr(tiny)), RealValue(0)), Ordering::Undecided);
    }
    EXPECT_EQ(precision_cap(), 4096U);
    EXPECT_EQ(*RealValue(LazyPtr(s)).exact(), 0);
}

TEST(Streams, PatternValueIsExact) {
    auto third = StreamReal::pattern(2, {}, {0, 1});
    ASSERT_TRUE(third->exact());
    EXPECT_EQ(*third->exact(), Rational(1, 3));
    auto x = StreamReal::pattern(10, {1, 2}, {3});
    EXPECT_EQ(*x->exact(), Rational(37, 300));  // 0.12333...
    EXPECT_THROW(StreamReal::pattern(2, {2}, {}), InvalidParameter);
}

TEST(Streams, RefinementWidthAndContainment) {
    std::mt19937_64 rng(3);
    std::vector<unsigned> digits(80);
    for (auto& d : digits) {
        d = static_cast<unsigned>(rng() % 3);
    }
    StreamReal s(3, [digits](std::size_t k) { return digits[k]; });
    Rational value = 0;
    for (std::size_t k = 0; k < 80; ++k) {
        value += Rational(digits[k]) * power_of(3, -static_cast<long>(k + 1));
    }
    for (std::size_t k : {0U, 1U, 5U, 40U}) {
        const Interval iv = refine(s, k);
        EXPECT_EQ(iv.width(), power_of(3, -static_cast<long>(k)));
        EXPECT_TRUE(iv.contains(value));
    }
    EXPECT_FALSE(s.algebraic());
}

TEST(Streams, SourceRunsOncePerIndex) {
    auto calls = std::make_shared<int>(0);
    StreamReal s(2, [calls](std::size_t) {
        ++*calls;
        return 1U;
    });
    s.refine(10);
    s.refine(10);
    s.refine(5);
    EXPECT_EQ(*calls, 10);
}

TEST(Arithmetic, ExactShortcuts) {
    const RealValue r = sqrt_of(3);
    EXPECT_TRUE((RealValue(0) * r).is_rational());
    EXPECT_EQ((RealValue(0) * r).rational(), 0);
    EXPECT_EQ((RealValue(1) * r).lazy(), r.lazy());
    EXPECT_EQ((RealValue(0) + r).lazy(), r.lazy());
    EXPECT_EQ((RealValue(Rational(1, 3)) + RealValue(Rational(1, 6))).rational(), Rational(1, 2));
}

TEST(Arithmetic, EnclosuresOfCompoundExpressions) {
    // (sqrt 2 + sqrt 3)^2 = 5 + 2 sqrt 6
    const RealValue a = sqrt_of(2) + sqrt_of(3);
    const RealValue sq = a * a;
    const double expected = 5 + 2 * std::sqrt(6.0);
    const Interval iv = sq.enclose(40);
    EXPECT_LE(iv.lo.get_d(), expected + 1e-9);
    EXPECT_GE(iv.hi.get_d(), expected - 1e-9);
    EXPECT_LT(iv.width().get_d(), 1e-6);
}

TEST(Arithmetic, ReciprocalOfZeroIsUndefined) {
    EXPECT_THROW(reciprocal(RealValue(0)), UndefinedValue);
    EXPECT_THROW(RealValue(1) / RealValue(0), UndefinedValue);
    const Interval iv = reciprocal(sqrt_of(2)).enclose(40);
    EXPECT_NEAR(iv.lo.get_d(), 1 / std::sqrt(2.0), 1e-6);
}

TEST(Arithmetic, MinMaxAbs) {
    EXPECT_EQ(min(RealValue(3), RealValue(-2)).rational(), -2);
    EXPECT_EQ(max(RealValue(3), RealValue(-2)).rational(), 3);
    EXPECT_EQ(abs(RealValue(Rational(-5, 7))).rational(), Rational(5, 7));
    EXPECT_EQ(cmp(min(sqrt_of(2), sqrt_of(3)), RealValue(Rational(3, 2))), Ordering::Less);
    EXPECT_EQ(cmp(abs(-sqrt_of(2)), RealValue(Rational(7, 5))), Ordering::Greater);
}

TEST(RationalPowers, ExactRootsStayRational) {
    EXPECT_EQ(rat_pow(RealValue(Rational(27, 8)), Rational(2, 3))->rational(), Rational(9, 4));
    EXPECT_EQ(rat_pow(RealValue(-8), Rational(1, 3))->rational(), -2);
    EXPECT_EQ(rat_pow(RealValue(Rational(4, 9)), Rational(-1, 2))->rational(), Rational(3, 2));
}

TEST(RationalPowers, NoRealRoot) {
    EXPECT_FALSE(rat_pow(RealValue(-4), Rational(1, 2)));
    EXPECT_FALSE(rat_pow(RealValue(0), Rational(-1)));
    EXPECT_FALSE(rat_pow(-sqrt_of(2), Rational(1, 2)));
}

TEST(RationalPowers, IrrationalRootsAgainstDoubles) {
    for (long n : {2L, 3L, 5L, 10L, 12345L}) {
        for (long b : {2L, 3L, 5L}) {
            const auto r = rat_pow(RealValue(n), Rational(1, b));
            ASSERT_TRUE(r);
            const Interval iv = r->enclose(50);
            const double want = std::pow(static_cast<double>(n), 1.0 / b);
            EXPECT_LE(iv.lo.get_d(), want + 1e-12);
            EXPECT_GE(iv.hi.get_d(), want - 1e-12);
            EXPECT_LT(iv.width().get_d(), 1e-12);
            EXPECT_TRUE(r->algebraic());
        }
    }
}

TEST(Formatting, DecimalEnclosure) {
    EXPECT_EQ(to_decimal_interval(RealValue(Rational(1, 3)), 4), "[0.3333,0.3334]");
    EXPECT_EQ(to_decimal_interval(RealValue(Rational(-1, 2)), 3), "[-0.500,-0.500]");
    EXPECT_EQ(to_decimal_interval(sqrt_of(2), 6), "[1.414213,1.414214]");
}

TEST(StructuralEquality, OriginsAndPointers) {
    auto a = StreamReal::pattern(2, {1}, {}, "stream(2, \"1\")");
    auto b = StreamReal::pattern(2, {1}, {}, "stream(2, \"1\")");
    auto c = std::make_shared<StreamReal>(2, [](std::size_t) { return 0U; });
    auto d = std::make_shared<StreamReal>(2, [](std::size_t) { return 0U; });
    EXPECT_TRUE(structurally_equal(RealValue(LazyPtr(a)), RealValue(LazyPtr(b))));
    EXPECT_TRUE(structurally_equal(RealValue(LazyPtr(c)), RealValue(LazyPtr(c))));
    EXPECT_FALSE(structurally_equal(RealValue(LazyPtr(c)), RealValue(LazyPtr(d))));
    EXPECT_FALSE(structurally_equal(RealValue(Rational(1, 2)), RealValue(LazyPtr(a))));
}

TEST(DepthSchedule, DoublesUpToBudget) {
    EXPECT_EQ(depth_schedule(10), (std::vector<std::size_t>{0, 1, 2, 4, 8, 10}));
    EXPECT_EQ(depth_schedule(0), (std::vector<std::size_t>{0}));
}
