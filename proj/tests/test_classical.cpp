#include <gtest/gtest.h>

#include "physcomp/classical.hpp"

using namespace physcomp;

namespace {

Rational q(long n, long d = 1) { return make_rational(n, d); }
Point pt(std::initializer_list<Rational> xs) {
    Point p;
    for (const auto& x : xs) {
        p.emplace_back(x);
    }
    return p;
}

SetExpr iv(long a, long b, bool lc = true, bool rc = false) { return sets::interval(q(a), q(b), lc, rc); }

Partition halves(bool overlap) {
    return Partition{{{"lo", sets::interval(q(0), q(1, 2), true, overlap)}, {"hi", sets::interval(q(1, 2), q(1), true, true)}},
                     sets::interval(q(0), q(1), true, true),
                     {}};
}

}  // namespace

TEST(Polynomials, RationalExponents) {
    // 3 x^2 y - y^(1/2)
    MultiPoly f{2, {Term{RealValue(3), {q(2), q(1)}}, Term{RealValue(-1), {q(0), q(1, 2)}}}};
    EXPECT_EQ(eval_poly(f, pt({q(2), q(4)}))->rational(), 46);
    EXPECT_FALSE(eval_poly(f, pt({q(2), q(-4)})));
    EXPECT_THROW(eval_poly(f, pt({q(1)})), DimensionMismatch);
}

TEST(Polynomials, NegativeExponentAtZeroIsUndefined) {
    ClassicalMap inv(1, {MultiPoly{1, {Term{RealValue(1), {q(-1)}}}}}, "inv");
    EXPECT_EQ(inv.apply(pt({q(4)}))[0].rational(), q(1, 4));
    EXPECT_THROW(inv.apply(pt({q(0)})), UndefinedValue);
}

TEST(Maps, LinearAndIdentity) {
    const ClassicalMap m = ClassicalMap::linear({{RealValue(1), RealValue(2)}, {RealValue(0), RealValue(-1)}},
                                                pt({q(1), q(0)}));
    const Point y = m.apply(pt({q(3), q(5)}));
    EXPECT_EQ(y[0].rational(), 14);
    EXPECT_EQ(y[1].rational(), -5);
    EXPECT_EQ(m.components[1].terms.size(), 1U);  // zero entries are dropped
    const Point z = ClassicalMap::identity(2).apply(pt({q(7, 3), q(-1)}));
    EXPECT_EQ(z[0].rational(), q(7, 3));
    EXPECT_TRUE(m.algebraic());
    EXPECT_THROW(ClassicalMap(2, {MultiPoly{1, {}}}), DimensionMismatch);
}

TEST(Sets, BallBoundaryRespectsClosedness) {
    const SetExpr open = sets::open_ball(pt({q(0), q(0)}), RealValue(5));
    const SetExpr closed = sets::closed_ball(pt({q(0), q(0)}), RealValue(5));
    EXPECT_FALSE(contains(open, pt({q(3), q(4)})));
    EXPECT_TRUE(contains(closed, pt({q(3), q(4)})));
    EXPECT_TRUE(contains(open, pt({q(3), q(39, 10)})));
    EXPECT_THROW(sets::ball(pt({q(0)}), RealValue(-1), true), InvalidParameter);
}

TEST(Sets, BooleanCombinations) {
    const SetExpr a = iv(0, 2);
    const SetExpr b = iv(1, 3);
    EXPECT_TRUE(contains(sets::intersection(a, b), pt({q(3, 2)})));
    EXPECT_FALSE(contains(sets::intersection(a, b), pt({q(1, 2)})));
    EXPECT_TRUE(contains(sets::set_union(a, b), pt({q(5, 2)})));
    EXPECT_FALSE(contains(sets::complement(a), pt({q(0)})));
    EXPECT_TRUE(contains(sets::complement(a), pt({q(2)})));
    EXPECT_THROW(sets::set_union(a, sets::everything(2)), DimensionMismatch);
}

TEST(Sets, ProductsAndBoxes) {
    const SetExpr p = sets::product(iv(0, 1), sets::open_ball(pt({q(0)}), RealValue(1)));
    EXPECT_EQ(p->dim(), 2U);
    EXPECT_TRUE(contains(p, pt({q(1, 2), q(-1, 2)})));
    EXPECT_FALSE(contains(p, pt({q(1, 2), q(1)})));
    EXPECT_EQ(p->depth(), 1U);
    const SetExpr all = sets::everything(3);
    EXPECT_TRUE(contains(all, pt({q(-100), q(0), q(7, 9)})));
}

TEST(Sets, PreimageRoundTripsInverse) {
    // { x : 2x + 1 in [0, 1) } = [-1/2, 0)
    const ClassicalMap f = ClassicalMap::affine1(RealValue(2), RealValue(1));
    const ClassicalMap g = ClassicalMap::affine1(RealValue(q(1, 2)), RealValue(q(-1, 2)));
    const SetExpr s = sets::preimage(f, g, iv(0, 1));
    EXPECT_TRUE(contains(s, pt({q(-1, 2)})));
    EXPECT_FALSE(contains(s, pt({q(0)})));
    const ClassicalMap wrong = ClassicalMap::affine1(RealValue(q(1, 2)), RealValue(0));
    EXPECT_THROW(sets::preimage(f, wrong, iv(0, 1)), InvalidParameter);
}

TEST(Sets, PreimageWhereMapIsUndefinedExcludesPoint) {
    ClassicalMap inv(1, {MultiPoly{1, {Term{RealValue(1), {q(-1)}}}}});
    const SetExpr s = sets::preimage(inv, inv, iv(1, 100));
    EXPECT_TRUE(contains(s, pt({q(1, 2)})));
    EXPECT_FALSE(contains(s, pt({q(0)})));
}

TEST(Sets, PredicateSetsAreNotClassical) {
    const SetExpr even = sets::predicate("even-floor", 1, [](const Point& x, std::size_t) {
        return floor_of(*x[0].exact()) % 2 == 0;
    });
    EXPECT_FALSE(even->is_classical());
    EXPECT_FALSE(sets::complement(even)->is_classical());
    EXPECT_TRUE(iv(0, 1)->is_classical());
    EXPECT_TRUE(contains(even, pt({q(5, 2)})));
    EXPECT_FALSE(contains(even, pt({q(7, 2)})));
}

TEST(Sets, LazyBoundaryAtItsOwnValueIsUndecided) {
    const RealValue r2 = *rat_pow(RealValue(2), q(1, 2));
    const SetExpr s = sets::interval(std::optional<RealValue>(RealValue(0)), std::optional<RealValue>(r2), true, false);
    EXPECT_TRUE(contains(s, pt({q(141, 100)})));
    EXPECT_FALSE(contains(s, pt({q(142, 100)})));
    EXPECT_THROW(contains(s, Point{r2}), PrecisionExhausted);
}

TEST(Partitions, ClassifyAndOutsideDomain) {
    const Partition p = halves(false);
    EXPECT_EQ(p.classify(pt({q(1, 4)})), "lo");
    EXPECT_EQ(p.classify(pt({q(1, 2)})), "hi");
    EXPECT_THROW(p.classify(pt({q(2)})), OutsideDomain);
    EXPECT_EQ(p.labels(), (std::vector<std::string>{"lo", "hi"}));
}

TEST(Partitions, ExactValidationFindsOverlapWitness) {
    const PartitionReport ok = validate_partition(halves(false));
    EXPECT_TRUE(ok.valid) << ok.message;
    EXPECT_TRUE(ok.exact);
    const PartitionReport bad = validate_partition(halves(true));
    EXPECT_FALSE(bad.valid);
    ASSERT_TRUE(bad.witness);
    EXPECT_EQ((*bad.witness)[0].rational(), q(1, 2));
}

TEST(Partitions, ExactValidationFindsGapWitness) {
    Partition p{{{"a", iv(0, 1)}, {"b", iv(2, 3)}}, iv(0, 3), {}};
    const PartitionReport rep = validate_partition(p);
    EXPECT_FALSE(rep.valid);
    ASSERT_TRUE(rep.witness);
    const Rational w = (*rep.witness)[0].rational();
    EXPECT_GE(w, 1);
    EXPECT_LT(w, 2);
}

TEST(Partitions, SampledValidationInTwoDimensions) {
    const SetExpr disc = sets::open_ball(pt({q(0), q(0)}), RealValue(1));
    Partition good{{{"in", disc}, {"out", sets::complement(disc)}}, std::nullopt, {}};
    EXPECT_TRUE(validate_partition(good, 300).valid);
    Partition bad{{{"in", disc}, {"all", sets::everything(2)}}, std::nullopt, {}};
    const PartitionReport rep = validate_partition(bad, 300);
    EXPECT_FALSE(rep.valid);
    EXPECT_FALSE(rep.exact);
}

TEST(BoundaryDistance, OneDimensionalIgnoresDomainEnds) {
    Partition thirds{{{"lo", sets::interval(q(0), q(1, 3), true, false)},
                      {"mid", sets::interval(q(1, 3), q(2, 3), true, false)},
                      {"hi", sets::interval(q(2, 3), q(1), true, false)}},
                     sets::interval(q(0), q(1), true, false),
                     {}};
    EXPECT_EQ(boundary_distance(thirds, pt({q(1, 2)})).value.rational(), q(1, 6));
    EXPECT_EQ(boundary_distance(thirds, pt({q(1, 30)})).value.rational(), q(3, 10));
    EXPECT_EQ(boundary_distance(thirds, pt({q(1, 3)})).value.rational(), 0);
}

TEST(BoundaryDistance, BallsAndBoxes) {
    const SetExpr disc = sets::open_ball(pt({q(0), q(0)}), RealValue(2));
    Partition p{{{"in", disc}, {"out", sets::complement(disc)}}, std::nullopt, {}};
    EXPECT_EQ(boundary_distance(p, pt({q(0), q(0)})).value.rational(), 2);
    EXPECT_EQ(boundary_distance(p, pt({q(3), q(4)})).value.rational(), 3);
    const SetExpr half = sets::box({Bound{RealValue(0), true}, Bound{}}, {Bound{}, Bound{}});
    Partition h{{{"right", half}, {"left", sets::complement(half)}}, std::nullopt, {}};
    EXPECT_EQ(boundary_distance(h, pt({q(-5, 2), q(9)})).value.rational(), q(5, 2));
    Partition whole{{{"all", sets::everything(2)}}, std::nullopt, {}};
    EXPECT_TRUE(boundary_distance(whole, pt({q(1), q(1)})).infinite);
}

TEST(BoundaryDistance, UserFunctionWinsAndPredicatesAreUnsupported) {
    const SetExpr odd = sets::predicate("odd", 1, [](const Point&, std::size_t) { return true; });
    Partition p{{{"odd", odd}}, std::nullopt, {}};
    EXPECT_THROW(boundary_distance(p, pt({q(0)})), UnsupportedPartitionClass);
    p.distance = [](const Point&) { return ExtendedReal::finite(RealValue(q(1, 7))); };
    EXPECT_EQ(boundary_distance(p, pt({q(0)})).value.rational(), q(1, 7));
}

TEST(PiecewiseMaps, FirstContainingCase) {
    PiecewiseMap t{{{iv(0, 1), ClassicalMap::affine1(RealValue(2), RealValue(0))},
                    {iv(0, 2), ClassicalMap::affine1(RealValue(1), RealValue(-1))}},
                   iv(0, 2),
                   "T"};
    EXPECT_EQ(t.apply(pt({q(1, 4)}))[0].rational(), q(1, 2));
    EXPECT_EQ(t.apply(pt({q(3, 2)}))[0].rational(), q(1, 2));
    EXPECT_THROW(t.apply(pt({q(5, 2)})), OutsideDomain);
}

TEST(StructuralEquality, SetsAndMaps) {
    EXPECT_TRUE(structurally_equal(iv(0, 1), iv(0, 1)));
    EXPECT_FALSE(structurally_equal(iv(0, 1), iv(0, 1, true, true)));
    EXPECT_TRUE(structurally_equal(sets::complement(iv(0, 1)), sets::complement(iv(0, 1))));
    const ClassicalMap a = ClassicalMap::affine1(RealValue(2), RealValue(1), "a");
    const ClassicalMap b = ClassicalMap::affine1(RealValue(2), RealValue(1), "b");
    EXPECT_TRUE(structurally_equal(a, b));
}

TEST(Maps, SquareRootOfNegativeIsUndefined) {
    ClassicalMap root(1, {MultiPoly{1, {Term{RealValue(1), {q(1, 2)}}}}}, "root");
    EXPECT_EQ(root.apply(pt({q(9, 4)}))[0].rational(), q(3, 2));
    EXPECT_THROW(root.apply(pt({q(-1)})), UndefinedValue);
}
