#include <gtest/gtest.h>

#include <random>

#include "physcomp/gallery.hpp"

using namespace physcomp;

namespace {

SystemDef unit_system() {
    SystemDef c;
    c.name = "u";
    const SetExpr unit = sets::interval(Rational(0), Rational(1), true, true);
    c.space = unit;
    c.partitions.push_back(SystemPartition{
        "alpha", Partition{{{"lo", sets::interval(Rational(0), Rational(1, 2), true, false)},
                            {"hi", sets::interval(Rational(1, 2), Rational(1), true, true)}},
                           unit,
                           {}}});
    c.transformations.push_back(
        SystemTransformation{"half", ClassicalMap::affine1(RealValue(Rational(1, 2)), RealValue(0))});
    c.initial = Point{RealValue(Rational(3, 4))};
    return c;
}

// ceil(1 / min_p |x - p|) computed directly
Integer oracle_kappa(const Rational& x, const std::vector<Rational>& pts) {
    Rational best = -1;
    for (const auto& p : pts) {
        const Rational d = x > p ? Rational(x - p) : Rational(p - x);
        if (best < 0 || d < best) {
            best = d;
        }
    }
    const Rational inv = 1 / best;
    Integer c;
    mpz_cdiv_q(c.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
    return c;
}

}  // namespace

TEST(MeasurementTime, InversePolynomialMustIncrease) {
    EXPECT_THROW(KappaSpec::inverse_polynomial({Integer(5)}), InvalidParameter);
    EXPECT_THROW(KappaSpec::inverse_polynomial({Integer(1), Integer(-1), Integer(1)}), InvalidParameter);
    const auto k = KappaSpec::inverse_polynomial({Integer(1), Integer(0), Integer(2)});
    EXPECT_EQ(std::get<InversePolynomial>(k.kind).eval(Integer(3)), 19);
}

TEST(MeasurementTime, DistanceFormulaAgainstDirectComputation) {
    const std::vector<Rational> pts{0, Rational(1, 3), Rational(2, 3), 1};
    KappaSpec spec{DistanceFormula{{RealValue(pts[0]), RealValue(pts[1]), RealValue(pts[2]), RealValue(pts[3])}}};
    const SystemPartition alpha = unit_system().partitions[0];
    std::mt19937_64 rng(5);
    for (int i = 0; i < 300; ++i) {
        const Rational x = make_rational(static_cast<long>(rng() % 9973 + 1), 9974);
        const Integer want = oracle_kappa(x, pts);
        const ExtendedNat got = kappa_eval(spec, alpha, Configuration{Point{RealValue(x)}});
        ASSERT_FALSE(got.infinite);
        EXPECT_EQ(got.value, want) << physcomp::to_string(x);
        EXPECT_TRUE(completes_within(spec, alpha, Point{RealValue(x)}, want));
        EXPECT_FALSE(completes_within(spec, alpha, Point{RealValue(x)}, Integer(want - 1)));
    }
    EXPECT_TRUE(kappa_eval(spec, alpha, Configuration{Point{RealValue(Rational(1, 3))}}).infinite);
    EXPECT_FALSE(completes_within(spec, alpha, Point{RealValue(Rational(1, 3))}, Integer(1000000)));
}

TEST(MeasurementTime, InversePolynomialOfBoundaryDistance) {
    // boundary of alpha at 1/2 (domain ends excluded); p(n) = n^2 + 1
    const SystemPartition alpha = unit_system().partitions[0];
    const auto spec = KappaSpec::inverse_polynomial({Integer(1), Integer(0), Integer(1)});
    const ExtendedNat k = kappa_eval(spec, alpha, Configuration{Point{RealValue(Rational(3, 4))}});
    EXPECT_EQ(k.value, 17);  // d = 1/4
    EXPECT_TRUE(completes_within(spec, alpha, Point{RealValue(Rational(3, 4))}, Integer(17)));
    EXPECT_FALSE(completes_within(spec, alpha, Point{RealValue(Rational(3, 4))}, Integer(16)));
}

TEST(MeasurementTime, LazyPointNearBoundary) {
    // x = 1/2 + 2^-40 + 2^-81 as a stream: kappa = 2^40
    auto s = std::make_shared<StreamReal>(
        2, [](std::size_t k) -> unsigned { return k == 0 || k == 39 || k == 80 ? 1U : 0U; });
    const SystemPartition alpha = unit_system().partitions[0];
    KappaSpec spec{DistanceFormula{{RealValue(Rational(1, 2))}}};
    const Point x{RealValue(LazyPtr(s))};
    Integer big;
    mpz_ui_pow_ui(big.get_mpz_t(), 2, 40);
    EXPECT_EQ(kappa_eval(spec, alpha, Configuration{x}, 128).value, big);
    EXPECT_TRUE(completes_within(spec, alpha, x, big, 128));
    EXPECT_FALSE(completes_within(spec, alpha, x, Integer(big - 1), 128));
}

TEST(TimedRun, OutputAppearsOnceKappaHasElapsed) {
    TimedSystem tc{unit_system(), {{"alpha", KappaSpec::constant(Integer(3))}}};
    Program q;
    q.rules = {{"s0", kTapePartition, "_", "w", Action::named("alpha")},
               {"w", "alpha", std::nullopt, "w", Action::tape(TapeOp::identity())},
               {"w", "alpha", "hi", "accept", Action::tape(TapeOp::write('1'))},
               {"w", "alpha", "lo", "reject", Action::tape(TapeOp::identity())}};
    const RunResult r = timed_run(q, tc, "");
    EXPECT_EQ(r.outcome, Outcome::Accept);
    EXPECT_EQ(r.rule_applications, 4U);  // commence at 1, empty at 2 and 3, read at 4
    ASSERT_EQ(r.measurements.size(), 1U);
    EXPECT_EQ(r.measurements[0].commenced_at, 1U);
    EXPECT_EQ(r.measurements[0].duration, "3");
    EXPECT_EQ(r.measurements[0].output, "hi");
    EXPECT_EQ(r.trace[1].element, "EMPTY");
    EXPECT_EQ(r.trace[1].elapsed, 2U);
    EXPECT_EQ(r.trace[3].completed_output, "hi");
}

TEST(TimedRun, TransformationCancelsPendingMeasurement) {
    TimedSystem tc{unit_system(), {{"alpha", KappaSpec::constant(Integer(6))}}};
    Program q;
    q.rules = {{"s0", kTapePartition, "_", "w", Action::named("alpha")},
               {"w", "alpha", std::nullopt, "t", Action::tape(TapeOp::identity())},
               {"t", "alpha", std::nullopt, "x", Action::named("half")},
               {"x", "alpha", std::nullopt, "x", Action::tape(TapeOp::identity())},
               {"x", "alpha", "lo", "accept", Action::tape(TapeOp::identity())}};
    const RunResult r = timed_run(q, tc, "");
    EXPECT_EQ(r.outcome, Outcome::Reject);
    EXPECT_EQ(r.rule_applications, 3U);
    ASSERT_EQ(r.measurements.size(), 1U);
    EXPECT_EQ(r.measurements[0].cancelled_at, 3U);
    EXPECT_FALSE(r.measurements[0].output);
    EXPECT_EQ(r.trace.back().step, 0U);
}

TEST(TimedRun, RecordedOutputStaysReadable) {
    TimedSystem tc{unit_system(), {}};  // unit time
    Program q;
    q.rules = {{"s0", kTapePartition, "_", "a", Action::named("alpha")},
               {"a", "alpha", "hi", "b", Action::tape(TapeOp::left())},
               {"b", "alpha", "hi", "accept", Action::tape(TapeOp::identity())}};
    const RunResult r = timed_run(q, tc, "");
    EXPECT_EQ(r.outcome, Outcome::Accept);
    EXPECT_EQ(r.rule_applications, 3U);
}

TEST(TimedRun, AgreesWithUntimedWithoutMeasurements) {
    const SystemDef c = unit_system();
    TimedSystem tc{c, {{"alpha", KappaSpec::constant(Integer(2))}}};
    std::mt19937_64 rng(9);
    const std::vector<Action> actions{Action::tape(TapeOp::left()), Action::tape(TapeOp::right()),
                                      Action::tape(TapeOp::write('0')), Action::tape(TapeOp::write('1')),
                                      Action::tape(TapeOp::identity()), Action::named("half")};
    for (int trial = 0; trial < 100; ++trial) {
        Program q;
        for (int s = 0; s < 5; ++s) {
            for (char sym : std::string("01_")) {
                if (rng() % 6 == 0) {
                    continue;
                }
                const long to = static_cast<long>(rng() % 7);
                const std::string dest = to == 5 ? "accept" : to == 6 ? "reject" : "s" + std::to_string(to);
                q.rules.push_back({"s" + std::to_string(s), kTapePartition, std::string(1, sym), dest,
                                   actions[rng() % actions.size()]});
            }
        }
        std::string w;
        for (std::size_t i = rng() % 6; i > 0; --i) {
            w.push_back(rng() % 2 ? '1' : '0');
        }
        const RunResult a = run(q, c, w, 200);
        const RunResult b = timed_run(q, tc, w, 200);
        EXPECT_EQ(a.outcome, b.outcome);
        EXPECT_EQ(a.trace, b.trace);
        EXPECT_EQ(a.tape, b.tape);
    }
}

TEST(TimedRun, PartitionRuleWithoutCommencementRejects) {
    TimedSystem tc{unit_system(), {}};
    Program q;
    q.rules = {{"s0", "alpha", "hi", "accept", Action::tape(TapeOp::identity())}};
    EXPECT_EQ(run(q, tc.base, "").outcome, Outcome::Accept);
    EXPECT_EQ(timed_run(q, tc, "").outcome, Outcome::Reject);
}

TEST(TimedGallery, TernaryAdviceRecovery) {
    const auto g = gallery::literal_advice("g", "0110100", "1");
    for (std::size_t m : {1U, 3U, 10U}) {
        const auto it = gallery::cg_item(g, m);
        const RunResult r = it.run("");
        ASSERT_EQ(r.outcome, Outcome::Accept);
        EXPECT_EQ(r.tape.written(), g.value->prefix(m));
        EXPECT_LE(r.rule_applications, 56 * m);
    }
}

TEST(TimedGallery, SearchChecksExactlyAtTheDeadline) {
    const auto g = gallery::literal_advice("g", "01101", "10");
    const std::size_t L = 8;
    const RunResult r = gallery::dg_item(g, L).run("");
    ASSERT_EQ(r.outcome, Outcome::Accept);
    EXPECT_EQ(r.tape.written(), g.value->prefix(L));
    for (std::size_t l = 0; l < L; ++l) {
        const std::string chk = "r" + std::to_string(l) + "_chk";
        const auto ev = std::find_if(r.trace.begin(), r.trace.end(), [&](const TraceEvent& e) { return e.from == chk; });
        ASSERT_NE(ev, r.trace.end());
        const auto rec = std::find_if(r.measurements.rbegin(), r.measurements.rend(),
                                      [&](const MeasurementRecord& m) { return m.commenced_at < ev->step; });
        ASSERT_NE(rec, r.measurements.rend());
        EXPECT_EQ(ev->step - rec->commenced_at, std::size_t{1} << (l + 2)) << "round " << l;
    }
    const std::size_t total = 4 * (std::size_t{1} << L) + L * L + 3 * L - 5;
    EXPECT_EQ(r.rule_applications, total);
}

TEST(TimedGallery, WaitPlansAreExact) {
    for (std::size_t l = 0; l < 24; ++l) {
        Integer m;
        mpz_ui_pow_ui(m.get_mpz_t(), 2, l + 2);
        const auto plan = gallery::detail::plan_wait(m, l);
        Integer used = plan.pads + Integer(l);
        if (plan.k > 0) {
            used += gallery::detail::counter_cost(plan.k, plan.n);
        }
        EXPECT_EQ(used, m - 1) << l;
        EXPECT_LE(plan.pads, 64) << l;
    }
}

TEST(TimedGallery, AdviceThenDecide) {
    const auto g = gallery::literal_advice("g", "1101", "0");
    const auto it = gallery::advice_decide_item(g, "prefix-match", Rational(1), 16);
    const auto decide = gallery::decider("prefix-match");
    for (const std::string w : {"", "1", "11", "110", "1101", "0000", "11011", "10101010", "1101000011"}) {
        const RunResult r = it.run(w);
        const std::string advice = g.value->prefix(gallery::advice_length(w.size(), Rational(1)));
        EXPECT_EQ(r.outcome, decide(advice, w) ? Outcome::Accept : Outcome::Reject) << w;
    }
}

TEST(TimedGallery, AdviceLength) {
    EXPECT_EQ(gallery::advice_length(0, Rational(1)), 0U);
    EXPECT_EQ(gallery::advice_length(1, Rational(1)), 0U);
    EXPECT_EQ(gallery::advice_length(2, Rational(1)), 1U);
    EXPECT_EQ(gallery::advice_length(5, Rational(1)), 3U);
    EXPECT_EQ(gallery::advice_length(8, Rational(1)), 3U);
    EXPECT_EQ(gallery::advice_length(8, Rational(1, 2)), 2U);  // ceil(1.5)
    EXPECT_EQ(gallery::advice_length(64, Rational(2)), 12U);
}
