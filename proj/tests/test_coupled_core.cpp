#include "coupled/bvp.hpp"
#include "coupled/coupled_core.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace coupled;

namespace {

CoupledProblem<double> real_problem(std::function<double(double, double)> F)
{
   CoupledProblem<double> pb;
   pb.space = real_line();
   pb.F = [F](const double &x, const double &y) { return F(x, y); };
   pb.G = identity_map<double>();
   pb.S = identity_map<double>();
   pb.G_preimage = identity_selector<double>();
   pb.S_preimage = identity_selector<double>();
   return pb;
}

CoupledProblem<double> linear() { return real_problem([](double x, double y) { return (2 * x - y) / 4; }); }

const AlteringDistance quarter{"t/4", [](double t) { return t / 4; }};

} // namespace

TEST(MixedMonotone, LinearExamplePasses)
{
   const auto rep = check_mixed_GS_monotone(linear(), 2000, 1);
   EXPECT_TRUE(rep.passed());
   EXPECT_FALSE(rep.inconclusive);
}

TEST(MixedMonotone, SumViolatesSecondArgument)
{
   const auto rep = check_mixed_GS_monotone(real_problem([](double x, double y) { return x + y; }), 200, 1);
   ASSERT_FALSE(rep.passed());
   bool second = false;
   for (const auto &v : rep.violations) second |= v.property.rfind("second argument", 0) == 0;
   EXPECT_TRUE(second);
}

TEST(MixedMonotone, SumWitnessAtZeroOne)
{
   // Direct evaluation of the failing implication at y1 = 0 < y2 = 1.
   const auto pb = real_problem([](double x, double y) { return x + y; });
   EXPECT_LT(pb.F(0.0, 0.0), pb.F(0.0, 1.0));
}

TEST(MixedMonotone, ConstantPassesForAnySeed)
{
   const auto pb = real_problem([](double, double) { return 3.0; });
   for (std::uint64_t seed = 0; seed < 30; ++seed)
   {
      Rng rng(seed);
      const auto n = static_cast<std::size_t>(gen::integer(rng, 1, 300));
      EXPECT_TRUE(check_mixed_GS_monotone(pb, n, seed).passed()) << "seed " << seed;
   }
}

TEST(MixedMonotone, IncomparableSamplesAreSkipped)
{
   const auto sp = grid_function_space(10, 1.0);
   CoupledProblem<GridFunction> pb;
   pb.space = sp;
   pb.F = [](const GridFunction &x, const GridFunction &) { return x; };
   pb.G = pb.S = identity_map<GridFunction>();
   pb.G_preimage = pb.S_preimage = identity_selector<GridFunction>();
   const auto rep = check_mixed_GS_monotone(pb, 200, 3);
   EXPECT_GT(rep.skipped, 0u);
   EXPECT_GT(rep.checked, 0u);
   EXPECT_TRUE(rep.passed());
}

TEST(MixedMonotone, ZeroSamplesIsPrecondition)
{
   EXPECT_THROW(check_mixed_GS_monotone(linear(), 0, 1), PreconditionError);
}

TEST(Contraction, LinearExampleWithIdentityAndQuarter)
{
   const auto cc = check_contraction(linear(), altering::identity(), quarter, 3000, 9);
   EXPECT_TRUE(cc.passed());
   EXPECT_EQ(cc.eligible, 3000u);
}

TEST(Contraction, LinearBoundHoldsForEverySeed)
{
   for (std::uint64_t seed = 1; seed <= 60; ++seed)
      EXPECT_TRUE(check_contraction(linear(), altering::identity(), quarter, 300, seed).passed()) << "seed " << seed;
}

TEST(Contraction, ConstantMarginsEqualPsiOfMax)
{
   const auto pb = real_problem([](double, double) { return -2.0; });
   const auto cc = check_contraction(pb, altering::square(), altering::square_minus_log(), 500, 2);
   ASSERT_TRUE(cc.passed());
   for (const auto &w : cc.witnesses)
   {
      EXPECT_EQ(w.lhs, 0.0);
      EXPECT_GE(w.margin, 0.0);
   }
}

TEST(Contraction, WitnessMarginIsRhsMinusLhsExactly)
{
   const auto pb = real_problem([](double x, double y) { return 0.9 * x - 0.3 * y; });
   const auto cc = check_contraction(pb, altering::square(), altering::square_minus_log(), 1000, 4);
   ASSERT_FALSE(cc.witnesses.empty());
   for (std::size_t i = 0; i < cc.witnesses.size(); ++i)
   {
      const auto &w = cc.witnesses[i];
      EXPECT_TRUE(std::isfinite(w.lhs) && std::isfinite(w.rhs));
      EXPECT_EQ(w.margin, w.rhs - w.lhs);
      if (i > 0) { EXPECT_LE(cc.witnesses[i - 1].margin, w.margin); }
   }
}

TEST(Contraction, ExpansiveMapIsCaught)
{
   const auto pb = real_problem([](double x, double y) { return 2 * x - 2 * y; });
   const auto cc = check_contraction(pb, altering::identity(), quarter, 200, 1);
   ASSERT_FALSE(cc.passed());
   EXPECT_LT(cc.violations().front().margin, 0.0);
}

TEST(Contraction, BvpOperatorWithSlopePerturbation)
{
   // f = -lambda1 u + 0.1 u. Dense sampling shows the contraction inequality
   // with phi = t^2, psi = t^2 - ln(t^2 + 1) holds near the diagonal for this
   // operator and fails only once the paired distance is of order one, where
   // psi(M) catches up with phi(M).
   BvpSpec spec;
   spec.lambda1 = 4;
   spec.lambda2 = 1;
   spec.mu1 = spec.mu2 = 1;
   spec.intervals = 40;
   spec.f = [](double, double u) { return -4 * u + 0.1 * u; };
   spec.h = [](double, double u) { return -u; };
   auto kw = std::make_shared<const KernelWeights>(discretize(make_kernels(spec), spec.intervals, spec.quadrature));
   const auto pb = make_bvp_problem(spec, kw);

   const auto near = check_contraction(pb, altering::square(), altering::square_minus_log(), 300, 5, 1e-3, 1e-1);
   EXPECT_TRUE(near.passed());
   const auto wide = check_contraction(pb, altering::square(), altering::square_minus_log(), 300, 5, 1e-3, 10.0);
   ASSERT_FALSE(wide.passed());
   for (const auto &w : wide.violations()) EXPECT_GT(w.max_distance, 1.0);
}

TEST(Commutation, IdentityCommutesWithAnything)
{
   const auto pb = real_problem([](double x, double y) { return std::sin(x) * y + 1; });
   EXPECT_TRUE(check_commutation(pb, 500, 1, 1e-12).passed());
}

TEST(Commutation, DoublingCommutesWithLinearF)
{
   auto pb = linear();
   pb.G = pb.S = [](const double &x) { return 2 * x; };
   pb.G_preimage = pb.S_preimage = [](const double &w) { return w / 2; };
   EXPECT_TRUE(check_commutation(pb, 500, 1, 1e-12).passed());
}

TEST(Commutation, ShiftDoesNotCommute)
{
   auto pb = linear();
   pb.G = pb.S = [](const double &x) { return x + 1; };
   const auto rep = check_commutation(pb, 50, 1, 1e-12);
   ASSERT_FALSE(rep.passed());
   EXPECT_EQ(rep.violations.front().property, "G(F(x,y)) = F(Gx,Gy)");
   // At (0,0): G(F) = 1 while F(G0, G0) = 1/4.
   EXPECT_DOUBLE_EQ(pb.G(pb.F(0.0, 0.0)), 1.0);
   EXPECT_DOUBLE_EQ(pb.F(pb.G(0.0), pb.G(0.0)), 0.25);
}

TEST(PreimageSelectors, TabulatedInverseRoundTrips)
{
   const TabulatedInverse inv([](double x) { return x * x * x + x; }, -2.0, 2.0, 4001);
   for (double w : {-9.9, -1.0, 0.0, 0.3, 5.0}) EXPECT_NEAR(std::pow(inv(w), 3) + inv(w), w, 1e-5);
   EXPECT_THROW(inv(11.0), PreimageError);
}

TEST(PreimageSelectors, CheckerFlagsBadSelector)
{
   auto pb = linear();
   pb.G = [](const double &x) { return 2 * x; };
   EXPECT_FALSE(check_preimage_selectors(pb, 50, 1, 1e-12).passed());
   pb.G_preimage = [](const double &w) { return w / 2; };
   EXPECT_TRUE(check_preimage_selectors(pb, 50, 1, 1e-12).passed());
}
