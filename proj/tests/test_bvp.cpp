#include "coupled/bvp.hpp"
#include "coupled/oracle.hpp"
#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace coupled;

namespace {

BvpSpec affine_spec(double l1, double l2, double c1, double c2, std::size_t N)
{
   BvpSpec s;
   s.lambda1 = l1;
   s.lambda2 = l2;
   s.mu1 = s.mu2 = 1;
   s.intervals = N;
   s.f = [l1, c1](double, double u) { return -l1 * u + c1; };
   s.h = [l2, c2](double, double u) { return -l2 * u + c2; };
   return s;
}

BvpSpec sin_spec(std::size_t N)
{
   BvpSpec s = affine_spec(4, 1, 0, 0, N);
   s.f = [](double t, double u) { return -4 * u + std::sin(2 * std::numbers::pi * t); };
   return s;
}

KernelWeights weights(const BvpSpec &s) { return discretize(make_kernels(s), s.intervals, s.quadrature); }

double sup_error_to(const GridFunction &u, double c)
{
   double e = 0;
   for (double x : u.values) e = std::max(e, std::abs(x - c));
   return e;
}

// Frozen from tests/oracles/derive_constants.py (image-series summation).
constexpr double kK1 = 0.864580612690803748662930980604;
constexpr double kK2 = 0.36746408541974998765163147259;
// Periodic solution of u' = -5u + sin(2 pi t): A sin + B cos with
// [5, -2 pi; 2 pi, 5] (A, B) = (1, 0).
constexpr double kA = 0.0775453273478302810770777427983;
constexpr double kB = -0.097446332286463718506717987935;

} // namespace

TEST(Kernels, SigmasFromLambdas)
{
   const auto kp = make_kernels(2, 1, 1);
   EXPECT_EQ(kp.sigma1, -3);
   EXPECT_EQ(kp.sigma2, -1);
}

TEST(Kernels, EqualLambdasRejected)
{
   try
   {
      make_kernels(1, 1, 1);
      FAIL();
   }
   catch (const PreconditionError &e)
   {
      EXPECT_NE(std::string(e.what()).find("sigma2 = 0"), std::string::npos);
   }
   EXPECT_THROW(make_kernels(1, 2, 1), PreconditionError);
}

TEST(Kernels, FrozenPointValues)
{
   const auto kp = make_kernels(2, 1, 1);
   EXPECT_NEAR(kp.k1(0.5, 0.25), kK1, 1e-14);
   EXPECT_NEAR(kp.k2(0.5, 0.25), kK2, 1e-14);
}

TEST(Kernels, JumpOfOneAcrossTheDiagonal)
{
   for (double sigma : {-3.0, -1.0, -0.2})
      EXPECT_NEAR(green_kernel(sigma, 1, 0.4, 0.4) - green_kernel(sigma, 1, 0.4, 0.4 + 1e-13), 1.0, 1e-9);
}

TEST(Kernels, MassIdentitiesAtRandomT)
{
   for (auto [l1, l2] : {std::pair{2.0, 1.0}, {4.0, 1.0}, {5.0, 2.0}})
   {
      const auto kp = make_kernels(l1, l2, 1);
      Rng rng(static_cast<std::uint64_t>(l1 * 10 + l2));
      for (int i = 0; i < 200; ++i)
      {
         const double t = gen::real(rng, 0, 1);
         EXPECT_NEAR(kernel_mass(kp, KernelComponent::k1_plus_k2, t, 400, QuadratureRule::product_trapezoid),
                     1 / (l1 - l2), 1e-6);
         EXPECT_NEAR(kernel_mass(kp, KernelComponent::k1_minus_k2, t, 400, QuadratureRule::product_trapezoid),
                     1 / (l1 + l2), 1e-6);
      }
   }
}

TEST(Kernels, IndividualMassesForFourOne)
{
   const auto kp = make_kernels(4, 1, 1);
   for (double t : {0.0, 0.3, 0.71, 1.0})
   {
      EXPECT_NEAR(kernel_mass(kp, KernelComponent::k1, t, 200, QuadratureRule::product_trapezoid), 4.0 / 15, 1e-9);
      EXPECT_NEAR(kernel_mass(kp, KernelComponent::k2, t, 200, QuadratureRule::product_trapezoid), 1.0 / 15, 1e-9);
   }
}

TEST(Kernels, ProductRuleBeatsPlainTrapezoid)
{
   // The product rule integrates the exponential exactly against constants;
   // the plain rule carries an O(h^2) error.
   const auto kp = make_kernels(4, 1, 1);
   const double exact = 1.0 / 3;
   const double e_plain = std::abs(kernel_mass(kp, KernelComponent::k1_plus_k2, 0.37, 400, QuadratureRule::trapezoid) - exact);
   const double e_prod =
       std::abs(kernel_mass(kp, KernelComponent::k1_plus_k2, 0.37, 400, QuadratureRule::product_trapezoid) - exact);
   EXPECT_LT(e_prod, e_plain);
}

TEST(Kernels, SignInvariants)
{
   Rng rng(77);
   for (auto [l1, l2] : {std::pair{2.0, 1.0}, {4.0, 1.0}, {5.0, 2.0}, {9.0, 0.5}})
   {
      const auto kp = make_kernels(l1, l2, 1);
      for (int i = 0; i < 2000; ++i)
      {
         const double t = gen::real(rng, 0, 1), s = gen::real(rng, 0, 1);
         const double k1 = kp.k1(t, s), k2 = kp.k2(t, s);
         ASSERT_GE(k1, 0);
         ASSERT_GE(k1 + k2, 0);
         ASSERT_GE(k1 - k2, 0);
      }
   }
}

TEST(ApplyF, SteadyStateOfDegenerateFamily)
{
   for (auto [l1, l2, c1, c2] : {std::array{4.0, 1.0, 2.0, 3.0}, {5.0, 2.0, -1.0, 4.0}, {2.0, 1.0, 0.5, 0.5}})
   {
      const auto spec = affine_spec(l1, l2, c1, c2, 100);
      const double star = (c1 + c2) / (l1 + l2);
      const auto u = GridFunction::constant(100, star);
      EXPECT_LT(sup_error_to(apply_F(spec, weights(spec), u, u), star), 1e-12);
   }
}

TEST(ApplyF, ZeroInZeroOut)
{
   const auto spec = affine_spec(4, 1, 0, 0, 50);
   const auto z = GridFunction::constant(50, 0);
   EXPECT_EQ(sup_error_to(apply_F(spec, weights(spec), z, z), 0), 0);
}

TEST(ApplyF, NonFiniteIntegrandNamesNode)
{
   auto spec = affine_spec(4, 1, 0, 0, 10);
   spec.h = [](double t, double u) { return t > 0.45 && t < 0.55 ? std::log(-1.0) : -u; };
   const auto u = GridFunction::constant(10, 1);
   try
   {
      apply_F(spec, weights(spec), u, u);
      FAIL();
   }
   catch (const IntegrandError &e)
   {
      EXPECT_NE(std::string(e.what()).find("node 5"), std::string::npos);
   }
}

TEST(ApplyF, ConstantModeFactors)
{
   // On constants F(u, v) = 5/3 - (2u + 8v)/15 for this instance: the mode
   // u + v is multiplied by -2 l2/(l1 - l2) = -2/3 and the mode u - v by
   // 2 l2/(l1 + l2) = 2/5.
   const auto spec = affine_spec(4, 1, 2, 3, 60);
   const auto kw = weights(spec);
   const auto up = GridFunction::constant(60, 1 + 1e-3), dn = GridFunction::constant(60, 1 - 1e-3);
   const auto Fud = apply_F(spec, kw, up, dn);
   const auto Fdu = apply_F(spec, kw, dn, up);
   EXPECT_NEAR((Fud[7] - Fdu[7]) / 2e-3, 2.0 / 5, 1e-9);
   const auto Fuu = apply_F(spec, kw, up, up);
   EXPECT_NEAR((Fuu[7] - 1) / 1e-3, -2.0 / 3, 1e-9);
}

TEST(Growth, DegenerateFamilyPasses)
{
   const auto rep = check_growth_conditions(affine_spec(4, 1, 2, 3, 50), 20000, 1);
   EXPECT_TRUE(rep.passed());
}

TEST(Growth, PerturbedSlopeViolatesNearDiagonal)
{
   for (double mu1 : {0.5, 1.0, 5.0})
   {
      auto spec = affine_spec(4, 1, 0, 0, 50);
      spec.mu1 = mu1;
      spec.f = [](double, double u) { return -4 * u + 0.1 * u; };
      const auto rep = check_growth_conditions(spec, 200, 2);
      bool at_hundredth = false;
      for (const auto &v : rep.violations)
         if (v.property == "(ap3) upper bound" && std::abs(std::abs(v.values[1] - v.values[2]) - 0.01) < 1e-9)
            at_hundredth = true;
      EXPECT_TRUE(at_hundredth) << "mu1 " << mu1;
   }
}

TEST(Growth, ImConditionArithmetic)
{
   auto spec = affine_spec(2, 1, 0, 0, 10);
   EXPECT_NEAR(im_ratio(spec), 2.0 / 3, 1e-15);
   EXPECT_FALSE(check_growth_conditions(spec, 10, 1).has_violation("(im) 2 max(mu1,mu2)/(lambda1+lambda2) < 1"));
   spec.mu1 = spec.mu2 = 2;
   EXPECT_TRUE(check_growth_conditions(spec, 10, 1).has_violation("(im) 2 max(mu1,mu2)/(lambda1+lambda2) < 1"));
}

TEST(LowerUpper, BracketingConstantsPass)
{
   const auto spec = affine_spec(4, 1, 2, 3, 50);
   const auto kw = weights(spec);
   EXPECT_TRUE(verify_lower_upper(spec, kw, GridFunction::constant(50, 0), GridFunction::constant(50, 2)).passed());
   EXPECT_TRUE(verify_lower_upper(spec, kw, GridFunction::constant(50, 1), GridFunction::constant(50, 1)).passed());
}

TEST(LowerUpper, LowerAboveSteadyStateFails)
{
   const auto spec = affine_spec(4, 1, 2, 3, 50);
   const auto rep = verify_lower_upper(spec, weights(spec), GridFunction::constant(50, 5), GridFunction::constant(50, 6));
   ASSERT_FALSE(rep.passed());
   EXPECT_NE(rep.violations.front().witness.find("node"), std::string::npos);
}

TEST(OdeResidual, ConstantSolutions)
{
   const auto spec = affine_spec(4, 1, 2, 3, 40);
   const auto one = ode_residual(spec, GridFunction::constant(40, 1));
   EXPECT_EQ(one.max_residual, 0);
   EXPECT_EQ(one.periodicity_gap, 0);
   EXPECT_DOUBLE_EQ(ode_residual(spec, GridFunction::constant(40, 0)).max_residual, 5);
   EXPECT_THROW(ode_residual(affine_spec(4, 1, 2, 3, 3), GridFunction::constant(3, 0)), PreconditionError);
}

TEST(SolveBvp, LinearInstanceIsOne)
{
   const auto spec = affine_spec(4, 1, 2, 3, 200);
   const auto sol = solve_bvp(spec, GridFunction::constant(200, 0), GridFunction::constant(200, 2), 1e-10, 500);
   ASSERT_EQ(sol.run.status, RunStatus::converged);
   EXPECT_LT(sup_error_to(sol.u, 1), 1e-6);
   EXPECT_LE(sol.residual.max_residual, 1e-4);
   EXPECT_LE(sol.residual.periodicity_gap, 1e-10);
   EXPECT_TRUE(sol.warnings.empty());
}

TEST(SolveBvp, ZeroForcingGivesZero)
{
   const auto spec = affine_spec(4, 1, 0, 0, 100);
   const auto sol = solve_bvp(spec, GridFunction::constant(100, -1), GridFunction::constant(100, 1), 1e-10, 500);
   ASSERT_EQ(sol.run.status, RunStatus::converged);
   EXPECT_LT(sup_error_to(sol.u, 0), 1e-9);
}

TEST(SolveBvp, CollapsedPairWithinTolerance)
{
   const auto spec = sin_spec(200);
   const auto sol = solve_bvp(spec, GridFunction::constant(200, -1), GridFunction::constant(200, 1), 1e-10, 500);
   ASSERT_EQ(sol.run.status, RunStatus::converged);
   EXPECT_LE(sup_distance(sol.u, sol.v), 1e-10);
}

TEST(SolveBvp, SinInstanceMatchesAnalyticSolution)
{
   const auto spec = sin_spec(200);
   const auto sol = solve_bvp(spec, GridFunction::constant(200, -1), GridFunction::constant(200, 1), 1e-10, 500);
   double err = 0;
   for (std::size_t i = 0; i <= 200; ++i)
   {
      const double t = spec.node(i);
      err = std::max(err, std::abs(sol.u[i] - (kA * std::sin(2 * std::numbers::pi * t) + kB * std::cos(2 * std::numbers::pi * t))));
   }
   EXPECT_LT(err, std::max(1e-5, 10.0 / (200.0 * 200.0)));
}

TEST(SolveBvp, RejectsNonBracketingPair)
{
   const auto spec = affine_spec(4, 1, 2, 3, 50);
   EXPECT_THROW(solve_bvp(spec, GridFunction::constant(50, 5), GridFunction::constant(50, 6), 1e-10, 100),
                PreconditionError);
}

TEST(SolveBvp, WarnsWhenConstantFactorReachesOne)
{
   const auto spec = affine_spec(3, 1, 2, 2, 50);
   const auto sol = solve_bvp(spec, GridFunction::constant(50, 0), GridFunction::constant(50, 2), 1e-10, 50);
   ASSERT_FALSE(sol.warnings.empty());
   EXPECT_NE(sol.warnings.front().find("lambda1 <= 3 lambda2"), std::string::npos);
}

TEST(SolveBvp, ScaledGSolvesTheSameEquationForScaledUnknown)
{
   // With G(u) = 2u the coupled fixed point satisfies 2u = F(u, u).
   auto spec = affine_spec(4, 1, 2, 3, 80);
   spec.G = scale_transform(2);
   const auto kw = weights(spec);
   const auto pb = make_bvp_problem(spec, std::make_shared<const KernelWeights>(kw));
   EXPECT_TRUE(check_preimage_selectors(pb, 20, 1, 1e-12).passed());
}

TEST(SolveBvpProperties, ConstantModeContractsAtTwoThirds)
{
   // Start alpha = 0, beta = 1.5 has error (-1, 0.5): both constant modes are
   // present and the 2/3 mode takes over. The gap M between the tracks weights
   // the 2/3 mode by 1 + 2/3 and the 2/5 mode by 1 - 2/5, so it settles
   // first; the raw error needs one more iteration.
   const auto spec = affine_spec(4, 1, 2, 3, 200);
   auto kw = std::make_shared<const KernelWeights>(weights(spec));
   const auto pb = make_bvp_problem(spec, kw);
   const auto st = lower_upper_start(pb, GridFunction::constant(200, 0), GridFunction::constant(200, 1.5));
   auto s = init_iteration(pb, st.x0, st.y0, st.x1, st.y1, 1e-10);
   double prev_e = std::max(sup_error_to(s.x_even, 1), sup_error_to(s.y_even, 1));
   double prev_m = s.M;
   for (int n = 1; n <= 25; ++n)
   {
      s = step(pb, s);
      const double e = std::max(sup_error_to(s.Gx, 1), sup_error_to(s.Gy, 1));
      if (n > 5) { EXPECT_NEAR(s.M / prev_m, 2.0 / 3, 0.05 * 2.0 / 3) << "n " << n; }
      if (n > 6) { EXPECT_NEAR(e / prev_e, 2.0 / 3, 0.05 * 2.0 / 3) << "n " << n; }
      prev_e = e;
      prev_m = s.M;
   }
}

TEST(SolveBvpProperties, FixedPointImpliesSmallOdeResidual)
{
   for (std::uint64_t seed = 1; seed <= 6; ++seed)
   {
      Rng rng(seed);
      const double l2 = gen::real(rng, 0.5, 1.5), l1 = 3 * l2 + gen::real(rng, 0.5, 3);
      const double amp = gen::real(rng, -2, 2);
      auto spec = affine_spec(l1, l2, 0, 0, 200);
      spec.f = [l1, amp](double t, double u) { return -l1 * u + amp * std::cos(2 * std::numbers::pi * t); };
      const double bound = std::abs(amp) / (l1 + l2) + 1;
      const auto sol = solve_bvp(spec, GridFunction::constant(200, -bound), GridFunction::constant(200, bound), 1e-10, 2000);
      ASSERT_EQ(sol.run.status, RunStatus::converged) << "seed " << seed;
      EXPECT_LT(sol.residual.max_residual, 1e-3 * (1 + std::abs(amp))) << "seed " << seed;
   }
}

TEST(SolveBvpProperties, GridRefinementIsSecondOrder)
{
   double prev = 0;
   for (std::size_t N : {100u, 200u, 400u})
   {
      const auto sol = solve_bvp(sin_spec(N), GridFunction::constant(N, -1), GridFunction::constant(N, 1), 1e-12, 2000);
      ASSERT_EQ(sol.run.status, RunStatus::converged);
      if (prev > 0) { EXPECT_GE(prev / sol.residual.max_residual, 3.5) << "N " << N; }
      prev = sol.residual.max_residual;
   }
}

TEST(Uniqueness, BvpStartsAgree)
{
   const auto spec = affine_spec(4, 1, 2, 3, 100);
   const auto rep = bvp_uniqueness_probe(
       spec, {{GridFunction::constant(100, 0), GridFunction::constant(100, 2)},
              {GridFunction::constant(100, 0.5), GridFunction::constant(100, 2)}},
       1e-10, 500);
   EXPECT_TRUE(rep.all_converged);
   EXPECT_TRUE(rep.agree);
   EXPECT_LT(sup_error_to(rep.runs[1].alpha, 1), 1e-6);
}
