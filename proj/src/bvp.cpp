#include "coupled/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace coupled {

double sup_distance(const GridFunction &u, const GridFunction &v)
{
   if (u.size() != v.size()) throw PreconditionError("grid functions live on different grids");
   double d = 0.0;
   for (std::size_t i = 0; i < u.size(); ++i) d = std::max(d, std::abs(u[i] - v[i]));
   return d;
}

Order compare_nodewise(const GridFunction &u, const GridFunction &v, double tol)
{
   if (u.size() != v.size()) throw PreconditionError("grid functions live on different grids");
   bool le = true, ge = true;
   for (std::size_t i = 0; i < u.size() && (le || ge); ++i)
   {
      if (u[i] > v[i] + tol) le = false;
      if (v[i] > u[i] + tol) ge = false;
   }
   if (le && ge) return Order::equal;
   if (le) return Order::less;
   if (ge) return Order::greater;
   return Order::incomparable;
}

OrderedMetricSpace<GridFunction> grid_function_space(std::size_t intervals, double period, double range)
{
   OrderedMetricSpace<GridFunction> s;
   s.name = "grid functions (N=" + std::to_string(intervals) + ")";
   s.distance = sup_distance;
   s.compare = compare_nodewise;
   const double two_pi = 2.0 * std::numbers::pi;
   s.sampler = [=](Rng &rng) {
      GridFunction g = GridFunction::constant(intervals, uniform(rng, -0.5 * range, 0.5 * range));
      for (int k = 1; k <= 3; ++k)
      {
         const double amp = uniform(rng, 0.0, 0.25 * range) / k;
         const double phase = uniform(rng, 0.0, two_pi);
         for (std::size_t i = 0; i <= intervals; ++i)
         {
            const double t = period * static_cast<double>(i) / static_cast<double>(intervals);
            g[i] += amp * std::sin(two_pi * k * t / period + phase);
         }
      }
      return g;
   };
   s.neighbor = [=](const GridFunction &p, double scale, Rng &rng) {
      const double sign = (rng() & 1U) ? 1.0 : -1.0;
      const double phase = uniform(rng, 0.0, two_pi);
      GridFunction q = p;
      for (std::size_t i = 0; i <= intervals; ++i)
      {
         const double t = period * static_cast<double>(i) / static_cast<double>(intervals);
         q[i] += sign * scale * (0.75 + 0.25 * std::cos(two_pi * t / period + phase));
      }
      return q;
   };
   s.describe = [](const GridFunction &g) {
      if (g.size() == 0) return std::string("grid[]");
      const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
      return "grid[" + std::to_string(g.size()) + "]{u0=" + format_real(g[0]) + ", min=" + format_real(*lo) +
             ", max=" + format_real(*hi) + "}";
   };
   return s;
}

GridFunction PointwiseMap::apply(const GridFunction &u) const
{
   GridFunction out = u;
   for (auto &x : out.values) x = forward(x);
   return out;
}

GridFunction PointwiseMap::invert(const GridFunction &w) const
{
   GridFunction out = w;
   for (auto &x : out.values) x = inverse(x);
   return out;
}

PointwiseMap identity_transform()
{
   return {};
}

PointwiseMap scale_transform(double factor)
{
   if (!(factor > 0.0)) throw PreconditionError("scale transform needs a positive factor");
   return {"scale(" + format_real(factor) + ")", [factor](double x) { return factor * x; },
           [factor](double x) { return x / factor; }};
}

void validate_spec(const BvpSpec &spec)
{
   if (!(spec.period > 0.0)) throw PreconditionError("T must be positive");
   if (spec.intervals < 1) throw PreconditionError("N must be at least 1");
   if (!(spec.lambda2 > 0.0)) throw PreconditionError("lambda2 must be positive");
   if (spec.lambda1 == spec.lambda2) throw PreconditionError("sigma2 = 0 makes kernel denominator vanish");
   if (!(spec.lambda1 > spec.lambda2)) throw PreconditionError("lambda1 > lambda2 is required");
   if (!(spec.mu1 > 0.0 && spec.mu2 > 0.0)) throw PreconditionError("mu1 and mu2 must be positive");
   if (!spec.f || !spec.h) throw PreconditionError("f and h must be set");
}

double im_ratio(const BvpSpec &spec)
{
   return 2.0 * std::max(spec.mu1, spec.mu2) / (spec.lambda1 + spec.lambda2);
}

KernelPair make_kernels(const BvpSpec &spec)
{
   return make_kernels(spec.lambda1, spec.lambda2, spec.period);
}

GridFunction apply_F(const BvpSpec &spec, const KernelWeights &kw, const GridFunction &u,
                     const GridFunction &v)
{
   const std::size_t m = kw.nodes();
   if (u.size() != m || v.size() != m) throw PreconditionError("grid function size does not match the kernel grid");

   std::vector<double> b1(m), b2(m);
   for (std::size_t j = 0; j < m; ++j)
   {
      const double s = spec.node(j);
      const double fu = spec.f(s, u[j]);
      const double fv = spec.f(s, v[j]);
      const double hu = spec.h(s, u[j]);
      const double hv = spec.h(s, v[j]);
      const auto guard = [&](double val, const char *term) {
         if (!std::isfinite(val))
            throw IntegrandError("non-finite integrand at node " + std::to_string(j) + " (t=" + format_real(s) +
                                 "): " + term + " = " + format_real(val));
      };
      guard(fu, "f(s,u)");
      guard(fv, "f(s,v)");
      guard(hu, "h(s,u)");
      guard(hv, "h(s,v)");
      b1[j] = fu + hv + spec.lambda1 * u[j] - spec.lambda2 * v[j];
      b2[j] = fv + hu + spec.lambda1 * v[j] - spec.lambda2 * u[j];
      guard(b1[j], "bracket B1");
      guard(b2[j], "bracket B2");
   }

   GridFunction out{std::vector<double>(m)};
   for (std::size_t i = 0; i < m; ++i)
   {
      const double *r1 = kw.row1(i);
      const double *r2 = kw.row2(i);
      double acc = 0.0;
      for (std::size_t j = 0; j < m; ++j) acc += r1[j] * b1[j] + r2[j] * b2[j];
      out[i] = acc;
   }
   return out;
}

ValidationReport check_growth_conditions(const BvpSpec &spec, std::size_t sample_count, std::uint64_t seed,
                                         double value_range)
{
   if (sample_count == 0) throw PreconditionError("sample_count must be positive");
   ValidationReport rep;
   rep.subject = "growth conditions on f, h";

   const double ratio = im_ratio(spec);
   ++rep.checked;
   if (!(ratio < 1.0))
      rep.add("(im) 2 max(mu1,mu2)/(lambda1+lambda2) < 1",
              "mu1=" + format_real(spec.mu1) + ", mu2=" + format_real(spec.mu2) +
                  ", lambda1=" + format_real(spec.lambda1) + ", lambda2=" + format_real(spec.lambda2) +
                  ", ratio=" + format_real(ratio),
              1.0 - ratio, {spec.mu1, spec.mu2, spec.lambda1, spec.lambda2});

   static constexpr double probes[] = {1.0, 1e-1, 1e-2, 1e-3};
   Rng rng(seed);
   for (std::size_t i = 0; i < sample_count; ++i)
   {
      const double t = uniform(rng, 0.0, spec.period);
      double b = uniform(rng, -value_range, value_range);
      const double gap = i < 4 * 16 ? probes[i % 4] : log_uniform(rng, 1e-4, value_range);
      double a = b + gap;
      if (spec.G.forward(a) < spec.G.forward(b)) std::swap(a, b);
      const double dg = spec.G.forward(a) - spec.G.forward(b);
      const double log_term = std::log1p(dg * dg);

      const double fa = spec.f(t, a) + spec.lambda1 * a;
      const double fb = spec.f(t, b) + spec.lambda1 * b;
      const double ha = spec.h(t, a) + spec.lambda2 * a;
      const double hb = spec.h(t, b) + spec.lambda2 * b;
      const double d3 = fa - fb;
      const double d4 = ha - hb;
      const double tol3 = kAxiomTol * std::max({1.0, std::abs(fa), std::abs(fb)});
      const double tol4 = kAxiomTol * std::max({1.0, std::abs(ha), std::abs(hb)});
      const double bound3 = spec.mu1 * log_term;
      const double bound4 = spec.mu2 * log_term;
      rep.checked += 2;

      const auto wit = [&](double diff, double bound) {
         return "t=" + format_real(t) + ", a=" + format_real(a) + ", b=" + format_real(b) +
                ", |a-b|=" + format_real(std::abs(a - b)) + ", difference=" + format_real(diff) +
                ", bound=" + format_real(bound);
      };
      if (d3 < -tol3) rep.add("(ap3) lower bound", wit(d3, 0.0), d3, {t, a, b, d3, 0.0});
      if (d3 > bound3 + tol3) rep.add("(ap3) upper bound", wit(d3, bound3), bound3 - d3, {t, a, b, d3, bound3});
      if (d4 > tol4) rep.add("(ap4) upper bound", wit(d4, 0.0), -d4, {t, a, b, d4, 0.0});
      if (d4 < -bound4 - tol4)
         rep.add("(ap4) lower bound", wit(d4, -bound4), d4 + bound4, {t, a, b, d4, -bound4});
   }
   return rep;
}

ValidationReport verify_lower_upper(const BvpSpec &spec, const KernelWeights &kw, const GridFunction &alpha,
                                    const GridFunction &beta)
{
   constexpr double tol = 1e-10;
   ValidationReport rep;
   rep.subject = "lower/upper solutions";
   const GridFunction ga = spec.G.apply(alpha);
   const GridFunction gb = spec.G.apply(beta);
   const GridFunction fab = apply_F(spec, kw, alpha, beta);
   const GridFunction fba = apply_F(spec, kw, beta, alpha);

   const auto scan = [&](const char *property, const GridFunction &lhs, const GridFunction &rhs) {
      // Condition lhs <= rhs at every node; report the worst node.
      std::size_t worst = 0, failing = 0;
      double worst_gap = 0.0;
      for (std::size_t i = 0; i < lhs.size(); ++i)
      {
         ++rep.checked;
         const double gap = lhs[i] - rhs[i];
         if (gap > tol)
         {
            ++failing;
            if (gap > worst_gap)
            {
               worst_gap = gap;
               worst = i;
            }
         }
      }
      if (failing > 0)
         rep.add(property,
                 "node " + std::to_string(worst) + " (t=" + format_real(spec.node(worst)) +
                     "): lhs=" + format_real(lhs[worst]) + ", rhs=" + format_real(rhs[worst]) + "; " +
                     std::to_string(failing) + " failing nodes",
                 -worst_gap, {spec.node(worst), lhs[worst], rhs[worst]});
   };
   scan("lower solution G(alpha) <= F(alpha,beta)", ga, fab);
   scan("upper solution G(beta) >= F(beta,alpha)", fba, gb);
   return rep;
}

OdeResidual ode_residual(const BvpSpec &spec, const GridFunction &u)
{
   const std::size_t n = spec.intervals;
   if (n < 4) throw PreconditionError("ode_residual needs N >= 4");
   if (u.size() != n + 1) throw PreconditionError("grid function size does not match N");
   const double h = spec.period / static_cast<double>(n);
   OdeResidual r;
   r.periodicity_gap = std::abs(u[0] - u[n]);
   for (std::size_t i = 0; i <= n; ++i)
   {
      // Periodic wrap: u_{-1} = u_{N-1}, u_{N+1} = u_1.
      const double prev = i == 0 ? u[n - 1] : u[i - 1];
      const double next = i == n ? u[1] : u[i + 1];
      const double du = (next - prev) / (2.0 * h);
      const double t = spec.node(i);
      r.max_residual = std::max(r.max_residual, std::abs(du - spec.f(t, u[i]) - spec.h(t, u[i])));
   }
   return r;
}

CoupledProblem<GridFunction> make_bvp_problem(const BvpSpec &spec, std::shared_ptr<const KernelWeights> kw)
{
   CoupledProblem<GridFunction> pb;
   pb.space = grid_function_space(spec.intervals, spec.period);
   pb.F = [spec, kw](const GridFunction &u, const GridFunction &v) { return apply_F(spec, *kw, u, v); };
   const PointwiseMap g = spec.G;
   pb.G = [g](const GridFunction &u) { return g.apply(u); };
   pb.S = pb.G;
   pb.G_preimage = [g](const GridFunction &w) { return g.invert(w); };
   pb.S_preimage = pb.G_preimage;
   return pb;
}

Start<GridFunction> lower_upper_start(const CoupledProblem<GridFunction> &pb, const GridFunction &alpha,
                                      const GridFunction &beta)
{
   return {alpha, beta, pb.S_preimage(pb.F(alpha, beta)), pb.S_preimage(pb.F(beta, alpha))};
}

namespace {

constexpr double kLowerUpperTol = 1e-10;

std::vector<std::string> convergence_warnings(const BvpSpec &spec)
{
   std::vector<std::string> w;
   if (spec.lambda1 <= 3.0 * spec.lambda2)
      w.push_back("lambda1 <= 3 lambda2: constant-mode factor 2 lambda2/(lambda1 - lambda2) >= 1, "
                  "the iteration may not converge");
   if (!(im_ratio(spec) < 1.0)) w.push_back("condition (im) does not hold");
   return w;
}

} // namespace

BvpSolution solve_bvp(const BvpSpec &spec, const GridFunction &alpha, const GridFunction &beta, double tol,
                      std::size_t max_iter)
{
   validate_spec(spec);
   auto kw = std::make_shared<const KernelWeights>(discretize(make_kernels(spec), spec.intervals, spec.quadrature));
   const ValidationReport lu = verify_lower_upper(spec, *kw, alpha, beta);
   if (!lu.passed())
      throw PreconditionError("(alpha, beta) is not a lower/upper pair: " + lu.violations.front().property + " at " +
                              lu.violations.front().witness);

   const auto pb = make_bvp_problem(spec, kw);
   const auto st = lower_upper_start(pb, alpha, beta);

   BvpSolution sol;
   sol.warnings = convergence_warnings(spec);
   const auto init = init_iteration(pb, st.x0, st.y0, st.x1, st.y1, kLowerUpperTol);
   // The stopping rule bounds M and the coincidence residuals, not d(u, v).
   // A slowly decaying u - v mode can leave d(u, v) a small multiple above
   // tol, so the run is repeated with a proportionally tighter stopping
   // tolerance. A pair that still does not collapse is a genuine failure.
   double run_tol = tol;
   for (int attempt = 0;; ++attempt)
   {
      sol.run = run(pb, init, run_tol, max_iter);
      sol.u = sol.run.alpha;
      sol.v = sol.run.alpha_prime;
      if (sol.run.status != RunStatus::converged) break;
      const double gap = sup_distance(sol.u, sol.v);
      if (gap <= tol) break;
      if (attempt == 4 || !(gap < 1e3 * run_tol))
         throw NonCollapseError("coupled pair did not collapse: d(u, v) = " + format_real(gap) + " > tol");
      run_tol *= 0.5 * tol / gap;
   }
   if (spec.intervals >= 4) sol.residual = ode_residual(spec, sol.u);
   return sol;
}

UniquenessReport<GridFunction> bvp_uniqueness_probe(
    const BvpSpec &spec, const std::vector<std::pair<GridFunction, GridFunction>> &pairs, double tol,
    std::size_t max_iter)
{
   validate_spec(spec);
   auto kw = std::make_shared<const KernelWeights>(discretize(make_kernels(spec), spec.intervals, spec.quadrature));
   const auto pb = make_bvp_problem(spec, kw);
   std::vector<Start<GridFunction>> starts;
   for (const auto &[alpha, beta] : pairs) starts.push_back(lower_upper_start(pb, alpha, beta));
   return uniqueness_probe(pb, starts, tol, max_iter, kLowerUpperTol);
}

} // namespace coupled
