#include "coupled/kernels.hpp"

#include "coupled/order_metric.hpp"

#include <cmath>

namespace coupled {

const char *to_string(QuadratureRule r)
{
   switch (r)
   {
      case QuadratureRule::product_trapezoid: return "product_trapezoid";
      case QuadratureRule::trapezoid: return "trapezoid";
   }
   return "?";
}

QuadratureRule parse_quadrature(const std::string &name)
{
   if (name == "product_trapezoid") return QuadratureRule::product_trapezoid;
   if (name == "trapezoid") return QuadratureRule::trapezoid;
   throw PreconditionError("unknown quadrature rule '" + name + "'");
}

double green_kernel(double sigma, double period, double t, double s)
{
   const double denom = -std::expm1(sigma * period);
   if (s <= t) return std::exp(sigma * (t - s)) / denom;
   return std::exp(sigma * (t + period - s)) / denom;
}

double KernelPair::k1(double t, double s) const
{
   return 0.5 * (green_kernel(sigma1, period, t, s) + green_kernel(sigma2, period, t, s));
}

double KernelPair::k2(double t, double s) const
{
   return 0.5 * (green_kernel(sigma2, period, t, s) - green_kernel(sigma1, period, t, s));
}

KernelPair make_kernels(double lambda1, double lambda2, double period)
{
   if (!(period > 0.0)) throw PreconditionError("period T must be positive");
   if (!(lambda1 > 0.0 && lambda2 > 0.0)) throw PreconditionError("lambda1 and lambda2 must be positive");
   if (lambda1 == lambda2) throw PreconditionError("sigma2 = 0 makes kernel denominator vanish");
   if (lambda1 < lambda2) throw PreconditionError("lambda1 > lambda2 is required (sigma2 must be negative)");
   return {-(lambda1 + lambda2), lambda2 - lambda1, period};
}

namespace {

// E0(k) = int_0^1 e^{-k x} dx,  E1(k) = int_0^1 x e^{-k x} dx.
void exp_moments(double k, double &e0, double &e1)
{
   if (std::abs(k) < 0.5)
   {
      e0 = 0.0;
      e1 = 0.0;
      double term = 1.0; // (-k)^n / n!
      for (int n = 0; n < 30; ++n)
      {
         e0 += term / (n + 1);
         e1 += term / (n + 2);
         term *= -k / (n + 1);
      }
      return;
   }
   const double ek = std::exp(-k);
   e0 = -std::expm1(-k) / k;
   e1 = (1.0 - ek * (1.0 + k)) / (k * k);
}

// A point of the partition: a position and its linear-interpolation stencil
// over at most two grid nodes.
struct Knot
{
   double s;
   std::size_t j0, j1;
   double c0, c1;
};

} // namespace

std::vector<double> green_weights(double sigma, double period, std::size_t intervals, double t,
                                  QuadratureRule rule)
{
   if (intervals == 0) throw PreconditionError("grid needs at least one interval");
   if (!(t >= 0.0 && t <= period)) throw PreconditionError("t must lie in [0, T]");
   const std::size_t n = intervals;
   const double h = period / static_cast<double>(n);
   const double denom = -std::expm1(sigma * period);
   const auto left = [&](double s) { return std::exp(sigma * (t - s)) / denom; };
   const auto right = [&](double s) { return std::exp(sigma * (t + period - s)) / denom; };
   const auto node = [&](std::size_t j) { return period * static_cast<double>(j) / static_cast<double>(n); };

   // Partition: grid nodes with t inserted (unless it coincides with a node).
   std::vector<Knot> knots;
   knots.reserve(n + 2);
   std::size_t split = 0; // index in knots of the breakpoint s = t
   const double snap = 1e-13 * period;
   bool placed = false;
   for (std::size_t j = 0; j <= n; ++j)
   {
      const double sj = node(j);
      if (!placed && std::abs(sj - t) <= snap)
      {
         split = knots.size();
         knots.push_back({t, j, j, 1.0, 0.0});
         placed = true;
         continue;
      }
      if (!placed && sj > t)
      {
         const double theta = (t - node(j - 1)) / h;
         split = knots.size();
         knots.push_back({t, j - 1, j, 1.0 - theta, theta});
         placed = true;
      }
      knots.push_back({sj, j, j, 1.0, 0.0});
   }

   std::vector<double> w(n + 1, 0.0);
   const auto deposit = [&](const Knot &k, double weight) {
      w[k.j0] += weight * k.c0;
      if (k.c1 != 0.0) w[k.j1] += weight * k.c1;
   };
   for (std::size_t p = 0; p + 1 < knots.size(); ++p)
   {
      const Knot &a = knots[p];
      const Knot &b = knots[p + 1];
      const double len = b.s - a.s;
      if (len <= 0.0) continue;
      const bool before_t = p < split;
      const double ga = before_t ? left(a.s) : right(a.s);
      if (rule == QuadratureRule::product_trapezoid)
      {
         double e0, e1;
         exp_moments(sigma * len, e0, e1);
         deposit(a, len * ga * (e0 - e1));
         deposit(b, len * ga * e1);
      }
      else
      {
         const double gb = before_t ? left(b.s) : right(b.s);
         deposit(a, 0.5 * len * ga);
         deposit(b, 0.5 * len * gb);
      }
   }
   return w;
}

double integrate_kernel(const KernelPair &kp, KernelComponent which, double t, std::size_t intervals,
                        QuadratureRule rule, const std::vector<double> &b)
{
   if (b.size() != intervals + 1) throw PreconditionError("nodal values do not match the grid");
   const auto w1 = green_weights(kp.sigma1, kp.period, intervals, t, rule);
   const auto w2 = green_weights(kp.sigma2, kp.period, intervals, t, rule);
   double c1 = 0.0, c2 = 0.0;
   switch (which)
   {
      case KernelComponent::k1: c1 = 0.5; c2 = 0.5; break;
      case KernelComponent::k2: c1 = -0.5; c2 = 0.5; break;
      case KernelComponent::k1_plus_k2: c1 = 0.0; c2 = 1.0; break;
      case KernelComponent::k1_minus_k2: c1 = 1.0; c2 = 0.0; break;
   }
   double acc = 0.0;
   for (std::size_t j = 0; j < b.size(); ++j) acc += (c1 * w1[j] + c2 * w2[j]) * b[j];
   return acc;
}

double kernel_mass(const KernelPair &kp, KernelComponent which, double t, std::size_t intervals,
                   QuadratureRule rule)
{
   return integrate_kernel(kp, which, t, intervals, rule, std::vector<double>(intervals + 1, 1.0));
}

KernelWeights discretize(const KernelPair &kp, std::size_t intervals, QuadratureRule rule)
{
   KernelWeights kw;
   kw.intervals = intervals;
   kw.rule = rule;
   const std::size_t m = intervals + 1;
   kw.w1.resize(m * m);
   kw.w2.resize(m * m);
   for (std::size_t i = 0; i < m; ++i)
   {
      const double t = kp.period * static_cast<double>(i) / static_cast<double>(intervals);
      const auto a = green_weights(kp.sigma1, kp.period, intervals, t, rule);
      const auto b = green_weights(kp.sigma2, kp.period, intervals, t, rule);
      for (std::size_t j = 0; j < m; ++j)
      {
         kw.w1[i * m + j] = 0.5 * (a[j] + b[j]);
         kw.w2[i * m + j] = 0.5 * (b[j] - a[j]);
      }
   }
   return kw;
}

} // namespace coupled
