#include "coupled/order_metric.hpp"

#include <algorithm>
#include <cmath>

namespace coupled {

const char *to_string(Order o)
{
   switch (o)
   {
      case Order::less: return "less";
      case Order::equal: return "equal";
      case Order::greater: return "greater";
      case Order::incomparable: return "incomparable";
   }
   return "?";
}

void ValidationReport::merge(const ValidationReport &other)
{
   violations.insert(violations.end(), other.violations.begin(), other.violations.end());
   checked += other.checked;
   skipped += other.skipped;
   inconclusive = inconclusive || other.inconclusive;
   notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

bool ValidationReport::has_violation(const std::string &property) const
{
   return std::any_of(violations.begin(), violations.end(),
                      [&](const Violation &v) { return v.property == property; });
}

namespace altering {

AlteringDistance identity()
{
   return {"identity", [](double t) { return t; }};
}

AlteringDistance scaled(double factor)
{
   return {"scaled(" + format_real(factor) + ")", [factor](double t) { return factor * t; }};
}

AlteringDistance square()
{
   return {"square", [](double t) { return t * t; }};
}

AlteringDistance square_minus_log()
{
   // log1p keeps relative accuracy near zero, where t^2 and ln(1+t^2) cancel.
   return {"square_minus_log", [](double t) {
              const double s = t * t;
              if (s < 1e-4)
                 return s * s * (0.5 - s / 3.0 + s * s / 4.0);
              return s - std::log1p(s);
           }};
}

AlteringDistance power(double exponent)
{
   return {"power(" + format_real(exponent) + ")",
           [exponent](double t) { return std::pow(t, exponent); }};
}

} // namespace altering

std::vector<double> oscillation_profile(const AlteringDistance &f, double span, int first_level,
                                        int last_level)
{
   std::vector<double> out;
   for (int level = first_level; level <= last_level; ++level)
   {
      const std::size_t steps = std::size_t{1} << level;
      const double h = span / static_cast<double>(steps);
      double osc = 0.0;
      double prev = f(0.0);
      for (std::size_t i = 1; i <= steps; ++i)
      {
         const double cur = f(h * static_cast<double>(i));
         if (std::isfinite(cur) && std::isfinite(prev)) osc = std::max(osc, std::abs(cur - prev));
         prev = cur;
      }
      out.push_back(osc);
   }
   return out;
}

ValidationReport validate_altering_distance(const AlteringDistance &f,
                                            const std::vector<double> &grid)
{
   if (grid.empty() || !std::is_sorted(grid.begin(), grid.end()))
      throw PreconditionError("altering-distance grid must be sorted ascending");
   if (std::find(grid.begin(), grid.end(), 0.0) == grid.end())
      throw PreconditionError("altering-distance grid must contain 0");
   if (grid.front() < 0.0)
      throw PreconditionError("altering-distance grid must be non-negative");

   ValidationReport rep;
   rep.subject = "altering distance " + f.name;

   std::vector<double> vals(grid.size());
   std::vector<bool> finite(grid.size());
   for (std::size_t i = 0; i < grid.size(); ++i)
   {
      vals[i] = f(grid[i]);
      finite[i] = std::isfinite(vals[i]);
      ++rep.checked;
      if (!finite[i])
      {
         rep.add("finite output", "t=" + format_real(grid[i]), -std::numeric_limits<double>::infinity(),
                 {grid[i]});
         continue;
      }
      if (grid[i] == 0.0)
      {
         if (std::abs(vals[i]) > kAxiomTol)
            rep.add("zero maps to zero", "t=0, f(t)=" + format_real(vals[i]), -std::abs(vals[i]), {0.0});
      }
      else if (vals[i] == 0.0)
      {
         rep.add("positive input maps to zero", "t=" + format_real(grid[i]), 0.0, {grid[i]});
      }
      else if (vals[i] < 0.0)
      {
         rep.add("non-negative output", "t=" + format_real(grid[i]) + ", f(t)=" + format_real(vals[i]),
                 vals[i], {grid[i]});
      }
   }

   for (std::size_t i = 0; i < grid.size(); ++i)
   {
      if (!finite[i]) continue;
      for (std::size_t j = i + 1; j < grid.size(); ++j)
      {
         if (!finite[j]) continue;
         ++rep.checked;
         if (vals[i] > vals[j] + kAxiomTol * std::max(1.0, std::abs(vals[j])))
            rep.add("non-decreasing",
                    "t1=" + format_real(grid[i]) + ", t2=" + format_real(grid[j]) + ", f(t1)=" +
                        format_real(vals[i]) + ", f(t2)=" + format_real(vals[j]),
                    vals[j] - vals[i], {grid[i], grid[j]});
      }
   }

   const double span = grid.back();
   if (span > 0.0)
   {
      const auto osc = oscillation_profile(f, span, 8, 16);
      ++rep.checked;
      // Lipschitz pieces shrink by ~2^8 between the two levels, a jump does not.
      if (osc.back() > kAxiomTol && osc.back() > 0.5 * osc.front())
         rep.add("continuity (oscillation heuristic)",
                 "osc(h=span/2^8)=" + format_real(osc.front()) +
                     ", osc(h=span/2^16)=" + format_real(osc.back()),
                 -osc.back(), {osc.front(), osc.back()});
      rep.notes.push_back("continuity checked by dense-grid oscillation heuristic");
   }
   return rep;
}

OrderedMetricSpace<double> real_line(double lo, double hi)
{
   OrderedMetricSpace<double> s;
   s.name = "real line";
   s.distance = [](double a, double b) { return std::abs(a - b); };
   s.compare = [](double a, double b, double tol) {
      if (std::abs(a - b) <= tol) return Order::equal;
      return a < b ? Order::less : Order::greater;
   };
   s.sampler = [lo, hi](Rng &rng) { return uniform(rng, lo, hi); };
   s.neighbor = [](double p, double scale, Rng &rng) {
      const double step = scale * uniform(rng, 0.5, 1.0);
      return (rng() & 1U) ? p + step : p - step;
   };
   s.describe = [](double p) { return format_real(p); };
   return s;
}

} // namespace coupled
