#ifndef COUPLED_ORDER_METRIC_HPP
#define COUPLED_ORDER_METRIC_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace coupled {

/// Tolerance used for floating identities in axiom checks.
inline constexpr double kAxiomTol = 1e-12;

using Rng = std::mt19937_64;

/// Uniform double in [lo, hi) built from the raw 64-bit stream, so results do
/// not depend on the standard library's distribution implementation.
inline double uniform(Rng &rng, double lo, double hi)
{
   const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
   return lo + (hi - lo) * unit;
}

inline std::size_t uniform_index(Rng &rng, std::size_t n)
{
   return static_cast<std::size_t>(rng() % n);
}

/// Log-uniform draw in [lo, hi], lo > 0.
inline double log_uniform(Rng &rng, double lo, double hi)
{
   return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

/// Result of comparing two points under a partial order. Incomparability is a
/// first-class outcome.
enum class Order { less, equal, greater, incomparable };

inline bool is_leq(Order o) { return o == Order::less || o == Order::equal; }
inline bool is_geq(Order o) { return o == Order::greater || o == Order::equal; }
inline bool is_comparable(Order o) { return o != Order::incomparable; }

inline Order reverse(Order o)
{
   switch (o)
   {
      case Order::less: return Order::greater;
      case Order::greater: return Order::less;
      default: return o;
   }
}

const char *to_string(Order o);

class PreconditionError : public std::invalid_argument
{
public:
   using std::invalid_argument::invalid_argument;
};

class SamplerError : public std::runtime_error
{
public:
   SamplerError(const std::string &sampler, const std::string &what)
      : std::runtime_error("sampler '" + sampler + "' failed: " + what), sampler_(sampler) {}
   const std::string &sampler() const { return sampler_; }
private:
   std::string sampler_;
};

struct Violation
{
   std::string property;
   std::string witness;
   double margin = 0.0;
   /// Numeric witness values when the points are scalars; empty otherwise.
   std::vector<double> values;
};

struct ValidationReport
{
   std::string subject;
   std::vector<Violation> violations;
   std::size_t checked = 0;
   std::size_t skipped = 0;
   /// Set when a check had nothing to test (e.g. no comparable samples).
   bool inconclusive = false;
   std::vector<std::string> notes;

   bool passed() const { return violations.empty(); }

   void add(std::string property, std::string witness, double margin,
            std::vector<double> values = {})
   {
      violations.push_back({std::move(property), std::move(witness), margin, std::move(values)});
   }

   void merge(const ValidationReport &other);

   bool has_violation(const std::string &property) const;
};

/// Element of the class of altering distance functions: continuous,
/// non-decreasing, zero exactly at zero.
struct AlteringDistance
{
   std::string name;
   std::function<double(double)> eval;

   double operator()(double t) const { return eval(t); }
};

namespace altering {
AlteringDistance identity();
AlteringDistance scaled(double factor);
AlteringDistance square();
/// t^2 - ln(t^2 + 1)
AlteringDistance square_minus_log();
AlteringDistance power(double exponent);
} // namespace altering

/// Checks the altering-distance axioms on a sorted grid containing 0.
/// Continuity is approximated: the oscillation max|f(t+h) - f(t)| over the
/// grid span must shrink under refinement of h (a jump keeps it bounded away
/// from zero). This is a heuristic, not a proof.
ValidationReport validate_altering_distance(const AlteringDistance &f,
                                            const std::vector<double> &grid);

/// Oscillation of f on [0, span] at step span / 2^level for each level in
/// [first_level, last_level].
std::vector<double> oscillation_profile(const AlteringDistance &f, double span,
                                        int first_level, int last_level);

template <class P>
std::string default_describe(const P &)
{
   return "<point>";
}

inline std::string format_real(double x)
{
   std::ostringstream os;
   os.precision(17);
   os << x;
   return os.str();
}

/// A point set with a metric and a (three-valued) partial order.
///
/// `compare(a, b, tol)` returns the order of a relative to b; `tol` absorbs
/// round-off for floating representations and may be ignored by exact spaces.
/// `neighbor(p, scale, rng)` is optional: when present it returns a point
/// comparable to p at distance roughly `scale`, which lets samplers reach
/// comparable and near-diagonal configurations.
template <class P>
struct OrderedMetricSpace
{
   std::string name;
   std::function<double(const P &, const P &)> distance;
   std::function<Order(const P &, const P &, double)> compare;
   std::function<P(Rng &)> sampler;
   std::function<P(const P &, double, Rng &)> neighbor;
   std::function<std::string(const P &)> describe;

   Order cmp(const P &a, const P &b, double tol = kAxiomTol) const { return compare(a, b, tol); }
   bool leq(const P &a, const P &b, double tol = kAxiomTol) const { return is_leq(compare(a, b, tol)); }
   bool geq(const P &a, const P &b, double tol = kAxiomTol) const { return is_geq(compare(a, b, tol)); }

   std::string show(const P &p) const
   {
      if (describe) return describe(p);
      if constexpr (std::is_arithmetic_v<P>) return format_real(static_cast<double>(p));
      else return default_describe(p);
   }

   P sample(Rng &rng) const
   {
      if (!sampler) throw SamplerError(name, "no sampler configured");
      try
      {
         return sampler(rng);
      }
      catch (const SamplerError &)
      {
         throw;
      }
      catch (const std::exception &e)
      {
         throw SamplerError(name, e.what());
      }
   }

   P near(const P &p, double scale, Rng &rng) const
   {
      try
      {
         return neighbor(p, scale, rng);
      }
      catch (const std::exception &e)
      {
         throw SamplerError(name + ".neighbor", e.what());
      }
   }
};

template <class P>
std::vector<double> scalar_values(std::initializer_list<const P *> pts)
{
   std::vector<double> out;
   if constexpr (std::is_arithmetic_v<P>)
      for (const P *p : pts) out.push_back(static_cast<double>(*p));
   return out;
}

/// Real line with |x - y| and the usual order. Samples are uniform in
/// [lo, hi).
OrderedMetricSpace<double> real_line(double lo = -10.0, double hi = 10.0);

/// Draws the validation sample set: half independent points, half built as
/// neighbor chains when the space provides a neighbor function.
template <class P>
std::vector<P> draw_samples(const OrderedMetricSpace<P> &space, std::size_t count, Rng &rng)
{
   std::vector<P> pts;
   pts.reserve(count);
   for (std::size_t i = 0; i < count; ++i)
   {
      if (space.neighbor && i % 2 == 1)
         pts.push_back(space.near(pts.back(), log_uniform(rng, 1e-3, 1.0), rng));
      else
         pts.push_back(space.sample(rng));
   }
   return pts;
}

/// Sampled validation of the metric axioms and the partial-order axioms.
///
/// Pairs are checked exhaustively over the sample set. Triples are checked
/// exhaustively for up to 50 samples and on count^2 seeded random triples
/// beyond that.
template <class P>
ValidationReport check_metric_order_axioms(const OrderedMetricSpace<P> &space,
                                           std::size_t sample_count, std::uint64_t seed)
{
   if (sample_count == 0) throw PreconditionError("sample_count must be positive");
   Rng rng(seed);
   const std::vector<P> pts = draw_samples(space, sample_count, rng);

   ValidationReport rep;
   rep.subject = "metric/order axioms on " + space.name;

   std::size_t distinct = 0;
   for (std::size_t i = 1; i < pts.size() && distinct < 2; ++i)
   {
      bool fresh = true;
      for (std::size_t j = 0; j < i && fresh; ++j)
         fresh = space.distance(pts[i], pts[j]) != 0.0 || space.distance(pts[j], pts[i]) != 0.0;
      if (fresh) ++distinct;
   }
   if (distinct < 2)
      throw SamplerError(space.name, "fewer than 3 distinct points produced");

   const auto pair_witness = [&](const P &x, const P &y) {
      return "x=" + space.show(x) + ", y=" + space.show(y);
   };

   for (std::size_t i = 0; i < pts.size(); ++i)
   {
      const P &x = pts[i];
      const double dxx = space.distance(x, x);
      ++rep.checked;
      if (!std::isfinite(dxx) || std::abs(dxx) > kAxiomTol)
         rep.add("identity d(x,x)=0", "x=" + space.show(x), -std::abs(dxx), scalar_values<P>({&x}));
      if (!space.leq(x, x))
         rep.add("reflexivity", "x=" + space.show(x), -1.0, scalar_values<P>({&x}));

      for (std::size_t j = 0; j < pts.size(); ++j)
      {
         if (i == j) continue;
         const P &y = pts[j];
         const double dxy = space.distance(x, y);
         const double dyx = space.distance(y, x);
         ++rep.checked;
         if (!std::isfinite(dxy))
         {
            rep.add("finite distance", pair_witness(x, y), -std::numeric_limits<double>::infinity(),
                    scalar_values<P>({&x, &y}));
            continue;
         }
         if (dxy < 0.0)
            rep.add("non-negativity", pair_witness(x, y), dxy, scalar_values<P>({&x, &y}));
         if (i < j && std::abs(dxy - dyx) > kAxiomTol * std::max(1.0, std::abs(dxy)))
            rep.add("symmetry", pair_witness(x, y), -std::abs(dxy - dyx), scalar_values<P>({&x, &y}));
         if (i < j && space.leq(x, y) && space.leq(y, x) && std::abs(dxy) > kAxiomTol)
            rep.add("antisymmetry", pair_witness(x, y), -std::abs(dxy), scalar_values<P>({&x, &y}));
      }
   }

   const auto check_triple = [&](std::size_t i, std::size_t j, std::size_t k) {
      const P &x = pts[i];
      const P &y = pts[j];
      const P &z = pts[k];
      ++rep.checked;
      const double lhs = space.distance(x, y);
      const double rhs = space.distance(x, z) + space.distance(z, y);
      if (lhs > rhs + kAxiomTol * std::max(1.0, rhs))
         rep.add("triangle inequality",
                 "x=" + space.show(x) + ", y=" + space.show(y) + ", z=" + space.show(z), rhs - lhs,
                 scalar_values<P>({&x, &y, &z}));
      if (space.leq(x, y) && space.leq(y, z) && !space.leq(x, z))
         rep.add("transitivity",
                 "x=" + space.show(x) + ", y=" + space.show(y) + ", z=" + space.show(z), -1.0,
                 scalar_values<P>({&x, &y, &z}));
   };

   const std::size_t n = pts.size();
   if (n <= 50)
   {
      for (std::size_t i = 0; i < n; ++i)
         for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k)
               if (i != j && j != k && i != k) check_triple(i, j, k);
   }
   else
   {
      for (std::size_t r = 0; r < n * n; ++r)
         check_triple(uniform_index(rng, n), uniform_index(rng, n), uniform_index(rng, n));
   }
   return rep;
}

} // namespace coupled

#endif
