#ifndef COUPLED_COUPLED_CORE_HPP
#define COUPLED_COUPLED_CORE_HPP

#include "coupled/order_metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace coupled {

/// Raised by a preimage selector that cannot reach the requested target.
class PreimageError : public std::runtime_error
{
public:
   PreimageError(const std::string &selector, const std::string &target)
      : std::runtime_error("preimage selector '" + selector + "' cannot reach target " + target),
        target_(target) {}
   const std::string &target() const { return target_; }
private:
   std::string target_;
};

/// The triple (F, G, S) over an ordered metric space.
///
/// G_preimage(w) must return some x with G(x) = w for every w in the range of
/// F (and S_preimage likewise); that is how the range inclusion
/// F(X x X) in G(X) and S(X) is made usable.
template <class P>
struct CoupledProblem
{
   OrderedMetricSpace<P> space;
   std::function<P(const P &, const P &)> F;
   std::function<P(const P &)> G;
   std::function<P(const P &)> S;
   std::function<P(const P &)> G_preimage;
   std::function<P(const P &)> S_preimage;
};

template <class P>
std::function<P(const P &)> identity_map()
{
   return [](const P &p) { return p; };
}

/// Preimage selector for G = identity.
template <class P>
std::function<P(const P &)> identity_selector()
{
   return [](const P &w) { return w; };
}

/// Inverse of a monotone scalar map tabulated on a sorted abscissa grid.
/// Targets are located by bisection on the table and linearly interpolated;
/// targets outside the tabulated range raise PreimageError.
class TabulatedInverse
{
public:
   TabulatedInverse(std::function<double(double)> g, double lo, double hi, std::size_t nodes);

   double operator()(double w) const;

   double lo_value() const { return ys_.front(); }
   double hi_value() const { return ys_.back(); }

private:
   std::vector<double> xs_;
   std::vector<double> ys_;
   bool increasing_ = true;
};

inline TabulatedInverse::TabulatedInverse(std::function<double(double)> g, double lo, double hi,
                                          std::size_t nodes)
{
   if (nodes < 2 || !(hi > lo)) throw PreconditionError("tabulated inverse needs lo < hi and >= 2 nodes");
   xs_.resize(nodes);
   ys_.resize(nodes);
   for (std::size_t i = 0; i < nodes; ++i)
   {
      xs_[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(nodes - 1);
      ys_[i] = g(xs_[i]);
   }
   increasing_ = ys_.back() >= ys_.front();
   for (std::size_t i = 1; i < nodes; ++i)
   {
      const bool ok = increasing_ ? ys_[i] > ys_[i - 1] : ys_[i] < ys_[i - 1];
      if (!ok) throw PreconditionError("tabulated inverse requires a strictly monotone map");
   }
   if (!increasing_)
   {
      std::reverse(xs_.begin(), xs_.end());
      std::reverse(ys_.begin(), ys_.end());
   }
}

inline double TabulatedInverse::operator()(double w) const
{
   if (!(w >= ys_.front() && w <= ys_.back())) throw PreimageError("tabulated inverse", format_real(w));
   auto it = std::upper_bound(ys_.begin(), ys_.end(), w);
   if (it == ys_.end()) return xs_.back();
   const std::size_t k = static_cast<std::size_t>(it - ys_.begin());
   const double t = (w - ys_[k - 1]) / (ys_[k] - ys_[k - 1]);
   return xs_[k - 1] + t * (xs_[k] - xs_[k - 1]);
}

/// One sampled instance of the contraction inequality
///   phi(d(F(x,y), F(u,v))) <= phi(m) - psi(m),  m = max{d(Gx,Su), d(Sy,Gv)}.
template <class P>
struct ContractionWitness
{
   P x, y, u, v;
   double max_distance = 0.0;
   double lhs = 0.0;
   double rhs = 0.0;
   double margin = 0.0;
   std::size_t sample_index = 0;

   bool violates(double tol = kAxiomTol) const { return margin < -tol * std::max(1.0, std::abs(rhs)); }
};

template <class P>
struct ContractionCheck
{
   /// Every eligible sample, sorted by ascending margin then sample index.
   std::vector<ContractionWitness<P>> witnesses;
   std::size_t eligible = 0;
   std::size_t skipped = 0;
   bool inconclusive = false;

   std::vector<ContractionWitness<P>> violations(double tol = kAxiomTol) const
   {
      std::vector<ContractionWitness<P>> out;
      for (const auto &w : witnesses)
         if (w.violates(tol)) out.push_back(w);
      return out;
   }

   bool passed(double tol = kAxiomTol) const
   {
      return std::none_of(witnesses.begin(), witnesses.end(),
                          [tol](const ContractionWitness<P> &w) { return w.violates(tol); });
   }
};

namespace detail {

/// Second point of a sampled pair: a neighbor of `first` when the space can
/// produce one (every other draw), otherwise an independent sample.
template <class P>
P partner(const OrderedMetricSpace<P> &space, const P &first, std::size_t index, Rng &rng,
          double lo = 1e-3, double hi = 1.0)
{
   if (space.neighbor && index % 2 == 0) return space.near(first, log_uniform(rng, lo, hi), rng);
   return space.sample(rng);
}

} // namespace detail

/// Sampled check of the mixed (G,S)-monotone property: for every sampled
/// (x1, x2, y), G(x1) <= S(x2) must give F(x1,y) <= F(x2,y) and G(x1) >= S(x2)
/// must give F(x1,y) >= F(x2,y); the second argument is checked with the
/// order reversed. Incomparable pairs are skipped and counted.
template <class P>
ValidationReport check_mixed_GS_monotone(const CoupledProblem<P> &pb, std::size_t sample_count,
                                         std::uint64_t seed)
{
   if (sample_count == 0) throw PreconditionError("sample_count must be positive");
   Rng rng(seed);
   const auto &sp = pb.space;
   ValidationReport rep;
   rep.subject = "mixed (G,S)-monotone property";

   for (std::size_t i = 0; i < sample_count; ++i)
   {
      // First argument.
      {
         const P x1 = sp.sample(rng);
         const P x2 = detail::partner(sp, x1, i, rng);
         const P y = sp.sample(rng);
         const Order hyp = sp.cmp(pb.G(x1), pb.S(x2));
         if (!is_comparable(hyp))
            ++rep.skipped;
         else
         {
            ++rep.checked;
            const P f1 = pb.F(x1, y);
            const P f2 = pb.F(x2, y);
            const Order got = sp.cmp(f1, f2);
            const auto wit = [&] {
               return "x1=" + sp.show(x1) + ", x2=" + sp.show(x2) + ", y=" + sp.show(y);
            };
            if (is_leq(hyp) && !is_leq(got))
               rep.add("first argument: G(x1) <= S(x2) => F(x1,y) <= F(x2,y)", wit(), -sp.distance(f1, f2),
                       scalar_values<P>({&x1, &x2, &y}));
            if (is_geq(hyp) && !is_geq(got))
               rep.add("first argument: G(x1) >= S(x2) => F(x1,y) >= F(x2,y)", wit(), -sp.distance(f1, f2),
                       scalar_values<P>({&x1, &x2, &y}));
         }
      }
      // Second argument.
      {
         const P y1 = sp.sample(rng);
         const P y2 = detail::partner(sp, y1, i, rng);
         const P x = sp.sample(rng);
         const Order hyp = sp.cmp(pb.G(y1), pb.S(y2));
         if (!is_comparable(hyp))
            ++rep.skipped;
         else
         {
            ++rep.checked;
            const P f1 = pb.F(x, y1);
            const P f2 = pb.F(x, y2);
            const Order got = sp.cmp(f1, f2);
            const auto wit = [&] {
               return "x=" + sp.show(x) + ", y1=" + sp.show(y1) + ", y2=" + sp.show(y2);
            };
            if (is_leq(hyp) && !is_geq(got))
               rep.add("second argument: G(y1) <= S(y2) => F(x,y1) >= F(x,y2)", wit(), -sp.distance(f1, f2),
                       scalar_values<P>({&x, &y1, &y2}));
            if (is_geq(hyp) && !is_leq(got))
               rep.add("second argument: G(y1) >= S(y2) => F(x,y1) <= F(x,y2)", wit(), -sp.distance(f1, f2),
                       scalar_values<P>({&x, &y1, &y2}));
         }
      }
   }
   if (rep.checked == 0)
   {
      rep.inconclusive = true;
      rep.notes.push_back("no comparable samples");
   }
   return rep;
}

/// Samples 4-tuples (x, y, u, v) satisfying the order side-conditions
/// (G(x) comparable to S(u), S(y) comparable to G(v)) and evaluates the
/// contraction inequality on each. When the space has a neighbor function,
/// u and v are drawn near x and y at log-uniform scales in
/// [min_scale, max_scale] so the near-diagonal regime is covered.
template <class P>
ContractionCheck<P> check_contraction(const CoupledProblem<P> &pb, const AlteringDistance &phi,
                                      const AlteringDistance &psi, std::size_t sample_count,
                                      std::uint64_t seed, double min_scale = 1e-3,
                                      double max_scale = 10.0)
{
   if (sample_count == 0) throw PreconditionError("sample_count must be positive");
   Rng rng(seed);
   const auto &sp = pb.space;
   ContractionCheck<P> out;

   for (std::size_t i = 0; i < sample_count; ++i)
   {
      ContractionWitness<P> w{sp.sample(rng), sp.sample(rng), {}, {}};
      w.u = detail::partner(sp, w.x, i, rng, min_scale, max_scale);
      w.v = detail::partner(sp, w.y, i, rng, min_scale, max_scale);
      w.sample_index = i;

      const P gx = pb.G(w.x);
      const P su = pb.S(w.u);
      const P sy = pb.S(w.y);
      const P gv = pb.G(w.v);
      if (!is_comparable(sp.cmp(gx, su)) || !is_comparable(sp.cmp(sy, gv)))
      {
         ++out.skipped;
         continue;
      }
      ++out.eligible;
      const double m = std::max(sp.distance(gx, su), sp.distance(sy, gv));
      w.max_distance = m;
      w.lhs = phi(sp.distance(pb.F(w.x, w.y), pb.F(w.u, w.v)));
      w.rhs = phi(m) - psi(m);
      w.margin = w.rhs - w.lhs;
      out.witnesses.push_back(std::move(w));
   }
   std::stable_sort(out.witnesses.begin(), out.witnesses.end(),
                    [](const ContractionWitness<P> &a, const ContractionWitness<P> &b) {
                       if (a.margin != b.margin) return a.margin < b.margin;
                       return a.sample_index < b.sample_index;
                    });
   out.inconclusive = out.eligible == 0;
   return out;
}

/// Checks d(G(F(x,y)), F(Gx, Gy)) <= tol and the same with S.
template <class P>
ValidationReport check_commutation(const CoupledProblem<P> &pb, std::size_t sample_count,
                                   std::uint64_t seed, double tol)
{
   if (sample_count == 0) throw PreconditionError("sample_count must be positive");
   Rng rng(seed);
   const auto &sp = pb.space;
   ValidationReport rep;
   rep.subject = "commutation of F with G and S";
   for (std::size_t i = 0; i < sample_count; ++i)
   {
      const P x = sp.sample(rng);
      const P y = sp.sample(rng);
      const P fxy = pb.F(x, y);
      const double dg = sp.distance(pb.G(fxy), pb.F(pb.G(x), pb.G(y)));
      const double ds = sp.distance(pb.S(fxy), pb.F(pb.S(x), pb.S(y)));
      rep.checked += 2;
      const auto wit = [&](double d) {
         return "x=" + sp.show(x) + ", y=" + sp.show(y) + ", distance=" + format_real(d);
      };
      if (!(dg <= tol)) rep.add("G(F(x,y)) = F(Gx,Gy)", wit(dg), tol - dg, scalar_values<P>({&x, &y}));
      if (!(ds <= tol)) rep.add("S(F(x,y)) = F(Sx,Sy)", wit(ds), tol - ds, scalar_values<P>({&x, &y}));
   }
   return rep;
}

/// Testable form of the range inclusion: G(G_preimage(w)) and
/// S(S_preimage(w)) must return w (within tol) for w = F(x, y) on samples.
template <class P>
ValidationReport check_preimage_selectors(const CoupledProblem<P> &pb, std::size_t sample_count,
                                          std::uint64_t seed, double tol)
{
   if (sample_count == 0) throw PreconditionError("sample_count must be positive");
   Rng rng(seed);
   const auto &sp = pb.space;
   ValidationReport rep;
   rep.subject = "preimage selectors";
   for (std::size_t i = 0; i < sample_count; ++i)
   {
      const P x = sp.sample(rng);
      const P y = sp.sample(rng);
      const P w = pb.F(x, y);
      const auto probe = [&](const char *name, const std::function<P(const P &)> &map,
                             const std::function<P(const P &)> &pre) {
         ++rep.checked;
         try
         {
            const double d = sp.distance(map(pre(w)), w);
            if (!(d <= tol))
               rep.add(std::string(name) + " selector round trip", "w=" + sp.show(w), tol - d,
                       scalar_values<P>({&w}));
         }
         catch (const PreimageError &e)
         {
            rep.add(std::string(name) + " selector reachability", e.what(), -1.0, scalar_values<P>({&w}));
         }
      };
      probe("G", pb.G, pb.G_preimage);
      probe("S", pb.S, pb.S_preimage);
   }
   return rep;
}

} // namespace coupled

#endif
