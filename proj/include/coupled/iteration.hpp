#ifndef COUPLED_ITERATION_HPP
#define COUPLED_ITERATION_HPP

#include "coupled/coupled_core.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

namespace coupled {

/// Marginal chain-invariant violations up to this size are tolerated.
inline constexpr double kChainTol = 1e-12;

/// Growth of M beyond this multiple of M_0 stops the run.
inline constexpr double kDivergenceFactor = 1e6;

struct ChainViolation
{
   std::size_t n = 0;
   std::string relation;
};

/// State of the coupled coincidence iteration.
///
/// The even track carries points x_{2n}, y_{2n} whose G-images are the
/// primary iterates; the odd track carries x_{2n+1}, y_{2n+1} and their
/// S-images. M is the distance between the two tracks.
template <class P>
struct IterationState
{
   std::size_t n = 0;
   P x_even, y_even;
   P x_odd, y_odd;
   P Gx, Gy;
   P Sx, Sy;
   double M = 0.0;
   std::vector<ChainViolation> chain_violations;
};

enum class RunStatus { converged, max_iter, chain_violation };

inline const char *to_string(RunStatus s)
{
   switch (s)
   {
      case RunStatus::converged: return "converged";
      case RunStatus::max_iter: return "max_iter";
      case RunStatus::chain_violation: return "chain_violation";
   }
   return "?";
}

struct CoincidenceResiduals
{
   double Gx = 0.0; ///< d(G(alpha), F(alpha, alpha'))
   double Sx = 0.0; ///< d(S(alpha), F(alpha, alpha'))
   double Gy = 0.0; ///< d(G(alpha'), F(alpha', alpha))
   double Sy = 0.0; ///< d(S(alpha'), F(alpha', alpha))

   double max() const { return std::max(std::max(Gx, Sx), std::max(Gy, Sy)); }
};

struct TraceRow
{
   std::size_t n = 0;
   double M = 0.0;
};

/// Outcome of a run. alpha and alpha_prime are the limits of the image
/// sequences G(x_{2n}) and G(y_{2n}); the coincidence identities are checked
/// at these limits.
template <class P>
struct CoincidenceResult
{
   P alpha, alpha_prime;
   CoincidenceResiduals residuals;
   std::vector<TraceRow> trace;
   RunStatus status = RunStatus::max_iter;
   std::size_t iterations = 0;
   std::string note;
   std::vector<ChainViolation> chain_violations;
};

struct RunOptions
{
   /// Stop with status chain_violation at the first chain violation instead
   /// of recording it and continuing.
   bool strict_chain = false;
};

template <class P>
CoincidenceResiduals coincidence_residuals(const CoupledProblem<P> &pb, const P &a, const P &ap)
{
   const auto &sp = pb.space;
   const P faap = pb.F(a, ap);
   const P fapa = pb.F(ap, a);
   return {sp.distance(pb.G(a), faap), sp.distance(pb.S(a), faap), sp.distance(pb.G(ap), fapa),
           sp.distance(pb.S(ap), fapa)};
}

namespace detail {

template <class P>
double track_gap(const CoupledProblem<P> &pb, const IterationState<P> &s)
{
   return std::max(pb.space.distance(s.Gx, s.Sx), pb.space.distance(s.Gy, s.Sy));
}

} // namespace detail

/// Validates the starting chains
///   G(x0) <= S(x1) <= F(x0,y0),  G(y0) >= S(y1) >= F(y0,x0)
/// and builds the state at n = 0.
template <class P>
IterationState<P> init_iteration(const CoupledProblem<P> &pb, const P &x0, const P &y0, const P &x1,
                                 const P &y1, double tol = kChainTol)
{
   const auto &sp = pb.space;
   IterationState<P> s{0, x0, y0, x1, y1, pb.G(x0), pb.G(y0), pb.S(x1), pb.S(y1), 0.0, {}};
   const P fx = pb.F(x0, y0);
   const P fy = pb.F(y0, x0);

   std::string failed;
   const auto require = [&](bool ok, const std::string &rel, const P &a, const P &b) {
      if (ok) return;
      if (!failed.empty()) failed += "; ";
      failed += rel + " fails (" + sp.show(a) + " vs " + sp.show(b) + ")";
   };
   require(sp.leq(s.Gx, s.Sx, tol), "G(x0) <= S(x1)", s.Gx, s.Sx);
   require(sp.leq(s.Sx, fx, tol), "S(x1) <= F(x0,y0)", s.Sx, fx);
   require(sp.geq(s.Gy, s.Sy, tol), "G(y0) >= S(y1)", s.Gy, s.Sy);
   require(sp.geq(s.Sy, fy, tol), "S(y1) >= F(y0,x0)", s.Sy, fy);
   if (!failed.empty()) throw PreconditionError("invalid starting point: " + failed);

   s.M = detail::track_gap(pb, s);
   return s;
}

/// One step of both tracks:
///   G(x_{2n+2}) = F(x_{2n}, y_{2n}),     G(y_{2n+2}) = F(y_{2n}, x_{2n}),
///   S(x_{2n+3}) = F(x_{2n+1}, y_{2n+1}), S(y_{2n+3}) = F(y_{2n+1}, x_{2n+1}).
/// Chain-invariant violations are appended to the state, never thrown.
template <class P>
IterationState<P> step(const CoupledProblem<P> &pb, const IterationState<P> &cur)
{
   const auto &sp = pb.space;
   IterationState<P> nx;
   nx.n = cur.n + 1;
   nx.chain_violations = cur.chain_violations;

   nx.Gx = pb.F(cur.x_even, cur.y_even);
   nx.Gy = pb.F(cur.y_even, cur.x_even);
   nx.Sx = pb.F(cur.x_odd, cur.y_odd);
   nx.Sy = pb.F(cur.y_odd, cur.x_odd);
   nx.x_even = pb.G_preimage(nx.Gx);
   nx.y_even = pb.G_preimage(nx.Gy);
   nx.x_odd = pb.S_preimage(nx.Sx);
   nx.y_odd = pb.S_preimage(nx.Sy);
   nx.M = detail::track_gap(pb, nx);

   const auto record = [&](bool ok, const char *rel) {
      if (!ok) nx.chain_violations.push_back({nx.n, rel});
   };
   record(sp.leq(cur.Sx, nx.Gx, kChainTol), "S(x_{2n+1}) <= G(x_{2n+2})");
   record(sp.leq(nx.Gx, nx.Sx, kChainTol), "G(x_{2n+2}) <= S(x_{2n+3})");
   record(sp.geq(cur.Sy, nx.Gy, kChainTol), "S(y_{2n+1}) >= G(y_{2n+2})");
   record(sp.geq(nx.Gy, nx.Sy, kChainTol), "G(y_{2n+2}) >= S(y_{2n+3})");
   return nx;
}

/// Iterates until M_n <= tol and all four coincidence residuals at
/// (alpha, alpha') = (G x_{2n}, G y_{2n}) are <= tol, or until max_iter steps.
template <class P>
CoincidenceResult<P> run(const CoupledProblem<P> &pb, const IterationState<P> &init, double tol,
                         std::size_t max_iter, RunOptions opts = {})
{
   if (!(tol > 0.0)) throw PreconditionError("tol must be positive");
   CoincidenceResult<P> res;
   IterationState<P> s = init;
   const double m0 = s.M;
   res.trace.push_back({s.n, s.M});

   const auto finish = [&](RunStatus st) {
      res.status = st;
      res.iterations = s.n;
      res.alpha = s.Gx;
      res.alpha_prime = s.Gy;
      res.residuals = coincidence_residuals(pb, res.alpha, res.alpha_prime);
      res.chain_violations = s.chain_violations;
      if (st == RunStatus::converged && res.residuals.max() > tol) res.status = RunStatus::max_iter;
      return res;
   };

   while (true)
   {
      if (s.M <= tol && coincidence_residuals(pb, s.Gx, s.Gy).max() <= tol)
         return finish(RunStatus::converged);
      if (s.n >= max_iter)
      {
         res.note = "iteration budget exhausted";
         return finish(RunStatus::max_iter);
      }
      const std::size_t before = s.chain_violations.size();
      s = step(pb, s);
      res.trace.push_back({s.n, s.M});
      if (opts.strict_chain && s.chain_violations.size() > before)
      {
         res.note = "chain invariant violated: " + s.chain_violations.back().relation;
         return finish(RunStatus::chain_violation);
      }
      if (!std::isfinite(s.M) || (m0 > 0.0 && s.M > kDivergenceFactor * m0))
      {
         res.note = "diverged: M grew beyond 1e6 * M_0";
         return finish(RunStatus::max_iter);
      }
   }
}

/// Writes the trace as CSV `n,M,res_Gx,res_Gy`; residuals only on the last row.
template <class P>
void write_trace_csv(std::ostream &os, const CoincidenceResult<P> &r)
{
   char buf[64];
   const auto num = [&](double v) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return std::string(buf);
   };
   os << "n,M,res_Gx,res_Gy\n";
   for (std::size_t i = 0; i < r.trace.size(); ++i)
   {
      os << r.trace[i].n << ',' << num(r.trace[i].M) << ',';
      if (i + 1 == r.trace.size()) os << num(r.residuals.Gx) << ',' << num(r.residuals.Gy);
      else os << ',';
      os << '\n';
   }
}

/// A starting quadruple (x0, y0, x1, y1).
template <class P>
struct Start
{
   P x0, y0, x1, y1;
};

template <class P>
struct UniquenessReport
{
   std::vector<CoincidenceResult<P>> runs;
   /// Largest pairwise distance between limits, over both coordinates.
   double max_disagreement = 0.0;
   /// Largest of d(alpha, G alpha), d(alpha, S alpha) and the alpha' analogues.
   double max_fixed_point_gap = 0.0;
   bool all_converged = false;
   bool agree = false;
   bool common_fixed_point = false;
   bool inconclusive = false;
   std::vector<std::string> notes;
};

/// Runs every start and checks that the limits agree within 2 tol and are
/// common fixed points (G(a) = a = S(a)). Starts must be pairwise comparable in
/// the product order (x,y) <= (u,v) iff x <= u and y >= v.
template <class P>
UniquenessReport<P> uniqueness_probe(const CoupledProblem<P> &pb, const std::vector<Start<P>> &starts,
                                     double tol, std::size_t max_iter, double init_tol = kChainTol)
{
   if (starts.empty()) throw PreconditionError("uniqueness probe needs at least one start");
   const auto &sp = pb.space;
   for (std::size_t i = 0; i < starts.size(); ++i)
      for (std::size_t j = i + 1; j < starts.size(); ++j)
      {
         const Order ox = sp.cmp(starts[i].x0, starts[j].x0);
         const Order oy = sp.cmp(starts[i].y0, starts[j].y0);
         const bool below = is_leq(ox) && is_geq(oy);
         const bool above = is_geq(ox) && is_leq(oy);
         if (!below && !above)
            throw PreconditionError("starts " + std::to_string(i) + " and " + std::to_string(j) +
                                    " are not comparable in the product order");
      }

   UniquenessReport<P> rep;
   rep.all_converged = true;
   for (std::size_t i = 0; i < starts.size(); ++i)
   {
      const auto &st = starts[i];
      auto r = run(pb, init_iteration(pb, st.x0, st.y0, st.x1, st.y1, init_tol), tol, max_iter);
      if (r.status != RunStatus::converged)
      {
         rep.all_converged = false;
         rep.notes.push_back("start " + std::to_string(i) + " did not converge (" + to_string(r.status) +
                             ")");
      }
      rep.runs.push_back(std::move(r));
   }
   rep.inconclusive = !rep.all_converged;

   for (std::size_t i = 0; i < rep.runs.size(); ++i)
   {
      const auto &a = rep.runs[i];
      rep.max_fixed_point_gap = std::max(
          {rep.max_fixed_point_gap, sp.distance(a.alpha, pb.G(a.alpha)), sp.distance(a.alpha, pb.S(a.alpha)),
           sp.distance(a.alpha_prime, pb.G(a.alpha_prime)), sp.distance(a.alpha_prime, pb.S(a.alpha_prime))});
      for (std::size_t j = i + 1; j < rep.runs.size(); ++j)
      {
         const auto &b = rep.runs[j];
         rep.max_disagreement = std::max({rep.max_disagreement, sp.distance(a.alpha, b.alpha),
                                          sp.distance(a.alpha_prime, b.alpha_prime)});
      }
   }
   rep.agree = rep.all_converged && rep.max_disagreement <= 2.0 * tol;
   rep.common_fixed_point = rep.all_converged && rep.max_fixed_point_gap <= tol;
   return rep;
}

} // namespace coupled

#endif
