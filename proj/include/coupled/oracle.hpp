#ifndef COUPLED_ORACLE_HPP
#define COUPLED_ORACLE_HPP

// Reference computations that share no code path with the iteration engine's
// kernels and quadrature: exhaustive enumeration on finite spaces and a
// shooting solver for the periodic ODE.

#include "coupled/coupled_core.hpp"

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace coupled::oracle {

/// A finite space given entirely by tables over point indices 0..n-1.
struct FiniteProblem
{
   std::string name;
   std::vector<std::string> labels;
   std::vector<std::vector<bool>> leq;      ///< leq[a][b]: a <= b
   std::vector<std::vector<double>> dist;
   std::vector<std::vector<int>> F;         ///< F[x][y]
   std::vector<int> G;
   std::vector<int> S;

   std::size_t size() const { return labels.size(); }
};

/// Exact check of the table invariants (totality, metric axioms, partial
/// order axioms).
ValidationReport validate_tables(const FiniteProblem &p);

/// Exhaustive check of the mixed (G,S)-monotone property over all triples.
ValidationReport check_mixed_monotone_exhaustive(const FiniteProblem &p);

struct CoupledPointSets
{
   /// G(x) = F(x,y) and G(y) = F(y,x)
   std::vector<std::pair<int, int>> g_points;
   /// S(x) = F(x,y) and S(y) = F(y,x)
   std::vector<std::pair<int, int>> s_points;
   /// Both of the above.
   std::vector<std::pair<int, int>> common;
};

CoupledPointSets enumerate_coupled_points(const FiniteProblem &p);

/// Adapter to the generic engine. Preimage selectors return the smallest
/// index mapping to the target.
CoupledProblem<int> as_coupled_problem(const FiniteProblem &p);

/// All quadruples (x0, y0, x1, y1) satisfying the starting chains.
std::vector<std::array<int, 4>> valid_starts(const FiniteProblem &p);

/// Chain 0 < 1 < ... < n-1 with d(i, j) = |i - j|; F, G, S filled from the
/// supplied callbacks.
FiniteProblem make_chain(std::string name, int n, const std::function<int(int, int)> &F,
                         const std::function<int(int)> &G, const std::function<int(int)> &S);

using Rhs = std::function<double(double t, double u)>;

/// One classic fourth-order Runge-Kutta step.
double rk4_step(const Rhs &rhs, double t, double u, double dt);

/// Time-T map u0 -> u(T) with `steps` RK4 steps.
double time_map(const Rhs &rhs, double period, std::size_t steps, double u0);

struct PeriodicSolution
{
   double u0 = 0.0;
   /// Trajectory on the grid t_i = i T / N, i = 0..N.
   std::vector<double> trajectory;
   std::size_t bisection_steps = 0;
};

/// Periodic solution of u' = rhs(t, u) by bisection on g(u0) = Phi(u0) - u0
/// over [lo, hi] (to bracket width 1e-12), with Phi computed by RK4. The
/// step count is rounded up to a multiple of `grid_intervals` so the
/// trajectory lands exactly on the grid. Throws std::invalid_argument if g
/// does not change sign on the bracket.
PeriodicSolution solve_periodic_ode(const Rhs &rhs, double period, std::size_t steps, double lo, double hi,
                                    std::size_t grid_intervals);

} // namespace coupled::oracle

#endif
