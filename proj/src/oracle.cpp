#include "coupled/oracle.hpp"

#include <array>
#include <cmath>
#include <memory>

namespace coupled::oracle {

namespace {

std::string pair_label(const FiniteProblem &p, int a, int b)
{
   return "(" + p.labels[a] + ", " + p.labels[b] + ")";
}

} // namespace

ValidationReport validate_tables(const FiniteProblem &p)
{
   ValidationReport rep;
   rep.subject = "tables of " + p.name;
   const std::size_t n = p.size();
   const auto square = [n](const auto &t) {
      if (t.size() != n) return false;
      for (const auto &row : t)
         if (row.size() != n) return false;
      return true;
   };
   if (!square(p.leq) || !square(p.dist) || !square(p.F) || p.G.size() != n || p.S.size() != n)
   {
      rep.add("table shapes", p.name, -1.0);
      return rep;
   }
   const auto in_range = [n](int v) { return v >= 0 && static_cast<std::size_t>(v) < n; };
   for (std::size_t a = 0; a < n; ++a)
   {
      if (!in_range(p.G[a]) || !in_range(p.S[a])) rep.add("G/S totality", p.labels[a], -1.0);
      for (std::size_t b = 0; b < n; ++b)
         if (!in_range(p.F[a][b])) rep.add("F totality", pair_label(p, a, b), -1.0);
   }
   if (!rep.passed()) return rep;

   for (std::size_t a = 0; a < n; ++a)
   {
      ++rep.checked;
      if (p.dist[a][a] != 0.0) rep.add("identity d(x,x)=0", p.labels[a], -p.dist[a][a]);
      if (!p.leq[a][a]) rep.add("reflexivity", p.labels[a], -1.0);
      for (std::size_t b = 0; b < n; ++b)
      {
         ++rep.checked;
         if (a != b && !(p.dist[a][b] > 0.0)) rep.add("positivity", pair_label(p, a, b), -1.0);
         if (p.dist[a][b] != p.dist[b][a]) rep.add("symmetry", pair_label(p, a, b), -1.0);
         if (a != b && p.leq[a][b] && p.leq[b][a]) rep.add("antisymmetry", pair_label(p, a, b), -1.0);
         for (std::size_t c = 0; c < n; ++c)
         {
            if (p.dist[a][b] > p.dist[a][c] + p.dist[c][b])
               rep.add("triangle inequality", pair_label(p, a, b) + " via " + p.labels[c], -1.0);
            if (p.leq[a][b] && p.leq[b][c] && !p.leq[a][c])
               rep.add("transitivity", pair_label(p, a, b) + " then " + p.labels[c], -1.0);
         }
      }
   }
   return rep;
}

ValidationReport check_mixed_monotone_exhaustive(const FiniteProblem &p)
{
   ValidationReport rep;
   rep.subject = "exhaustive mixed (G,S)-monotone property on " + p.name;
   const int n = static_cast<int>(p.size());
   const auto le = [&](int a, int b) { return static_cast<bool>(p.leq[a][b]); };
   for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
         for (int z = 0; z < n; ++z)
         {
            ++rep.checked;
            const std::string wit = "a=" + p.labels[a] + ", b=" + p.labels[b] + ", other=" + p.labels[z];
            if (le(p.G[a], p.S[b]) && !le(p.F[a][z], p.F[b][z]))
               rep.add("first argument: G(a) <= S(b) => F(a,y) <= F(b,y)", wit, -1.0);
            if (le(p.S[b], p.G[a]) && !le(p.F[b][z], p.F[a][z]))
               rep.add("first argument: G(a) >= S(b) => F(a,y) >= F(b,y)", wit, -1.0);
            if (le(p.G[a], p.S[b]) && !le(p.F[z][b], p.F[z][a]))
               rep.add("second argument: G(a) <= S(b) => F(x,a) >= F(x,b)", wit, -1.0);
            if (le(p.S[b], p.G[a]) && !le(p.F[z][a], p.F[z][b]))
               rep.add("second argument: G(a) >= S(b) => F(x,a) <= F(x,b)", wit, -1.0);
         }
   return rep;
}

CoupledPointSets enumerate_coupled_points(const FiniteProblem &p)
{
   CoupledPointSets out;
   const int n = static_cast<int>(p.size());
   for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y)
      {
         const bool g = p.G[x] == p.F[x][y] && p.G[y] == p.F[y][x];
         const bool s = p.S[x] == p.F[x][y] && p.S[y] == p.F[y][x];
         if (g) out.g_points.emplace_back(x, y);
         if (s) out.s_points.emplace_back(x, y);
         if (g && s) out.common.emplace_back(x, y);
      }
   return out;
}

CoupledProblem<int> as_coupled_problem(const FiniteProblem &p)
{
   auto tables = std::make_shared<const FiniteProblem>(p);
   CoupledProblem<int> pb;
   pb.space.name = p.name;
   pb.space.distance = [tables](int a, int b) { return tables->dist[a][b]; };
   pb.space.compare = [tables](int a, int b, double) {
      const bool le = tables->leq[a][b];
      const bool ge = tables->leq[b][a];
      if (le && ge) return Order::equal;
      if (le) return Order::less;
      if (ge) return Order::greater;
      return Order::incomparable;
   };
   pb.space.sampler = [tables](Rng &rng) { return static_cast<int>(uniform_index(rng, tables->size())); };
   pb.space.describe = [tables](int a) { return tables->labels[a]; };
   pb.F = [tables](int x, int y) { return tables->F[x][y]; };
   pb.G = [tables](int x) { return tables->G[x]; };
   pb.S = [tables](int x) { return tables->S[x]; };
   const auto selector = [tables](const std::vector<int> &map, const char *name) {
      return [tables, &map, name](int w) {
         for (std::size_t x = 0; x < map.size(); ++x)
            if (map[x] == w) return static_cast<int>(x);
         throw PreimageError(name, tables->labels[w]);
      };
   };
   pb.G_preimage = selector(tables->G, "finite G");
   pb.S_preimage = selector(tables->S, "finite S");
   return pb;
}

std::vector<std::array<int, 4>> valid_starts(const FiniteProblem &p)
{
   std::vector<std::array<int, 4>> out;
   const int n = static_cast<int>(p.size());
   const auto le = [&](int a, int b) { return static_cast<bool>(p.leq[a][b]); };
   for (int x0 = 0; x0 < n; ++x0)
      for (int y0 = 0; y0 < n; ++y0)
         for (int x1 = 0; x1 < n; ++x1)
            for (int y1 = 0; y1 < n; ++y1)
               if (le(p.G[x0], p.S[x1]) && le(p.S[x1], p.F[x0][y0]) && le(p.S[y1], p.G[y0]) &&
                   le(p.F[y0][x0], p.S[y1]))
                  out.push_back({x0, y0, x1, y1});
   return out;
}

FiniteProblem make_chain(std::string name, int n, const std::function<int(int, int)> &F,
                         const std::function<int(int)> &G, const std::function<int(int)> &S)
{
   FiniteProblem p;
   p.name = std::move(name);
   const auto un = static_cast<std::size_t>(n);
   p.leq.assign(un, std::vector<bool>(un));
   p.dist.assign(un, std::vector<double>(un));
   p.F.assign(un, std::vector<int>(un));
   for (int a = 0; a < n; ++a)
   {
      p.labels.push_back(std::to_string(a));
      p.G.push_back(G(a));
      p.S.push_back(S(a));
      for (int b = 0; b < n; ++b)
      {
         p.leq[a][b] = a <= b;
         p.dist[a][b] = std::abs(a - b);
         p.F[a][b] = F(a, b);
      }
   }
   return p;
}

double rk4_step(const Rhs &rhs, double t, double u, double dt)
{
   const double k1 = rhs(t, u);
   const double k2 = rhs(t + 0.5 * dt, u + 0.5 * dt * k1);
   const double k3 = rhs(t + 0.5 * dt, u + 0.5 * dt * k2);
   const double k4 = rhs(t + dt, u + dt * k3);
   return u + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double time_map(const Rhs &rhs, double period, std::size_t steps, double u0)
{
   const double dt = period / static_cast<double>(steps);
   double u = u0;
   for (std::size_t k = 0; k < steps; ++k) u = rk4_step(rhs, dt * static_cast<double>(k), u, dt);
   return u;
}

PeriodicSolution solve_periodic_ode(const Rhs &rhs, double period, std::size_t steps, double lo, double hi,
                                    std::size_t grid_intervals)
{
   if (!(period > 0.0) || steps == 0 || grid_intervals == 0 || !(hi > lo))
      throw std::invalid_argument("solve_periodic_ode: invalid arguments");
   const std::size_t per_cell = (steps + grid_intervals - 1) / grid_intervals;
   const std::size_t total = per_cell * grid_intervals;
   const auto g = [&](double u0) { return time_map(rhs, period, total, u0) - u0; };

   double glo = g(lo);
   const double ghi = g(hi);
   if (glo == 0.0 || ghi == 0.0)
   {
      // Exact root on a bracket end; fall through with a degenerate bracket.
      const double r = glo == 0.0 ? lo : hi;
      lo = hi = r;
   }
   else if ((glo < 0.0) == (ghi < 0.0))
   {
      throw std::invalid_argument("periodic solution not bracketed: g(lo) and g(hi) have the same sign");
   }

   PeriodicSolution sol;
   while (hi - lo > 1e-12)
   {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      const double gm = g(mid);
      ++sol.bisection_steps;
      if (gm == 0.0)
      {
         lo = hi = mid;
         break;
      }
      if ((gm < 0.0) == (glo < 0.0))
      {
         lo = mid;
         glo = gm;
      }
      else
      {
         hi = mid;
      }
   }
   sol.u0 = 0.5 * (lo + hi);

   const double dt = period / static_cast<double>(total);
   sol.trajectory.reserve(grid_intervals + 1);
   double u = sol.u0;
   sol.trajectory.push_back(u);
   for (std::size_t i = 0; i < grid_intervals; ++i)
   {
      for (std::size_t k = 0; k < per_cell; ++k)
      {
         const std::size_t idx = i * per_cell + k;
         u = rk4_step(rhs, dt * static_cast<double>(idx), u, dt);
      }
      sol.trajectory.push_back(u);
   }
   return sol;
}

} // namespace coupled::oracle
