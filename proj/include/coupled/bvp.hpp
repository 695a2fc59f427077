#ifndef COUPLED_BVP_HPP
#define COUPLED_BVP_HPP

#include "coupled/iteration.hpp"
#include "coupled/kernels.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace coupled {

/// A function on the uniform grid t_i = i T / N, i = 0..N.
struct GridFunction
{
   std::vector<double> values;

   std::size_t size() const { return values.size(); }
   double operator[](std::size_t i) const { return values[i]; }
   double &operator[](std::size_t i) { return values[i]; }

   static GridFunction constant(std::size_t intervals, double c)
   {
      return {std::vector<double>(intervals + 1, c)};
   }
};

/// max_i |u_i - v_i|
double sup_distance(const GridFunction &u, const GridFunction &v);

/// Nodewise order; Order::incomparable when neither u <= v nor v <= u.
Order compare_nodewise(const GridFunction &u, const GridFunction &v, double tol);

/// Grid functions with the sup metric and the nodewise order. Samples are
/// smooth periodic functions with values roughly in [-range, range];
/// neighbors are comparable perturbations of a given sup-distance.
OrderedMetricSpace<GridFunction> grid_function_space(std::size_t intervals, double period,
                                                     double range = 2.0);

using ScalarField = std::function<double(double t, double u)>;

/// Pointwise monotone transform applied nodewise, with its inverse.
struct PointwiseMap
{
   std::string name = "identity";
   std::function<double(double)> forward = [](double x) { return x; };
   std::function<double(double)> inverse = [](double x) { return x; };

   GridFunction apply(const GridFunction &u) const;
   GridFunction invert(const GridFunction &w) const;
};

PointwiseMap identity_transform();
PointwiseMap scale_transform(double factor);

/// Periodic problem u' = f(t,u) + h(t,u), u(0) = u(T), with the constants of
/// the integral reformulation.
struct BvpSpec
{
   double period = 1.0;
   double lambda1 = 0.0;
   double lambda2 = 0.0;
   double mu1 = 0.0;
   double mu2 = 0.0;
   ScalarField f;
   ScalarField h;
   std::string f_name = "f";
   std::string h_name = "h";
   PointwiseMap G;
   std::size_t intervals = 0;
   QuadratureRule quadrature = QuadratureRule::product_trapezoid;

   double node(std::size_t i) const
   {
      return period * static_cast<double>(i) / static_cast<double>(intervals);
   }
};

/// Throws PreconditionError unless T > 0, N >= 1, lambda1 > lambda2 > 0,
/// mu1, mu2 > 0 and f, h are set. Condition (im) is not enforced here; it is
/// reported by check_growth_conditions.
void validate_spec(const BvpSpec &spec);

/// 2 max(mu1, mu2) / (lambda1 + lambda2); must be < 1.
double im_ratio(const BvpSpec &spec);

KernelPair make_kernels(const BvpSpec &spec);

class IntegrandError : public std::runtime_error
{
public:
   using std::runtime_error::runtime_error;
};

/// F(u,v)(t_i) = sum_j w1_ij [f(s_j,u_j) + h(s_j,v_j) + l1 u_j - l2 v_j]
///             + sum_j w2_ij [f(s_j,v_j) + h(s_j,u_j) + l1 v_j - l2 u_j].
GridFunction apply_F(const BvpSpec &spec, const KernelWeights &kw, const GridFunction &u,
                     const GridFunction &v);

/// Pointwise sampled check of the growth conditions on f and h (with
/// G-ordered values) and of (im). Besides log-uniform random separations the
/// sampler probes the fixed separations 1, 1e-1, 1e-2, 1e-3.
ValidationReport check_growth_conditions(const BvpSpec &spec, std::size_t sample_count,
                                         std::uint64_t seed, double value_range = 10.0);

/// Checks G(alpha) <= F(alpha, beta) and G(beta) >= F(beta, alpha) nodewise
/// within 1e-10.
ValidationReport verify_lower_upper(const BvpSpec &spec, const KernelWeights &kw,
                                    const GridFunction &alpha, const GridFunction &beta);

struct OdeResidual
{
   double max_residual = 0.0;
   double periodicity_gap = 0.0;
};

/// Central-difference residual of u' = f + h (wrapped at the ends) and the
/// gap |u_0 - u_N|.
OdeResidual ode_residual(const BvpSpec &spec, const GridFunction &u);

/// The coupled problem on grid functions with S = G.
CoupledProblem<GridFunction> make_bvp_problem(const BvpSpec &spec,
                                              std::shared_ptr<const KernelWeights> kw);

/// Starting quadruple from lower/upper solutions: x0 = alpha, y0 = beta, and
/// x1, y1 chosen with S(x1) = F(alpha, beta), S(y1) = F(beta, alpha).
Start<GridFunction> lower_upper_start(const CoupledProblem<GridFunction> &pb,
                                      const GridFunction &alpha, const GridFunction &beta);

class NonCollapseError : public std::runtime_error
{
public:
   using std::runtime_error::runtime_error;
};

struct BvpSolution
{
   GridFunction u;
   GridFunction v;
   CoincidenceResult<GridFunction> run;
   OdeResidual residual;
   std::vector<std::string> warnings;
};

/// Solves the periodic problem as a coupled fixed point seeded by the
/// lower/upper pair. Throws PreconditionError if (alpha, beta) is not a
/// lower/upper pair and NonCollapseError if a converged pair has
/// d(u, v) > tol.
BvpSolution solve_bvp(const BvpSpec &spec, const GridFunction &alpha, const GridFunction &beta,
                      double tol, std::size_t max_iter);

/// Multi-start probe over several lower/upper pairs.
UniquenessReport<GridFunction> bvp_uniqueness_probe(
    const BvpSpec &spec, const std::vector<std::pair<GridFunction, GridFunction>> &pairs, double tol,
    std::size_t max_iter);

} // namespace coupled

#endif
