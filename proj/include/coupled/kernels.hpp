#ifndef COUPLED_KERNELS_HPP
#define COUPLED_KERNELS_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace coupled {

/// Quadrature used to discretize the kernel integrals on the uniform grid.
///
/// Both rules split [0, T] at s = t, where the kernels jump by one.
///  - product_trapezoid: the integrand's smooth factor is interpolated
///    linearly between nodes and integrated exactly against the exponential
///    kernel. Exact for constant factors.
///  - trapezoid: plain composite trapezoid on each side of the jump, using
///    the one-sided kernel limits at s = t.
enum class QuadratureRule { product_trapezoid, trapezoid };

const char *to_string(QuadratureRule r);
QuadratureRule parse_quadrature(const std::string &name);

/// Periodic Green's kernel of w' - sigma w = g on [0, T]:
///   e^{sigma(t-s)} / (1 - e^{sigma T})      for s <= t
///   e^{sigma(t+T-s)} / (1 - e^{sigma T})    for s >  t
double green_kernel(double sigma, double period, double t, double s);

/// The kernel pair of the integral operator, built from
/// sigma1 = -(lambda1 + lambda2) and sigma2 = lambda2 - lambda1 as
///   k1 = (G_sigma1 + G_sigma2) / 2,  k2 = (G_sigma2 - G_sigma1) / 2.
struct KernelPair
{
   double sigma1 = 0.0;
   double sigma2 = 0.0;
   double period = 1.0;

   double k1(double t, double s) const;
   double k2(double t, double s) const;
};

KernelPair make_kernels(double lambda1, double lambda2, double period);

/// Quadrature weights over the N+1 grid nodes for integrating
/// G_sigma(t, .) * b(.) on [0, T], for an arbitrary t in [0, T].
std::vector<double> green_weights(double sigma, double period, std::size_t intervals, double t,
                                  QuadratureRule rule);

enum class KernelComponent { k1, k2, k1_plus_k2, k1_minus_k2 };

/// Quadrature of the chosen kernel combination against nodal values b
/// (b.size() == intervals + 1) at an arbitrary t.
double integrate_kernel(const KernelPair &kp, KernelComponent which, double t, std::size_t intervals,
                        QuadratureRule rule, const std::vector<double> &b);

/// Quadrature of the kernel mass int_0^T k(t, s) ds.
double kernel_mass(const KernelPair &kp, KernelComponent which, double t, std::size_t intervals,
                   QuadratureRule rule);

/// Dense Nystrom weights for k1 and k2 at the grid nodes, row-major
/// (N+1) x (N+1): w1[i*(N+1)+j] weights node j when evaluating at node i.
struct KernelWeights
{
   std::size_t intervals = 0;
   QuadratureRule rule = QuadratureRule::product_trapezoid;
   std::vector<double> w1;
   std::vector<double> w2;

   std::size_t nodes() const { return intervals + 1; }
   const double *row1(std::size_t i) const { return w1.data() + i * nodes(); }
   const double *row2(std::size_t i) const { return w2.data() + i * nodes(); }
};

KernelWeights discretize(const KernelPair &kp, std::size_t intervals, QuadratureRule rule);

} // namespace coupled

#endif
