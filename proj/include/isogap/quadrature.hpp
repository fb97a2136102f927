#pragma once

#include <vector>

#include "isogap/geometry.hpp"

namespace isogap {

// Gauss-Legendre nodes and weights on [-1, 1]; exact for polynomials of
// degree <= 2n - 1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times
// equispaced azimuth.  Weights sum to one (normalized surface measure),
// and the rule integrates spherical harmonics exactly through the stated
// degree.
struct SphereQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
  int exact_degree = 0;
};
SphereQuadrature sphere_quadrature(int band_limit, int margin = 8);

// Same rule built directly from a target polynomial degree.
SphereQuadrature sphere_quadrature_degree(int degree);

// Product Euler-angle rule on the rotation group: equispaced alpha and
// gamma, Gauss-Legendre in cos(beta).  Weights sum to one (normalized
// Haar) and matrix coefficients of degree <= exact_degree integrate
// exactly.  Nodes are kept in factored form: rotation(a,b,c) =
// Rz(alpha[a]) Ry(beta[b]) Rz(gamma[c]) with weight
// beta_weights[b] / (n_alpha * n_gamma).
struct So3Quadrature {
  std::vector<double> alpha;
  std::vector<double> beta_cos;     // cos(beta) Gauss nodes
  std::vector<double> beta_weights; // normalized so all weights sum to 1
  std::vector<double> gamma;
  int exact_degree = 0;
};
So3Quadrature so3_quadrature(int band_limit, int margin);

}  // namespace isogap
