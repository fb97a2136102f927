#include "isogap/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace isogap {

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on Legendre polynomials from the Chebyshev-like
  // initial guess; standard and accurate to ~1e-15 for the sizes used here.
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

SphereQuadrature sphere_quadrature_degree(int degree) {
  if (degree < 0) throw std::invalid_argument("negative quadrature degree");
  int n_polar = degree / 2 + 1;
  int n_azimuth = degree + 1;
  GaussRule polar = gauss_legendre(n_polar);
  SphereQuadrature q;
  q.exact_degree = degree;
  q.nodes.reserve(static_cast<std::size_t>(n_polar) * n_azimuth);
  q.weights.reserve(q.nodes.capacity());
  for (int i = 0; i < n_polar; ++i) {
    double ct = polar.nodes[i];
    double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    double w = polar.weights[i] / (2.0 * n_azimuth);
    for (int j = 0; j < n_azimuth; ++j) {
      double phi = 2.0 * M_PI * j / n_azimuth;
      q.nodes.emplace_back(st * std::cos(phi), st * std::sin(phi), ct);
      q.weights.push_back(w);
    }
  }
  return q;
}

SphereQuadrature sphere_quadrature(int band_limit, int margin) {
  if (band_limit < 0 || margin < 0)
    throw std::invalid_argument("sphere_quadrature needs band_limit, margin >= 0");
  return sphere_quadrature_degree(2 * band_limit + margin);
}

So3Quadrature so3_quadrature(int band_limit, int margin) {
  if (band_limit < 0 || margin < 0)
    throw std::invalid_argument("so3_quadrature needs band_limit, margin >= 0");
  int degree = 2 * band_limit + margin;
  int n_angle = degree + 1;
  int n_beta = degree / 2 + 1;
  GaussRule beta = gauss_legendre(n_beta);
  So3Quadrature q;
  q.exact_degree = degree;
  q.alpha.resize(n_angle);
  q.gamma.resize(n_angle);
  for (int i = 0; i < n_angle; ++i) {
    q.alpha[i] = 2.0 * M_PI * i / n_angle;
    q.gamma[i] = q.alpha[i];
  }
  q.beta_cos = beta.nodes;
  q.beta_weights.resize(n_beta);
  for (int i = 0; i < n_beta; ++i) q.beta_weights[i] = beta.weights[i] / 2.0;
  return q;
}

}  // namespace isogap
