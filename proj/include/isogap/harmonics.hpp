#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "isogap/geometry.hpp"

namespace isogap {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;

// Wigner little-d matrix d^l(beta), indexed d(m + l, n + l) for
// m, n in [-l, l].  Computed through the Jacobi-polynomial form with
// cos/sin half-angle prefactors, which recurses stably in the polynomial
// degree (no cancelling factorial sums).
Eigen::MatrixXd wigner_little_d(int l, double beta);

// Full Wigner matrix D^l(R) in the z-y-z convention
//   D^l_{m n}(alpha, beta, gamma) = e^{-i m alpha} d^l_{m n}(beta) e^{-i n gamma},
// so that D^l(R1 R2) = D^l(R1) D^l(R2) and a rotation by phi about z gives
// diag(e^{-i m phi}).  Rows and columns are indexed m + l, n + l.
MatrixXcd wigner_d(int l, const Mat3& rotation);
MatrixXcd wigner_d(int l, const EulerZyz& euler);

// All degrees 0..band_limit at once (shared Euler extraction).
std::vector<MatrixXcd> wigner_d_stack(int band_limit, const Mat3& rotation);

// Complex spherical harmonics normalized against the *normalized* sphere
// measure: <Y_lm, Y_l'm'> = delta delta with total measure one, so
// Y_00 = 1 and Y_10 = sqrt(3) z.  Condon-Shortley phase; and
// Y_{l,-m} = (-1)^m conj(Y_{lm}).  Under rotations,
//   Y_lm(R^-1 xi) = sum_k D^l_{k m}(R) Y_lk(xi).
// Output is indexed by (l, m) -> l^2 + l + m for l <= band_limit.
void sh_eval(int band_limit, const Vec3& unit_dir, Complex* out);
std::vector<Complex> sh_eval(int band_limit, const Vec3& unit_dir);

inline int sh_index(int l, int m) { return l * l + l + m; }
inline int sh_count(int band_limit) { return (band_limit + 1) * (band_limit + 1); }

// Legendre polynomial P_l (used by addition-theorem style identities).
double legendre_p(int l, double x);

// Spherical Bessel function j_l(t); j_0 = sin t / t, |j_l| <= 1,
// relative accuracy ~1e-12 over the ranges used here.
double bessel_j(int l, double t);

}  // namespace isogap
