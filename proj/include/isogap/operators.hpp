#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isogap/harmonics.hpp"
#include "isogap/measure.hpp"
#include "isogap/quadrature.hpp"

namespace isogap {

// ---------------------------------------------------------------------------
// Norm estimation

struct NormEstimate {
  double value = 0.0;
  double residual = 0.0;  // eigen-residual of the accepted top pair, scaled
  int iterations = 0;
  enum class Method { power, dense } method = Method::dense;
};

// Largest singular value.  Power iteration on A*A with a seeded random
// start (tolerance 1e-12 on the Rayleigh quotient, at most 1e4 steps);
// small matrices and non-converged iterations fall back to a dense solve.
NormEstimate operator_norm(const MatrixXcd& a,
                           std::uint64_t seed = 0x243f6a8885a308d3ULL);

// ---------------------------------------------------------------------------
// Averaging operator restricted to rotations

// Rotation-part averages in each irreducible band: block l is
// sum_g w_g D^l(R_g), the matrix of the averaged rotation action on
// degree-l spherical harmonics.  Block 0 is always [1]; the map
// measure -> blocks is multiplicative under convolution.
struct RotationBlocks {
  int band_limit = 0;
  std::vector<MatrixXcd> blocks;
};
RotationBlocks rotation_blocks(const AtomicMeasure& mu, int band_limit);

// Spectral gap of the rotation average away from constants:
// alpha = 1 - max_{1 <= l <= L} ||block_l||.  no_gap flags alpha <= 1e-6.
struct RotationGap {
  double alpha = 0.0;
  int attaining_l = 0;
  bool no_gap = true;
  std::vector<double> block_norms;  // index l, entry ||block_l||
};
RotationGap rotation_gap(const AtomicMeasure& mu, int band_limit);

// ---------------------------------------------------------------------------
// Band-limited assembled operators

struct BandLimitedOperator {
  enum class Basis { sphere, rotation_group };
  Basis basis = Basis::sphere;
  int band_limit = 0;
  int margin = 0;
  double radius = 0.0;    // sphere family parameter r
  Vec3 x = Vec3::Zero();  // rotation-group family parameter x
  std::string measure_label;
  MatrixXcd matrix;
};

// Averaging operator of mu in the unitary family acting on L^2 of the
// sphere: atoms act by phi -> e^{-2 pi i r <xi, v>} phi(R^-1 xi).
// Basis: orthonormal spherical harmonics through degree L; assembly by
// quadrature exact to degree 2L + margin.
class SphereAssembler {
public:
  SphereAssembler(int band_limit, int margin = 8);

  int dim() const { return sh_count(band_limit_); }
  int band_limit() const { return band_limit_; }
  int margin() const { return margin_; }

  MatrixXcd atom_operator(const Isometry& g, double radius) const;
  MatrixXcd operator_matrix(const AtomicMeasure& mu, double radius) const;

private:
  int band_limit_;
  int margin_;
  SphereQuadrature quad_;
  MatrixXcd eval_;      // nodes x basis
  MatrixXcd adj_eval_;  // basis x nodes, quadrature weights folded in
};

BandLimitedOperator sphere_operator(const AtomicMeasure& mu, double radius,
                                    int band_limit, int margin = 8);

// Averaging operator of mu acting on L^2 of the rotation group: atoms act
// by phi -> e^{-2 pi i <omega x, v>} phi(R^-1 omega).  Basis: orthonormal
// Peter-Weyl matrix coefficients sqrt(2l+1) D^l_{mn}(omega) for l <= L,
// indexed (l, m, n) with n fastest; dimension (L+1)(2L+1)(2L+3)/3.
//
// Assembly uses the factored Euler-angle rule: the multiplication symbol
// is reduced over the two equispaced angles to Fourier data F_b(p, q),
// leaving a short Gauss sum per matrix entry; the rotation part then acts
// exactly through block-diagonal left translation.
class So3Assembler {
public:
  So3Assembler(int band_limit, int margin = 16);

  int dim() const { return dim_; }
  int band_limit() const { return band_limit_; }
  int margin() const { return margin_; }
  int index(int l, int m, int n) const {
    return offsets_[l] + (m + l) * (2 * l + 1) + (n + l);
  }

  MatrixXcd atom_operator(const Isometry& g, const Vec3& x) const;
  MatrixXcd operator_matrix(const AtomicMeasure& mu, const Vec3& x) const;

  // Left translation by a rotation (the x = 0 atom operator).
  MatrixXcd left_translation(const Mat3& r) const;
  // Right regular representation of a rotation; commutes with every
  // left translation and intertwines the x and h*x operator families.
  MatrixXcd right_translation(const Mat3& h) const;

private:
  MatrixXcd phase_matrix(const Vec3& x, const Vec3& v) const;

  int band_limit_;
  int margin_;
  int dim_;
  std::vector<int> offsets_;
  So3Quadrature quad_;
  // dvecs_[l]((m,n) flat, b) = sqrt(2l+1) d^l_{mn}(beta_b)
  std::vector<Eigen::MatrixXd> dvecs_;
};

int so3_basis_dim(int band_limit);

BandLimitedOperator so3_operator(const AtomicMeasure& mu, const Vec3& x,
                                 int band_limit, int margin = 16);

// Norm through the invariant weight spaces of the right z-rotation action.
// Operators attached to x along the z axis commute with that action, so
// their matrices split over the right index n into blocks small enough for
// the dense solver; the norm is the largest block norm.  Valid only for
// matrices with that symmetry (T_{r e3}, differences of such, ...);
// off_block reports the Frobenius mass outside the blocks, which is pure
// quadrature aliasing and vanishes as the margin grows.  Norms at equal
// |x| in any direction agree through the right-translation equivalence.
struct WeightBlockNorm {
  double value = 0.0;
  double off_block = 0.0;
};
WeightBlockNorm weight_block_norm(const So3Assembler& assembler,
                                  const MatrixXcd& matrix);
WeightBlockNorm axial_so3_norm(const So3Assembler& assembler,
                               const AtomicMeasure& mu, double r);

}  // namespace isogap
