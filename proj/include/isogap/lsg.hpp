#pragma once

#include <optional>
#include <vector>

#include "isogap/geometry.hpp"
#include "isogap/harmonics.hpp"

namespace isogap {

// ---------------------------------------------------------------------------
// Regions

struct Region {
  enum class Kind { box, ball };
  Kind kind = Kind::box;
  Vec3 center = Vec3::Zero();
  Vec3 half_extent = Vec3::Ones();  // box only
  double radius = 1.0;              // ball only
};

Region box_region(const Vec3& center, const Vec3& half_extent);
Region ball_region(const Vec3& center, double radius);

double region_volume(const Region& region);

// Closed-form integral of e^{i kappa . x} over the region: a sinc product
// for boxes, 4 pi R^3 j1(|kappa| R)/(|kappa| R) for balls, both carrying
// the center phase.  Used as the exact oracle for the quadrature assembly.
Complex region_plane_wave_integral(const Region& region, const Vec3& kappa);

// Axis-aligned bounding box of the region and all its g^-1 images for g in
// the generator set, grown by padding on every side.
Region enclosing_box(const Region& region, const std::vector<Isometry>& generators,
                     double padding);

// ---------------------------------------------------------------------------
// Periodic trigonometric basis on a box

// e_k(x) = exp(i 2 pi sum_i k_i (x_i - c_i) / ext_i), k in [-n, n]^3,
// orthogonal over the box.  Flat index runs z fastest.
class TrigBasis {
public:
  TrigBasis(const Vec3& center, const Vec3& extent, int n);

  int n() const { return n_; }
  int dim() const { return dim_; }
  const Vec3& center() const { return center_; }
  const Vec3& extent() const { return extent_; }

  int index(int kx, int ky, int kz) const {
    int w = 2 * n_ + 1;
    return ((kx + n_) * w + (ky + n_)) * w + (kz + n_);
  }
  Vec3 wavevector(int flat) const;
  Complex eval(int flat, const Vec3& x) const;
  // All basis values at once through per-axis phase recurrences.
  void eval_all(const Vec3& x, Complex* out) const;

private:
  Vec3 center_;
  Vec3 extent_;
  int n_;
  int dim_;
};

// ---------------------------------------------------------------------------
// Quadrature over a region

struct RegionQuadrature {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // sum to the region volume
};

// Rule resolving plane waves with |kappa| <= max_wavenumber to ~1e-12:
// tensor Gauss-Legendre on boxes, radial Gauss times a sphere product rule
// on balls.  extra adds nodes beyond the resolution estimate (used to build
// the independent finer rule for witness rechecks).
RegionQuadrature region_quadrature(const Region& region, double max_wavenumber,
                                   int extra = 0);

// ---------------------------------------------------------------------------
// Local gap estimate

struct LsgOptions {
  int basis_n = 3;
  // Slack added around the hull of the region and its images.  The mass
  // matrix conditioning degrades exponentially in basis_n times the ratio
  // of basis box to region, so keep this small.
  double padding = 0.05;
  std::optional<Region> basis_box;  // must contain the region and its images
  int extra_nodes = 0;
};

struct LsgEstimate {
  double lambda_min = 0.0;
  double kappa_bound = 0.0;  // sqrt(|F|) / sqrt(lambda_min)
  bool no_gap = false;
  int basis_n = 0;
  int basis_dim = 0;
  int generators = 0;
  double mass_condition = 0.0;
  double eig_residual = 0.0;
  Region region;
  Region basis_box;
  VectorXcd witness;  // basis coefficients, normalized to unit L^2(B) norm
  double witness_mean_error = 0.0;    // |int_B phi| on the assembly rule
  double witness_norm_error = 0.0;    // | ||phi||_B - 1 | on the assembly rule
  double witness_mean_recheck = 0.0;  // same, on the independent finer rule
  double witness_norm_recheck = 0.0;
};

// Smallest constrained Rayleigh quotient
//   lambda_min = min { sum_g ||phi(g^-1 .) - phi||^2_B / ||phi||^2_B :
//                      int_B phi = 0 }
// over the trig basis span.  Any function with small quotient certifies a
// weak local gap; lambda_min > 0 certifies
//   ||phi - avg_B phi||_B <= kappa_bound * max_g ||phi(g^-1 .) - phi||_B.
// Comparisons across generator sets or basis sizes are only meaningful at a
// fixed basis box; pass options.basis_box to pin it.
//
// Throws UsageError("no-generators") on an empty set,
// PreflightError("region-escapes-basis") when a supplied basis box does not
// contain every g^-1 image, NumericalError("mass-matrix-singular") when the
// restricted Gram is numerically singular, and
// NumericalError("indefinite-form") if the solved minimum falls below
// -1e-10.
LsgEstimate lsg_estimate(const Region& region,
                         const std::vector<Isometry>& generators,
                         const LsgOptions& options = {});

}  // namespace isogap
