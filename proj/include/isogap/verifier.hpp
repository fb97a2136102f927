#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "isogap/measure.hpp"
#include "isogap/operators.hpp"

namespace isogap {

// ---------------------------------------------------------------------------
// Admissibility preflights

// Residual of the best common fixed point of the support: the least-squares
// value of min_x sum_g w_g |g(x) - x|^2, reported as sqrt.  A residual
// below ~1e-8 means the whole support fixes a point.
double common_fixed_point_residual(const AtomicMeasure& mu, Vec3* argmin = nullptr);

// Throws PreflightError unless mu is symmetric ("not-symmetric"), has a
// rotation spectral gap at the given band ("no-rotation-gap"), and moves
// every point ("common-fixed-point").
void ensure_admissible(const AtomicMeasure& mu, int rotation_band = 8);

// ---------------------------------------------------------------------------
// Structural identities of the operator family

// The x and h x operators are unitarily equivalent through the right
// regular action of h.  Reports the assembled mismatch.
struct ConjugationReport {
  double norm_a = 0.0;
  double norm_b = 0.0;
  double norm_difference = 0.0;       // | ||T_b|| - ||T_a|| |
  double conjugation_residual = 0.0;  // || T_b - S T_a S^* ||
};
ConjugationReport conjugation_check(const AtomicMeasure& mu, const Vec3& a,
                                    const Mat3& h, int band_limit,
                                    int margin = 16);

// The sphere family is a quotient of the rotation-group family, so its
// norm never exceeds the rotation-group norm at matching radius.
struct DominationReport {
  double sphere_norm = 0.0;
  double so3_norm = 0.0;
  double slack = 0.0;  // so3_norm - sphere_norm
};
DominationReport radial_domination_check(const AtomicMeasure& mu, const Vec3& x,
                                         int sphere_band, int so3_band,
                                         int sphere_margin = 8,
                                         int so3_margin = 16);

// Closed-form check of the constant-function column: entries of T_x b0
// are Bessel-weighted rank-one products, and ||T_x b0||^2 is the
// j0-average of the convolution square.
struct ConstantsOracleReport {
  double max_column_error = 0.0;
  double norm_identity_error = 0.0;
};
ConstantsOracleReport constants_oracle(const So3Assembler& assembler,
                                       const AtomicMeasure& mu, const Vec3& x);
ConstantsOracleReport constants_oracle(const AtomicMeasure& mu, const Vec3& x,
                                       int band_limit, int margin = 8);

// ---------------------------------------------------------------------------
// Small-displacement estimates
//
// With C the second moment of the translation lengths, a centered
// symmetric measure satisfies, for small |x|:
//   (shift)   ||T_x - T_0||      <= 2 pi sqrt(C) |x|
//   (square)  ||T_x^2 b0 - b0||  <= 8 pi^2 C |x|^2
//   (energy)  ||T_x b0||^2       <= 1 - (2 pi^2 C / 3) |x|^2
// The shift bound is global; the report records the maximal grid prefix on
// which each inequality holds together with the worst slack seen.

struct SmallXPoint {
  double x = 0.0;
  double lhs_shift = 0.0, rhs_shift = 0.0;
  double lhs_square = 0.0, rhs_square = 0.0;
  double lhs_energy = 0.0, rhs_energy = 0.0;
};
struct SmallXReport {
  std::vector<SmallXPoint> points;
  int shift_prefix = 0;
  int square_prefix = 0;
  int energy_prefix = 0;
  double min_shift_slack = 0.0;   // min over grid of rhs - lhs
  double min_square_slack = 0.0;  // min over grid of rhs - lhs
  double second_moment = 0.0;
};
SmallXReport small_x_check(const AtomicMeasure& mu,
                           const std::vector<double>& grid, const Vec3& direction,
                           int band_limit = 8, int margin = 16);

// ---------------------------------------------------------------------------
// Gap profile of the sphere family

struct ProfilePoint {
  double r = 0.0;
  double norm = 0.0;
  double one_minus_norm = 0.0;
  int band_limit = 0;
  int margin = 0;
  std::string method;
  double residual = 0.0;
};

struct C0Fit {
  double c0 = 0.0;
  int attaining_index = -1;
  bool floor_hit = false;  // some ratio fell to <= 1e-6: no usable gap
};
// c0 = min over r > 0 of (1 - norm) / min(r^2, 1), taken over the sphere
// column and, when given, a matching rotation-group norm column.
C0Fit fit_c0(const std::vector<ProfilePoint>& points,
             const std::vector<double>& t_norms = {});

// Least-squares slope of log(1 - norm) against log r over grid radii in
// [0.1, 0.5]; point count used is returned through n_used.
double fit_exponent(const std::vector<ProfilePoint>& points, int* n_used = nullptr);

struct GapProfile {
  std::vector<ProfilePoint> points;
  RotationGap rotation;
  C0Fit c0;
  double fitted_exponent = 0.0;
  int exponent_points = 0;
};

// Norm profile r -> ||S_r|| over the given radii.  Requires a symmetric
// admissible measure and a grid containing 0 and a point >= 1 (sorted
// ascending, no duplicates).  Points are computed independently (and in
// parallel when threads > 1) with identical results either way.
GapProfile gap_profile(const AtomicMeasure& mu, std::vector<double> grid,
                       int band_limit = 12, int margin = 8,
                       int rotation_band = 8, int threads = 1);

// Max norm change between two band limits over probe radii.
double truncation_stability(const AtomicMeasure& mu,
                            const std::vector<double>& probes, int band_low,
                            int band_high, int margin = 8);

// ---------------------------------------------------------------------------
// Reduction to a compact centered measure

struct ReductionReport {
  double alpha = 0.0;        // rotation gap of the input
  double s = 0.0;            // truncation radius
  double beta = 0.0;         // mass dropped by truncation
  double alpha_s = 0.0;      // rotation gap after truncation
  double transfer_lower = 0.0;  // guaranteed lower bound for alpha_s
  Vec3 fixed_pt = Vec3::Zero();
  double centered_mean = 0.0;  // |mean translation| after centering
  double alpha1 = 0.0;         // rotation gap of the centered measure
  int ell = 0;                 // minimal power with (1 - alpha1)^ell <= 1/2
  double power_mean = 0.0;     // |mean translation| of the power
  double block_identity_error = 0.0;  // rotation blocks of power vs power of blocks
  struct RootCheck {
    double r = 0.0;
    double lhs = 0.0;  // ||S_r(mu)||
    double rhs = 0.0;  // (1 - beta) ||S_r(mu2)||^{1/ell} + beta
  };
  std::vector<RootCheck> root_checks;
  std::optional<AtomicMeasure> mu1;  // truncated, centered
  std::optional<AtomicMeasure> mu2;  // ell-fold convolution power of mu1
};
ReductionReport reduction_pipeline(const AtomicMeasure& mu,
                                   int rotation_band = 8, int sphere_band = 8,
                                   const std::vector<double>& probe_radii =
                                       {0.25, 0.75, 1.5});

// ---------------------------------------------------------------------------
// Dirichlet-form estimates on random band-limited vectors
//
// For each probe x and vector phi:
//   identity:  sum_g w_g ||pi_x(g) phi - phi||^2 = 2 Re<(I - T_x) phi, phi>
//   est1:      sum_g w_g ||pi_x(g) phi - phi||^2 >= 2 c0 min(|x|^2, 1) ||phi||^2
//   est2:      ||pi_x(v_g) phi - phi||^2 <= c1 min(|x|^2, 1) ||phi||^2
// with c1 = max(4 pi^2 kappa^2, 4), kappa the largest translation length.
// Per-atom norms use 2||phi||^2 - 2 Re<M_g phi, phi>, exact for band-limited
// phi up to quadrature aliasing.

struct DirichletReport {
  double max_identity_residual = 0.0;
  double min_est1_slack = 0.0;  // min of lhs - rhs over all (phi, x)
  bool est1_holds = false;
  double max_est2_ratio = 0.0;  // max of lhs / rhs over atoms and (phi, x)
  bool est2_holds = false;
  double c0_used = 0.0;
  double c1_used = 0.0;
  int pairs = 0;
};
DirichletReport dirichlet_check(const AtomicMeasure& mu,
                                const std::vector<Vec3>& probes, int n_vectors,
                                double c0, int band_limit = 8, int margin = 16,
                                std::uint64_t seed = 1);

}  // namespace isogap
