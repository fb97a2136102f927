#include "isogap/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <Eigen/QR>

#include "isogap/errors.hpp"
#include "isogap/harmonics.hpp"
#include "isogap/rng.hpp"

namespace isogap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

Complex minus_i_pow(int l) {
  switch (l & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

double common_fixed_point_residual(const AtomicMeasure& mu, Vec3* argmin) {
  const int n = static_cast<int>(mu.size());
  Eigen::MatrixXd a(3 * n, 3);
  Eigen::VectorXd b(3 * n);
  for (int i = 0; i < n; ++i) {
    const Atom& atom = mu.atoms()[i];
    double sw = std::sqrt(atom.weight);
    a.middleRows(3 * i, 3) = sw * (atom.g.rotation() - Mat3::Identity());
    b.segment(3 * i, 3) = -sw * atom.g.translation();
  }
  Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
  if (argmin) *argmin = x;
  return (a * x - b).norm();
}

void ensure_admissible(const AtomicMeasure& mu, int rotation_band) {
  if (!mu.is_symmetric())
    throw PreflightError("not-symmetric",
                         "measure is not symmetric under inversion");
  if (rotation_gap(mu, rotation_band).no_gap)
    throw PreflightError("no-rotation-gap",
                         "rotation parts have no spectral gap at band " +
                             std::to_string(rotation_band));
  if (common_fixed_point_residual(mu) <= 1e-8)
    throw PreflightError("common-fixed-point",
                         "the support has a common fixed point");
}

ConjugationReport conjugation_check(const AtomicMeasure& mu, const Vec3& a,
                                    const Mat3& h, int band_limit, int margin) {
  So3Assembler assembler(band_limit, margin);
  MatrixXcd ta = assembler.operator_matrix(mu, a);
  MatrixXcd tb = assembler.operator_matrix(mu, h * a);
  MatrixXcd s = assembler.right_translation(h);
  ConjugationReport rep;
  rep.norm_a = operator_norm(ta).value;
  rep.norm_b = operator_norm(tb).value;
  rep.norm_difference = std::abs(rep.norm_b - rep.norm_a);
  rep.conjugation_residual =
      operator_norm(MatrixXcd(tb - s * ta * s.adjoint())).value;
  return rep;
}

DominationReport radial_domination_check(const AtomicMeasure& mu, const Vec3& x,
                                         int sphere_band, int so3_band,
                                         int sphere_margin, int so3_margin) {
  DominationReport rep;
  SphereAssembler sphere(sphere_band, sphere_margin);
  rep.sphere_norm = operator_norm(sphere.operator_matrix(mu, x.norm())).value;
  So3Assembler so3(so3_band, so3_margin);
  rep.so3_norm = operator_norm(so3.operator_matrix(mu, x)).value;
  rep.slack = rep.so3_norm - rep.sphere_norm;
  return rep;
}

ConstantsOracleReport constants_oracle(const So3Assembler& assembler,
                                       const AtomicMeasure& mu, const Vec3& x) {
  const int band = assembler.band_limit();
  const int dim = assembler.dim();

  // Assembled image of the constant basis vector.
  VectorXcd assembled = VectorXcd::Zero(dim);
  for (const Atom& atom : mu.atoms())
    assembled += atom.weight * assembler.atom_operator(atom.g, x).col(0);

  // Closed form: the rotation part acts trivially on constants, and the
  // phase column is a Bessel-weighted rank-one product in (m, n).
  VectorXcd expected = VectorXcd::Zero(dim);
  const double xn = x.norm();
  Mat3 rx = Mat3::Identity();
  if (xn > 0.0) rx = rotation_between(Vec3(0, 0, 1), x);
  for (const Atom& atom : mu.atoms()) {
    const double vn = atom.g.translation().norm();
    if (xn * vn == 0.0) {
      expected[0] += atom.weight;
      continue;
    }
    Mat3 rv = rotation_between(Vec3(0, 0, 1), atom.g.translation());
    double t = kTwoPi * xn * vn;
    for (int l = 0; l <= band; ++l) {
      MatrixXcd dv = wigner_d(l, rv);
      MatrixXcd dxinv = wigner_d(l, Mat3(rx.transpose()));
      Complex scale = atom.weight * std::sqrt(2.0 * l + 1.0) * minus_i_pow(l) *
                      bessel_j(l, t);
      for (int m = -l; m <= l; ++m)
        for (int n = -l; n <= l; ++n)
          expected[assembler.index(l, m, n)] +=
              scale * std::conj(dv(m + l, l)) * std::conj(dxinv(l, n + l));
    }
  }

  ConstantsOracleReport rep;
  rep.max_column_error = (assembled - expected).cwiseAbs().maxCoeff();

  AtomicMeasure folded = convolve(mu.reverse(), mu);
  double expect_sq = 0.0;
  for (const Atom& atom : folded.atoms())
    expect_sq +=
        atom.weight * bessel_j(0, kTwoPi * xn * atom.g.translation().norm());
  rep.norm_identity_error = std::abs(assembled.squaredNorm() - expect_sq);
  return rep;
}

ConstantsOracleReport constants_oracle(const AtomicMeasure& mu, const Vec3& x,
                                       int band_limit, int margin) {
  So3Assembler assembler(band_limit, margin);
  return constants_oracle(assembler, mu, x);
}

SmallXReport small_x_check(const AtomicMeasure& mu,
                           const std::vector<double>& grid,
                           const Vec3& direction, int band_limit, int margin) {
  if (direction.norm() == 0.0)
    throw std::invalid_argument("small_x_check needs a nonzero direction");
  Vec3 dir = direction.normalized();
  // Every quantity below depends on x only through |x| (T_0 and b0 are
  // right-translation invariant), so an axial direction is not a special
  // case mathematically, but it unlocks the weight-block shift norm where
  // the full-matrix solver can stall on clustered spectra.
  bool axial = std::abs(std::abs(dir.z()) - 1.0) < 1e-14;
  So3Assembler assembler(band_limit, margin);
  MatrixXcd t0 = assembler.operator_matrix(mu, Vec3::Zero());
  const double c = mu.moments().second_moment;

  SmallXReport rep;
  rep.second_moment = c;
  rep.min_shift_slack = rep.min_square_slack =
      std::numeric_limits<double>::infinity();
  VectorXcd b0 = VectorXcd::Zero(assembler.dim());
  b0[0] = 1.0;
  for (double r : grid) {
    MatrixXcd t = assembler.operator_matrix(mu, r * dir);
    SmallXPoint pt;
    pt.x = r;
    pt.lhs_shift = axial ? weight_block_norm(assembler, MatrixXcd(t - t0)).value
                         : operator_norm(MatrixXcd(t - t0)).value;
    pt.rhs_shift = kTwoPi * std::sqrt(c) * r;
    pt.lhs_square = (t * (t * b0) - b0).norm();
    pt.rhs_square = 8.0 * M_PI * M_PI * c * r * r;
    pt.lhs_energy = (t * b0).squaredNorm();
    pt.rhs_energy = 1.0 - (2.0 * M_PI * M_PI * c / 3.0) * r * r;
    rep.min_shift_slack = std::min(rep.min_shift_slack, pt.rhs_shift - pt.lhs_shift);
    rep.min_square_slack =
        std::min(rep.min_square_slack, pt.rhs_square - pt.lhs_square);
    rep.points.push_back(pt);
  }
  auto prefix = [&](auto lhs, auto rhs, double slack) {
    int k = 0;
    for (const SmallXPoint& pt : rep.points) {
      if (lhs(pt) > rhs(pt) + slack) break;
      ++k;
    }
    return k;
  };
  rep.shift_prefix = prefix([](const SmallXPoint& p) { return p.lhs_shift; },
                            [](const SmallXPoint& p) { return p.rhs_shift; }, 1e-8);
  rep.square_prefix = prefix([](const SmallXPoint& p) { return p.lhs_square; },
                             [](const SmallXPoint& p) { return p.rhs_square; }, 1e-8);
  rep.energy_prefix = prefix([](const SmallXPoint& p) { return p.lhs_energy; },
                             [](const SmallXPoint& p) { return p.rhs_energy; }, 1e-9);
  return rep;
}

C0Fit fit_c0(const std::vector<ProfilePoint>& points,
             const std::vector<double>& t_norms) {
  if (!t_norms.empty() && t_norms.size() != points.size())
    throw std::invalid_argument("t_norms must match the profile grid");
  C0Fit fit;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].r <= 0.0) continue;
    double denom = std::min(points[i].r * points[i].r, 1.0);
    double ratio = points[i].one_minus_norm / denom;
    if (!t_norms.empty())
      ratio = std::min(ratio, (1.0 - t_norms[i]) / denom);
    if (ratio <= 1e-6) fit.floor_hit = true;
    if (ratio < best) {
      best = ratio;
      fit.attaining_index = static_cast<int>(i);
    }
  }
  fit.c0 = std::isfinite(best) ? best : 0.0;
  return fit;
}

double fit_exponent(const std::vector<ProfilePoint>& points, int* n_used) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const ProfilePoint& pt : points) {
    if (pt.r < 0.1 - 1e-12 || pt.r > 0.5 + 1e-12) continue;
    if (pt.one_minus_norm <= 0.0) continue;
    double lx = std::log(pt.r), ly = std::log(pt.one_minus_norm);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n;
  }
  if (n_used) *n_used = n;
  if (n < 2) return 0.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

GapProfile gap_profile(const AtomicMeasure& mu, std::vector<double> grid,
                       int band_limit, int margin, int rotation_band,
                       int threads) {
  if (grid.empty()) throw UsageError("bad-grid", "empty radius grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw UsageError("bad-grid", "radius grid must be strictly increasing");
  if (grid.front() != 0.0)
    throw UsageError("bad-grid", "radius grid must start at 0");
  if (grid.back() < 1.0)
    throw UsageError("bad-grid", "radius grid must reach a point >= 1");
  ensure_admissible(mu, rotation_band);

  GapProfile profile;
  profile.rotation = rotation_gap(mu, rotation_band);
  profile.points.resize(grid.size());

  SphereAssembler assembler(band_limit, margin);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= grid.size()) return;
      MatrixXcd m = assembler.operator_matrix(mu, grid[i]);
      NormEstimate est = operator_norm(m);
      ProfilePoint& pt = profile.points[i];
      pt.r = grid[i];
      pt.norm = est.value;
      pt.one_minus_norm = 1.0 - est.value;
      pt.band_limit = band_limit;
      pt.margin = margin;
      pt.method = est.method == NormEstimate::Method::power ? "power" : "dense";
      pt.residual = est.residual;
    }
  };
  int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(grid.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  profile.c0 = fit_c0(profile.points);
  profile.fitted_exponent = fit_exponent(profile.points, &profile.exponent_points);
  return profile;
}

double truncation_stability(const AtomicMeasure& mu,
                            const std::vector<double>& probes, int band_low,
                            int band_high, int margin) {
  SphereAssembler low(band_low, margin), high(band_high, margin);
  double worst = 0.0;
  for (double r : probes) {
    double a = operator_norm(low.operator_matrix(mu, r)).value;
    double b = operator_norm(high.operator_matrix(mu, r)).value;
    worst = std::max(worst, std::abs(a - b));
  }
  return worst;
}

ReductionReport reduction_pipeline(const AtomicMeasure& mu, int rotation_band,
                                   int sphere_band,
                                   const std::vector<double>& probe_radii) {
  ensure_admissible(mu, rotation_band);
  ReductionReport rep;
  rep.alpha = rotation_gap(mu, rotation_band).alpha;

  // Smallest truncation radius dropping less than alpha / 2 of the mass.
  std::vector<double> radii;
  for (const Atom& atom : mu.atoms()) radii.push_back(atom.g.translation().norm());
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
  bool found = false;
  for (double s : radii) {
    double dropped = 0.0;
    for (const Atom& atom : mu.atoms())
      if (atom.g.translation().norm() > s) dropped += atom.weight;
    if (dropped < rep.alpha / 2.0) {
      rep.s = s;
      found = true;
      break;
    }
  }
  if (!found)
    throw PreflightError("no-compact-core",
                         "no truncation radius keeps mass > 1 - alpha/2");
  AtomicMeasure mu_s = truncate_restrict(mu, rep.s, &rep.beta);
  rep.alpha_s = rotation_gap(mu_s, rotation_band).alpha;
  rep.transfer_lower =
      1.0 - (1.0 - rep.alpha + rep.beta) / (1.0 - rep.beta) - 1e-8;

  rep.fixed_pt = fixed_point(mu_s);
  AtomicMeasure mu1 = center(mu_s);
  rep.centered_mean = mu1.moments().mean_translation.norm();
  rep.alpha1 = rotation_gap(mu1, rotation_band).alpha;

  if (rep.alpha1 <= 1e-6)
    throw PreflightError("no-rotation-gap",
                         "rotation gap lost after truncation");
  rep.ell = 1;
  double decay = 1.0 - rep.alpha1;
  double acc = decay;
  while (acc > 0.5) {
    acc *= decay;
    ++rep.ell;
  }
  AtomicMeasure mu2 = convolution_power(mu1, rep.ell);
  rep.power_mean = mu2.moments().mean_translation.norm();

  RotationBlocks b1 = rotation_blocks(mu1, rotation_band);
  RotationBlocks b2 = rotation_blocks(mu2, rotation_band);
  for (int l = 0; l <= rotation_band; ++l) {
    MatrixXcd powed = MatrixXcd::Identity(2 * l + 1, 2 * l + 1);
    for (int k = 0; k < rep.ell; ++k) powed = powed * b1.blocks[l];
    rep.block_identity_error = std::max(
        rep.block_identity_error,
        (b2.blocks[l] - powed).cwiseAbs().maxCoeff());
  }

  SphereAssembler assembler(sphere_band);
  for (double r : probe_radii) {
    ReductionReport::RootCheck check;
    check.r = r;
    check.lhs = operator_norm(assembler.operator_matrix(mu, r)).value;
    double power_norm = operator_norm(assembler.operator_matrix(mu2, r)).value;
    check.rhs = (1.0 - rep.beta) * std::pow(power_norm, 1.0 / rep.ell) + rep.beta;
    rep.root_checks.push_back(check);
  }

  rep.mu1.emplace(std::move(mu1));
  rep.mu2.emplace(std::move(mu2));
  return rep;
}

DirichletReport dirichlet_check(const AtomicMeasure& mu,
                                const std::vector<Vec3>& probes, int n_vectors,
                                double c0, int band_limit, int margin,
                                std::uint64_t seed) {
  for (const Vec3& x : probes)
    if (x.norm() == 0.0)
      throw std::invalid_argument("dirichlet probes must be nonzero");
  So3Assembler assembler(band_limit, margin);
  const int dim = assembler.dim();

  DirichletReport rep;
  rep.c0_used = c0;
  const double kappa = mu.moments().max_radius;
  rep.c1_used = std::max(4.0 * M_PI * M_PI * kappa * kappa, 4.0);
  rep.min_est1_slack = std::numeric_limits<double>::infinity();

  Rng rng(seed);
  for (const Vec3& x : probes) {
    std::vector<MatrixXcd> atom_ops, shift_ops;
    MatrixXcd t = MatrixXcd::Zero(dim, dim);
    for (const Atom& atom : mu.atoms()) {
      atom_ops.push_back(assembler.atom_operator(atom.g, x));
      shift_ops.push_back(assembler.atom_operator(
          Isometry::translation_only(atom.g.translation()), x));
      t += atom.weight * atom_ops.back();
    }
    const double xfac = std::min(x.squaredNorm(), 1.0);
    for (int k = 0; k < n_vectors; ++k) {
      VectorXcd phi(dim);
      for (int i = 0; i < dim; ++i) phi[i] = Complex(rng.normal(), rng.normal());
      phi.normalize();

      double dirichlet = 0.0;
      for (std::size_t gi = 0; gi < atom_ops.size(); ++gi) {
        double diff = 2.0 - 2.0 * std::real(phi.dot(atom_ops[gi] * phi));
        dirichlet += mu.atoms()[gi].weight * diff;

        double shift_diff =
            2.0 - 2.0 * std::real(phi.dot(shift_ops[gi] * phi));
        rep.max_est2_ratio = std::max(
            rep.max_est2_ratio, shift_diff / (rep.c1_used * xfac));
      }
      double via_t = 2.0 - 2.0 * std::real(phi.dot(t * phi));
      rep.max_identity_residual =
          std::max(rep.max_identity_residual, std::abs(dirichlet - via_t));
      rep.min_est1_slack =
          std::min(rep.min_est1_slack, dirichlet - 2.0 * c0 * xfac);
      ++rep.pairs;
    }
  }
  rep.est1_holds = rep.min_est1_slack >= -1e-6;
  rep.est2_holds = rep.max_est2_ratio <= 1.0 + 1e-9;
  return rep;
}

}  // namespace isogap
