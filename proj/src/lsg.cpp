#include "isogap/lsg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "isogap/errors.hpp"
#include "isogap/quadrature.hpp"

namespace isogap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

void region_bounds(const Region& region, Vec3* lo, Vec3* hi) {
  if (region.kind == Region::Kind::box) {
    *lo = region.center - region.half_extent;
    *hi = region.center + region.half_extent;
  } else {
    *lo = region.center - region.radius * Vec3::Ones();
    *hi = region.center + region.radius * Vec3::Ones();
  }
}

// Bounds of the region together with all its g^-1 images.
void swept_bounds(const Region& region, const std::vector<Isometry>& generators,
                  Vec3* lo, Vec3* hi) {
  region_bounds(region, lo, hi);
  for (const Isometry& g : generators) {
    Isometry inv = g.inverse();
    if (region.kind == Region::Kind::ball) {
      Vec3 c = inv(region.center);
      *lo = lo->cwiseMin(c - region.radius * Vec3::Ones());
      *hi = hi->cwiseMax(c + region.radius * Vec3::Ones());
    } else {
      for (int sx : {-1, 1})
        for (int sy : {-1, 1})
          for (int sz : {-1, 1}) {
            Vec3 corner = region.center +
                          Vec3(sx * region.half_extent.x(),
                               sy * region.half_extent.y(),
                               sz * region.half_extent.z());
            Vec3 p = inv(corner);
            *lo = lo->cwiseMin(p);
            *hi = hi->cwiseMax(p);
          }
    }
  }
}

}  // namespace

Region box_region(const Vec3& center, const Vec3& half_extent) {
  if (half_extent.minCoeff() <= 0.0)
    throw std::invalid_argument("box half extents must be positive");
  Region r;
  r.kind = Region::Kind::box;
  r.center = center;
  r.half_extent = half_extent;
  return r;
}

Region ball_region(const Vec3& center, double radius) {
  if (radius <= 0.0) throw std::invalid_argument("ball radius must be positive");
  Region r;
  r.kind = Region::Kind::ball;
  r.center = center;
  r.radius = radius;
  return r;
}

double region_volume(const Region& region) {
  if (region.kind == Region::Kind::box)
    return 8.0 * region.half_extent.prod();
  return 4.0 / 3.0 * M_PI * std::pow(region.radius, 3);
}

Complex region_plane_wave_integral(const Region& region, const Vec3& kappa) {
  Complex center_phase = std::polar(1.0, kappa.dot(region.center));
  if (region.kind == Region::Kind::box) {
    double value = 1.0;
    for (int i = 0; i < 3; ++i) {
      double t = kappa[i] * region.half_extent[i];
      double sinc = std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
      value *= 2.0 * region.half_extent[i] * sinc;
    }
    return center_phase * value;
  }
  double t = kappa.norm() * region.radius;
  double shape;
  if (t < 1e-8)
    shape = 1.0 - t * t / 10.0;
  else
    shape = 3.0 * bessel_j(1, t) / t;
  return center_phase * (4.0 / 3.0 * M_PI * std::pow(region.radius, 3) * shape);
}

Region enclosing_box(const Region& region, const std::vector<Isometry>& generators,
                     double padding) {
  Vec3 lo, hi;
  swept_bounds(region, generators, &lo, &hi);
  lo -= padding * Vec3::Ones();
  hi += padding * Vec3::Ones();
  return box_region(0.5 * (lo + hi), 0.5 * (hi - lo));
}

// ---------------------------------------------------------------------------

TrigBasis::TrigBasis(const Vec3& center, const Vec3& extent, int n)
    : center_(center), extent_(extent), n_(n) {
  if (n < 0) throw std::invalid_argument("basis order must be >= 0");
  if (extent.minCoeff() <= 0.0)
    throw std::invalid_argument("basis extents must be positive");
  dim_ = (2 * n + 1) * (2 * n + 1) * (2 * n + 1);
}

Vec3 TrigBasis::wavevector(int flat) const {
  int w = 2 * n_ + 1;
  int kz = flat % w - n_;
  int ky = (flat / w) % w - n_;
  int kx = flat / (w * w) - n_;
  return Vec3(kTwoPi * kx / extent_.x(), kTwoPi * ky / extent_.y(),
              kTwoPi * kz / extent_.z());
}

Complex TrigBasis::eval(int flat, const Vec3& x) const {
  return std::polar(1.0, wavevector(flat).dot(x - center_));
}

void TrigBasis::eval_all(const Vec3& x, Complex* out) const {
  const int w = 2 * n_ + 1;
  std::vector<Complex> ax(w), ay(w), az(w);
  Complex* axes[3] = {ax.data(), ay.data(), az.data()};
  for (int i = 0; i < 3; ++i) {
    Complex base = std::polar(1.0, kTwoPi * (x[i] - center_[i]) / extent_[i]);
    axes[i][n_] = Complex(1.0, 0.0);
    for (int j = 1; j <= n_; ++j) {
      axes[i][n_ + j] = axes[i][n_ + j - 1] * base;
      axes[i][n_ - j] = std::conj(axes[i][n_ + j]);
    }
  }
  int flat = 0;
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) {
      Complex xy = ax[i] * ay[j];
      for (int k = 0; k < w; ++k) out[flat++] = xy * az[k];
    }
}

// ---------------------------------------------------------------------------

RegionQuadrature region_quadrature(const Region& region, double max_wavenumber,
                                   int extra) {
  RegionQuadrature quad;
  if (region.kind == Region::Kind::box) {
    GaussRule axis[3];
    int counts[3];
    for (int i = 0; i < 3; ++i) {
      double omega = max_wavenumber * region.half_extent[i];
      counts[i] = static_cast<int>(std::ceil(0.7 * omega)) + 10 + extra;
      axis[i] = gauss_legendre(counts[i]);
    }
    for (int ix = 0; ix < counts[0]; ++ix)
      for (int iy = 0; iy < counts[1]; ++iy)
        for (int iz = 0; iz < counts[2]; ++iz) {
          Vec3 node(region.center.x() + region.half_extent.x() * axis[0].nodes[ix],
                    region.center.y() + region.half_extent.y() * axis[1].nodes[iy],
                    region.center.z() + region.half_extent.z() * axis[2].nodes[iz]);
          double weight = region.half_extent.prod() * axis[0].weights[ix] *
                          axis[1].weights[iy] * axis[2].weights[iz];
          quad.nodes.push_back(node);
          quad.weights.push_back(weight);
        }
    return quad;
  }
  double t = max_wavenumber * region.radius;
  int n_radial = static_cast<int>(std::ceil(0.35 * t)) + 8 + extra;
  int degree = static_cast<int>(std::ceil(t + 7.0 * std::cbrt(std::max(t, 1.0)))) +
               10 + 2 * extra;
  GaussRule radial = gauss_legendre(n_radial);
  SphereQuadrature sphere = sphere_quadrature_degree(degree);
  for (int i = 0; i < n_radial; ++i) {
    double r = 0.5 * region.radius * (radial.nodes[i] + 1.0);
    double wr = 0.5 * region.radius * radial.weights[i] * 4.0 * M_PI * r * r;
    for (std::size_t q = 0; q < sphere.nodes.size(); ++q) {
      quad.nodes.push_back(region.center + r * sphere.nodes[q]);
      quad.weights.push_back(wr * sphere.weights[q]);
    }
  }
  return quad;
}

// ---------------------------------------------------------------------------

LsgEstimate lsg_estimate(const Region& region,
                         const std::vector<Isometry>& generators,
                         const LsgOptions& options) {
  if (generators.empty())
    throw UsageError("no-generators", "local gap estimate needs generators");

  Region basis_box;
  if (options.basis_box) {
    basis_box = *options.basis_box;
    if (basis_box.kind != Region::Kind::box)
      throw UsageError("bad-basis-box", "the basis domain must be a box");
    Vec3 lo, hi, blo, bhi;
    swept_bounds(region, generators, &lo, &hi);
    region_bounds(basis_box, &blo, &bhi);
    if ((lo - blo).minCoeff() < -1e-12 || (bhi - hi).minCoeff() < -1e-12)
      throw PreflightError("region-escapes-basis",
                           "a generator image leaves the basis box");
  } else {
    basis_box = enclosing_box(region, generators, options.padding);
  }

  TrigBasis basis(basis_box.center, 2.0 * basis_box.half_extent, options.basis_n);
  const int dim = basis.dim();
  double ksq = 0.0;
  for (int i = 0; i < 3; ++i)
    ksq += std::pow(kTwoPi * options.basis_n / (2.0 * basis_box.half_extent[i]), 2);
  const double max_wavenumber = 2.0 * std::sqrt(ksq);

  RegionQuadrature quad = region_quadrature(region, max_wavenumber, options.extra_nodes);
  const int nq = static_cast<int>(quad.nodes.size());

  // Basis values with sqrt-weights folded in, so grams are plain products.
  MatrixXcd e(nq, dim);
  Eigen::VectorXd sqw(nq);
  {
    std::vector<Complex> row(dim);
    for (int q = 0; q < nq; ++q) {
      sqw[q] = std::sqrt(quad.weights[q]);
      basis.eval_all(quad.nodes[q], row.data());
      for (int k = 0; k < dim; ++k) e(q, k) = sqw[q] * row[k];
    }
  }

  MatrixXcd mass = MatrixXcd::Zero(dim, dim);
  mass.selfadjointView<Eigen::Lower>().rankUpdate(e.adjoint());
  mass = mass.selfadjointView<Eigen::Lower>();
  VectorXcd mean = e.adjoint() * sqw.cast<Complex>();

  {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(mass, Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(dim - 1);
    if (lo <= 0.0 || hi / lo > 1e12)
      throw NumericalError("mass-matrix-singular",
                           "restricted Gram matrix is numerically singular");
  }

  MatrixXcd dirichlet = MatrixXcd::Zero(dim, dim);
  {
    MatrixXcd eg(nq, dim);
    std::vector<Complex> row(dim);
    for (const Isometry& g : generators) {
      Isometry inv = g.inverse();
      for (int q = 0; q < nq; ++q) {
        basis.eval_all(inv(quad.nodes[q]), row.data());
        for (int k = 0; k < dim; ++k) eg(q, k) = sqw[q] * row[k];
      }
      eg -= e;
      dirichlet.selfadjointView<Eigen::Lower>().rankUpdate(eg.adjoint());
    }
    dirichlet = dirichlet.selfadjointView<Eigen::Lower>();
  }

  // Mean-zero constraint: restrict to the orthogonal complement of mean.
  Eigen::HouseholderQR<MatrixXcd> qr(mean);
  MatrixXcd qfull = qr.householderQ() * MatrixXcd::Identity(dim, dim);
  MatrixXcd complement = qfull.rightCols(dim - 1);
  MatrixXcd ar = complement.adjoint() * dirichlet * complement;
  MatrixXcd mr = complement.adjoint() * mass * complement;

  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXcd> ges(ar, mr);
  if (ges.info() != Eigen::Success)
    throw NumericalError("eig-failed", "generalized eigensolve did not converge");

  LsgEstimate est;
  est.lambda_min = ges.eigenvalues()(0);
  if (est.lambda_min < -1e-10)
    throw NumericalError("indefinite-form",
                         "dirichlet form came out negative beyond tolerance");
  VectorXcd reduced = ges.eigenvectors().col(0);
  est.eig_residual = (ar * reduced - est.lambda_min * (mr * reduced)).norm();
  est.witness = complement * reduced;
  est.no_gap = est.lambda_min <= 1e-10;
  est.kappa_bound = est.no_gap
                        ? std::numeric_limits<double>::infinity()
                        : std::sqrt(static_cast<double>(generators.size()) /
                                    est.lambda_min);
  est.basis_n = options.basis_n;
  est.basis_dim = dim;
  est.generators = static_cast<int>(generators.size());
  est.region = region;
  est.basis_box = basis_box;
  {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(mass, Eigen::EigenvaluesOnly);
    est.mass_condition = es.eigenvalues()(dim - 1) / es.eigenvalues()(0);
  }
  est.witness_mean_error = std::abs(mean.dot(est.witness));
  est.witness_norm_error =
      std::abs(std::sqrt(std::real(est.witness.dot(mass * est.witness))) - 1.0);

  // Independent recheck of the witness invariants on a finer rule.
  RegionQuadrature fine =
      region_quadrature(region, max_wavenumber, options.extra_nodes + 7);
  Complex mean2(0.0, 0.0);
  double norm2 = 0.0;
  std::vector<Complex> row(dim);
  for (std::size_t q = 0; q < fine.nodes.size(); ++q) {
    basis.eval_all(fine.nodes[q], row.data());
    Complex phi(0.0, 0.0);
    for (int k = 0; k < dim; ++k) phi += est.witness[k] * row[k];
    mean2 += fine.weights[q] * phi;
    norm2 += fine.weights[q] * std::norm(phi);
  }
  est.witness_mean_recheck = std::abs(mean2);
  est.witness_norm_recheck = std::abs(std::sqrt(norm2) - 1.0);
  return est;
}

}  // namespace isogap
