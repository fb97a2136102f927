#include "isogap/operators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "isogap/errors.hpp"
#include "isogap/rng.hpp"

namespace isogap {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

bool nearly_hermitian(const MatrixXcd& a) {
  if (a.rows() != a.cols()) return false;
  double scale = 1.0 + a.cwiseAbs().maxCoeff();
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

NormEstimate dense_norm(const MatrixXcd& a, int iterations_used) {
  NormEstimate est;
  est.method = NormEstimate::Method::dense;
  est.iterations = iterations_used;
  if (nearly_hermitian(a)) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a);
    const auto& vals = es.eigenvalues();
    int idx = 0;
    double best = 0.0;
    for (int i = 0; i < vals.size(); ++i) {
      if (std::abs(vals[i]) > best) {
        best = std::abs(vals[i]);
        idx = i;
      }
    }
    VectorXcd v = es.eigenvectors().col(idx);
    est.value = best;
    est.residual =
        (a * v - vals[idx] * v).norm() / std::max(1.0, est.value);
    return est;
  }
  Eigen::BDCSVD<MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  est.value = svd.singularValues()(0);
  VectorXcd u = svd.matrixU().col(0);
  VectorXcd v = svd.matrixV().col(0);
  est.residual = ((a * v - est.value * u).norm() +
                  (a.adjoint() * u - est.value * v).norm()) /
                 std::max(1.0, est.value);
  return est;
}

}  // namespace

NormEstimate operator_norm(const MatrixXcd& a, std::uint64_t seed) {
  if (a.size() == 0) throw NumericalError("empty-matrix", "operator_norm on an empty matrix");
  if (!a.allFinite())
    throw NumericalError("non-finite-matrix", "operator_norm saw NaN or Inf");
  if (std::max(a.rows(), a.cols()) <= 512) return dense_norm(a, 0);

  // Power iteration on A*A; the Rayleigh quotient rho tracks ||A v||^2.
  Rng rng(seed);
  VectorXcd v(a.cols());
  for (int i = 0; i < v.size(); ++i) v[i] = Complex(rng.normal(), rng.normal());
  v.normalize();
  const int max_iters = 10000;
  double prev = -1.0;
  for (int it = 1; it <= max_iters; ++it) {
    VectorXcd w = a * v;
    VectorXcd s = a.adjoint() * w;
    double rho = w.squaredNorm();
    double res = (s - rho * v).norm();
    if (rho <= 1e-300) {
      NormEstimate est;
      est.value = 0.0;
      est.residual = 0.0;
      est.iterations = it;
      est.method = NormEstimate::Method::power;
      return est;
    }
    if (std::abs(rho - prev) <= 1e-12 * std::max(1.0, rho) &&
        res <= 1e-10 * std::max(1.0, rho)) {
      NormEstimate est;
      est.value = std::sqrt(rho);
      est.residual = res / std::max(1.0, rho);
      est.iterations = it;
      est.method = NormEstimate::Method::power;
      return est;
    }
    prev = rho;
    v = s / s.norm();
  }
  return dense_norm(a, max_iters);
}

// ---------------------------------------------------------------------------

RotationBlocks rotation_blocks(const AtomicMeasure& mu, int band_limit) {
  if (band_limit < 0) throw std::invalid_argument("negative band limit");
  RotationBlocks out;
  out.band_limit = band_limit;
  out.blocks.resize(band_limit + 1);
  for (int l = 0; l <= band_limit; ++l)
    out.blocks[l] = MatrixXcd::Zero(2 * l + 1, 2 * l + 1);
  for (const Atom& atom : mu.atoms()) {
    auto wd = wigner_d_stack(band_limit, atom.g.rotation());
    for (int l = 0; l <= band_limit; ++l) out.blocks[l] += atom.weight * wd[l];
  }
  return out;
}

RotationGap rotation_gap(const AtomicMeasure& mu, int band_limit) {
  if (band_limit < 1)
    throw std::invalid_argument("rotation_gap needs band_limit >= 1");
  RotationBlocks blocks = rotation_blocks(mu, band_limit);
  RotationGap gap;
  gap.block_norms.resize(band_limit + 1);
  double worst = 0.0;
  for (int l = 0; l <= band_limit; ++l) {
    gap.block_norms[l] = operator_norm(blocks.blocks[l]).value;
    if (l >= 1 && gap.block_norms[l] > worst) {
      worst = gap.block_norms[l];
      gap.attaining_l = l;
    }
  }
  gap.alpha = 1.0 - worst;
  gap.no_gap = gap.alpha <= 1e-6;
  return gap;
}

// ---------------------------------------------------------------------------
// Sphere family

SphereAssembler::SphereAssembler(int band_limit, int margin)
    : band_limit_(band_limit),
      margin_(margin),
      quad_(sphere_quadrature(band_limit, margin)) {
  const int n_nodes = static_cast<int>(quad_.nodes.size());
  const int n_basis = sh_count(band_limit_);
  eval_.resize(n_nodes, n_basis);
  std::vector<Complex> row(n_basis);
  for (int q = 0; q < n_nodes; ++q) {
    sh_eval(band_limit_, quad_.nodes[q], row.data());
    for (int j = 0; j < n_basis; ++j) eval_(q, j) = row[j];
  }
  Eigen::VectorXd w =
      Eigen::Map<const Eigen::VectorXd>(quad_.weights.data(), n_nodes);
  adj_eval_ = eval_.adjoint() * w.asDiagonal();
}

MatrixXcd SphereAssembler::atom_operator(const Isometry& g,
                                         double radius) const {
  auto wd = wigner_d_stack(band_limit_, g.rotation());
  const int n = dim();
  MatrixXcd out(n, n);
  if (radius * g.translation().norm() == 0.0) {
    // Pure rotation of the family: exactly block diagonal, no quadrature.
    out.setZero();
    for (int l = 0; l <= band_limit_; ++l)
      out.block(l * l, l * l, 2 * l + 1, 2 * l + 1) = wd[l];
    return out;
  }
  const int n_nodes = static_cast<int>(quad_.nodes.size());
  VectorXcd phase(n_nodes);
  for (int q = 0; q < n_nodes; ++q)
    phase[q] = std::polar(1.0, -kTwoPi * radius * quad_.nodes[q].dot(g.translation()));
  MatrixXcd compressed = adj_eval_ * (phase.asDiagonal() * eval_);
  for (int l = 0; l <= band_limit_; ++l)
    out.middleCols(l * l, 2 * l + 1) =
        compressed.middleCols(l * l, 2 * l + 1) * wd[l];
  return out;
}

MatrixXcd SphereAssembler::operator_matrix(const AtomicMeasure& mu,
                                           double radius) const {
  MatrixXcd out = MatrixXcd::Zero(dim(), dim());
  for (const Atom& atom : mu.atoms())
    out += atom.weight * atom_operator(atom.g, radius);
  return out;
}

BandLimitedOperator sphere_operator(const AtomicMeasure& mu, double radius,
                                    int band_limit, int margin) {
  SphereAssembler assembler(band_limit, margin);
  BandLimitedOperator op;
  op.basis = BandLimitedOperator::Basis::sphere;
  op.band_limit = band_limit;
  op.margin = margin;
  op.radius = radius;
  op.measure_label = mu.label();
  op.matrix = assembler.operator_matrix(mu, radius);
  return op;
}

// ---------------------------------------------------------------------------
// Rotation-group family

int so3_basis_dim(int band_limit) {
  return (band_limit + 1) * (2 * band_limit + 1) * (2 * band_limit + 3) / 3;
}

So3Assembler::So3Assembler(int band_limit, int margin)
    : band_limit_(band_limit),
      margin_(margin),
      dim_(so3_basis_dim(band_limit)),
      quad_(so3_quadrature(band_limit, margin)) {
  offsets_.resize(band_limit_ + 1);
  int off = 0;
  for (int l = 0; l <= band_limit_; ++l) {
    offsets_[l] = off;
    off += (2 * l + 1) * (2 * l + 1);
  }
  const int n_beta = static_cast<int>(quad_.beta_cos.size());
  dvecs_.resize(band_limit_ + 1);
  for (int l = 0; l <= band_limit_; ++l)
    dvecs_[l].resize(n_beta, (2 * l + 1) * (2 * l + 1));
  for (int b = 0; b < n_beta; ++b) {
    double beta = std::acos(std::clamp(quad_.beta_cos[b], -1.0, 1.0));
    for (int l = 0; l <= band_limit_; ++l) {
      Eigen::MatrixXd d = wigner_little_d(l, beta);
      double scale = std::sqrt(2.0 * l + 1.0);
      for (int m = -l; m <= l; ++m)
        for (int n = -l; n <= l; ++n)
          dvecs_[l](b, (m + l) * (2 * l + 1) + (n + l)) =
              scale * d(m + l, n + l);
    }
  }
}

// Quadrature compression of multiplication by e^{-2 pi i <omega x, v>}.
// The two equispaced Euler angles reduce to Fourier data
//   F_b(p, q) = mean_{a,c} e^{-i p alpha_a - i q gamma_c} X(a, b, c),
// and each matrix entry is a short Gauss sum over the beta nodes.
MatrixXcd So3Assembler::phase_matrix(const Vec3& x, const Vec3& v) const {
  const int n_alpha = static_cast<int>(quad_.alpha.size());
  const int n_gamma = static_cast<int>(quad_.gamma.size());
  const int n_beta = static_cast<int>(quad_.beta_cos.size());
  const int wdim = 4 * band_limit_ + 1;

  // z_a = Rz(-alpha_a) v, so that <omega_{abc} x, v> = <Ry Rz(gamma) x, z_a>.
  std::vector<Vec3> za(n_alpha);
  for (int a = 0; a < n_alpha; ++a) {
    double c = std::cos(quad_.alpha[a]), s = std::sin(quad_.alpha[a]);
    za[a] = Vec3(c * v.x() + s * v.y(), -s * v.x() + c * v.y(), v.z());
  }
  std::vector<Vec3> xg(n_gamma);
  for (int c = 0; c < n_gamma; ++c) {
    double cc = std::cos(quad_.gamma[c]), sc = std::sin(quad_.gamma[c]);
    xg[c] = Vec3(cc * x.x() - sc * x.y(), sc * x.x() + cc * x.y(), x.z());
  }

  MatrixXcd ep(wdim, n_alpha), eq(wdim, n_gamma);
  for (int pi = 0; pi < wdim; ++pi) {
    int p = pi - 2 * band_limit_;
    for (int a = 0; a < n_alpha; ++a)
      ep(pi, a) = std::polar(1.0, -p * quad_.alpha[a]);
    for (int c = 0; c < n_gamma; ++c)
      eq(pi, c) = std::polar(1.0, -p * quad_.gamma[c]);
  }

  MatrixXcd ft(n_beta, wdim * wdim);
  MatrixXcd xm(n_alpha, n_gamma);
  for (int b = 0; b < n_beta; ++b) {
    double cb = quad_.beta_cos[b];
    double sb = std::sqrt(std::max(0.0, 1.0 - cb * cb));
    for (int c = 0; c < n_gamma; ++c) {
      Vec3 y(cb * xg[c].x() + sb * xg[c].z(), xg[c].y(),
             -sb * xg[c].x() + cb * xg[c].z());
      for (int a = 0; a < n_alpha; ++a)
        xm(a, c) = std::polar(1.0, -kTwoPi * y.dot(za[a]));
    }
    MatrixXcd fb = ep * xm * eq.transpose();
    double scale = quad_.beta_weights[b] / (n_alpha * n_gamma);
    for (int pi = 0; pi < wdim; ++pi)
      for (int qi = 0; qi < wdim; ++qi)
        ft(b, pi * wdim + qi) = scale * fb(pi, qi);
  }

  MatrixXcd out(dim_, dim_);
  for (int l = 0; l <= band_limit_; ++l) {
    const Eigen::MatrixXd& dcol = dvecs_[l];
    for (int m = -l; m <= l; ++m) {
      for (int n = -l; n <= l; ++n) {
        const int col = index(l, m, n);
        const double* d2 = dcol.col((m + l) * (2 * l + 1) + (n + l)).data();
        for (int lp = 0; lp <= band_limit_; ++lp) {
          const Eigen::MatrixXd& drow = dvecs_[lp];
          for (int mp = -lp; mp <= lp; ++mp) {
            const int pi = m - mp + 2 * band_limit_;
            for (int np = -lp; np <= lp; ++np) {
              const int qi = n - np + 2 * band_limit_;
              const double* d1 =
                  drow.col((mp + lp) * (2 * lp + 1) + (np + lp)).data();
              const Complex* f = ft.col(pi * wdim + qi).data();
              Complex acc(0.0, 0.0);
              for (int b = 0; b < n_beta; ++b) acc += (d1[b] * d2[b]) * f[b];
              out(index(lp, mp, np), col) = acc;
            }
          }
        }
      }
    }
  }
  return out;
}

MatrixXcd So3Assembler::left_translation(const Mat3& r) const {
  auto wd = wigner_d_stack(band_limit_, r);
  MatrixXcd out = MatrixXcd::Zero(dim_, dim_);
  for (int l = 0; l <= band_limit_; ++l) {
    MatrixXcd lam = wd[l].conjugate();
    for (int mp = -l; mp <= l; ++mp)
      for (int m = -l; m <= l; ++m) {
        Complex c = lam(mp + l, m + l);
        for (int n = -l; n <= l; ++n) out(index(l, mp, n), index(l, m, n)) = c;
      }
  }
  return out;
}

MatrixXcd So3Assembler::right_translation(const Mat3& h) const {
  auto wd = wigner_d_stack(band_limit_, h);
  MatrixXcd out = MatrixXcd::Zero(dim_, dim_);
  for (int l = 0; l <= band_limit_; ++l)
    for (int m = -l; m <= l; ++m) {
      int base = offsets_[l] + (m + l) * (2 * l + 1);
      out.block(base, base, 2 * l + 1, 2 * l + 1) = wd[l];
    }
  return out;
}

MatrixXcd So3Assembler::atom_operator(const Isometry& g, const Vec3& x) const {
  if (x.norm() * g.translation().norm() == 0.0)
    return left_translation(g.rotation());
  MatrixXcd p = phase_matrix(x, g.translation());
  auto wd = wigner_d_stack(band_limit_, g.rotation());
  MatrixXcd out(dim_, dim_);
  MatrixXcd psub, msub;
  for (int l = 0; l <= band_limit_; ++l) {
    MatrixXcd lam = wd[l].conjugate();
    psub.resize(dim_, 2 * l + 1);
    for (int n = -l; n <= l; ++n) {
      for (int m = -l; m <= l; ++m) psub.col(m + l) = p.col(index(l, m, n));
      msub = psub * lam;
      for (int m = -l; m <= l; ++m) out.col(index(l, m, n)) = msub.col(m + l);
    }
  }
  return out;
}

MatrixXcd So3Assembler::operator_matrix(const AtomicMeasure& mu,
                                        const Vec3& x) const {
  MatrixXcd out = MatrixXcd::Zero(dim_, dim_);
  for (const Atom& atom : mu.atoms())
    out += atom.weight * atom_operator(atom.g, x);
  return out;
}

BandLimitedOperator so3_operator(const AtomicMeasure& mu, const Vec3& x,
                                 int band_limit, int margin) {
  So3Assembler assembler(band_limit, margin);
  BandLimitedOperator op;
  op.basis = BandLimitedOperator::Basis::rotation_group;
  op.band_limit = band_limit;
  op.margin = margin;
  op.x = x;
  op.measure_label = mu.label();
  op.matrix = assembler.operator_matrix(mu, x);
  return op;
}

WeightBlockNorm weight_block_norm(const So3Assembler& assembler,
                                  const MatrixXcd& matrix) {
  int band = assembler.band_limit();
  std::vector<int> weight(assembler.dim());
  for (int l = 0; l <= band; ++l)
    for (int m = -l; m <= l; ++m)
      for (int n = -l; n <= l; ++n) weight[assembler.index(l, m, n)] = n;

  WeightBlockNorm out;
  double off_mass = 0.0;
  for (int j = 0; j < matrix.cols(); ++j)
    for (int i = 0; i < matrix.rows(); ++i)
      if (weight[i] != weight[j]) off_mass += std::norm(matrix(i, j));
  out.off_block = std::sqrt(off_mass);

  for (int n = -band; n <= band; ++n) {
    std::vector<int> idx;
    idx.reserve((band + 1) * (band + 1));
    for (int l = std::abs(n); l <= band; ++l)
      for (int m = -l; m <= l; ++m) idx.push_back(assembler.index(l, m, n));
    MatrixXcd block(idx.size(), idx.size());
    for (std::size_t j = 0; j < idx.size(); ++j)
      for (std::size_t i = 0; i < idx.size(); ++i)
        block(i, j) = matrix(idx[i], idx[j]);
    out.value = std::max(out.value, operator_norm(block).value);
  }
  return out;
}

WeightBlockNorm axial_so3_norm(const So3Assembler& assembler,
                               const AtomicMeasure& mu, double r) {
  return weight_block_norm(assembler,
                           assembler.operator_matrix(mu, r * Vec3(0, 0, 1)));
}

}  // namespace isogap
