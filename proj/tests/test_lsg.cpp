#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "isogap/errors.hpp"
#include "isogap/lsg.hpp"
#include "isogap/rng.hpp"

using namespace isogap;

namespace {

const double kAngle35 = std::acos(3.0 / 5.0);

std::vector<Isometry> dense_translation_set(double step) {
  std::vector<Isometry> gens;
  for (int axis = 0; axis < 3; ++axis)
    for (int sign : {-1, 1}) {
      Vec3 v = Vec3::Zero();
      v[axis] = sign * step;
      gens.push_back(Isometry::translation_only(v));
    }
  return gens;
}

Isometry screw_generator() {
  return Isometry(rotation_z(kAngle35), Vec3(0.3, -0.2, 0.1));
}

// Quadrature-free reference for every Gram block of the restricted form,
// built from the plane-wave integral.
struct GramOracle {
  Region region;
  TrigBasis basis;

  Complex mass(int j, int k) const {
    Vec3 dk = basis.wavevector(k) - basis.wavevector(j);
    return region_plane_wave_integral(region, dk) *
           std::polar(1.0, -dk.dot(basis.center()));
  }
  Complex mean(int k) const {
    Vec3 kk = basis.wavevector(k);
    return std::conj(region_plane_wave_integral(region, kk) *
                     std::polar(1.0, -kk.dot(basis.center())));
  }
  Complex shifted_shifted(const Isometry& g, int j, int k) const {
    Vec3 dk = basis.wavevector(k) - basis.wavevector(j);
    Vec3 rdk = g.rotation() * dk;
    return region_plane_wave_integral(region, rdk) *
           std::polar(1.0, -rdk.dot(g.translation())) *
           std::polar(1.0, -dk.dot(basis.center()));
  }
  Complex shifted_plain(const Isometry& g, int j, int k) const {
    Vec3 kj = basis.wavevector(j), kk = basis.wavevector(k);
    Vec3 rkj = g.rotation() * kj;
    return region_plane_wave_integral(region, kk - rkj) *
           std::polar(1.0, rkj.dot(g.translation())) *
           std::polar(1.0, (kj - kk).dot(basis.center()));
  }
  Complex dirichlet(const Isometry& g, int j, int k) const {
    return shifted_shifted(g, j, k) - shifted_plain(g, j, k) -
           std::conj(shifted_plain(g, k, j)) + mass(j, k);
  }
};

struct AssembledGrams {
  MatrixXcd mass;
  VectorXcd mean;
  MatrixXcd dirichlet;
};

AssembledGrams assemble_by_quadrature(const Region& region, const TrigBasis& basis,
                                      const Isometry& g) {
  double ksq = 0.0;
  for (int i = 0; i < 3; ++i)
    ksq += std::pow(2.0 * M_PI * basis.n() / basis.extent()[i], 2);
  RegionQuadrature quad = region_quadrature(region, 2.0 * std::sqrt(ksq));
  const int nq = static_cast<int>(quad.nodes.size());
  const int dim = basis.dim();
  MatrixXcd e(nq, dim), eg(nq, dim);
  std::vector<Complex> row(dim);
  Isometry inv = g.inverse();
  for (int q = 0; q < nq; ++q) {
    basis.eval_all(quad.nodes[q], row.data());
    for (int k = 0; k < dim; ++k) e(q, k) = row[k];
    basis.eval_all(inv(quad.nodes[q]), row.data());
    for (int k = 0; k < dim; ++k) eg(q, k) = row[k];
  }
  MatrixXcd ew = e, dw;
  for (int q = 0; q < nq; ++q) ew.row(q) *= quad.weights[q];
  MatrixXcd d = eg - e;
  dw = d;
  for (int q = 0; q < nq; ++q) dw.row(q) *= quad.weights[q];
  AssembledGrams out;
  out.mass = e.adjoint() * ew;
  out.mean = ew.adjoint() * VectorXcd::Ones(nq);
  out.dirichlet = d.adjoint() * dw;
  return out;
}

}  // namespace

TEST_CASE("region volumes and plane-wave integrals") {
  Region box = box_region(Vec3(0.1, -0.2, 0.3), Vec3(0.8, 0.6, 0.7));
  Region ball = ball_region(Vec3(-0.2, 0.1, 0.3), 0.9);
  CHECK(region_volume(box) == doctest::Approx(8.0 * 0.8 * 0.6 * 0.7).epsilon(1e-15));
  CHECK(region_volume(ball) ==
        doctest::Approx(4.0 / 3.0 * M_PI * std::pow(0.9, 3)).epsilon(1e-15));

  // At zero frequency the integral is the volume.
  CHECK(std::abs(region_plane_wave_integral(box, Vec3::Zero()) -
                 Complex(region_volume(box), 0.0)) < 1e-15);
  CHECK(std::abs(region_plane_wave_integral(ball, Vec3::Zero()) -
                 Complex(region_volume(ball), 0.0)) < 1e-15);
  // The small-argument branch joins smoothly (magnitude only; the center
  // phase contributes at first order in kappa).
  Vec3 tiny(1e-9, -2e-9, 1.5e-9);
  CHECK(std::abs(std::abs(region_plane_wave_integral(ball, tiny)) -
                 region_volume(ball)) < 1e-12);

  // Closed form against direct quadrature at a generic frequency.
  for (const Region& region : {box, ball}) {
    Vec3 kappa(7.3, -4.1, 5.9);
    RegionQuadrature quad = region_quadrature(region, kappa.norm(), 2);
    double vol = 0.0;
    Complex direct(0.0, 0.0);
    for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
      vol += quad.weights[q];
      direct += quad.weights[q] * std::polar(1.0, kappa.dot(quad.nodes[q]));
    }
    CHECK(vol == doctest::Approx(region_volume(region)).epsilon(1e-13));
    CHECK(std::abs(direct - region_plane_wave_integral(region, kappa)) < 1e-11);
  }

  CHECK_THROWS_AS(box_region(Vec3::Zero(), Vec3(1.0, 0.0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ball_region(Vec3::Zero(), -1.0), std::invalid_argument);
}

TEST_CASE("enclosing box covers the region and its images") {
  Region region = box_region(Vec3(0.2, 0.0, -0.1), Vec3(0.5, 0.4, 0.6));
  std::vector<Isometry> gens = {screw_generator(),
                                Isometry::translation_only(Vec3(0.0, 0.7, 0.0))};
  double pad = 0.25;
  Region bbox = enclosing_box(region, gens, pad);
  REQUIRE(bbox.kind == Region::Kind::box);
  Vec3 lo = bbox.center - bbox.half_extent;
  Vec3 hi = bbox.center + bbox.half_extent;

  Rng rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 p;
    for (int i = 0; i < 3; ++i)
      p[i] = region.center[i] +
             region.half_extent[i] * (2.0 * rng.uniform() - 1.0);
    std::vector<Vec3> images = {p};
    for (const Isometry& g : gens) images.push_back(g.inverse()(p));
    for (const Vec3& x : images) {
      CHECK((x - lo).minCoeff() >= pad - 1e-12);
      CHECK((hi - x).minCoeff() >= pad - 1e-12);
    }
  }
}

TEST_CASE("trig basis indexing, evaluation, and orthogonality") {
  TrigBasis basis(Vec3(0.3, -0.1, 0.2), Vec3(2.0, 1.5, 2.5), 2);
  CHECK(basis.dim() == 125);
  for (int kx : {-2, 0, 1})
    for (int ky : {-1, 2})
      for (int kz : {-2, 1}) {
        int flat = basis.index(kx, ky, kz);
        Vec3 kappa = basis.wavevector(flat);
        CHECK(kappa.x() == doctest::Approx(2.0 * M_PI * kx / 2.0).epsilon(1e-15));
        CHECK(kappa.y() == doctest::Approx(2.0 * M_PI * ky / 1.5).epsilon(1e-15));
        CHECK(kappa.z() == doctest::Approx(2.0 * M_PI * kz / 2.5).epsilon(1e-15));
      }

  std::vector<Complex> all(basis.dim());
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Vec3 x(rng.normal(), rng.normal(), rng.normal());
    basis.eval_all(x, all.data());
    for (int flat : {0, 13, 62, 88, 124}) {
      CHECK(std::abs(all[flat] - basis.eval(flat, x)) < 1e-13);
      CHECK(std::abs(std::abs(all[flat]) - 1.0) < 1e-13);
    }
  }

  // Orthogonality over the matching box, through the closed form.
  Region home = box_region(basis.center(), 0.5 * basis.extent());
  double volume = region_volume(home);
  for (int j : {0, 31, 77})
    for (int k : {0, 31, 100}) {
      Vec3 dk = basis.wavevector(k) - basis.wavevector(j);
      Complex overlap = region_plane_wave_integral(home, dk) *
                        std::polar(1.0, -dk.dot(basis.center()));
      Complex expected = j == k ? Complex(volume, 0.0) : Complex(0.0, 0.0);
      CHECK(std::abs(overlap - expected) < 1e-12);
    }
}

TEST_CASE("quadrature grams match the plane-wave closed forms") {
  struct Setup {
    Region region;
    Isometry g;
  };
  std::vector<Setup> setups = {
      {box_region(Vec3(0.1, -0.2, 0.05), Vec3(0.8, 0.6, 0.7)), screw_generator()},
      {ball_region(Vec3(-0.15, 0.1, 0.2), 0.85),
       Isometry(rotation_y(0.8), Vec3(-0.2, 0.25, 0.15))}};
  for (const Setup& setup : setups) {
    Region bbox = enclosing_box(setup.region, {setup.g}, 0.3);
    TrigBasis basis(bbox.center, 2.0 * bbox.half_extent, 1);
    GramOracle oracle{setup.region, basis};
    AssembledGrams grams = assemble_by_quadrature(setup.region, basis, setup.g);
    double worst_mass = 0.0, worst_mean = 0.0, worst_dirichlet = 0.0;
    for (int j = 0; j < basis.dim(); ++j) {
      worst_mean = std::max(worst_mean, std::abs(grams.mean(j) - oracle.mean(j)));
      for (int k = 0; k < basis.dim(); ++k) {
        worst_mass =
            std::max(worst_mass, std::abs(grams.mass(j, k) - oracle.mass(j, k)));
        worst_dirichlet =
            std::max(worst_dirichlet,
                     std::abs(grams.dirichlet(j, k) - oracle.dirichlet(setup.g, j, k)));
      }
    }
    CHECK(worst_mass < 1e-10);
    CHECK(worst_mean < 1e-10);
    CHECK(worst_dirichlet < 1e-9);
  }
}

TEST_CASE("identity generators certify nothing") {
  LsgOptions opts;
  opts.basis_n = 2;
  LsgEstimate est = lsg_estimate(box_region(Vec3::Zero(), Vec3::Constant(0.7)),
                                 {Isometry::identity()}, opts);
  CHECK(est.no_gap);
  CHECK(est.lambda_min <= 1e-10);
  CHECK(est.lambda_min >= -1e-10);
  CHECK(std::isinf(est.kappa_bound));
}

TEST_CASE("dense translation set has a local gap") {
  Region region = box_region(Vec3::Zero(), Vec3::Constant(0.6));
  std::vector<Isometry> gens = dense_translation_set(0.45);
  LsgOptions opts;
  opts.basis_n = 3;
  LsgEstimate est = lsg_estimate(region, gens, opts);

  CHECK(!est.no_gap);
  CHECK(est.lambda_min > 1e-4);
  CHECK(est.lambda_min < 100.0);
  CHECK(est.kappa_bound ==
        doctest::Approx(std::sqrt(6.0 / est.lambda_min)).epsilon(1e-12));
  CHECK(est.generators == 6);
  CHECK(est.basis_dim == 343);
  CHECK(est.witness.size() == 343);
  CHECK(est.mass_condition < 1e12);
  CHECK(est.eig_residual < 1e-8);
  CHECK(est.witness_mean_error < 1e-10);
  CHECK(est.witness_norm_error < 1e-10);
  CHECK(est.witness_mean_recheck < 1e-8);
  CHECK(est.witness_norm_recheck < 1e-8);
}

TEST_CASE("ball region estimate with mixed generators") {
  Region region = ball_region(Vec3(0.1, 0.0, -0.1), 0.7);
  std::vector<Isometry> gens = dense_translation_set(0.4);
  gens.push_back(screw_generator());
  LsgOptions opts;
  opts.basis_n = 2;
  LsgEstimate est = lsg_estimate(region, gens, opts);
  CHECK(!est.no_gap);
  CHECK(est.lambda_min > 1e-5);
  CHECK(est.witness_mean_error < 1e-10);
  CHECK(est.witness_norm_error < 1e-10);
  CHECK(est.witness_mean_recheck < 1e-8);
  CHECK(est.witness_norm_recheck < 1e-8);
}

TEST_CASE("adding a generator cannot shrink the form") {
  Region region = box_region(Vec3::Zero(), Vec3::Constant(0.5));
  std::vector<Isometry> base = {screw_generator(),
                                Isometry(rotation_x(kAngle35), Vec3(0.1, 0.3, -0.2))};
  std::vector<Isometry> extended = base;
  extended.push_back(Isometry::translation_only(Vec3(0.4, 0.0, 0.0)));

  LsgOptions opts;
  opts.basis_n = 2;
  opts.basis_box = enclosing_box(region, extended, 0.35);
  double lam_base = lsg_estimate(region, base, opts).lambda_min;
  double lam_ext = lsg_estimate(region, extended, opts).lambda_min;
  CHECK(lam_ext >= lam_base - 1e-10);
}

TEST_CASE("larger basis can only tighten the estimate") {
  Region region = box_region(Vec3::Zero(), Vec3::Constant(0.6));
  std::vector<Isometry> gens = dense_translation_set(0.5);
  LsgOptions opts;
  opts.basis_box = enclosing_box(region, gens, 0.05);
  opts.basis_n = 2;
  double lam2 = lsg_estimate(region, gens, opts).lambda_min;
  opts.basis_n = 3;
  double lam3 = lsg_estimate(region, gens, opts).lambda_min;
  CHECK(lam3 <= lam2 + 1e-8);
  CHECK(lam3 > 0.0);
}

TEST_CASE("estimate is scale invariant") {
  Region region = box_region(Vec3(0.05, -0.1, 0.2), Vec3(0.5, 0.55, 0.6));
  std::vector<Isometry> gens = {screw_generator(),
                                Isometry::translation_only(Vec3(0.3, -0.1, 0.2))};
  LsgOptions opts;
  opts.basis_n = 2;
  opts.basis_box = enclosing_box(region, gens, 0.3);
  LsgEstimate ref = lsg_estimate(region, gens, opts);

  for (double t : {0.1, 10.0}) {
    Region scaled = box_region(t * region.center, t * region.half_extent);
    std::vector<Isometry> sgens;
    for (const Isometry& g : gens)
      sgens.emplace_back(g.rotation(), t * g.translation());
    LsgOptions sopts;
    sopts.basis_n = 2;
    sopts.basis_box = box_region(t * opts.basis_box->center,
                                 t * opts.basis_box->half_extent);
    LsgEstimate est = lsg_estimate(scaled, sgens, sopts);
    CHECK(est.lambda_min ==
          doctest::Approx(ref.lambda_min).epsilon(1e-9));
    CHECK(est.kappa_bound ==
          doctest::Approx(ref.kappa_bound).epsilon(1e-9));
  }
}

TEST_CASE("estimator rejects bad inputs") {
  Region region = box_region(Vec3::Zero(), Vec3::Constant(0.5));

  try {
    lsg_estimate(region, {});
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(e.code() == std::string("no-generators"));
  }

  LsgOptions tight;
  tight.basis_n = 1;
  tight.basis_box = box_region(Vec3::Zero(), Vec3::Constant(0.55));
  try {
    lsg_estimate(region, {Isometry::translation_only(Vec3(0.4, 0.0, 0.0))}, tight);
    FAIL("expected PreflightError");
  } catch (const PreflightError& e) {
    CHECK(e.code() == std::string("region-escapes-basis"));
  }

  LsgOptions round;
  round.basis_box = ball_region(Vec3::Zero(), 3.0);
  try {
    lsg_estimate(region, {Isometry::identity()}, round);
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    CHECK(e.code() == std::string("bad-basis-box"));
  }

  // A basis box vastly larger than the region makes the restricted Gram
  // numerically singular.
  LsgOptions huge;
  huge.basis_n = 3;
  huge.basis_box = box_region(Vec3::Zero(), Vec3::Constant(1000.0));
  try {
    lsg_estimate(box_region(Vec3::Zero(), Vec3::Constant(0.4)),
                 {Isometry::translation_only(Vec3(0.1, 0.0, 0.0))}, huge);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(e.code() == std::string("mass-matrix-singular"));
  }
}
