// Acceptance gate: the go/no-go checks for the whole tool, one line each.
// Every check is self-contained and seeded; the binary exits with the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "isogap/geometry.hpp"
#include "isogap/io.hpp"
#include "isogap/lsg.hpp"
#include "isogap/measure.hpp"
#include "isogap/operators.hpp"
#include "isogap/rng.hpp"
#include "isogap/verifier.hpp"

using namespace isogap;

namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, ...) {
  char buf[512];
  va_list args;
  va_start(args, pattern);
  std::vsnprintf(buf, sizeof buf, pattern, args);
  va_end(args);
  return buf;
}

std::string measure_file(const std::string& name) {
  return std::string(ISOGAP_MEASURE_DIR) + "/" + name;
}

AtomicMeasure shipped(const std::string& name) {
  return load_measure_json(measure_file(name + ".json"));
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path.string() + ">";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int run_cli(const std::string& args, const fs::path& workdir) {
  std::string command = "cd " + workdir.string() + " && " + ISOGAP_CLI_PATH +
                        " " + args + " > cli_log.txt 2>&1";
  int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Isometry random_isometry(Rng& rng, double translation_scale) {
  return Isometry(random_rotation(rng),
                  translation_scale * rng.uniform() * random_unit_vector(rng));
}

// --------------------------------------------------------------------------
// 1. Group axioms and the convolution homomorphism on pure rotations.

Outcome criterion_algebra() {
  Rng rng(101);
  double worst_axiom = 0.0;
  for (int i = 0; i < 50; ++i) {
    Isometry g = random_isometry(rng, 1.0);
    Isometry h = random_isometry(rng, 1.0);
    Isometry k = random_isometry(rng, 1.0);
    Vec3 p = random_unit_vector(rng);
    worst_axiom = std::max(worst_axiom, isometry_distance((g * h) * k, g * (h * k)));
    worst_axiom =
        std::max(worst_axiom, isometry_distance(g * g.inverse(), Isometry()));
    worst_axiom = std::max(worst_axiom, ((g * h).apply(p) - g.apply(h.apply(p))).norm());
  }

  auto rotation_measure = [&](int atoms, const char* label) {
    std::vector<Atom> out;
    for (int i = 0; i < atoms; ++i)
      out.push_back({Isometry(random_rotation(rng), Vec3::Zero()),
                     0.25 + rng.uniform()});
    return AtomicMeasure::from_atoms(std::move(out), label);
  };
  AtomicMeasure mu = rotation_measure(3, "hom-a");
  AtomicMeasure nu = rotation_measure(2, "hom-b");
  Vec3 x(0.37, -0.81, 0.44);
  MatrixXcd a = so3_operator(mu, x, 8, 8).matrix;
  MatrixXcd b = so3_operator(nu, x, 8, 8).matrix;
  MatrixXcd ab = so3_operator(convolve(mu, nu), x, 8, 8).matrix;
  double so3_hom = (ab - a * b).norm();

  MatrixXcd sa = sphere_operator(mu, 0.8, 8, 8).matrix;
  MatrixXcd sb = sphere_operator(nu, 0.8, 8, 8).matrix;
  MatrixXcd sab = sphere_operator(convolve(mu, nu), 0.8, 8, 8).matrix;
  double sphere_hom = (sab - sa * sb).norm();

  bool pass = worst_axiom <= 1e-10 && so3_hom <= 1e-10 && sphere_hom <= 1e-10;
  return {pass, fmt("axioms %.1e, homomorphism so3 %.1e sphere %.1e",
                    worst_axiom, so3_hom, sphere_hom)};
}

// --------------------------------------------------------------------------
// 2. Closed-form column and norm identities of the assembled operator.

Outcome criterion_oracle() {
  So3Assembler assembler(8, 8);
  double worst_column = 0.0, worst_identity = 0.0;
  const char* names[] = {"dense_two_generator", "compact_centered",
                         "skew_three_generator"};
  Rng rng(2);
  for (const char* name : names) {
    AtomicMeasure mu = shipped(name);
    for (int i = 0; i < 20; ++i) {
      Vec3 x = 1.5 * rng.uniform() * random_unit_vector(rng);
      ConstantsOracleReport rep = constants_oracle(assembler, mu, x);
      worst_column = std::max(worst_column, rep.max_column_error);
      worst_identity = std::max(worst_identity, rep.norm_identity_error);
    }
  }
  bool pass = worst_column <= 1e-6 && worst_identity <= 1e-6;
  return {pass, fmt("60 points, column %.1e, norm identity %.1e",
                    worst_column, worst_identity)};
}

// --------------------------------------------------------------------------
// 3. Norm depends only on |x|: equal-length parameters are conjugate.

Outcome criterion_conjugation() {
  Rng rng(3);
  const char* names[] = {"dense_two_generator", "compact_centered",
                         "skew_three_generator"};
  double worst_diff = 0.0, worst_residual = 0.0;
  for (int i = 0; i < 10; ++i) {
    AtomicMeasure mu = shipped(names[i % 3]);
    Vec3 a = (0.25 + 1.25 * rng.uniform()) * random_unit_vector(rng);
    Mat3 h = random_rotation(rng);
    ConjugationReport rep = conjugation_check(mu, a, h, 6);
    worst_diff = std::max(worst_diff, rep.norm_difference);
    worst_residual = std::max(worst_residual, rep.conjugation_residual);
  }
  bool pass = worst_diff <= 1e-6 && worst_residual <= 1e-8;
  return {pass, fmt("10 pairs, norm difference %.1e, residual %.1e",
                    worst_diff, worst_residual)};
}

// --------------------------------------------------------------------------
// 4. The sphere family is dominated by the rotation-group family.

Outcome criterion_domination() {
  SphereAssembler sphere(8, 8);
  // Margin 24 keeps the phase tail (and with it the off-block aliasing
  // mass) near machine precision for |x| |v| up to ~1.
  So3Assembler so3(12, 24);
  Rng rng(4);
  double min_slack = std::numeric_limits<double>::infinity();
  double worst_off = 0.0;
  for (int i = 0; i < 10; ++i) {
    std::vector<Atom> atoms;
    for (int k = 0; k < 2; ++k) atoms.push_back({random_isometry(rng, 0.6), 1.0});
    AtomicMeasure mu =
        symmetrize(AtomicMeasure::from_atoms(std::move(atoms), "seeded"));
    Vec3 x = (0.1 + 1.4 * rng.uniform()) * random_unit_vector(rng);
    double r = x.norm();
    double sphere_norm = operator_norm(sphere.operator_matrix(mu, r)).value;
    WeightBlockNorm so3_norm = axial_so3_norm(so3, mu, r);
    min_slack = std::min(min_slack, so3_norm.value - sphere_norm);
    worst_off = std::max(worst_off, so3_norm.off_block);
  }
  bool pass = min_slack >= -1e-6 && worst_off <= 1e-9;
  return {pass, fmt("10 draws at L=8 vs L=12, min slack %.1e, off-block %.1e",
                    min_slack, worst_off)};
}

// --------------------------------------------------------------------------
// 5. Small-displacement moment inequalities on the centered sets.

Outcome criterion_small_x() {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(i * 0.02);
  bool pass = true;
  std::string detail;
  for (const char* name : {"compact_centered", "translations_only"}) {
    AtomicMeasure mu = shipped(name);
    if (mu.moments().mean_translation.norm() > 1e-12) {
      pass = false;
      detail += fmt("%s not centered; ", name);
      continue;
    }
    // Axial direction: the bounds depend on |x| only, and the axial
    // weight-block path avoids the slow dense fallback on |T_r - T_0|.
    SmallXReport rep = small_x_check(mu, grid, Vec3(0, 0, 1));
    int n = static_cast<int>(grid.size());
    bool ok = rep.shift_prefix == n && rep.square_prefix >= 2 &&
              rep.energy_prefix >= 2;
    pass = pass && ok;
    detail += fmt("%s prefixes %d/%d/%d slack %.1e/%.1e; ", name,
                  rep.shift_prefix, rep.square_prefix, rep.energy_prefix,
                  rep.min_shift_slack, rep.min_square_slack);
  }
  return {pass, detail};
}

// --------------------------------------------------------------------------
// 6. Gap profile shape: positive quadratic floor, stable across bands.

Outcome criterion_profile() {
  AtomicMeasure mu = shipped("dense_two_generator");
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 10.0);
  GapProfile p12 = gap_profile(mu, grid, 12, 8, 8, 2);
  GapProfile p16 = gap_profile(mu, grid, 16, 8, 8, 2);

  bool floor_ok = true;
  for (const ProfilePoint& pt : p12.points)
    if (pt.r >= 1.0 && pt.one_minus_norm < p12.c0.c0 * (1.0 - 1e-3))
      floor_ok = false;
  double drift = std::abs(p16.c0.c0 - p12.c0.c0);
  bool pass = p12.c0.c0 > 0.0 && !p12.c0.floor_hit &&
              p12.fitted_exponent >= 1.8 && p12.fitted_exponent <= 2.2 &&
              floor_ok && drift <= 0.2 * p12.c0.c0;
  return {pass, fmt("c0 %.4f exponent %.2f floor %s, L=16 drift %.1f%%",
                    p12.c0.c0, p12.fitted_exponent, floor_ok ? "ok" : "broken",
                    100.0 * drift / p12.c0.c0)};
}

// --------------------------------------------------------------------------
// 7. Reduction to a compact centered measure with a tracked gap.

Outcome criterion_reduction() {
  ReductionReport rep = reduction_pipeline(shipped("reduction_weighted"));
  bool pass = rep.beta < rep.alpha / 2 && rep.centered_mean <= 1e-10 &&
              std::pow(1.0 - rep.alpha1, rep.ell) <= 0.5 + 1e-10 &&
              rep.block_identity_error <= 1e-9;
  return {pass,
          fmt("beta %.3f < alpha/2 %.3f, mean %.1e, ell %d, block %.1e",
              rep.beta, rep.alpha / 2, rep.centered_mean, rep.ell,
              rep.block_identity_error)};
}

// --------------------------------------------------------------------------
// 8. Dirichlet-form identity and the two-sided gap estimates.

Outcome criterion_dirichlet() {
  AtomicMeasure mu = shipped("dense_two_generator");
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.2 * i);
  GapProfile profile = gap_profile(mu, grid, 8, 8, 8, 2);

  So3Assembler assembler(8, 16);
  std::vector<double> t_norms;
  for (double r : grid)
    t_norms.push_back(axial_so3_norm(assembler, mu, r).value);
  C0Fit fit = fit_c0(profile.points, t_norms);
  if (fit.c0 <= 0.0 || fit.floor_hit)
    return {false, fmt("no usable c0 (%.2e)", fit.c0)};

  Rng rng(8);
  std::vector<Vec3> probes;
  for (int i = 1; i <= 10; ++i)
    probes.push_back(0.2 * i * random_unit_vector(rng));
  DirichletReport rep = dirichlet_check(mu, probes, 50, fit.c0, 8, 16, 808);
  bool pass = rep.max_identity_residual <= 1e-9 && rep.est1_holds &&
              rep.est2_holds && rep.pairs == 500;
  return {pass,
          fmt("c0 %.4f c1 %.2f, identity %.1e, est1 slack %.2e, est2 ratio %.2f",
              rep.c0_used, rep.c1_used, rep.max_identity_residual,
              rep.min_est1_slack, rep.max_est2_ratio)};
}

// --------------------------------------------------------------------------
// 9. Local gap estimator: certified positive minimum, nesting, trend.

Outcome criterion_lsg() {
  Region ball = ball_region(Vec3::Zero(), 1.0);

  AtomicMeasure dense_measure = shipped("lsg_dense_generators");
  std::vector<Isometry> dense;
  for (const Atom& atom : dense_measure.atoms()) dense.push_back(atom.g);
  LsgOptions opts;
  opts.basis_n = 4;
  opts.padding = 0.05;
  LsgEstimate est = lsg_estimate(ball, dense, opts);
  bool dense_ok = !est.no_gap && est.lambda_min > 0.0 &&
                  est.witness_mean_recheck <= 1e-8 &&
                  est.witness_norm_recheck <= 1e-8;

  // Nesting: same quadratic form domain, one generator dropped.
  LsgOptions pinned;
  pinned.basis_n = 3;
  pinned.padding = 0.05;
  pinned.basis_box = enclosing_box(ball, dense, 0.05);
  std::vector<Isometry> subset(dense.begin(), dense.end() - 1);
  double lam_subset = lsg_estimate(ball, subset, pinned).lambda_min;
  double lam_full = lsg_estimate(ball, dense, pinned).lambda_min;
  bool monotone_ok = lam_full >= lam_subset - 1e-10;

  AtomicMeasure trans_measure = shipped("translations_only");
  std::vector<Isometry> translations;
  for (const Atom& atom : trans_measure.atoms()) translations.push_back(atom.g);
  LsgOptions trend;
  trend.padding = 0.05;
  trend.basis_box = enclosing_box(ball, translations, 0.05);
  double lam[3];
  for (int n = 2; n <= 4; ++n) {
    trend.basis_n = n;
    lam[n - 2] = lsg_estimate(ball, translations, trend).lambda_min;
  }
  bool trend_ok = lam[1] <= lam[0] + 1e-8 && lam[2] <= lam[1] + 1e-8;

  bool pass = dense_ok && monotone_ok && trend_ok;
  return {pass,
          fmt("lambda %.4f kappa %.2f recheck %.1e; drop-one %.4f<=%.4f; "
              "trend %.3f>=%.3f>=%.3f",
              est.lambda_min, est.kappa_bound,
              std::max(est.witness_mean_recheck, est.witness_norm_recheck),
              lam_subset, lam_full, lam[0], lam[1], lam[2])};
}

// --------------------------------------------------------------------------
// 10. Byte-identical CSV artifacts across reruns at a fixed seed.

Outcome criterion_determinism() {
  fs::path dir = fs::temp_directory_path() /
                 ("isogap_accept_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);

  struct Job {
    const char* config;
    const char* command;
    const char* csv;
  };
  bool pass = true;
  std::string detail;
  for (Job job : {Job{"jobs/oracle_dense.json", "oracle", "oracle.csv"},
                  Job{"jobs/profile_dense.json", "profile", "profile.csv"}}) {
    std::string config = measure_file(job.config);
    int rc1 = run_cli(std::string(job.command) + " --config " + config +
                          " --out run1_" + job.command, dir);
    int rc2 = run_cli(std::string(job.command) + " --config " + config +
                          " --out run2_" + job.command, dir);
    std::string csv1 = slurp(dir / ("run1_" + std::string(job.command)) / job.csv);
    std::string csv2 = slurp(dir / ("run2_" + std::string(job.command)) / job.csv);
    bool same = rc1 == 0 && rc2 == 0 && !csv1.empty() && csv1 == csv2;
    pass = pass && same;
    detail += fmt("%s %s (%zu bytes); ", job.csv,
                  same ? "identical" : "DIFFER", csv1.size());
  }
  fs::remove_all(dir);
  return {pass, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {"algebra and homomorphism", 10, criterion_algebra},
      {"closed-form operator oracle", 60, criterion_oracle},
      {"equal-radius conjugacy", 120, criterion_conjugation},
      {"sphere-by-rotation-group domination", 120, criterion_domination},
      {"small-displacement inequalities", 120, criterion_small_x},
      {"gap profile quadratic floor", 600, criterion_profile},
      {"reduction pipeline", 60, criterion_reduction},
      {"dirichlet form estimates", 120, criterion_dirichlet},
      {"local gap estimator", 300, criterion_lsg},
      {"deterministic csv artifacts", 0, criterion_determinism},
  };

  int failures = 0;
  int index = 0;
  for (const Criterion& criterion : criteria) {
    ++index;
    auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    double elapsed = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    bool in_budget =
        criterion.budget_seconds == 0 || elapsed < criterion.budget_seconds;
    bool pass = outcome.pass && in_budget;
    failures += pass ? 0 : 1;
    std::printf("criterion %2d: %s  %6.1fs  %s: %s%s\n", index,
                pass ? "PASS" : "FAIL", elapsed, criterion.name,
                outcome.detail.c_str(), in_budget ? "" : " [over budget]");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/10 passed\n", 10 - failures);
  return failures;
}
