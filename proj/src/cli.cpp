#include "isogap/cli.hpp"

#include <chrono>
#include <cstdio>
#include <ostream>

#include <json.hpp>

#include "isogap/rng.hpp"

namespace isogap {

namespace {

using nlohmann::json;

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json region_json(const Region& region) {
  if (region.kind == Region::Kind::box)
    return {{"kind", "box"},
            {"center", vec3_json(region.center)},
            {"half_extent", vec3_json(region.half_extent)}};
  return {{"kind", "ball"},
          {"center", vec3_json(region.center)},
          {"radius", region.radius}};
}

json rotation_gap_json(const RotationGap& gap, int band) {
  return {{"band_limit", band},
          {"alpha", gap.alpha},
          {"attaining_l", gap.attaining_l},
          {"no_gap", gap.no_gap},
          {"block_norms", gap.block_norms}};
}

std::string dump(const json& value) { return value.dump(2) + "\n"; }

std::vector<double> default_profile_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(i / 10.0);
  return grid;
}

std::vector<double> default_small_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 20; ++i) grid.push_back(i * 0.02);
  return grid;
}

using Artifacts = std::map<std::string, std::string>;

void run_rotation_gap(const JobConfig& config, Artifacts& artifacts,
                      std::ostream& log) {
  AtomicMeasure mu = load_measure_json(config.measure_path);
  int band = config.band_limit ? config.band_limit : 8;
  RotationGap gap = rotation_gap(mu, band);
  json out = rotation_gap_json(gap, band);
  out["measure"] = mu.label();
  out["atoms"] = mu.size();
  artifacts["rotation_gap.json"] = dump(out);
  log << "rotation-gap: " << mu.label() << " alpha=" << gap.alpha
      << " attaining_l=" << gap.attaining_l << "\n";
}

void run_profile(const JobConfig& config, Artifacts& artifacts, std::ostream& log) {
  AtomicMeasure mu = load_measure_json(config.measure_path);
  int band = config.band_limit ? config.band_limit : 12;
  int margin = config.margin ? config.margin : 8;
  std::vector<double> grid = config.grid.empty() ? default_profile_grid() : config.grid;
  GapProfile profile = gap_profile(mu, grid, band, margin, 8, config.threads);
  artifacts["profile.csv"] = profile_csv(profile.points);
  json summary = {{"measure", mu.label()},
                  {"band_limit", band},
                  {"margin", margin},
                  {"grid_points", grid.size()},
                  {"c0", profile.c0.c0},
                  {"c0_attaining_index", profile.c0.attaining_index},
                  {"c0_floor_hit", profile.c0.floor_hit},
                  {"fitted_exponent", profile.fitted_exponent},
                  {"exponent_points", profile.exponent_points},
                  {"rotation", rotation_gap_json(profile.rotation, 8)}};
  artifacts["profile_summary.json"] = dump(summary);
  log << "profile: " << mu.label() << " c0=" << profile.c0.c0
      << " exponent=" << profile.fitted_exponent << "\n";
}

void run_verify(const JobConfig& config, Artifacts& artifacts, std::ostream& log) {
  AtomicMeasure mu = load_measure_json(config.measure_path);
  int band = config.band_limit ? config.band_limit : 8;
  int margin = config.margin ? config.margin : 16;
  ensure_admissible(mu, 8);
  Vec3 direction = config.direction.normalized();
  std::vector<double> grid = config.grid.empty() ? default_small_grid() : config.grid;
  std::vector<double> probes =
      config.probes.empty() ? std::vector<double>{0.25, 0.75, 1.5} : config.probes;

  SmallXReport small = small_x_check(mu, grid, direction, band, margin);
  json points = json::array();
  for (const SmallXPoint& p : small.points)
    points.push_back({{"x", p.x},
                      {"lhs_shift", p.lhs_shift},
                      {"rhs_shift", p.rhs_shift},
                      {"lhs_square", p.lhs_square},
                      {"rhs_square", p.rhs_square},
                      {"lhs_energy", p.lhs_energy},
                      {"rhs_energy", p.rhs_energy}});
  json small_json = {{"direction", vec3_json(direction)},
                     {"band_limit", band},
                     {"margin", margin},
                     {"second_moment", small.second_moment},
                     {"shift_prefix", small.shift_prefix},
                     {"square_prefix", small.square_prefix},
                     {"energy_prefix", small.energy_prefix},
                     {"min_shift_slack", small.min_shift_slack},
                     {"min_square_slack", small.min_square_slack},
                     {"points", points}};

  bool domination_ok = true;
  json domination = json::array();
  for (double r : probes) {
    DominationReport rep =
        radial_domination_check(mu, r * direction, band, band + 2, 8, margin);
    bool pass = rep.slack >= -1e-6;
    domination_ok = domination_ok && pass;
    domination.push_back({{"r", r},
                          {"sphere_norm", rep.sphere_norm},
                          {"so3_norm", rep.so3_norm},
                          {"slack", rep.slack},
                          {"pass", pass}});
  }

  bool oracle_ok = true;
  json oracle = json::array();
  for (double r : probes) {
    ConstantsOracleReport rep = constants_oracle(mu, r * direction, band, 8);
    bool pass = rep.max_column_error <= 1e-6 && rep.norm_identity_error <= 1e-6;
    oracle_ok = oracle_ok && pass;
    oracle.push_back({{"r", r},
                      {"max_column_error", rep.max_column_error},
                      {"norm_identity_error", rep.norm_identity_error},
                      {"pass", pass}});
  }

  bool shift_global = small.shift_prefix == static_cast<int>(small.points.size());
  json report = {{"measure", mu.label()},
                 {"admissible", true},
                 {"fixed_point_residual", common_fixed_point_residual(mu)},
                 {"rotation", rotation_gap_json(rotation_gap(mu, 8), 8)},
                 {"small_x", small_json},
                 {"domination", domination},
                 {"constants_oracle", oracle},
                 {"all_pass", domination_ok && oracle_ok && shift_global}};
  artifacts["verify_report.json"] = dump(report);
  log << "verify: " << mu.label() << " all_pass="
      << (domination_ok && oracle_ok && shift_global) << "\n";
}

void run_reduce(const JobConfig& config, Artifacts& artifacts, std::ostream& log) {
  AtomicMeasure mu = load_measure_json(config.measure_path);
  std::vector<double> probes =
      config.probes.empty() ? std::vector<double>{0.25, 0.75, 1.5} : config.probes;
  ReductionReport rep = reduction_pipeline(mu, 8, 8, probes);
  json roots = json::array();
  bool roots_ok = true;
  for (const auto& check : rep.root_checks) {
    bool pass = check.lhs <= check.rhs + 1e-6;
    roots_ok = roots_ok && pass;
    roots.push_back(
        {{"r", check.r}, {"lhs", check.lhs}, {"rhs", check.rhs}, {"pass", pass}});
  }
  json out = {{"measure", mu.label()},
              {"alpha", rep.alpha},
              {"s", rep.s},
              {"beta", rep.beta},
              {"alpha_s", rep.alpha_s},
              {"transfer_lower", rep.transfer_lower},
              {"fixed_point", vec3_json(rep.fixed_pt)},
              {"centered_mean", rep.centered_mean},
              {"alpha1", rep.alpha1},
              {"ell", rep.ell},
              {"power_mean", rep.power_mean},
              {"block_identity_error", rep.block_identity_error},
              {"root_checks", roots},
              {"root_checks_pass", roots_ok},
              {"truncated_atoms", rep.mu1 ? rep.mu1->size() : 0},
              {"power_atoms", rep.mu2 ? rep.mu2->size() : 0}};
  artifacts["reduction.json"] = dump(out);
  if (rep.mu1) artifacts["measure_truncated.json"] = measure_json(*rep.mu1);
  if (rep.mu2) artifacts["measure_power.json"] = measure_json(*rep.mu2);
  log << "reduce: " << mu.label() << " beta=" << rep.beta << " ell=" << rep.ell
      << "\n";
}

void run_lsg(const JobConfig& config, Artifacts& artifacts, std::ostream& log) {
  AtomicMeasure mu = load_measure_json(config.measure_path);
  std::vector<Isometry> generators;
  for (const Atom& atom : mu.atoms()) generators.push_back(atom.g);
  LsgOptions opts;
  opts.basis_n = config.basis_n;
  opts.padding = config.padding;
  LsgEstimate est = lsg_estimate(*config.region, generators, opts);

  json witness = json::array();
  for (Eigen::Index k = 0; k < est.witness.size(); ++k)
    witness.push_back(json::array(
        {est.witness[k].real(), est.witness[k].imag()}));
  json out = {{"measure", mu.label()},
              {"lambda_min", est.lambda_min},
              {"kappa_bound", est.no_gap ? json() : json(est.kappa_bound)},
              {"no_gap", est.no_gap},
              {"basis_n", est.basis_n},
              {"basis_dim", est.basis_dim},
              {"generators", est.generators},
              {"mass_condition", est.mass_condition},
              {"eig_residual", est.eig_residual},
              {"witness_mean_error", est.witness_mean_error},
              {"witness_norm_error", est.witness_norm_error},
              {"witness_mean_recheck", est.witness_mean_recheck},
              {"witness_norm_recheck", est.witness_norm_recheck},
              {"region", region_json(est.region)},
              {"basis_box", region_json(est.basis_box)},
              {"witness", witness}};
  artifacts["lsg_result.json"] = dump(out);

  if (config.witness_samples > 0) {
    TrigBasis basis(est.basis_box.center, 2.0 * est.basis_box.half_extent,
                    est.basis_n);
    Vec3 lo, hi;
    if (est.region.kind == Region::Kind::box) {
      lo = est.region.center - est.region.half_extent;
      hi = est.region.center + est.region.half_extent;
    } else {
      lo = est.region.center - est.region.radius * Vec3::Ones();
      hi = est.region.center + est.region.radius * Vec3::Ones();
    }
    int n = config.witness_samples;
    std::vector<Complex> row(basis.dim());
    std::string csv = "x,y,z,re,im\n";
    for (int ix = 0; ix < n; ++ix)
      for (int iy = 0; iy < n; ++iy)
        for (int iz = 0; iz < n; ++iz) {
          Vec3 t(n == 1 ? 0.5 : ix / (n - 1.0), n == 1 ? 0.5 : iy / (n - 1.0),
                 n == 1 ? 0.5 : iz / (n - 1.0));
          Vec3 p = lo + (hi - lo).cwiseProduct(t);
          basis.eval_all(p, row.data());
          Complex phi(0.0, 0.0);
          for (int k = 0; k < basis.dim(); ++k) phi += est.witness[k] * row[k];
          csv += format_scientific(p.x()) + "," + format_scientific(p.y()) + "," +
                 format_scientific(p.z()) + "," + format_scientific(phi.real()) +
                 "," + format_scientific(phi.imag()) + "\n";
        }
    artifacts["witness.csv"] = csv;
  }
  log << "lsg: " << mu.label() << " lambda_min=" << est.lambda_min
      << " kappa<=" << est.kappa_bound << "\n";
}

void run_oracle(const JobConfig& config, Artifacts& artifacts, std::ostream& log) {
  AtomicMeasure mu = load_measure_json(config.measure_path);
  int band = config.band_limit ? config.band_limit : 8;
  int margin = config.margin ? config.margin : 8;
  Rng rng(config.seed);
  So3Assembler assembler(band, margin);
  std::string csv = "index,x0,x1,x2,radius,column_error,identity_error\n";
  double max_column = 0.0, max_identity = 0.0;
  Vec3 first_x = Vec3::Zero();
  for (int i = 0; i < config.count; ++i) {
    Vec3 direction = random_unit_vector(rng);
    double radius = 1.5 * rng.uniform();
    Vec3 x = radius * direction;
    if (i == 0) first_x = x;
    ConstantsOracleReport rep = constants_oracle(assembler, mu, x);
    max_column = std::max(max_column, rep.max_column_error);
    max_identity = std::max(max_identity, rep.norm_identity_error);
    csv += std::to_string(i) + "," + format_scientific(x.x()) + "," +
           format_scientific(x.y()) + "," + format_scientific(x.z()) + "," +
           format_scientific(radius) + "," +
           format_scientific(rep.max_column_error) + "," +
           format_scientific(rep.norm_identity_error) + "\n";
  }
  artifacts["oracle.csv"] = csv;
  json summary = {{"measure", mu.label()},
                  {"band_limit", band},
                  {"margin", margin},
                  {"count", config.count},
                  {"max_column_error", max_column},
                  {"max_identity_error", max_identity}};
  artifacts["oracle_summary.json"] = dump(summary);
  if (config.dump_operator) {
    BandLimitedOperator op = so3_operator(mu, first_x, band, margin);
    artifacts["operator.bin"] = operator_dump_bytes(op);
  }
  log << "oracle: " << mu.label() << " max_column_error=" << max_column
      << " max_identity_error=" << max_identity << "\n";
}

}  // namespace

int run_job(const JobConfig& config, std::ostream& log) {
  auto start = std::chrono::steady_clock::now();
  Artifacts artifacts;
  try {
    if (config.command == "rotation-gap")
      run_rotation_gap(config, artifacts, log);
    else if (config.command == "profile")
      run_profile(config, artifacts, log);
    else if (config.command == "verify")
      run_verify(config, artifacts, log);
    else if (config.command == "reduce")
      run_reduce(config, artifacts, log);
    else if (config.command == "lsg")
      run_lsg(config, artifacts, log);
    else if (config.command == "oracle")
      run_oracle(config, artifacts, log);
    else
      throw UsageError("bad-command", "unknown command \"" + config.command + "\"");
  } catch (const PreflightError& e) {
    if (e.code() == "no-rotation-gap")
      throw PreflightError("assumption-1", e.what());
    if (e.code() == "common-fixed-point")
      throw PreflightError("assumption-2", e.what());
    throw;
  }

  json names = json::array();
  for (const auto& [name, bytes] : artifacts) names.push_back(name);
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a(config.raw)));
  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  json manifest = {{"tool", "isogap"},
                   {"version", "0.1.0"},
                   {"command", config.command},
                   {"config_hash", hash},
                   {"seed", config.seed},
                   {"threads", config.threads},
                   {"artifacts", names},
                   {"wall_clock_seconds", wall}};
  artifacts["manifest.json"] = dump(manifest);
  write_artifacts(config.output_dir, artifacts);
  log << "wrote " << artifacts.size() << " artifacts to " << config.output_dir
      << "\n";
  return 0;
}

}  // namespace isogap
