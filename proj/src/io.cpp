#include "isogap/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace isogap {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw UsageError("missing-file", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError("bad-json", origin + ": " + e.what());
  }
}

void reject_unknown_keys(const json& obj, const std::vector<std::string>& allowed,
                         const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const std::string& key : allowed)
      if (item.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw UsageError("bad-config", context + ": unknown key \"" + item.key() + "\"");
  }
}

double number_field(const json& obj, const char* key, const std::string& context) {
  if (!obj.contains(key) || !obj[key].is_number())
    throw UsageError("bad-config", context + ": \"" + key + "\" must be a number");
  return obj[key].get<double>();
}

Vec3 vec3_field(const json& value, const std::string& context) {
  if (!value.is_array() || value.size() != 3 || !value[0].is_number() ||
      !value[1].is_number() || !value[2].is_number())
    throw UsageError("bad-config", context + " must be an array of 3 numbers");
  return Vec3(value[0].get<double>(), value[1].get<double>(),
              value[2].get<double>());
}

std::vector<double> sorted_list_field(const json& value, const std::string& context) {
  if (!value.is_array() || value.empty())
    throw UsageError("bad-config", context + " must be a nonempty array");
  std::vector<double> out;
  for (const auto& entry : value) {
    if (!entry.is_number())
      throw UsageError("bad-config", context + " must contain numbers only");
    out.push_back(entry.get<double>());
  }
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] < out[i - 1])
      throw UsageError("unsorted-grid", context + " must be sorted ascending");
  return out;
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

}  // namespace

// ---------------------------------------------------------------------------
// Generator sets

AtomicMeasure parse_measure_json(const std::string& text,
                                 const std::string& fallback_label) {
  json root = parse_json(text, "generator set");
  if (!root.is_object())
    throw UsageError("bad-measure", "generator set must be a JSON object");
  reject_unknown_keys(root, {"d", "atoms", "symmetrize", "label"}, "generator set");
  if (!root.contains("d") || !root["d"].is_number_integer() ||
      root["d"].get<int>() != 3)
    throw UsageError("unsupported-dimension", "generator set must declare \"d\": 3");
  if (!root.contains("atoms") || !root["atoms"].is_array() || root["atoms"].empty())
    throw UsageError("bad-measure", "generator set needs a nonempty \"atoms\" array");

  std::vector<Atom> atoms;
  int index = 0;
  for (const json& entry : root["atoms"]) {
    std::string context = "atom " + std::to_string(index++);
    if (!entry.is_object())
      throw UsageError("bad-measure", context + " must be an object");
    reject_unknown_keys(
        entry, {"quaternion", "axis_angle", "matrix", "translation", "weight"},
        context);
    int rotation_keys = entry.contains("quaternion") + entry.contains("axis_angle") +
                        entry.contains("matrix");
    if (rotation_keys != 1)
      throw UsageError("bad-measure",
                       context + " needs exactly one of quaternion, axis_angle, matrix");
    if (!entry.contains("translation"))
      throw UsageError("bad-measure", context + " needs a translation");
    Vec3 translation = vec3_field(entry["translation"], context + ".translation");
    double weight = number_field(entry, "weight", context);
    if (!(weight > 0.0))
      throw UsageError("bad-measure", context + ": weight must be positive");

    try {
      if (entry.contains("quaternion")) {
        const json& q = entry["quaternion"];
        if (!q.is_array() || q.size() != 4)
          throw UsageError("bad-measure",
                           context + ".quaternion must be [w, x, y, z]");
        atoms.push_back({Isometry::from_quaternion(
                             q[0].get<double>(), q[1].get<double>(),
                             q[2].get<double>(), q[3].get<double>(), translation),
                         weight});
      } else if (entry.contains("axis_angle")) {
        const json& aa = entry["axis_angle"];
        if (!aa.is_object())
          throw UsageError("bad-measure", context + ".axis_angle must be an object");
        reject_unknown_keys(aa, {"axis", "angle"}, context + ".axis_angle");
        Vec3 axis = vec3_field(aa["axis"], context + ".axis_angle.axis");
        double angle = number_field(aa, "angle", context + ".axis_angle");
        atoms.push_back({Isometry::from_axis_angle(axis, angle, translation), weight});
      } else {
        const json& rows = entry["matrix"];
        if (!rows.is_array() || rows.size() != 3)
          throw UsageError("bad-measure", context + ".matrix must be 3 rows");
        Mat3 r;
        for (int i = 0; i < 3; ++i) {
          Vec3 row = vec3_field(rows[i], context + ".matrix row");
          r.row(i) = row.transpose();
        }
        atoms.push_back({Isometry(r, translation), weight});
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError("bad-measure", context + ": " + e.what());
    }
  }

  std::string label = fallback_label;
  if (root.contains("label")) {
    if (!root["label"].is_string())
      throw UsageError("bad-measure", "label must be a string");
    label = root["label"].get<std::string>();
  }
  AtomicMeasure mu = AtomicMeasure::from_atoms(std::move(atoms), label);
  if (root.contains("symmetrize")) {
    if (!root["symmetrize"].is_boolean())
      throw UsageError("bad-measure", "symmetrize must be a boolean");
    if (root["symmetrize"].get<bool>()) mu = symmetrize(mu);
  }
  return mu;
}

AtomicMeasure load_measure_json(const std::string& path) {
  return parse_measure_json(read_file(path), fs::path(path).stem().string());
}

std::string measure_json(const AtomicMeasure& mu) {
  json atoms = json::array();
  for (const Atom& atom : mu.atoms()) {
    const Mat3& r = atom.g.rotation();
    json rows = json::array();
    for (int i = 0; i < 3; ++i)
      rows.push_back(json::array({r(i, 0), r(i, 1), r(i, 2)}));
    atoms.push_back({{"matrix", rows},
                     {"translation", vec3_json(atom.g.translation())},
                     {"weight", atom.weight}});
  }
  json root = {{"d", 3}, {"atoms", atoms}, {"label", mu.label()}};
  return root.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Job configuration

JobConfig parse_job_config(const std::string& text, const std::string& config_dir) {
  json root = parse_json(text, "job config");
  if (!root.is_object())
    throw UsageError("bad-config", "job config must be a JSON object");
  reject_unknown_keys(root,
                      {"command", "measure", "seed", "output", "threads",
                       "band_limit", "margin", "grid", "probes", "count",
                       "direction", "region", "basis_n", "padding",
                       "witness_samples", "dump_operator"},
                      "job config");

  JobConfig config;
  config.raw = text;

  if (!root.contains("command") || !root["command"].is_string())
    throw UsageError("bad-command", "job config needs a \"command\" string");
  config.command = root["command"].get<std::string>();
  const char* known[] = {"rotation-gap", "profile", "verify",
                         "reduce",       "lsg",     "oracle"};
  bool ok = false;
  for (const char* name : known) ok = ok || config.command == name;
  if (!ok)
    throw UsageError("bad-command", "unknown command \"" + config.command + "\"");

  if (!root.contains("seed") || !root["seed"].is_number_integer() ||
      root["seed"].get<std::int64_t>() < 0)
    throw UsageError("missing-seed",
                     "job config needs a nonnegative integer \"seed\"");
  config.seed = root["seed"].get<std::uint64_t>();

  if (!root.contains("measure") || !root["measure"].is_string())
    throw UsageError("bad-config", "job config needs a \"measure\" path");
  fs::path measure = root["measure"].get<std::string>();
  if (measure.is_relative() && !config_dir.empty())
    measure = fs::path(config_dir) / measure;
  config.measure_path = measure.string();
  if (!fs::exists(measure))
    throw UsageError("missing-file", "measure file not found: " + config.measure_path);

  config.output_dir = root.contains("output")
                          ? root["output"].get<std::string>()
                          : "out/" + config.command;
  if (root.contains("threads")) {
    config.threads = root["threads"].get<int>();
    if (config.threads < 1)
      throw UsageError("bad-config", "threads must be >= 1");
  }
  if (root.contains("band_limit")) {
    config.band_limit = root["band_limit"].get<int>();
    if (config.band_limit < 1)
      throw UsageError("bad-config", "band_limit must be >= 1");
  }
  if (root.contains("margin")) {
    config.margin = root["margin"].get<int>();
    if (config.margin < 0)
      throw UsageError("bad-config", "margin must be >= 0");
  }
  if (root.contains("grid")) config.grid = sorted_list_field(root["grid"], "grid");
  if (root.contains("probes"))
    config.probes = sorted_list_field(root["probes"], "probes");
  if (root.contains("count")) {
    config.count = root["count"].get<int>();
    if (config.count < 1)
      throw UsageError("bad-config", "count must be >= 1");
  }
  if (root.contains("direction")) {
    config.direction = vec3_field(root["direction"], "direction");
    if (config.direction.norm() == 0.0)
      throw UsageError("bad-config", "direction must be nonzero");
  }
  if (root.contains("region")) {
    const json& region = root["region"];
    if (!region.is_object() || !region.contains("kind"))
      throw UsageError("bad-config", "region needs a \"kind\"");
    reject_unknown_keys(region, {"kind", "center", "half_extent", "radius"},
                        "region");
    std::string kind = region["kind"].get<std::string>();
    Vec3 center = region.contains("center")
                      ? vec3_field(region["center"], "region.center")
                      : Vec3::Zero();
    try {
      if (kind == "box") {
        if (!region.contains("half_extent"))
          throw UsageError("bad-config", "box region needs half_extent");
        config.region =
            box_region(center, vec3_field(region["half_extent"], "half_extent"));
      } else if (kind == "ball") {
        config.region = ball_region(center, number_field(region, "radius", "region"));
      } else {
        throw UsageError("bad-config", "region kind must be box or ball");
      }
    } catch (const std::invalid_argument& e) {
      throw UsageError("bad-config", std::string("region: ") + e.what());
    }
  }
  if (root.contains("basis_n")) {
    config.basis_n = root["basis_n"].get<int>();
    if (config.basis_n < 1)
      throw UsageError("bad-config", "basis_n must be >= 1");
  }
  if (root.contains("padding")) {
    config.padding = root["padding"].get<double>();
    if (config.padding < 0.0)
      throw UsageError("bad-config", "padding must be >= 0");
  }
  if (root.contains("witness_samples")) {
    config.witness_samples = root["witness_samples"].get<int>();
    if (config.witness_samples < 0)
      throw UsageError("bad-config", "witness_samples must be >= 0");
  }
  if (root.contains("dump_operator"))
    config.dump_operator = root["dump_operator"].get<bool>();

  if (config.command == "lsg" && !config.region)
    throw UsageError("bad-config", "lsg needs a region");
  return config;
}

JobConfig load_job_config(const std::string& path) {
  return parse_job_config(read_file(path),
                          fs::path(path).parent_path().string());
}

// ---------------------------------------------------------------------------
// Formatting and artifacts

std::string format_scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string profile_csv(const std::vector<ProfilePoint>& points) {
  std::string out = "r,norm,one_minus_norm,L,margin,method,residual\n";
  for (const ProfilePoint& p : points) {
    out += format_scientific(p.r) + "," + format_scientific(p.norm) + "," +
           format_scientific(p.one_minus_norm) + "," +
           std::to_string(p.band_limit) + "," + std::to_string(p.margin) + "," +
           p.method + "," + format_scientific(p.residual) + "\n";
  }
  return out;
}

std::string error_json(const Error& e) {
  const char* kind = "numerical";
  if (e.kind() == ErrorKind::usage) kind = "usage";
  if (e.kind() == ErrorKind::preflight) kind = "preflight";
  json out = {{"error",
               {{"class", kind}, {"code", e.code()}, {"message", e.what()}}}};
  return out.dump();
}

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::usage: return 2;
    case ErrorKind::preflight: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 1;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void write_artifacts(const std::string& dir,
                     const std::map<std::string, std::string>& artifacts) {
  fs::create_directories(dir);
  std::vector<fs::path> staged;
  for (const auto& [name, bytes] : artifacts) {
    fs::path staging = fs::path(dir) / (name + ".staging");
    std::ofstream out(staging, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
      throw NumericalError("write-failed", "cannot write " + staging.string());
    staged.push_back(staging);
  }
  for (const auto& [name, bytes] : artifacts) {
    fs::path staging = fs::path(dir) / (name + ".staging");
    fs::rename(staging, fs::path(dir) / name);
  }
}

// ---------------------------------------------------------------------------
// Operator dumps

static_assert(std::endian::native == std::endian::little,
              "operator dumps assume a little-endian host");

std::string operator_dump_bytes(const BandLimitedOperator& op) {
  json header = {
      {"format", "isogap-operator"},
      {"basis",
       op.basis == BandLimitedOperator::Basis::sphere ? "sphere" : "rotation_group"},
      {"band_limit", op.band_limit},
      {"margin", op.margin},
      {"radius", op.radius},
      {"x", vec3_json(op.x)},
      {"measure", op.measure_label},
      {"rows", op.matrix.rows()},
      {"cols", op.matrix.cols()},
      {"dtype", "complex128"},
      {"order", "row-major"},
      {"byte_order", "little"}};
  std::string out = header.dump() + "\n";
  out.reserve(out.size() + 16 * op.matrix.size());
  char buf[16];
  for (Eigen::Index i = 0; i < op.matrix.rows(); ++i)
    for (Eigen::Index j = 0; j < op.matrix.cols(); ++j) {
      double re = op.matrix(i, j).real(), im = op.matrix(i, j).imag();
      std::memcpy(buf, &re, 8);
      std::memcpy(buf + 8, &im, 8);
      out.append(buf, 16);
    }
  return out;
}

BandLimitedOperator parse_operator_dump(const std::string& bytes) {
  std::size_t newline = bytes.find('\n');
  if (newline == std::string::npos)
    throw UsageError("bad-dump", "operator dump has no header line");
  json header = parse_json(bytes.substr(0, newline), "operator dump header");
  if (!header.is_object() || header.value("format", "") != "isogap-operator" ||
      header.value("dtype", "") != "complex128")
    throw UsageError("bad-dump", "not an isogap operator dump");

  BandLimitedOperator op;
  std::string basis = header.value("basis", "");
  if (basis == "sphere")
    op.basis = BandLimitedOperator::Basis::sphere;
  else if (basis == "rotation_group")
    op.basis = BandLimitedOperator::Basis::rotation_group;
  else
    throw UsageError("bad-dump", "unknown basis tag \"" + basis + "\"");
  op.band_limit = header.value("band_limit", 0);
  op.margin = header.value("margin", 0);
  op.radius = header.value("radius", 0.0);
  if (header.contains("x")) op.x = vec3_field(header["x"], "dump x");
  op.measure_label = header.value("measure", "");
  Eigen::Index rows = header.value("rows", 0), cols = header.value("cols", 0);
  if (rows < 0 || cols < 0 ||
      bytes.size() - newline - 1 != static_cast<std::size_t>(16 * rows * cols))
    throw UsageError("bad-dump", "operator dump payload size mismatch");

  op.matrix.resize(rows, cols);
  const char* p = bytes.data() + newline + 1;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double re, im;
      std::memcpy(&re, p, 8);
      std::memcpy(&im, p + 8, 8);
      op.matrix(i, j) = Complex(re, im);
      p += 16;
    }
  return op;
}

BandLimitedOperator load_operator_dump(const std::string& path) {
  return parse_operator_dump(read_file(path));
}

}  // namespace isogap
