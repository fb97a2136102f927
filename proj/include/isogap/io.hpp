#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "isogap/errors.hpp"
#include "isogap/lsg.hpp"
#include "isogap/measure.hpp"
#include "isogap/operators.hpp"
#include "isogap/verifier.hpp"

namespace isogap {

// ---------------------------------------------------------------------------
// Generator-set files
//
// Schema: { "d": 3,
//           "atoms": [ { "quaternion": [w,x,y,z]
//                        | "axis_angle": {"axis": [..], "angle": rad}
//                        | "matrix": [[..],[..],[..]],
//                        "translation": [..], "weight": r } ],
//           "symmetrize": bool, "label": str }
// Weights are normalized to total mass one on load.

AtomicMeasure parse_measure_json(const std::string& text,
                                 const std::string& fallback_label);
AtomicMeasure load_measure_json(const std::string& path);
std::string measure_json(const AtomicMeasure& mu);

// ---------------------------------------------------------------------------
// Job configuration
//
// One JSON object per job.  Required: command, measure, seed.  The measure
// path is resolved relative to the config file's directory.  Grids and
// probe lists must be sorted ascending.  Unknown keys are rejected.

struct JobConfig {
  std::string command;
  std::string measure_path;
  std::uint64_t seed = 0;
  std::string output_dir;  // default out/<command>
  int threads = 1;
  int band_limit = 0;  // 0 = command default
  int margin = 0;      // 0 = command default
  std::vector<double> grid;
  std::vector<double> probes;
  int count = 20;                 // oracle sample count
  Vec3 direction = Vec3(1, 0, 0); // verify displacement direction
  std::optional<Region> region;   // lsg
  int basis_n = 4;
  double padding = 0.05;
  int witness_samples = 0;  // per-axis witness CSV sampling; 0 = off
  bool dump_operator = false;
  std::string raw;  // exact config bytes, hashed into the manifest
};

JobConfig parse_job_config(const std::string& text, const std::string& config_dir);
JobConfig load_job_config(const std::string& path);

// ---------------------------------------------------------------------------
// Formatting and artifacts

// Fixed 17-significant-digit scientific form; round-trip exact for binary64.
std::string format_scientific(double v);

std::string profile_csv(const std::vector<ProfilePoint>& points);

// {"error": {"class": .., "code": .., "message": ..}}
std::string error_json(const Error& e);
// usage 2, preflight 3, numerical 4
int exit_code_for(const Error& e);

std::uint64_t fnv1a(const std::string& bytes);

// Writes every artifact to "<name>.staging" inside dir (created if
// needed), then renames them all; no partial outputs on failure.
void write_artifacts(const std::string& dir,
                     const std::map<std::string, std::string>& artifacts);

// ---------------------------------------------------------------------------
// Binary operator dumps: one JSON header line, then row-major complex128
// little-endian payload.

std::string operator_dump_bytes(const BandLimitedOperator& op);
BandLimitedOperator parse_operator_dump(const std::string& bytes);
BandLimitedOperator load_operator_dump(const std::string& path);

}  // namespace isogap
