#pragma once

#include <iosfwd>

#include "isogap/io.hpp"

namespace isogap {

// Executes one job end to end: load inputs, compute, stage every artifact
// (including a manifest) into config.output_dir.  Returns 0 on success and
// throws Error subclasses otherwise.  At this boundary the admissibility
// preflight codes are translated to the numbered model assumptions:
// "no-rotation-gap" -> "assumption-1", "common-fixed-point" ->
// "assumption-2".
int run_job(const JobConfig& config, std::ostream& log);

}  // namespace isogap
