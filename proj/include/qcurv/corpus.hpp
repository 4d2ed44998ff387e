#pragma once

#include <string>
#include <vector>

#include "qcurv/core.hpp"

namespace qcurv {

struct CorpusEntry {
  std::string name;
  RadialProfile profile;
};

/// Named analytic profiles used across the checks: the w_a family, the round
/// sphere, mixed log1p_sq sums, and punctured profiles.
std::vector<CorpusEntry> profile_corpus(const Dim& dim);

}  // namespace qcurv
