#pragma once

// Profile specification parsing and the text reports behind the command-line
// subcommands. Reports are deterministic: the same spec and options give the
// same bytes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "qcurv/core.hpp"

namespace qcurv {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

/// Axisymmetric perturbation eps cos^power(theta) eta(r) added to the profile
/// by the symmetrize report. eta is r^power e^{-r^2/4} ("gaussian") or
/// r^power times a bump supported in r < 3 ("bump").
struct Perturbation {
  double eps = 0.0;
  int power = 2;
  bool compact = false;
};

struct ProfileSpec {
  Dim dim;
  RadialProfile profile = flat_profile(make_dim(4));
  std::optional<Perturbation> perturbation;
};

/// Parses {"n": ..., "profile": {...}} with an optional "perturbation"
/// object. Unknown keys, wrong types, malformed JSON and profiles violating
/// their invariants throw SchemaError. `n_override` > 0 replaces "n".
ProfileSpec parse_profile_spec(std::string_view text, int n_override = 0);

enum class OutputFormat { Json, Csv };

struct RunOptions {
  QuadratureSpec quad;
  std::uint64_t seed = kDefaultSeed;
  int nodes = 0;  // radius count for `curvature`; 0 keeps the command default
  OutputFormat format = OutputFormat::Json;
};

struct Report {
  std::string text;
  bool failed = false;  // violated verdict, failed criterion or identity
};

Report curvature_report(const ProfileSpec& spec, const RunOptions& opt);
Report kernels_report(const ProfileSpec& spec, const RunOptions& opt);
Report ends_report(const ProfileSpec& spec, const RunOptions& opt);
Report symmetrize_text_report(const ProfileSpec& spec, const RunOptions& opt);
Report gbc_report(const ProfileSpec& spec, const RunOptions& opt);
Report levelset_report(const ProfileSpec& spec, const RunOptions& opt);
Report suite_report(const RunOptions& opt);

/// Dispatches on the subcommand name; `spec` may be null only for "suite".
/// Throws DomainError for unknown commands.
Report run_command(std::string_view command, const ProfileSpec* spec, const RunOptions& opt);

}  // namespace qcurv
