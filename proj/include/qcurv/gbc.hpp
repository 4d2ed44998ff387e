#pragma once

// Total Q-curvature of radial LCF metrics, the Gauss-Bonnet-Chern bound
// checks, gluing of ends and the dimension-4 level-set identities.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qcurv/core.hpp"
#include "qcurv/radial.hpp"

namespace qcurv {

inline constexpr double kGbcTolerance = 1e-3;

enum class Verdict { Satisfied, Violated, HypothesesNotMet };
const char* verdict_name(Verdict v);

enum class HypothesisMode { Basic, BoundedGeometry };

struct HypothesisFlags {
  bool complete = false;  // complete toward every end
  bool scalar_nonneg = false;  // R >= 0 near every end
  bool q_integrable = false;  // int |Q| dv_g finite, from the tail decay of r^n |Delta^m w|
  bool bounded_geometry_checked = false;
  bool bounded_geometry = false;
  double tail_ratio = 0.0;  // worst r^n |Delta^m w| ratio over one doubling
  double worst_gate = 0.0;  // max of r^2 (Delta w + (m-1) w'^2) near the ends
  // bounded-geometry scan over the sample radii
  double inf_scalar = std::numeric_limits<double>::quiet_NaN();
  double sup_scalar = std::numeric_limits<double>::quiet_NaN();
  double sup_grad_scalar = std::numeric_limits<double>::quiet_NaN();  // sup e^{-w} |R'|
  double min_ricci = std::numeric_limits<double>::quiet_NaN();        // min eigenvalue of e^{-2w} Ric

  bool all(HypothesisMode mode = HypothesisMode::Basic) const {
    return complete && scalar_nonneg && q_integrable && (mode == HypothesisMode::Basic || bounded_geometry);
  }
};

/// R >= 0 is probed on [r_max/2, r_max] toward infinity and on [1e-3, 2e-3]
/// toward an origin puncture. Never throws for numerical trouble; a flag
/// that cannot be established is false.
HypothesisFlags check_hypotheses(const RadialProfile& p, HypothesisMode mode = HypothesisMode::Basic,
                                 double r_max = 100.0);

struct TotalQ {
  double value = 0.0;       // flux route
  double flux = 0.0;
  double quadrature = 0.0;
  double flux_error = 0.0;  // Richardson spread of the flux limits
};

/// C_n int Q dv_g = C_n int (-Delta)^m w dx over R^n (minus the origin for
/// punctured profiles), by the flux limits at the ends and by direct
/// quadrature. Throws IntegrabilityError when Delta^m w fails the tail check
/// and ConsistencyError when the routes differ by more than 10 quad.eps.
TotalQ total_q_routes(const RadialProfile& p, const QuadratureSpec& quad = {});
double total_q(const RadialProfile& p, const QuadratureSpec& quad = {});

struct EndContribution {
  std::string label;
  double flux = 0.0;
  double quadrature = 0.0;
};

struct GBCReport {
  int n = 0;
  double total = 0.0;
  double bound = 1.0;  // Euler characteristic of the compactified domain
  double flux = 0.0;
  double quadrature = 0.0;
  HypothesisFlags flags;
  Verdict verdict = Verdict::HypothesesNotMet;
  bool equality_expected = false;
  bool equality_observed = false;
  std::vector<EndContribution> contributions;
};

/// R^n with a single end at infinity. Punctured profiles throw DomainError.
GBCReport verify_gbc_rn(const RadialProfile& p, const QuadratureSpec& quad = {});

/// Support of an end's partition-of-unity function. The infinity end's cutoff
/// vanishes on r <= inner and equals 1 on r >= outer; a puncture's cutoff,
/// centred at the axial point `center`, equals 1 on |x - center| <= inner and
/// vanishes beyond outer.
struct Localization {
  double center = 0.0;
  double inner = 0.5;
  double outer = 1.0;
};

/// Sum of C_n int Delta^m (l_i w_i) over the ends plus the interior remainder.
/// Requires exactly one end at infinity. Throws DecompositionError when the
/// localizations overlap or do not match the ends.
GBCReport multi_end_total(const std::vector<EndSpec>& ends, const std::vector<Localization>& loc,
                          const RadialProfile& interior, const QuadratureSpec& quad = {});

/// Polynomial step of class C^continuity: 0 for r <= a, 1 for r >= b.
RadialFn smooth_step(double a, double b, int continuity);
/// 1 on [2, 3], 0 outside (1, 4); class C^n, enough for Delta^m.
RadialFn standard_cutoff(const Dim& dim);

/// C_n int Delta^m [eta (-w_e - ln r)] dx over 1 <= r <= 4. Throws
/// CutoffError unless eta vanishes outside (1, 4) and equals 1 on (2, 3).
double gluing_invariance(const RadialProfile& end_profile, const RadialFn& eta);

// ---- level sets, n = 4 ----

/// Radius of S_lambda = {e^w = lambda}. Throws LevelSetError when e^w is not
/// strictly decreasing and DomainError when lambda is outside its range.
double level_radius(const RadialProfile& p, double lambda);

struct LevelSetIdentity {
  double lambda = 0.0;
  double radius = 0.0;
  double lhs = 0.0;        // int_{U_lambda} Delta_g f dv_g
  double rhs = 0.0;        // orientation * lambda d/dlambda [...]
  double rhs_printed = 0.0;  // lambda d/dlambda [...] with the outward normal
  double inner_flux = 0.0;   // flux of e^{2w} grad f through |x| = inner; 0 for balls
  double defect = 0.0;       // |lhs + inner_flux - rhs|
};

/// With the outward normal the bracket's lambda-derivative has the opposite
/// sign to the volume side.
inline constexpr double kLevelSetOrientation = -1.0;

/// f is a function of lambda, applied as f(e^{w(x)}). `inner` > 0 truncates
/// U_lambda to the annulus inner <= r <= r(lambda).
LevelSetIdentity levelset_identity(const RadialProfile& p, const RadialFn& f, double lambda,
                                   double inner = 0.0);

struct LevelSetFrame {
  double lambda = 0.0;
  double radius = 0.0;
  double inner = 0.0;
  double volume_g = 0.0;       // int_{U_lambda} dv_g
  double area_g = 0.0;         // g-area of S_lambda
  double normal_slope = 0.0;   // flat outward d_n w on S_lambda
  double F = 0.0;
  double lambda_dF = 0.0;      // lambda dF/dlambda, central differences
  double sigma2_integral = 0.0;  // int_{U_lambda} sigma_2 dv_g
  double kappa = 0.0;
  double defect = 0.0;         // |lambda dF - kappa int sigma_2| / max(|kappa int sigma_2|, 1)
};

/// F(lambda) with flat volume elements and the flat outward normal.
LevelSetFrame f_lambda(const RadialProfile& p, double lambda, double inner = 0.0);

/// lambda F'(lambda) / int sigma_2 dv_g on the round sphere at lambda = 1.
double levelset_kappa();

// ---- randomized sweep ----

/// Up to three log1p_sq terms with |c| <= 1.5 and rho in [0.5, 2], kept when
/// complete at infinity and R >= 0 holds on [r_max/2, r_max].
std::vector<RadialProfile> random_complete_profiles(const Dim& dim, int count, std::uint64_t seed,
                                                    double r_max = 100.0);

struct SweepReport {
  int profiles = 0;
  int violations = 0;
  int hypothesis_failures = 0;
  double max_total = -std::numeric_limits<double>::infinity();
  std::vector<double> totals;
};

SweepReport gbc_sweep(const Dim& dim, int count, std::uint64_t seed, const QuadratureSpec& quad = {});

}  // namespace qcurv
