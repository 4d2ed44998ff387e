#pragma once

// Pointwise curvature of radial LCF metrics g = e^{2w} g0.
//
// Tensors are assembled in flat coordinates at the point (r, 0, ..., 0); for a
// radial w the first axis is the radial direction and the remaining n-1 axes
// are tangential, so every matrix below is diagonal in that frame. Eigenvalue
// and sigma_k computations nonetheless go through a general symmetric solver.
//
// Sign convention for Q: Q = e^{-nw} (-Delta)^m w with Delta = sum d^2/dx_i^2.
// For n = 4, 8 this is e^{-nw} Delta^m w; for n = 2, 6 the extra sign makes
// C_n int Q dv_g the Euler characteristic on closed manifolds (Q_2 = K).

#include <Eigen/Dense>
#include <vector>

#include "qcurv/core.hpp"
#include "qcurv/radial_ops.hpp"

namespace qcurv {

struct CurvatureFrame {
  int n = 0;
  double r = 0.0;
  double w = 0.0;
  Eigen::VectorXd grad;   // flat gradient of w
  Eigen::MatrixXd hess;   // flat Hessian of w
  double lap = 0.0;       // flat Laplacian of w
  double scalar = 0.0;    // R_g
  Eigen::MatrixXd ricci;  // flat components
  Eigen::MatrixXd schouten;
  double J = 0.0;
  Eigen::VectorXd eig;        // eigenvalues of e^{-2w} A, ascending
  std::vector<double> sigma;  // sigma[k-1] = sigma_k, k = 1..m
  double Q = 0.0;
  double pfaff_sigma = 0.0;  // kappa_n sigma_m
  double pfaff_div4 = 0.0;   // flat route, n = 4 only (NaN otherwise)
};

// ---- jet-level building blocks (shared with the other modules) ----
Jet w_jet(const RadialProfile& p, const RadialPoint& pt);
Jet scalar_curvature_jet(const Jet& w, const RadialPoint& pt, int n);
/// Curvature J = R / (2(n-1)).
Jet j_curvature_jet(const Jet& w, const RadialPoint& pt, int n);
Jet q_curvature_jet(const Jet& w, const RadialPoint& pt, const Dim& dim);
/// Delta_g u = e^{-2w} (Delta u + (n-2) w' u').
Jet curved_laplacian_jet(const Jet& u, const Jet& w, const RadialPoint& pt, int n);
/// Radial and tangential eigen-components of the flat Ricci matrix.
Jet ricci_radial_jet(const Jet& w, const RadialPoint& pt, int n);
Jet ricci_tangential_jet(const Jet& w, const RadialPoint& pt, int n);
/// e^{4w} sigma_2 written with flat derivatives (n = 4):
/// (1/2)((Delta w)^2 - |D^2 w|^2 + 2 D^2w(Dw, Dw) + |Dw|^2 Delta w).
Jet sigma2_density_jet(const Jet& w, const RadialPoint& pt, int n);

// ---- operations ----
double scalar_curvature(const RadialProfile& p, double r);
Eigen::MatrixXd ricci(const RadialProfile& p, double r);
Eigen::MatrixXd schouten(const RadialProfile& p, double r);
CurvatureFrame curvature_frame(const RadialProfile& p, double r);

/// k-th elementary symmetric polynomial of the frame's eigenvalues, 1 <= k <= n.
double sigma_k(const CurvatureFrame& frame, int k);
double elementary_symmetric(std::span<const double> values, int k);

double q_curvature_lcf(const RadialProfile& p, double r);
/// Q_4 from Ricci and scalar curvature; n = 4 only.
double q4_general(const RadialProfile& p, double r);
double curved_laplacian(const RadialFn& u, const RadialProfile& p, double r);
/// Paneitz operator of g applied to a radial f; n = 4 only.
double paneitz_apply(const RadialFn& f, const RadialProfile& p, double r);

enum class PfaffianRoute { Sigma, Faf1, Div4 };
double pfaffian(const CurvatureFrame& frame, const RadialProfile& p, PfaffianRoute route);

/// Calibration constants measured on the round sphere (and, for the level-set
/// constant, on w_{-1}). Computed once per dimension.
struct Calibration {
  int n = 0;
  double kappa_sigma = 0.0;  // Pfaff = kappa_sigma * sigma_m
  double div4_calib = 0.0;   // n = 4: factor on the flat Pfaffian expression
  double kappa_div = 0.0;    // n = 4: flux of T(dw, n) = kappa_div * int e^{4w} sigma_2
  // Ratios against the printed constants: kappa_sigma / C_n, div4_calib.
  double ratio_sigma_vs_printed = 0.0;
};
const Calibration& calibration(const Dim& dim);

}  // namespace qcurv
