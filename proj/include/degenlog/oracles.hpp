#pragma once

#include <vector>

#include "degenlog/spectral.hpp"

namespace degenlog {

struct OdeBoundParams {
  double lambda = 1.0;
  double nu0 = 1.0;
  double rho = 2.0;
  double w0 = 0.0;
};

/// Solution of W' = lambda W - nu0 W^rho, W(0) = w0, in closed form (with the
/// lambda -> 0 limit at lambda == 0).
double w_closed_form(const OdeBoundParams& p, double t);

/// The w0 -> infinity envelope of w_closed_form. Requires lambda > 0, t > 0.
double w_inf(const OdeBoundParams& p, double t);

/// M exp((lambda - lambda1) t) ||u0||_inf.
double linear_bound(double lambda, double lambda1, double m, double u0_sup, double elapsed);

/// C with z(r) (a - r)^{2/(rho-1)} -> C at the blow-up radius a.
double large_solution_constant(double beta, double rho);

/// Radial solution of z'' + ((N-1)/r) z' + lambda z - beta z^rho = 0,
/// z'(0) = 0, blowing up at r = a.
struct RadialProfile {
  double a = 0.0;
  double z0 = 0.0;
  double blowup_radius = 0.0;  // estimate from the integrated profile
  std::vector<double> r, z;    // increasing r, up to the profile cap

  /// Linear interpolation in the table; +infinity past its last point.
  double operator()(double radius) const;
};

/// Shoots on z(0) until the blow-up radius matches a within tol. Throws
/// ConvergenceError when no bracket is found.
RadialProfile z_radial(double a, double lambda, double beta, double rho, int dim,
                       double cap = 1e8, double tol = 1e-6);

/// Blow-up radius of the radial problem started from z(0) = z0 (+inf if the
/// solution stays below the cap up to r_max).
double blowup_radius(double z0, double lambda, double beta, double rho, int dim, double cap,
                     double r_max, RadialProfile* profile = nullptr);

struct TauInputs {
  int dim = 2;
  double lam = 0.0;
  double lam1E = 0.0;
  double lam2E = 0.0;
  double c_inf = 1.0;
  double v0_norm = 1.0;
  double alpha1 = 1.0;     // <v0, phi_1^E>
  double inf_phi1D = 1.0;  // inf over D of phi_1^E
  double max_phi1D = 1.0;  // max over D of phi_1^D
  double gamma = 2.0;
};

/// Waiting time after which the linear flow on E from v0 dominates
/// gamma phi_1^D on D: the max of the smoothing branch and the growth branch.
double tau_unbounded(const TauInputs& in);

/// exp((lambda - lambda_1^E) t) <u0, phi_1^E> phi_1^E.
Field subsolution_growth(double lambda, const EigenPair& eigen, const Field& u0, double t);

}  // namespace degenlog
