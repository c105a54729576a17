#pragma once

#include <vector>

#include "degenlog/grid.hpp"

namespace degenlog {

/// Eigenvalue of -Delta_h on a mask and its eigenvector, L2_h-normalized and
/// extended by zero off the mask.
struct EigenPair {
  double value = 0.0;
  Field vector;
};

/// Inverse iteration on -Delta_h restricted to a connected mask. The sign is
/// fixed so the vector is positive. Throws ConfigError for empty or
/// disconnected masks and ConvergenceError when the iteration stalls.
EigenPair principal_eigenpair(const GridPtr& grid, const Mask& m, double tol = 1e-10);

/// Second eigenvalue by inverse iteration deflated against the principal vector.
double second_eigenvalue(const GridPtr& grid, const Mask& m, double tol = 1e-10);

/// Smallest principal eigenvalue over the connected components of m.
double lambda1_of_mask(const GridPtr& grid, const Mask& m, double tol = 1e-10);

enum class Lambda0Verdict { finite, infinite };

struct Lambda0Estimate {
  std::vector<double> deltas;  // strictly decreasing
  std::vector<double> values;  // lambda_1 of {d(x, K) < delta}
  Lambda0Verdict verdict = Lambda0Verdict::finite;
  double value = 0.0;          // extrapolated to delta -> 0, +inf when infinite
};

/// delta0 * 2^-k while above 2h, then exactly 2h.
std::vector<double> default_deltas(const Grid& grid, double delta0 = 0.1);

/// lambda_0 of a compact set through the shrinking neighbourhoods
/// {d(x, K) < delta}. Empty deltas selects default_deltas. The extrapolation
/// is a quadratic in delta through the last three values.
Lambda0Estimate lambda0_of_set(const GridPtr& grid, const SetShape& k,
                               std::vector<double> deltas = {}, double cap = 1e4);

/// First positive zero of J0 by bisection.
double bessel_j0_first_zero();

/// Closed-form lambda_1 of rectangles, discs and intervals.
double analytic_lambda1(const DomainSpec& domain);
/// Closed-form lambda_1 of a ball: j01^2 / r^2 in 2D, pi^2 / (4 r^2) in 1D.
double analytic_lambda1(const SetShape& shape, int dim);

}  // namespace degenlog
