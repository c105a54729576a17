#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "degenlog/grid.hpp"

namespace degenlog {

struct EquationParams {
  double lambda = 1.0;
  double rho = 2.0;
  NuProfile nu;
  MovingSetSpec moving_set;
};

struct SchemeConfig {
  double dt = 0.0;           // 0 selects 1e-3 / lambda_1 of the domain
  double solve_tol = 1e-10;
  double growth_cap = 0.0;   // 0 selects 1e4 ||u0||_inf
  /// Mutation hook for the fault-injection smoke test: flips the sign of the
  /// logistic term. Never set in real runs.
  bool inject_fault = false;
};

struct StepState {
  double t = 0.0;
  Field u;
};

void validate(const EquationParams& p);
/// Rejects dt <= 0, 1 + dt lambda <= 0 and dt max(lambda, 0) >= 0.5.
void validate(const SchemeConfig& cfg, double lambda);

/// n(t, .) at every interior node.
Eigen::VectorXd sample_n(const Grid& grid, const EquationParams& p, double t);

/// One semi-implicit step with a given coefficient n(t_{k+1}, .):
/// (I + dt(-Delta_h) + dt diag(n |u_k|^{rho-1})) u_{k+1} = (1 + dt lambda) u_k.
Eigen::VectorXd imex_step(const Grid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& n_next,
                          double lambda, double rho, double dt, double solve_tol,
                          bool inject_fault = false);

StepState step(const StepState& state, const EquationParams& p, const SchemeConfig& cfg);

// ---------------------------------------------------------------------------
// Scenarios

struct ConstantInit {
  double c = 1.0;
  bool operator==(const ConstantInit&) const = default;
};
/// height cos^2(pi |x - c| / (2 r)) inside B(c, r), 0 outside.
struct BumpInit {
  Point center = Point::Zero();
  double radius = 0.1;
  double height = 1.0;
  bool operator==(const BumpInit&) const = default;
};
/// Principal eigenfunction of the shape's node mask, scaled to sup norm `scale`.
struct EigenInit {
  SetShape shape;
  double scale = 1.0;
  bool operator==(const EigenInit&) const = default;
};
struct CustomInit {
  Eigen::VectorXd values;
  bool operator==(const CustomInit& o) const { return values.size() == o.values.size() && values == o.values; }
};

struct InitialData {
  std::variant<ConstantInit, BumpInit, EigenInit, CustomInit> kind = ConstantInit{};
  bool operator==(const InitialData&) const = default;
};

struct OutputPlan {
  int sample_every = 1;          // steps between norm records
  double snapshot_every = 0.0;   // 0 disables snapshots
  bool operator==(const OutputPlan&) const = default;
};

struct Scenario {
  std::string label;
  DomainSpec domain{Rectangle{point(0, 0), point(1, 1)}};
  int resolution = 32;
  EquationParams params;
  SchemeConfig scheme;
  double t0 = 0.0;
  double t_end = 1.0;
  InitialData initial;
  OutputPlan outputs;
};

bool operator==(const EquationParams& a, const EquationParams& b);
bool operator==(const SchemeConfig& a, const SchemeConfig& b);
bool operator==(const Scenario& a, const Scenario& b);

struct Trajectory {
  std::vector<double> times, sup_norms, l2_norms, masses;
  std::vector<std::pair<double, Field>> snapshots;
  std::optional<double> cap_hit;
  double growth_cap = 0.0;
  double u0_sup = 0.0;

  std::size_t size() const { return times.size(); }
};

/// Checks the invariants of a scenario (including K(t) inside the domain).
void validate(const Scenario& s);

/// Fills dt and growth_cap defaults.
Scenario resolved(const Scenario& s);

Field initial_field(const Scenario& s, const GridPtr& grid);

/// Integrates over [t0, t_end], recording norms every sample_every steps and
/// at the end; stops at the first record whose sup norm exceeds growth_cap.
Trajectory run(const Scenario& s);
/// Same, with a caller-supplied grid and initial field.
Trajectory run(const Scenario& s, const GridPtr& grid, const Field& u0);

}  // namespace degenlog
