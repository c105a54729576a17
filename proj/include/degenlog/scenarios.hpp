#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "degenlog/evolve.hpp"

namespace degenlog {

// ---------------------------------------------------------------------------
// Classification of finite trajectories

enum class VerdictKind { bounded, grow_up, inconclusive };

struct ClassifyConfig {
  std::size_t min_records = 50;
  double tail_fraction = 0.2;     // trailing window for the plateau and monotone tests
  double plateau_tol = 0.01;      // relative gap between the two half-window maxima
  double level_fraction = 0.1;    // bounded level must stay below this fraction of the cap
  double decay_ratio = 1e-6;      // final sup below decay_ratio ||u0|| counts as decay
};

struct Verdict {
  VerdictKind kind = VerdictKind::inconclusive;
  bool decayed = false;
  double bound_estimate = 0.0;
  std::optional<double> cap_hit_time;
  std::string evidence;
};

/// Bounded when the two halves of the trailing window have maxima within
/// plateau_tol of each other below level_fraction of the cap (or the run has
/// decayed); GrowUp when the cap was hit with a nondecreasing tail.
Verdict classify(const Trajectory& tr, const ClassifyConfig& cfg = {});

const char* to_string(VerdictKind kind);

// ---------------------------------------------------------------------------
// Theorem predicates

enum class Theorem { prop43, cor44, prop51, thm56, thm59, thm61, prop65, none };

const char* to_string(Theorem t);

struct TheoremCheck {
  Theorem theorem = Theorem::none;
  bool hypotheses_hold = false;
  VerdictKind predicted = VerdictKind::inconclusive;
  std::vector<std::pair<std::string, double>> details;
  std::string note;

  /// Value of a named detail; throws std::out_of_range when absent.
  double detail(const std::string& name) const;
  bool fired() const { return hypotheses_hold && predicted != VerdictKind::inconclusive; }
};

struct SpectralBudget {
  int resolution = 64;          // grid for lambda_0 and eigen data on the scenario domain
  double lambda0_cap = 1e4;
  double thm56_tau0 = 0.1;
  double thm56_delta = 0.05;
  int thm56_samples = 16;
  double gamma = 2.0;
  double c_inf = 1.0;           // surrogate for the Sobolev embedding constant
  int max_time_samples = 2000;  // per K_sup / K_inf / window union
};

/// Evaluates every theorem's hypotheses on the declarative moving-set spec
/// over [t0, t_end] and returns one check per theorem, fired or not. Throws
/// ContradictionError when a Bounded and a GrowUp prediction both fire.
std::vector<TheoremCheck> predict(const Scenario& s, const SpectralBudget& budget = {});

/// Sampling step used for unions and intersections of K(t) on [tA, tB].
double structural_sample_dt(const MovingSetSpec& spec, double t_a, double t_b, int max_samples);

/// First positive zero of J1 by bisection.
double bessel_j1_first_zero();

// ---------------------------------------------------------------------------
// Cross-check

enum class CrossStatus { consistent, violation, undecided, inconclusive };

const char* to_string(CrossStatus s);

/// CONSISTENT when the fired predictions agree with the verdict, VIOLATION
/// when they disagree, UNDECIDED when nothing fired, INCONCLUSIVE when a
/// prediction fired but the run could not be classified.
CrossStatus combine(const std::vector<TheoremCheck>& checks, const Verdict& verdict);

struct CrossCheckReport {
  std::string label;
  std::vector<TheoremCheck> checks;
  Trajectory trajectory;
  Verdict verdict;
  CrossStatus status = CrossStatus::undecided;
};

CrossCheckReport cross_check(const Scenario& s, const SpectralBudget& budget = {},
                             const ClassifyConfig& cfg = {});

// ---------------------------------------------------------------------------
// Registry

struct RegistryEntry {
  Scenario scenario;
  /// Exploratory runs are reported but never gate a suite.
  bool exploratory = false;
  std::string note;
};

std::vector<std::string> registry_labels();
/// Throws ConfigError for unknown labels.
RegistryEntry registry_entry(const std::string& label);

// ---------------------------------------------------------------------------
// Initial-data independence

struct SandwichReport {
  double alpha = 0.0;  // min of v/u over interior nodes after delta
  double beta = 0.0;   // max of v/u
  std::vector<double> times;
  double worst_violation = 0.0;  // largest relative excess over the sandwich
  bool holds = false;
};

/// Evolves u0 and v0 to t0 + delta, takes alpha, beta from the nodal ratio
/// v/u and checks min(alpha, 1) u <= v <= max(beta, 1) u at `samples` later
/// times up to t_end. Throws ContradictionError when u vanishes at an
/// interior node after delta.
SandwichReport initial_data_independence(const Scenario& s, const Field& u0, const Field& v0,
                                         double delta, int samples = 10, double slack = 1e-8);

// ---------------------------------------------------------------------------
// Library property suite

struct PropertyResult {
  std::string name;
  bool passed = false;
  double worst = 0.0;  // worst slack or ratio observed
  std::string detail;
};

struct PropertyConfig {
  unsigned seed = 20240601;
  int trials = 20;
  int steps = 50;
  int resolution = 16;
  bool inject_fault = false;
};

/// Comparison in n and u0, scaling, linear bound, W domination and the
/// initial-data sandwich on small random problems.
std::vector<PropertyResult> run_properties(const PropertyConfig& cfg = {});

}  // namespace degenlog
