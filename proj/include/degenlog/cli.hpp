#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "degenlog/scenarios.hpp"

namespace degenlog {

// ---------------------------------------------------------------------------
// Shape and domain expressions
//
//   ball(x,y;r)  sector(cx,cy;r0;theta0;theta1)  point(x,y)  empty
//   union(expr, expr, ...)
//   rect(x0,y0;x1,y1)  disc(cx,cy;r)  interval(a;b)
//
// A single coordinate stands for (x, 0) in one dimension.

SetShape parse_shape(const std::string& text);
std::string format_shape(const SetShape& s);

DomainSpec parse_domain(const std::string& text);
std::string format_domain(const DomainSpec& d);

/// Shortest decimal form that reads back to the same double.
std::string format_number(double x);

// ---------------------------------------------------------------------------
// Scenario files
//
// Plain key = value lines in sections [domain], [equation], [kset], [time],
// [scheme], [initial], [output]; `label` may precede the first section.
// Lines starting with '#' or ';' are comments. Unknown keys and sections are
// errors carrying the line number.

Scenario parse_scenario(std::istream& in, const std::string& source = "<input>");
Scenario parse_scenario_file(const std::string& path);

/// Canonical text; parse_scenario(emit_scenario(s)) == s. Custom initial
/// data has no file form and is rejected.
std::string emit_scenario(const Scenario& s);

/// Applies "section.key=value" (or "label=value") overrides on top of the
/// canonical form of s and reparses.
Scenario apply_overrides(const Scenario& s, const std::vector<std::string>& overrides);

/// A registry label, else a scenario file path.
Scenario load_scenario(const std::string& ref);

// ---------------------------------------------------------------------------
// Outputs

/// Header "t,sup_norm,l2_norm,mass,cap_hit"; %.17g numbers; cap_hit is "1"
/// from the cap-hit record on and empty before.
void write_trajectory_csv(const Trajectory& tr, std::ostream& out);
void write_trajectory_csv(const Trajectory& tr, const std::string& path);
Trajectory read_trajectory_csv(std::istream& in);

/// One PGM per snapshot, `<stem>_NNNN.pgm`, each scaled to its own maximum
/// (recorded in the sidecar). Returns the written paths.
std::vector<std::string> write_snapshots(const Trajectory& tr, const std::string& stem);

std::string format_checks(const std::vector<TheoremCheck>& checks);
std::string format_cross_check(const CrossCheckReport& rep);

// ---------------------------------------------------------------------------
// Suites

struct SuiteOptions {
  int jobs = 1;
  bool inject_fault = false;  // seeds the sign fault into the property suite
};

struct SuiteReport {
  std::string text;
  std::string csv;
  int exit_code = 0;
};

/// name in {paper-examples, properties, all}. Exit code 1 on any VIOLATION,
/// any non-exploratory scenario that is not CONSISTENT, or a failed property.
SuiteReport run_suite(const std::string& name, const SuiteOptions& opts = {});

/// DEGENLOG_JOBS when set, else `requested`; at least 1.
int resolve_jobs(int requested);

}  // namespace degenlog
