#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace degenlog {

class Grid;

// Spatial point. One-dimensional problems use the x component only (y == 0).
using Point = Eigen::Vector2d;

inline Point point(double x, double y = 0.0) { return Point(x, y); }

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Domain

struct Rectangle {
  Point lo, hi;
  bool operator==(const Rectangle&) const = default;
};

struct Disc {
  Point center;
  double radius = 1.0;
  bool operator==(const Disc&) const = default;
};

struct Interval {
  double lo = 0.0, hi = 1.0;
  bool operator==(const Interval&) const = default;
};

struct DomainSpec {
  std::variant<Rectangle, Disc, Interval> shape;

  int dim() const { return std::holds_alternative<Interval>(shape) ? 1 : 2; }
  bool operator==(const DomainSpec&) const = default;
};

/// Throws ConfigError when the domain has zero measure or inverted bounds.
void validate(const DomainSpec& domain);

bool inside_open(const DomainSpec& domain, const Point& x);

/// Area (2D) or length (1D).
double measure(const DomainSpec& domain);

// ---------------------------------------------------------------------------
// Compact sets

struct Ball {
  Point center;
  double radius = 0.0;
  bool operator==(const Ball&) const = default;
};

/// Polar sector {|x-c| <= r0, theta0 <= arg(x-c) <= theta1}. 2D only.
struct Sector {
  Point center;
  double r0 = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  bool operator==(const Sector&) const = default;
};

struct PointSet {
  Point at;
  bool operator==(const PointSet&) const = default;
};

struct EmptySet {
  bool operator==(const EmptySet&) const = default;
};

struct SetShape;

struct Union {
  std::vector<SetShape> parts;
};

struct SetShape {
  std::variant<EmptySet, Ball, Sector, PointSet, Union> v;

  SetShape() = default;
  SetShape(EmptySet s) : v(s) {}
  SetShape(Ball s) : v(s) {}
  SetShape(Sector s) : v(s) {}
  SetShape(PointSet s) : v(s) {}
  SetShape(Union s) : v(std::move(s)) {}

  template <class T>
  const T* get_if() const { return std::get_if<T>(&v); }
};

bool operator==(const Union& a, const Union& b);
bool operator==(const SetShape& a, const SetShape& b);

void validate(const SetShape& s);

/// True for EmptySet and for unions whose parts are all empty.
bool is_empty(const SetShape& s);

/// Euclidean distance from x to s; 0 iff x lies in s. Returns +infinity for
/// the empty set, which callers treat as "no vanishing set".
double distance_to_set(const Point& x, const SetShape& s);

/// Distance from x to the complement of s (0 when x is outside s). For unions
/// this is the max over parts, a lower bound when parts overlap.
double depth_in_set(const Point& x, const SetShape& s);

bool contains(const SetShape& s, const Point& x);

/// Rigid motion x -> R(angle) x + shift applied to a shape.
SetShape transformed(const SetShape& s, double angle, const Point& shift);

/// Set-to-set distance. Exact for balls and points, boundary sampling for
/// sectors. +infinity when either set is empty.
double set_distance(const SetShape& a, const SetShape& b);

/// Distance from the shape to the boundary of the domain (negative when the
/// shape pokes out). Sectors are bounded by their enclosing ball.
double clearance(const SetShape& s, const DomainSpec& domain);

// ---------------------------------------------------------------------------
// Moving sets K(t)

enum class RadiusLaw {
  constant,   // r0
  grow,       // r0 (1 - 1/(t+1))
  shrink,     // r0 / (t+1)
  oscillate,  // r0 (1 + |sin(omega t)|)
};

struct RadiusSchedule {
  RadiusLaw law = RadiusLaw::constant;
  double r0 = 0.0;
  double omega = 0.0;

  double operator()(double t) const;
  bool operator==(const RadiusSchedule&) const = default;
};

enum class PathKind {
  fixed,    // a
  circle,   // a + radius (cos(omega t + phase), sin(omega t + phase))
  segment,  // a + (b - a) (1 - cos(2 pi t / period)) / 2
};

struct PathSchedule {
  PathKind kind = PathKind::fixed;
  Point a = Point::Zero();
  Point b = Point::Zero();
  double radius = 0.0;
  double omega = 0.0;
  double phase = 0.0;
  double period = 1.0;

  Point operator()(double t) const;
  /// Upper bound on |gamma'(t)|.
  double max_speed() const;
  bool operator==(const PathSchedule&) const = default;
};

struct AngleSchedule {
  double theta0 = 0.0;
  double omega = 0.0;

  double operator()(double t) const { return theta0 + omega * t; }
  bool operator==(const AngleSchedule&) const = default;
};

struct StaticSet {
  SetShape base;
  bool operator==(const StaticSet&) const = default;
};

struct RadiusBall {
  Point center;
  RadiusSchedule radius;
  bool operator==(const RadiusBall&) const = default;
};

/// Sector rotating clockwise: angles theta - omega t.
struct RotatingSector {
  Point center;
  double r0 = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double omega = 0.0;
  bool operator==(const RotatingSector&) const = default;
};

/// k0 on (n P, n P + t1], k1 on (n P + t1, (n+1) P].
struct Jumping {
  SetShape k0, k1;
  double period = 1.0;
  double t1 = 0.5;
  bool operator==(const Jumping&) const = default;
};

/// K(t) = curve(t) + R(rotation(t)) shape.
struct Translating {
  SetShape shape;
  PathSchedule curve;
  AngleSchedule rotation;
  bool operator==(const Translating&) const = default;
};

struct MovingSetSpec {
  std::variant<StaticSet, RadiusBall, RotatingSector, Jumping, Translating> v;

  MovingSetSpec() : v(StaticSet{EmptySet{}}) {}
  template <class T>
  MovingSetSpec(T variant) : v(std::move(variant)) {}

  template <class T>
  const T* get_if() const { return std::get_if<T>(&v); }
  bool operator==(const MovingSetSpec&) const = default;
};

void validate(const MovingSetSpec& spec);

SetShape snapshot(const MovingSetSpec& spec, double t);

/// Sampling times tA, tA + dt, ..., always including tB.
std::vector<double> sample_times(double t_a, double t_b, double sample_dt);

/// Union of snapshots at sample_times(tA, tB, sampleDt), simplified where the
/// geometry allows (concentric balls, sectors sweeping a full turn).
SetShape union_over_interval(const MovingSetSpec& spec, double t_a, double t_b,
                             double sample_dt);

/// Finite-horizon surrogate of the closure of the union over t >= tau0.
SetShape k_sup(const MovingSetSpec& spec, double tau0, double horizon, double sample_dt);

/// Finite-horizon surrogate of the intersection over t >= tau0. Falls back to
/// the grid-node intersection when no closed form applies.
SetShape k_inf(const MovingSetSpec& spec, double tau0, double horizon, double sample_dt,
               const Grid& grid);

/// Checks every sampled snapshot on [t0, t1] sits inside the open domain.
void check_inside(const MovingSetSpec& spec, const DomainSpec& domain, double t0, double t1,
                  double sample_dt);

// ---------------------------------------------------------------------------
// Logistic coefficient n(t, x)

struct Saturating {
  double nu_max = 1.0;
  double d_ramp = 1.0;
  bool operator==(const Saturating&) const = default;
};

struct Indicator {
  double level = 1.0;
  bool operator==(const Indicator&) const = default;
};

struct NuProfile {
  std::variant<Saturating, Indicator> kind = Saturating{};
  double n_empty = 1.0;

  /// n as a function of the distance to K(t) (d > 0 outside K).
  double operator()(double d) const;
  /// The strictly increasing nu of the nondegeneracy bound n >= nu(d).
  double lower_bound(double d) const;
  bool operator==(const NuProfile&) const = default;
};

void validate(const NuProfile& nu);

double evaluate_n(const MovingSetSpec& spec, const NuProfile& nu, double t, const Point& x);

std::string describe(const SetShape& s);

}  // namespace degenlog
