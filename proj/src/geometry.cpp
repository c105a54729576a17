#include "degenlog/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include <Eigen/Geometry>

#include "degenlog/errors.hpp"
#include "degenlog/grid.hpp"

namespace degenlog {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kContainTol = 1e-12;

// Angle of v in [0, 2 pi).
double angle_of(const Point& v) {
  double a = std::atan2(v.y(), v.x());
  return a < 0 ? a + kTwoPi : a;
}

// Reduces a to [0, 2 pi).
double wrap(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

bool angle_in_arc(double phi, double theta0, double theta1) {
  if (theta1 - theta0 >= kTwoPi) return true;
  const double offset = wrap(phi - theta0);
  return offset <= (theta1 - theta0) + 1e-12;
}

double segment_distance(const Point& x, const Point& a, const Point& b) {
  const Point ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double s = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
  return (x - (a + s * ab)).norm();
}

Point unit(double theta) { return Point(std::cos(theta), std::sin(theta)); }

double sector_distance(const Point& x, const Sector& s) {
  const Point p = x - s.center;
  const double rho = p.norm();
  if (rho == 0.0) return 0.0;
  if (angle_in_arc(angle_of(p), s.theta0, s.theta1)) return std::max(0.0, rho - s.r0);
  const double d0 = segment_distance(x, s.center, s.center + s.r0 * unit(s.theta0));
  const double d1 = segment_distance(x, s.center, s.center + s.r0 * unit(s.theta1));
  return std::min(d0, d1);
}

double sector_depth(const Point& x, const Sector& s) {
  if (sector_distance(x, s) > 0.0) return 0.0;
  const Point p = x - s.center;
  double depth = s.r0 - p.norm();
  if (s.theta1 - s.theta0 < kTwoPi) {
    depth = std::min(depth, segment_distance(x, s.center, s.center + s.r0 * unit(s.theta0)));
    depth = std::min(depth, segment_distance(x, s.center, s.center + s.r0 * unit(s.theta1)));
  }
  return std::max(0.0, depth);
}

std::vector<Point> boundary_samples(const SetShape& s, int per_piece) {
  std::vector<Point> pts;
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Ball>) {
          for (int k = 0; k < per_piece; ++k)
            pts.push_back(shape.center + shape.radius * unit(kTwoPi * k / per_piece));
        } else if constexpr (std::is_same_v<T, Sector>) {
          for (int k = 0; k <= per_piece; ++k) {
            const double f = static_cast<double>(k) / per_piece;
            pts.push_back(shape.center +
                          shape.r0 * unit(shape.theta0 + f * (shape.theta1 - shape.theta0)));
            pts.push_back(shape.center + f * shape.r0 * unit(shape.theta0));
            pts.push_back(shape.center + f * shape.r0 * unit(shape.theta1));
          }
        } else if constexpr (std::is_same_v<T, PointSet>) {
          pts.push_back(shape.at);
        } else if constexpr (std::is_same_v<T, Union>) {
          for (const auto& part : shape.parts) {
            auto sub = boundary_samples(part, per_piece);
            pts.insert(pts.end(), sub.begin(), sub.end());
          }
        }
      },
      s.v);
  return pts;
}

// Flattens nested unions and drops empty parts.
void flatten_into(const SetShape& s, std::vector<SetShape>& out) {
  if (is_empty(s)) return;
  if (const auto* u = s.get_if<Union>()) {
    for (const auto& p : u->parts) flatten_into(p, out);
    return;
  }
  if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
}

bool same_point(const Point& a, const Point& b) { return (a - b).norm() <= 1e-12; }

// Do the arcs [theta0, theta1] of the given sectors cover the full circle?
bool arcs_cover_circle(const std::vector<Sector>& sectors) {
  std::vector<std::pair<double, double>> arcs;
  for (const auto& s : sectors) {
    const double width = s.theta1 - s.theta0;
    if (width >= kTwoPi) return true;
    const double a = wrap(s.theta0);
    if (a + width <= kTwoPi) {
      arcs.emplace_back(a, a + width);
    } else {
      arcs.emplace_back(a, kTwoPi);
      arcs.emplace_back(0.0, a + width - kTwoPi);
    }
  }
  std::sort(arcs.begin(), arcs.end());
  double reach = 0.0;
  for (const auto& [lo, hi] : arcs) {
    if (lo > reach + 1e-12) return false;
    reach = std::max(reach, hi);
  }
  return reach >= kTwoPi - 1e-12;
}

SetShape make_union(std::vector<SetShape> parts) {
  if (parts.empty()) return EmptySet{};
  if (parts.size() == 1) return parts.front();

  bool all_balls = true, all_sectors = true;
  for (const auto& p : parts) {
    all_balls = all_balls && p.get_if<Ball>() != nullptr;
    all_sectors = all_sectors && p.get_if<Sector>() != nullptr;
  }
  if (all_balls) {
    const Ball& first = *parts.front().get_if<Ball>();
    bool concentric = true;
    double r = 0.0;
    for (const auto& p : parts) {
      concentric = concentric && same_point(p.get_if<Ball>()->center, first.center);
      r = std::max(r, p.get_if<Ball>()->radius);
    }
    if (concentric) return Ball{first.center, r};
  }
  if (all_sectors) {
    std::vector<Sector> sectors;
    const Sector& first = *parts.front().get_if<Sector>();
    bool common = true;
    for (const auto& p : parts) {
      const Sector& s = *p.get_if<Sector>();
      common = common && same_point(s.center, first.center) && s.r0 == first.r0;
      sectors.push_back(s);
    }
    if (common && arcs_cover_circle(sectors)) return Ball{first.center, first.r0};
  }
  return Union{std::move(parts)};
}

// Closed-form intersection of snapshot shapes, when one exists.
std::optional<SetShape> intersect_closed_form(const std::vector<SetShape>& shapes) {
  for (const auto& s : shapes)
    if (is_empty(s)) return SetShape(EmptySet{});
  if (std::all_of(shapes.begin(), shapes.end(), [&](const SetShape& s) { return s == shapes[0]; }))
    return shapes[0];

  if (std::all_of(shapes.begin(), shapes.end(), [](const SetShape& s) { return s.get_if<Ball>(); })) {
    const Ball& first = *shapes[0].get_if<Ball>();
    bool concentric = true;
    double r = kInfinity;
    for (const auto& s : shapes) {
      concentric = concentric && same_point(s.get_if<Ball>()->center, first.center);
      r = std::min(r, s.get_if<Ball>()->radius);
    }
    if (concentric) return SetShape(Ball{first.center, r});
    return std::nullopt;
  }

  if (std::all_of(shapes.begin(), shapes.end(), [](const SetShape& s) { return s.get_if<Sector>(); })) {
    const Sector& first = *shapes[0].get_if<Sector>();
    double lo = first.theta0, hi = first.theta1;
    for (const auto& s : shapes) {
      const Sector& q = *s.get_if<Sector>();
      if (!same_point(q.center, first.center) || q.r0 != first.r0) return std::nullopt;
      if (q.theta1 - q.theta0 >= std::numbers::pi || hi - lo >= std::numbers::pi) return std::nullopt;
      // Shift q's arc by a multiple of 2 pi to the copy nearest to [lo, hi].
      double a = q.theta0, b = q.theta1;
      const double shift = kTwoPi * std::round(((lo + hi) - (a + b)) / (2.0 * kTwoPi));
      a += shift;
      b += shift;
      lo = std::max(lo, a);
      hi = std::min(hi, b);
      if (lo > hi) return SetShape(PointSet{first.center});
    }
    return SetShape(Sector{first.center, first.r0, lo, hi});
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------

void validate(const DomainSpec& domain) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          if (!(d.lo.x() < d.hi.x() && d.lo.y() < d.hi.y()))
            throw ConfigError("domain: rectangle requires lo < hi componentwise");
        } else if constexpr (std::is_same_v<T, Disc>) {
          if (!(d.radius > 0.0)) throw ConfigError("domain: disc radius must be > 0");
        } else {
          if (!(d.lo < d.hi)) throw ConfigError("domain: interval requires lo < hi");
        }
      },
      domain.shape);
}

bool inside_open(const DomainSpec& domain, const Point& x) {
  return std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          return x.x() > d.lo.x() && x.x() < d.hi.x() && x.y() > d.lo.y() && x.y() < d.hi.y();
        } else if constexpr (std::is_same_v<T, Disc>) {
          return (x - d.center).norm() < d.radius;
        } else {
          return x.x() > d.lo && x.x() < d.hi;
        }
      },
      domain.shape);
}

double measure(const DomainSpec& domain) {
  return std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Rectangle>) {
          return (d.hi.x() - d.lo.x()) * (d.hi.y() - d.lo.y());
        } else if constexpr (std::is_same_v<T, Disc>) {
          return std::numbers::pi * d.radius * d.radius;
        } else {
          return d.hi - d.lo;
        }
      },
      domain.shape);
}

bool operator==(const Union& a, const Union& b) { return a.parts == b.parts; }
bool operator==(const SetShape& a, const SetShape& b) { return a.v == b.v; }

void validate(const SetShape& s) {
  std::visit(
      [](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Ball>) {
          if (!(shape.radius >= 0.0)) throw ConfigError("shape: ball radius must be >= 0");
        } else if constexpr (std::is_same_v<T, Sector>) {
          if (!(shape.r0 > 0.0)) throw ConfigError("shape: sector r0 must be > 0");
          if (!(shape.theta0 < shape.theta1))
            throw ConfigError("shape: sector requires theta0 < theta1");
        } else if constexpr (std::is_same_v<T, Union>) {
          for (const auto& p : shape.parts) validate(p);
        }
      },
      s.v);
}

bool is_empty(const SetShape& s) {
  if (s.get_if<EmptySet>()) return true;
  if (const auto* u = s.get_if<Union>())
    return std::all_of(u->parts.begin(), u->parts.end(), [](const SetShape& p) { return is_empty(p); });
  return false;
}

double distance_to_set(const Point& x, const SetShape& s) {
  return std::visit(
      [&](const auto& shape) -> double {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, EmptySet>) {
          return kInfinity;
        } else if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, (x - shape.center).norm() - shape.radius);
        } else if constexpr (std::is_same_v<T, Sector>) {
          return sector_distance(x, shape);
        } else if constexpr (std::is_same_v<T, PointSet>) {
          return (x - shape.at).norm();
        } else {
          double d = kInfinity;
          for (const auto& p : shape.parts) d = std::min(d, distance_to_set(x, p));
          return d;
        }
      },
      s.v);
}

double depth_in_set(const Point& x, const SetShape& s) {
  return std::visit(
      [&](const auto& shape) -> double {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, shape.radius - (x - shape.center).norm());
        } else if constexpr (std::is_same_v<T, Sector>) {
          return sector_depth(x, shape);
        } else if constexpr (std::is_same_v<T, Union>) {
          double d = 0.0;
          for (const auto& p : shape.parts) d = std::max(d, depth_in_set(x, p));
          return d;
        } else {
          return 0.0;
        }
      },
      s.v);
}

bool contains(const SetShape& s, const Point& x) {
  const double d = distance_to_set(x, s);
  return d <= kContainTol;
}

SetShape transformed(const SetShape& s, double angle, const Point& shift) {
  const Eigen::Rotation2Dd rot(angle);
  return std::visit(
      [&](const auto& shape) -> SetShape {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return Ball{rot * shape.center + shift, shape.radius};
        } else if constexpr (std::is_same_v<T, Sector>) {
          return Sector{rot * shape.center + shift, shape.r0, shape.theta0 + angle,
                        shape.theta1 + angle};
        } else if constexpr (std::is_same_v<T, PointSet>) {
          return PointSet{rot * shape.at + shift};
        } else if constexpr (std::is_same_v<T, Union>) {
          Union u;
          for (const auto& p : shape.parts) u.parts.push_back(transformed(p, angle, shift));
          return u;
        } else {
          return EmptySet{};
        }
      },
      s.v);
}

double set_distance(const SetShape& a, const SetShape& b) {
  if (is_empty(a) || is_empty(b)) return kInfinity;
  if (const auto* u = a.get_if<Union>()) {
    double d = kInfinity;
    for (const auto& p : u->parts) d = std::min(d, set_distance(p, b));
    return d;
  }
  if (const auto* u = b.get_if<Union>()) {
    double d = kInfinity;
    for (const auto& p : u->parts) d = std::min(d, set_distance(a, p));
    return d;
  }
  auto as_ball = [](const SetShape& s) -> std::optional<Ball> {
    if (const auto* b = s.get_if<Ball>()) return *b;
    if (const auto* p = s.get_if<PointSet>()) return Ball{p->at, 0.0};
    return std::nullopt;
  };
  const auto ba = as_ball(a), bb = as_ball(b);
  if (ba && bb) return std::max(0.0, (ba->center - bb->center).norm() - ba->radius - bb->radius);
  // One side is a sector: the minimum is attained on a boundary. Sample both
  // boundaries densely and measure against the exact distance function.
  const auto coarse = boundary_samples(a, 16);
  if (std::any_of(coarse.begin(), coarse.end(), [&](const Point& p) { return contains(b, p); }))
    return 0.0;
  double d = kInfinity;
  for (const auto& p : boundary_samples(a, 720)) d = std::min(d, distance_to_set(p, b));
  for (const auto& p : boundary_samples(b, 720)) d = std::min(d, distance_to_set(p, a));
  return d;
}

double clearance(const SetShape& s, const DomainSpec& domain) {
  auto ball_clearance = [&](const Point& c, double r) {
    return std::visit(
        [&](const auto& d) -> double {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, Rectangle>) {
            return std::min({c.x() - d.lo.x(), d.hi.x() - c.x(), c.y() - d.lo.y(),
                             d.hi.y() - c.y()}) -
                   r;
          } else if constexpr (std::is_same_v<T, Disc>) {
            return d.radius - (c - d.center).norm() - r;
          } else {
            return std::min(c.x() - d.lo, d.hi - c.x()) - r;
          }
        },
        domain.shape);
  };
  return std::visit(
      [&](const auto& shape) -> double {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return ball_clearance(shape.center, shape.radius);
        } else if constexpr (std::is_same_v<T, Sector>) {
          return ball_clearance(shape.center, shape.r0);
        } else if constexpr (std::is_same_v<T, PointSet>) {
          return ball_clearance(shape.at, 0.0);
        } else if constexpr (std::is_same_v<T, Union>) {
          double c = kInfinity;
          for (const auto& p : shape.parts) c = std::min(c, clearance(p, domain));
          return c;
        } else {
          return kInfinity;
        }
      },
      s.v);
}

// ---------------------------------------------------------------------------

double RadiusSchedule::operator()(double t) const {
  switch (law) {
    case RadiusLaw::constant:
      return r0;
    case RadiusLaw::grow:
      return r0 * (1.0 - 1.0 / (t + 1.0));
    case RadiusLaw::shrink:
      return r0 / (t + 1.0);
    case RadiusLaw::oscillate:
      return r0 * (1.0 + std::abs(std::sin(omega * t)));
  }
  return r0;
}

Point PathSchedule::operator()(double t) const {
  switch (kind) {
    case PathKind::fixed:
      return a;
    case PathKind::circle:
      return a + radius * unit(omega * t + phase);
    case PathKind::segment:
      return a + (b - a) * (0.5 * (1.0 - std::cos(kTwoPi * t / period)));
  }
  return a;
}

double PathSchedule::max_speed() const {
  switch (kind) {
    case PathKind::fixed:
      return 0.0;
    case PathKind::circle:
      return std::abs(radius * omega);
    case PathKind::segment:
      return (b - a).norm() * std::numbers::pi / period;
  }
  return 0.0;
}

void validate(const MovingSetSpec& spec) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StaticSet>) {
          validate(m.base);
        } else if constexpr (std::is_same_v<T, RadiusBall>) {
          if (!(m.radius.r0 >= 0.0)) throw ConfigError("kset: radius r0 must be >= 0");
        } else if constexpr (std::is_same_v<T, RotatingSector>) {
          validate(SetShape(Sector{m.center, m.r0, m.theta0, m.theta1}));
        } else if constexpr (std::is_same_v<T, Jumping>) {
          validate(m.k0);
          validate(m.k1);
          if (!(m.period > 0.0)) throw ConfigError("kset: jumping period must be > 0");
          if (!(m.t1 > 0.0 && m.t1 < m.period))
            throw ConfigError("kset: jumping t1 must lie in (0, period)");
        } else {
          validate(m.shape);
          if (m.curve.kind == PathKind::segment && !(m.curve.period > 0.0))
            throw ConfigError("kset: segment path period must be > 0");
        }
      },
      spec.v);
}

SetShape snapshot(const MovingSetSpec& spec, double t) {
  return std::visit(
      [&](const auto& m) -> SetShape {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StaticSet>) {
          return m.base;
        } else if constexpr (std::is_same_v<T, RadiusBall>) {
          return Ball{m.center, m.radius(t)};
        } else if constexpr (std::is_same_v<T, RotatingSector>) {
          return Sector{m.center, m.r0, m.theta0 - m.omega * t, m.theta1 - m.omega * t};
        } else if constexpr (std::is_same_v<T, Jumping>) {
          double phase = std::fmod(t, m.period);
          if (phase < 0) phase += m.period;
          return (phase > 0.0 && phase <= m.t1) ? m.k0 : m.k1;
        } else {
          return transformed(m.shape, m.rotation(t), m.curve(t));
        }
      },
      spec.v);
}

std::vector<double> sample_times(double t_a, double t_b, double sample_dt) {
  if (!(t_a < t_b)) throw ConfigError("sampling: requires tA < tB");
  if (!(sample_dt > 0.0)) throw ConfigError("sampling: sampleDt must be > 0");
  const auto steps = static_cast<long>(std::ceil((t_b - t_a) / sample_dt - 1e-9));
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(steps) + 1);
  for (long k = 0; k < steps; ++k) times.push_back(t_a + static_cast<double>(k) * sample_dt);
  times.push_back(t_b);
  return times;
}

SetShape union_over_interval(const MovingSetSpec& spec, double t_a, double t_b, double sample_dt) {
  std::vector<SetShape> parts;
  for (double t : sample_times(t_a, t_b, sample_dt)) flatten_into(snapshot(spec, t), parts);
  return make_union(std::move(parts));
}

SetShape k_sup(const MovingSetSpec& spec, double tau0, double horizon, double sample_dt) {
  if (!(horizon > tau0)) throw ConfigError("kSup: horizon must exceed tau0");
  return union_over_interval(spec, tau0, horizon, sample_dt);
}

SetShape k_inf(const MovingSetSpec& spec, double tau0, double horizon, double sample_dt,
               const Grid& grid) {
  if (!(horizon > tau0)) throw ConfigError("kInf: horizon must exceed tau0");
  std::vector<SetShape> shapes;
  for (double t : sample_times(tau0, horizon, sample_dt)) {
    SetShape s = snapshot(spec, t);
    if (std::find(shapes.begin(), shapes.end(), s) == shapes.end()) shapes.push_back(std::move(s));
  }
  if (auto closed = intersect_closed_form(shapes)) return *closed;

  Mask m = grid.full_mask();
  for (const auto& s : shapes) m = m && mask_from_shape(grid, s);
  std::vector<SetShape> nodes;
  for (Index k = 0; k < grid.size(); ++k)
    if (m(k)) nodes.push_back(PointSet{grid.node_point(k)});
  if (nodes.empty()) return EmptySet{};
  if (nodes.size() == 1) return nodes.front();
  return Union{std::move(nodes)};
}

void check_inside(const MovingSetSpec& spec, const DomainSpec& domain, double t0, double t1,
                  double sample_dt) {
  for (double t : sample_times(t0, t1, sample_dt)) {
    const SetShape s = snapshot(spec, t);
    if (!is_empty(s) && clearance(s, domain) <= 0.0) {
      std::ostringstream msg;
      msg << "kset: K(t) must stay inside the domain; violated at t = " << t << " by "
          << describe(s);
      throw ConfigError(msg.str());
    }
  }
}

// ---------------------------------------------------------------------------

double NuProfile::operator()(double d) const {
  if (const auto* s = std::get_if<Saturating>(&kind)) return s->nu_max * (1.0 - std::exp(-d / s->d_ramp));
  return d > 0.0 ? std::get<Indicator>(kind).level : 0.0;
}

double NuProfile::lower_bound(double d) const {
  if (const auto* s = std::get_if<Saturating>(&kind)) return s->nu_max * (1.0 - std::exp(-d / s->d_ramp));
  // An indicator of height `level` dominates the saturating profile with the
  // same height and unit ramp.
  return std::get<Indicator>(kind).level * (1.0 - std::exp(-d));
}

void validate(const NuProfile& nu) {
  if (const auto* s = std::get_if<Saturating>(&nu.kind)) {
    if (!(s->nu_max > 0.0)) throw ConfigError("nu: nu_max must be > 0");
    if (!(s->d_ramp > 0.0)) throw ConfigError("nu: d_ramp must be > 0");
  } else if (!(std::get<Indicator>(nu.kind).level > 0.0)) {
    throw ConfigError("nu: indicator level must be > 0");
  }
  if (!(nu.n_empty > 0.0)) throw ConfigError("nu: n_empty must be > 0 (n >= nu_0 when K(t) is empty)");
}

double evaluate_n(const MovingSetSpec& spec, const NuProfile& nu, double t, const Point& x) {
  const SetShape k = snapshot(spec, t);
  if (is_empty(k)) return nu.n_empty;
  return nu(distance_to_set(x, k));
}

std::string describe(const SetShape& s) {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&](const auto& shape) {
        using T = std::decay_t<decltype(shape)>;
        if constexpr (std::is_same_v<T, EmptySet>) {
          os << "empty";
        } else if constexpr (std::is_same_v<T, Ball>) {
          os << "ball(" << shape.center.x() << "," << shape.center.y() << ";" << shape.radius << ")";
        } else if constexpr (std::is_same_v<T, Sector>) {
          os << "sector(" << shape.center.x() << "," << shape.center.y() << ";" << shape.r0 << ";"
             << shape.theta0 << ";" << shape.theta1 << ")";
        } else if constexpr (std::is_same_v<T, PointSet>) {
          os << "point(" << shape.at.x() << "," << shape.at.y() << ")";
        } else {
          os << "union[" << shape.parts.size() << "]";
        }
      },
      s.v);
  return os.str();
}

}  // namespace degenlog
