#include "degenlog/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "degenlog/errors.hpp"
#include "degenlog/oracles.hpp"
#include "degenlog/spectral.hpp"

namespace degenlog {

namespace {

constexpr double pi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// classify

const char* to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::bounded: return "Bounded";
    case VerdictKind::grow_up: return "GrowUp";
    default: return "Inconclusive";
  }
}

Verdict classify(const Trajectory& tr, const ClassifyConfig& cfg) {
  Verdict v;
  const std::size_t n = tr.size();
  if (n < cfg.min_records) {
    v.evidence = "only " + std::to_string(n) + " records (need " + std::to_string(cfg.min_records) + ")";
    return v;
  }
  const auto& sup = tr.sup_norms;
  const std::size_t tail = std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(cfg.tail_fraction * n)));
  const std::size_t from = n - tail;

  if (tr.cap_hit) {
    bool monotone = true;
    for (std::size_t i = from + 1; i < n; ++i) monotone = monotone && sup[i] >= sup[i - 1];
    if (monotone) {
      v.kind = VerdictKind::grow_up;
      v.cap_hit_time = tr.cap_hit;
      v.evidence = "sup norm passed the cap " + fmt(tr.growth_cap) + " at t = " + fmt(*tr.cap_hit) +
                   " with a nondecreasing tail over " + std::to_string(tail) + " records";
    } else {
      v.evidence = "cap hit at t = " + fmt(*tr.cap_hit) + " but the tail is not monotone";
    }
    return v;
  }

  const double peak = *std::max_element(sup.begin(), sup.end());
  if (sup.back() < cfg.decay_ratio * tr.u0_sup) {
    v.kind = VerdictKind::bounded;
    v.decayed = true;
    v.bound_estimate = peak;
    v.evidence = "decayed: final sup " + fmt(sup.back()) + " < " + fmt(cfg.decay_ratio) + " ||u0||";
    return v;
  }

  const std::size_t mid = from + tail / 2;
  const double m1 = *std::max_element(sup.begin() + static_cast<long>(from), sup.begin() + static_cast<long>(mid));
  const double m2 = *std::max_element(sup.begin() + static_cast<long>(mid), sup.end());
  const double level = std::max(m1, m2);
  const double osc = std::abs(m2 - m1) / level;
  const double ceiling = cfg.level_fraction * tr.growth_cap;
  std::ostringstream ev;
  ev << "trailing half-window maxima " << fmt(m1) << ", " << fmt(m2) << " (relative gap " << fmt(osc)
     << "), level " << (level < ceiling ? "below " : "above ") << fmt(ceiling);
  v.evidence = ev.str();
  if (osc < cfg.plateau_tol && level < ceiling) {
    v.kind = VerdictKind::bounded;
    v.bound_estimate = peak;
  }
  return v;
}

// ---------------------------------------------------------------------------
// predict

const char* to_string(Theorem t) {
  switch (t) {
    case Theorem::prop43: return "Prop4.3";
    case Theorem::cor44: return "Cor4.4";
    case Theorem::prop51: return "Prop5.1";
    case Theorem::thm56: return "Thm5.6";
    case Theorem::thm59: return "Thm5.9";
    case Theorem::thm61: return "Thm6.1";
    case Theorem::prop65: return "Prop6.5";
    default: return "None";
  }
}

double TheoremCheck::detail(const std::string& name) const {
  for (const auto& [k, v] : details)
    if (k == name) return v;
  throw std::out_of_range("theorem check has no detail '" + name + "'");
}

double bessel_j1_first_zero() {
  double lo = 3.0, hi = 4.5;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::cyl_bessel_j(1.0, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double structural_sample_dt(const MovingSetSpec& spec, double t_a, double t_b, int max_samples) {
  const double span = t_b - t_a;
  if (!(span > 0.0)) throw ConfigError("sampling: requires tA < tB");
  double dt = std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, StaticSet>) {
          return span;
        } else if constexpr (std::is_same_v<T, RadiusBall>) {
          return m.radius.omega != 0.0 ? std::min(0.01, 0.05 / std::abs(m.radius.omega)) : 0.01;
        } else if constexpr (std::is_same_v<T, RotatingSector>) {
          return m.omega != 0.0 ? 0.02 / std::abs(m.omega) : span;
        } else if constexpr (std::is_same_v<T, Jumping>) {
          return std::min(m.t1, m.period - m.t1) / 4.0;
        } else {
          double reach = 0.0;
          if (const auto* b = m.shape.template get_if<Ball>()) reach = b->center.norm() + b->radius;
          if (const auto* s = m.shape.template get_if<Sector>()) reach = s->center.norm() + s->r0;
          const double speed = m.curve.max_speed() + std::abs(m.rotation.omega) * reach;
          return speed > 0.0 ? 0.005 / speed : span;
        }
      },
      spec.v);
  dt = std::min(dt, span);
  if (!spec.get_if<Jumping>()) dt = std::max(dt, span / max_samples);
  return dt;
}

namespace {

// A window longer than one period of a jumping set sees exactly one period.
std::pair<double, double> effective_window(const MovingSetSpec& spec, double a, double b) {
  if (const auto* j = spec.get_if<Jumping>())
    if (b - a >= j->period) return {0.0, j->period};
  return {a, b};
}

SetShape window_union(const MovingSetSpec& spec, double a, double b, int max_samples) {
  const auto [ea, eb] = effective_window(spec, a, b);
  return union_over_interval(spec, ea, eb, structural_sample_dt(spec, ea, eb, max_samples));
}

SetShape window_intersection(const MovingSetSpec& spec, double a, double b, int max_samples,
                             const Grid& grid) {
  const auto [ea, eb] = effective_window(spec, a, b);
  return k_inf(spec, ea, eb, structural_sample_dt(spec, ea, eb, max_samples), grid);
}

TheoremCheck make_check(Theorem t) {
  TheoremCheck c;
  c.theorem = t;
  return c;
}

class Lambda0Table {
 public:
  Lambda0Table(GridPtr grid, double cap) : grid_(std::move(grid)), cap_(cap) {}
  double operator()(const SetShape& k) {
    if (is_empty(k)) return kInfinity;
    for (const auto& [shape, value] : memo_)
      if (shape == k) return value;
    const Lambda0Estimate est = lambda0_of_set(grid_, k, {}, cap_);
    const double value = est.verdict == Lambda0Verdict::infinite ? kInfinity : est.value;
    memo_.emplace_back(k, value);
    return value;
  }

 private:
  GridPtr grid_;
  double cap_;
  std::vector<std::pair<SetShape, double>> memo_;
};

struct Context {
  const Scenario& s;
  const SpectralBudget& budget;
  GridPtr grid;
  Lambda0Table lambda0;
  double lambda;
  double t0, horizon;
};

// Prop 4.3 and Cor 4.4 share the envelope values.
std::pair<TheoremCheck, TheoremCheck> envelope_checks(Context& c) {
  TheoremCheck p43 = make_check(Theorem::prop43), c44 = make_check(Theorem::cor44);
  const auto& spec = c.s.params.moving_set;
  const double span = c.horizon - c.t0;
  std::vector<double> sup_vals, inf_vals, taus;
  for (double f : {0.0, 0.25, 0.5}) {
    const double tau0 = c.t0 + f * span;
    taus.push_back(tau0);
    const SetShape ks = window_union(spec, tau0, c.horizon, c.budget.max_time_samples);
    const SetShape ki = window_intersection(spec, tau0, c.horizon, c.budget.max_time_samples, *c.grid);
    sup_vals.push_back(c.lambda0(ks));
    inf_vals.push_back(c.lambda0(ki));
    p43.details.emplace_back("tau0=" + fmt(tau0) + ":lambda0(Ksup)", sup_vals.back());
    p43.details.emplace_back("tau0=" + fmt(tau0) + ":lambda0(Kinf)", inf_vals.back());
  }
  p43.details.emplace_back("lambda", c.lambda);

  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (c.lambda < sup_vals[i]) {
      p43.hypotheses_hold = true;
      p43.predicted = VerdictKind::bounded;
      p43.note = "lambda < lambda0(Ksup) at tau0 = " + fmt(taus[i]);
      break;
    }
    if (c.lambda >= inf_vals[i]) {
      p43.hypotheses_hold = true;
      p43.predicted = VerdictKind::grow_up;
      p43.note = "lambda >= lambda0(Kinf) at tau0 = " + fmt(taus[i]);
      break;
    }
  }
  if (!p43.hypotheses_hold) p43.note = "lambda0(Ksup) <= lambda < lambda0(Kinf) at every sampled tau0";

  // The limits in tau0 are monotone, so the last sampled tau0 is the surrogate.
  const double lm = sup_vals.back(), lp = inf_vals.back();
  c44.details = {{"lambda0-", lm}, {"lambda0+", lp}, {"lambda", c.lambda}};
  if (c.lambda < lm) {
    c44.hypotheses_hold = true;
    c44.predicted = VerdictKind::bounded;
    c44.note = "lambda < lambda0-";
  } else if (c.lambda > lp) {
    c44.hypotheses_hold = true;
    c44.predicted = VerdictKind::grow_up;
    c44.note = "lambda > lambda0+";
  } else {
    c44.note = "lambda in [lambda0-, lambda0+]: the theory is silent";
  }
  return {p43, c44};
}

TheoremCheck prop51_check(Context& c) {
  TheoremCheck chk = make_check(Theorem::prop51);
  const auto& spec = c.s.params.moving_set;
  const double nu0 = c.s.params.nu.n_empty;
  double eta = 0.0, xi = 0.0;
  if (const auto* st = spec.get_if<StaticSet>()) {
    if (!is_empty(st->base)) {
      chk.note = "K(t) is never empty";
      return chk;
    }
    eta = c.horizon - c.t0;
  } else if (const auto* j = spec.get_if<Jumping>()) {
    const bool e0 = is_empty(j->k0), e1 = is_empty(j->k1);
    if (!e0 && !e1) {
      chk.note = "K(t) is never empty";
      return chk;
    }
    eta = e0 ? j->t1 : j->period - j->t1;
    xi = e0 ? j->period - j->t1 : j->t1;
  } else {
    chk.note = "K(t) is never empty";
    return chk;
  }
  chk.hypotheses_hold = true;
  chk.predicted = VerdictKind::bounded;
  chk.details = {{"eta", eta}, {"xi", xi}, {"nu0", nu0}};
  if (c.lambda > 0.0) chk.details.emplace_back("wInf(eta)", w_inf({c.lambda, nu0, c.s.params.rho, 0.0}, eta));
  chk.note = "n = nu0 on every empty interval of length eta; gaps between them at most xi";
  return chk;
}

TheoremCheck thm56_check(Context& c) {
  TheoremCheck chk = make_check(Theorem::thm56);
  const auto& spec = c.s.params.moving_set;
  const double tau0 = c.budget.thm56_tau0, delta = c.budget.thm56_delta;
  chk.details = {{"tau0", tau0}, {"delta", delta}, {"lambda", c.lambda}};
  const double a = c.t0 + tau0, b = c.horizon - tau0;
  if (!(b > a)) {
    chk.note = "horizon shorter than 2 tau0";
    return chk;
  }
  const int m = std::max(2, c.budget.thm56_samples);
  double floor = kInfinity, worst_clearance = kInfinity;
  for (int i = 0; i < m; ++i) {
    const double t = a + (b - a) * i / (m - 1);
    const SetShape u = window_union(spec, t - tau0, t + tau0, c.budget.max_time_samples);
    if (is_empty(u)) continue;
    worst_clearance = std::min(worst_clearance, clearance(u, c.s.domain));
    const Mask omega = neighbourhood_mask(*c.grid, u, delta);
    if (!omega.any()) continue;
    floor = std::min(floor, lambda1_of_mask(c.grid, omega));
  }
  chk.details.emplace_back("floor", floor);
  chk.details.emplace_back("clearance", worst_clearance);
  if (!(worst_clearance >= delta)) {
    chk.note = "the delta-neighbourhood of the window union leaves the domain";
    return chk;
  }
  if (c.lambda < floor) {
    chk.hypotheses_hold = true;
    chk.predicted = VerdictKind::bounded;
    chk.note = "lambda < inf_t lambda1(Omega_delta(t))";
  } else {
    chk.note = "lambda >= inf_t lambda1(Omega_delta(t))";
  }
  return chk;
}

TheoremCheck thm59_check(Context& c) {
  TheoremCheck chk = make_check(Theorem::thm59);
  const auto* j = c.s.params.moving_set.get_if<Jumping>();
  if (!j) {
    chk.note = "K(t) has no jumps";
    return chk;
  }
  const double g_min = std::min(j->t1, j->period - j->t1), g_max = std::max(j->t1, j->period - j->t1);
  const double tau0 = 0.5 * g_min;
  const double delta = set_distance(j->k0, j->k1);
  chk.details = {{"tau0", tau0}, {"inf_gap", g_min}, {"xi", g_max}, {"delta", delta}};
  if (delta > 0.0) {
    chk.hypotheses_hold = true;
    chk.predicted = VerdictKind::bounded;
    chk.note = "sets on either side of every jump are a positive distance apart";
  } else {
    chk.note = "K0 and K1 touch: no separation across the jumps";
  }
  return chk;
}

// Largest ball inside a shape (in the shape's own frame).
std::optional<Ball> inscribed_ball(const SetShape& s) {
  if (const auto* b = s.get_if<Ball>()) {
    if (b->radius > 0.0) return *b;
    return std::nullopt;
  }
  if (const auto* q = s.get_if<Sector>()) {
    const double w = q->theta1 - q->theta0;
    const double mid = 0.5 * (q->theta0 + q->theta1);
    const Point dir(std::cos(mid), std::sin(mid));
    if (w >= pi) return Ball{q->center + 0.5 * q->r0 * dir, 0.5 * q->r0};
    const double sb = std::sin(0.5 * w);
    return Ball{q->center + q->r0 / (1.0 + sb) * dir, q->r0 * sb / (1.0 + sb)};
  }
  return std::nullopt;
}

// Largest ball in the intersection of two balls.
std::optional<Ball> lens_ball(const Ball& a, const Ball& b) {
  const double d = (a.center - b.center).norm();
  const Ball& big = a.radius >= b.radius ? a : b;
  const Ball& small = a.radius >= b.radius ? b : a;
  if (d + small.radius <= big.radius) return small;
  const double r = 0.5 * (a.radius + b.radius - d);
  if (!(r > 0.0)) return std::nullopt;
  const Point u = (b.center - a.center) / d;
  return Ball{a.center + (a.radius - r) * u, r};
}

double disc_lambda1(double radius) {
  static const double j01 = bessel_j0_first_zero();
  return j01 * j01 / (radius * radius);
}

struct BallTau {
  double tau, lam1, lam2, inf_phi, int_psi, max_psi;
};

// Lemma 6.2 waiting time for E0 = B(0, rho_e), D = B(x, r), v0 = L2-normalized
// phi_1 of B(0, r), with the Bessel closed forms of the ball eigenfunctions.
BallTau ball_tau(double lambda, double rho_e, double r, double gamma, double c_inf) {
  static const double j01 = bessel_j0_first_zero();
  static const double j11 = bessel_j1_first_zero();
  const double j1 = std::cyl_bessel_j(1.0, j01);
  BallTau out{};
  out.lam1 = j01 * j01 / (rho_e * rho_e);
  out.lam2 = j11 * j11 / (rho_e * rho_e);
  out.inf_phi = std::cyl_bessel_j(0.0, j01 * (rho_e - r) / rho_e) / (std::sqrt(pi) * rho_e * j1);
  out.max_psi = 1.0 / (std::sqrt(pi) * r * j1);
  out.int_psi = 2.0 * std::sqrt(pi) * r / j01;
  TauInputs in;
  in.dim = 2;
  in.lam = lambda;
  in.lam1E = out.lam1;
  in.lam2E = out.lam2;
  in.c_inf = c_inf;
  in.v0_norm = 1.0;
  in.alpha1 = out.int_psi * out.inf_phi;
  in.inf_phi1D = out.inf_phi;
  in.max_phi1D = out.max_psi;
  in.gamma = gamma;
  out.tau = tau_unbounded(in);
  return out;
}

struct Windows {
  double rho_e = 0.0;  // common radius of the E_i
  double r = 0.0;      // B(x_i, 2r) inside E_i and E_{i+1}
  int count = 0;
};

// E_i = B(e(m_i), rho_e) with m_i the midpoint of [t_i, t_i + delta_t]; the
// inscribed ball of the shape moves rigidly with K(t).
Windows moving_windows(const std::function<Point(double)>& centre, double rho_in, double t0,
                       double horizon, double window) {
  Windows w;
  w.rho_e = rho_in;
  std::vector<Point> mids;
  const int samples = 48;
  for (double ta = t0; ta + window <= horizon + 1e-12; ta += window) {
    const Point m = centre(ta + 0.5 * window);
    double drift = 0.0;
    for (int k = 0; k <= samples; ++k) drift = std::max(drift, (centre(ta + window * k / samples) - m).norm());
    w.rho_e = std::min(w.rho_e, rho_in - drift);
    mids.push_back(m);
  }
  w.count = static_cast<int>(mids.size());
  w.r = 0.5 * w.rho_e;
  for (std::size_t i = 0; i + 1 < mids.size(); ++i)
    w.r = std::min(w.r, (2.0 * w.rho_e - (mids[i + 1] - mids[i]).norm()) / 4.0);
  return w;
}

TheoremCheck thm61_check(Context& c) {
  TheoremCheck chk = make_check(Theorem::thm61);
  chk.details = {{"lambda", c.lambda}};
  if (c.s.domain.dim() != 2) {
    chk.note = "the ball construction is two-dimensional";
    return chk;
  }
  const auto& spec = c.s.params.moving_set;
  const double gamma = c.budget.gamma;

  // Static pieces: E_i = E_0 for all i (any window length works).
  std::optional<Ball> fixed;
  std::function<Point(double)> centre;
  double rho_in = 0.0;
  bool moving = false;
  if (const auto* st = spec.get_if<StaticSet>()) {
    fixed = inscribed_ball(st->base);
  } else if (const auto* rb = spec.get_if<RadiusBall>()) {
    double rmin = kInfinity;
    for (double t : sample_times(c.t0, c.horizon, structural_sample_dt(spec, c.t0, c.horizon, c.budget.max_time_samples)))
      rmin = std::min(rmin, rb->radius(t));
    if (rmin > 0.0) fixed = Ball{rb->center, rmin};
  } else if (const auto* j = spec.get_if<Jumping>()) {
    const auto* b0 = j->k0.get_if<Ball>();
    const auto* b1 = j->k1.get_if<Ball>();
    if (b0 && b1) fixed = lens_ball(*b0, *b1);
  } else if (const auto* rs = spec.get_if<RotatingSector>()) {
    const auto in = inscribed_ball(Sector{Point::Zero(), rs->r0, rs->theta0, rs->theta1});
    rho_in = in->radius;
    const Point off = in->center;
    const Point ctr = rs->center;
    const double om = rs->omega;
    centre = [=](double t) {
      const double a = -om * t;
      return Point(ctr + Point(std::cos(a) * off.x() - std::sin(a) * off.y(),
                               std::sin(a) * off.x() + std::cos(a) * off.y()));
    };
    moving = om != 0.0;
    if (!moving) fixed = Ball{ctr + off, rho_in};
  } else if (const auto* tr = spec.get_if<Translating>()) {
    if (const auto in = inscribed_ball(tr->shape)) {
      rho_in = in->radius;
      const Point off = in->center;
      const PathSchedule curve = tr->curve;
      const AngleSchedule rot = tr->rotation;
      centre = [=](double t) {
        const double a = rot(t);
        return Point(curve(t) + Point(std::cos(a) * off.x() - std::sin(a) * off.y(),
                                      std::sin(a) * off.x() + std::cos(a) * off.y()));
      };
      moving = curve.max_speed() > 0.0 || rot.omega != 0.0;
      if (!moving) fixed = Ball{centre(c.t0), rho_in};
    }
  }

  if (fixed) {
    const double rho_e = fixed->radius, r = 0.5 * rho_e;
    const double lam1 = disc_lambda1(rho_e);
    chk.details.insert(chk.details.end(), {{"rho_E", rho_e}, {"r", r}, {"lambda1(E0)", lam1}});
    if (!(c.lambda > lam1)) {
      chk.note = "lambda <= lambda1(E0) for the largest fixed ball inside K(t)";
      return chk;
    }
    const BallTau bt = ball_tau(c.lambda, rho_e, r, gamma, c.budget.c_inf);
    chk.details.insert(chk.details.end(), {{"lambda2(E0)", bt.lam2}, {"tau", bt.tau}});
    chk.hypotheses_hold = true;
    chk.predicted = VerdictKind::grow_up;
    chk.note = "a fixed ball E0 lies in K(t) for all t and lambda > lambda1(E0)";
    return chk;
  }
  if (!moving) {
    chk.note = "no ball stays inside K(t)";
    return chk;
  }

  // Window length must dominate the tau it induces; tau grows with the window.
  const double span = c.horizon - c.t0;
  double window = 0.0;
  Windows w;
  BallTau bt{};
  for (int it = 0; it < 40; ++it) {
    if (it == 0) {
      if (!(c.lambda > disc_lambda1(rho_in))) {
        chk.note = "lambda <= lambda1 of the inscribed ball";
        return chk;
      }
      window = ball_tau(c.lambda, rho_in, 0.5 * rho_in, gamma, c.budget.c_inf).tau;
    }
    if (window > 0.5 * span) break;
    w = moving_windows(centre, rho_in, c.t0, c.horizon, window);
    if (!(w.rho_e > 0.0) || !(w.r > 0.0)) break;
    if (!(c.lambda > disc_lambda1(w.rho_e))) break;
    bt = ball_tau(c.lambda, w.rho_e, w.r, gamma, c.budget.c_inf);
    if (bt.tau <= window) {
      chk.details.insert(chk.details.end(), {{"window", window},
                                             {"windows", static_cast<double>(w.count)},
                                             {"rho_E", w.rho_e},
                                             {"r", w.r},
                                             {"lambda1(E0)", bt.lam1},
                                             {"lambda2(E0)", bt.lam2},
                                             {"tau", bt.tau}});
      chk.hypotheses_hold = true;
      chk.predicted = VerdictKind::grow_up;
      chk.note = "consecutive E_i overlap in B(x_i, 2r) and every window is at least tau";
      return chk;
    }
    window = bt.tau;
  }
  chk.details.emplace_back("window", window);
  chk.note = "no window length satisfies t_{i+1} - t_i >= tau with overlapping E_i";
  return chk;
}

TheoremCheck prop65_check(Context& c) {
  TheoremCheck chk = make_check(Theorem::prop65);
  const auto* j = c.s.params.moving_set.get_if<Jumping>();
  if (!j) {
    chk.note = "K(t) does not alternate between two sets";
    return chk;
  }
  const auto* b0 = j->k0.get_if<Ball>();
  const auto* b1 = j->k1.get_if<Ball>();
  if (!b0 || !b1) {
    chk.note = "the alternation check needs two balls";
    return chk;
  }
  auto inside = [](const Ball& in, const Ball& out) {
    return (in.center - out.center).norm() + in.radius <= out.radius && in.radius < out.radius;
  };
  // Big set K1 during the long phase, small set K0 during the short one.
  double big_phase, eta;
  Ball big, small;
  if (inside(*b1, *b0)) {
    big = *b0, small = *b1, big_phase = j->t1, eta = j->period - j->t1;
  } else if (inside(*b0, *b1)) {
    big = *b1, small = *b0, big_phase = j->period - j->t1, eta = j->t1;
  } else {
    chk.note = "neither set contains the other";
    return chk;
  }
  const double l0_big = c.lambda0(big), l0_small = c.lambda0(small);
  chk.details = {{"lambda", c.lambda}, {"lambda0(K1)", l0_big}, {"lambda0(K0)", l0_small},
                 {"big_phase", big_phase}, {"eta", eta}};
  if (!(l0_big < c.lambda && c.lambda < l0_small && std::isfinite(l0_small))) {
    chk.note = "lambda outside (lambda0(K1), lambda0(K0))";
    return chk;
  }
  const Mask m1 = mask_from_shape(*c.grid, big), m0 = mask_from_shape(*c.grid, small);
  const EigenPair e1 = principal_eigenpair(c.grid, m1);
  const EigenPair e0 = principal_eigenpair(c.grid, m0);
  const double lam2 = second_eigenvalue(c.grid, m1);
  const double alpha = std::exp((c.lambda - e0.value) * eta);
  double inf_phi = kInfinity;
  for (Index k = 0; k < c.grid->size(); ++k)
    if (m0(k)) inf_phi = std::min(inf_phi, e1.vector.values(k));
  TauInputs in;
  in.dim = c.grid->dim();
  in.lam = c.lambda;
  in.lam1E = e1.value;
  in.lam2E = lam2;
  in.c_inf = c.budget.c_inf;
  in.v0_norm = l2_norm(*c.grid, e0.vector.values);
  in.alpha1 = inner(*c.grid, e0.vector.values, e1.vector.values);
  in.inf_phi1D = inf_phi;
  in.max_phi1D = e0.vector.values.maxCoeff();
  in.gamma = c.budget.gamma / alpha;
  const double tau = tau_unbounded(in);
  chk.details.insert(chk.details.end(), {{"lambda1(Omega1)", e1.value},
                                         {"lambda2(Omega1)", lam2},
                                         {"lambda1(Omega0)", e0.value},
                                         {"alpha", alpha},
                                         {"tau", tau}});
  if (big_phase > tau) {
    chk.hypotheses_hold = true;
    chk.predicted = VerdictKind::grow_up;
    chk.note = "long phases exceed tau and short phases are at most eta";
  } else {
    chk.note = "long phase " + fmt(big_phase) + " <= tau " + fmt(tau);
  }
  return chk;
}

}  // namespace

std::vector<TheoremCheck> predict(const Scenario& s, const SpectralBudget& budget) {
  validate(s);
  if (!(s.t_end > s.t0)) throw ConfigError("predict: requires t_end > t0");
  const GridPtr grid = build_grid(s.domain, budget.resolution);
  Context c{s, budget, grid, Lambda0Table(grid, budget.lambda0_cap), s.params.lambda, s.t0, s.t_end};

  std::vector<TheoremCheck> out;
  auto [p43, c44] = envelope_checks(c);
  out.push_back(std::move(p43));
  out.push_back(std::move(c44));
  out.push_back(prop51_check(c));
  out.push_back(thm56_check(c));
  out.push_back(thm59_check(c));
  out.push_back(thm61_check(c));
  out.push_back(prop65_check(c));

  std::string bounded, growup;
  for (const auto& chk : out) {
    if (!chk.fired()) continue;
    (chk.predicted == VerdictKind::bounded ? bounded : growup) += std::string(" ") + to_string(chk.theorem);
  }
  if (!bounded.empty() && !growup.empty())
    throw ContradictionError("predict: Bounded from" + bounded + " contradicts GrowUp from" + growup +
                             " on scenario '" + s.label + "'");
  return out;
}

// ---------------------------------------------------------------------------
// crossCheck

const char* to_string(CrossStatus s) {
  switch (s) {
    case CrossStatus::consistent: return "CONSISTENT";
    case CrossStatus::violation: return "VIOLATION";
    case CrossStatus::undecided: return "UNDECIDED";
    default: return "INCONCLUSIVE";
  }
}

CrossStatus combine(const std::vector<TheoremCheck>& checks, const Verdict& verdict) {
  std::optional<VerdictKind> predicted;
  for (const auto& chk : checks) {
    if (!chk.fired()) continue;
    if (predicted && *predicted != chk.predicted)
      throw ContradictionError("crossCheck: fired theorems disagree");
    predicted = chk.predicted;
  }
  if (!predicted) return CrossStatus::undecided;
  if (verdict.kind == VerdictKind::inconclusive) return CrossStatus::inconclusive;
  return verdict.kind == *predicted ? CrossStatus::consistent : CrossStatus::violation;
}

CrossCheckReport cross_check(const Scenario& s, const SpectralBudget& budget, const ClassifyConfig& cfg) {
  CrossCheckReport rep;
  rep.label = s.label;
  rep.checks = predict(s, budget);
  rep.trajectory = run(s);
  rep.verdict = classify(rep.trajectory, cfg);
  rep.status = combine(rep.checks, rep.verdict);
  return rep;
}

// ---------------------------------------------------------------------------
// Registry

namespace {

constexpr double kUnitSquareLambda1 = 2.0 * pi * pi;

double ball_lambda0(double r) {
  const double j = bessel_j0_first_zero();
  return j * j / (r * r);
}

Scenario base_scenario(const std::string& label, double lambda, MovingSetSpec kset, double t_end,
                       double dt) {
  Scenario s;
  s.label = label;
  s.domain = DomainSpec{Rectangle{point(0, 0), point(1, 1)}};
  s.resolution = 32;
  s.params.lambda = lambda;
  s.params.rho = 2.0;
  s.params.nu = NuProfile{Saturating{1.0, 0.03}, 1.0};
  s.params.moving_set = std::move(kset);
  s.scheme.dt = dt;
  s.scheme.solve_tol = 1e-10;
  s.scheme.growth_cap = 1e6;
  s.t0 = 0.0;
  s.t_end = t_end;
  s.initial.kind = ConstantInit{1.0};
  s.outputs.sample_every = 1;
  return s;
}

using Builder = RegistryEntry (*)();

const Point kCentre = point(0.5, 0.5);

RegistryEntry trichotomy(double lambda, const std::string& label, double t_end) {
  return {base_scenario(label, lambda, StaticSet{Ball{kCentre, 0.2}}, t_end, 1e-3), false,
          "static ball K0 = B(c, 0.2); autonomous trichotomy"};
}

const std::map<std::string, Builder>& builders() {
  static const std::map<std::string, Builder> table = {
      {"trichotomy-low",
       [] { return trichotomy(0.5 * kUnitSquareLambda1, "trichotomy-low", 3.0); }},
      {"trichotomy-mid",
       [] { return trichotomy(0.5 * (kUnitSquareLambda1 + ball_lambda0(0.2)), "trichotomy-mid", 3.0); }},
      {"trichotomy-high",
       [] { return trichotomy(1.5 * ball_lambda0(0.2), "trichotomy-high", 3.0); }},
      {"shrink-case1",
       [] {
         return RegistryEntry{
             base_scenario("shrink-case1", 2.0 * ball_lambda0(0.3),
                           RadiusBall{kCentre, RadiusSchedule{RadiusLaw::grow, 0.3, 0.0}}, 10.0, 1e-3),
             false, "growing ball r0 (1 - 1/(t+1)), lambda above lambda0+"};
       }},
      {"shrink-case2",
       [] {
         return RegistryEntry{
             base_scenario("shrink-case2", 100.0,
                           RadiusBall{kCentre, RadiusSchedule{RadiusLaw::shrink, 0.3, 0.0}}, 40.0, 2e-3),
             false, "shrinking ball r0 / (t+1): bounded for every lambda"};
       }},
      {"shrink-case3",
       [] {
         return RegistryEntry{
             base_scenario("shrink-case3", 0.6 * ball_lambda0(0.3),
                           RadiusBall{kCentre, RadiusSchedule{RadiusLaw::oscillate, 0.15, 4.0}}, 10.0, 1e-3),
             false, "oscillating ball r0 (1 + |sin wt|), lambda below lambda0(B(2 r0))"};
       }},
      {"rotating-slow",
       [] {
         return RegistryEntry{
             base_scenario("rotating-slow", 0.6 * ball_lambda0(0.3),
                           RotatingSector{kCentre, 0.3, 0.0, 0.5 * pi, 2.0}, 10.0, 1e-3),
             false, "rotating quarter disc, lambda below lambda0(B(0, r0))"};
       }},
      {"rotating-fast",
       [] {
         return RegistryEntry{
             base_scenario("rotating-fast", 1.5 * ball_lambda0(0.3),
                           RotatingSector{kCentre, 0.3, 0.0, 0.5 * pi, 50.0}, 5.0, 5e-4),
             true, "exploratory: lambda in (lambda0-, lambda0+), fast rotation"};
       }},
      {"jumping-disjoint",
       [] {
         const Ball k0{point(0.3, 0.5), 0.15}, k1{point(0.7, 0.5), 0.15};
         return RegistryEntry{
             base_scenario("jumping-disjoint", 2.0 * ball_lambda0(0.15), Jumping{k0, k1, 0.02, 0.01}, 5.0, 5e-4),
             false, "disjoint jumping balls, lambda = 2 max lambda0, 250 periods"};
       }},
      {"jumping-static-control",
       [] {
         return RegistryEntry{base_scenario("jumping-static-control", 2.0 * ball_lambda0(0.15),
                                            StaticSet{Ball{point(0.3, 0.5), 0.15}}, 5.0, 5e-4),
                              false, "control: K0 alone at the jumping lambda"};
       }},
      {"translating-slow",
       [] {
         Translating tr{Ball{point(0, 0), 0.1},
                        PathSchedule{PathKind::circle, kCentre, point(0, 0), 0.25, 2.0, 0.0, 1.0}, AngleSchedule{}};
         return RegistryEntry{base_scenario("translating-slow", 120.0, tr, 20.0, 1e-3), false,
                              "ball carried on a circle, lambda below the moving spectral floor"};
       }},
      {"translating-growup",
       [] {
         Translating tr{Ball{point(0, 0), 0.25},
                        PathSchedule{PathKind::circle, kCentre, point(0, 0), 0.1, 0.5, 0.0, 1.0}, AngleSchedule{}};
         return RegistryEntry{base_scenario("translating-growup", 150.0, tr, 10.0, 1e-3), false,
                              "large ball carried slowly, consecutive E_i overlap"};
       }},
      {"intermittent",
       [] {
         return RegistryEntry{base_scenario("intermittent", 3.0 * kUnitSquareLambda1,
                                            Jumping{Ball{kCentre, 0.35}, EmptySet{}, 0.2, 0.1}, 10.0, 1e-3),
                              false, "K alternates with the empty set, lambda = 3 lambda1"};
       }},
      {"prop65-alternating",
       [] {
         Scenario s = base_scenario("prop65-alternating", 75.0,
                                    Jumping{Ball{kCentre, 0.3}, Ball{kCentre, 0.15}, 0.76, 0.75}, 5.0, 1e-3);
         // Cap crossed inside the third long phase, so the monotone tail sees no short phase.
         s.scheme.growth_cap = 1e16;
         return RegistryEntry{s, false, "long phases on B(0.3), short phases on B(0.15)"};
       }},
  };
  return table;
}

}  // namespace

std::vector<std::string> registry_labels() {
  return {"trichotomy-low", "trichotomy-mid", "trichotomy-high", "shrink-case1", "shrink-case2",
          "shrink-case3", "rotating-slow", "rotating-fast", "jumping-disjoint", "jumping-static-control",
          "translating-slow", "translating-growup", "intermittent", "prop65-alternating"};
}

RegistryEntry registry_entry(const std::string& label) {
  const auto it = builders().find(label);
  if (it == builders().end()) throw ConfigError("registry: unknown scenario label '" + label + "'");
  return it->second();
}

// ---------------------------------------------------------------------------
// Initial-data independence

SandwichReport initial_data_independence(const Scenario& scenario, const Field& u0, const Field& v0,
                                         double delta, int samples, double slack) {
  const Scenario s = resolved(scenario);
  validate(s.params);
  validate(SchemeConfig{s.scheme.dt, s.scheme.solve_tol, 1.0, false}, s.params.lambda);
  if (!(delta > 0.0) || !(s.t0 + delta < s.t_end)) throw ConfigError("sandwich: requires 0 < delta < t_end - t0");
  if (samples < 1) throw ConfigError("sandwich: samples must be >= 1");
  if (u0.grid != v0.grid) throw ConfigError("sandwich: u0 and v0 live on different grids");
  if ((u0.values.array() < 0).any() || (v0.values.array() < 0).any() || !(u0.values.array() > 0).any() ||
      !(v0.values.array() > 0).any())
    throw ConfigError("sandwich: u0 and v0 must be >= 0 and not identically 0");

  const Grid& g = *u0.grid;
  const double dt = s.scheme.dt;
  const long total = static_cast<long>(std::ceil((s.t_end - s.t0) / dt - 1e-9));
  const long after = std::max(1L, std::lround(delta / dt));
  if (after >= total) throw ConfigError("sandwich: delta leaves no room for sample times");
  std::vector<long> checkpoints;
  for (int j = 1; j <= samples; ++j)
    checkpoints.push_back(after + static_cast<long>(std::ceil(static_cast<double>(j) * (total - after) / samples)));

  SandwichReport rep;
  Eigen::VectorXd u = u0.values, v = v0.values;
  double lo = 1.0, hi = 1.0;
  std::size_t next = 0;
  for (long k = 1; k <= total && next < checkpoints.size(); ++k) {
    const double t = s.t0 + static_cast<double>(k) * dt;
    const Eigen::VectorXd n = sample_n(g, s.params, t);
    u = imex_step(g, u, n, s.params.lambda, s.params.rho, dt, s.scheme.solve_tol,
                  s.scheme.inject_fault);
    v = imex_step(g, v, n, s.params.lambda, s.params.rho, dt, s.scheme.solve_tol,
                  s.scheme.inject_fault);
    if (k == after) {
      if (!(u.array() > 0.0).all() || !(v.array() > 0.0).all()) {
        std::ostringstream msg;
        msg << "sandwich: a solution vanishes at an interior node at t = " << t
            << " (discrete positivity failed; refine dt or the grid)";
        throw ContradictionError(msg.str());
      }
      const Eigen::ArrayXd ratio = v.array() / u.array();
      rep.alpha = ratio.minCoeff();
      rep.beta = ratio.maxCoeff();
      // alpha u is a subsolution only for alpha <= 1, beta u a supersolution only for beta >= 1.
      lo = std::min(rep.alpha, 1.0);
      hi = std::max(rep.beta, 1.0);
    }
    if (k == checkpoints[next]) {
      const double scale = std::max(v.cwiseAbs().maxCoeff(), 1e-300);
      const double below = (lo * u - v).maxCoeff() / scale;
      const double above = (v - hi * u).maxCoeff() / scale;
      rep.worst_violation = std::max({rep.worst_violation, below, above});
      rep.times.push_back(t);
      ++next;
    }
  }
  rep.holds = rep.worst_violation <= slack;
  return rep;
}

// ---------------------------------------------------------------------------
// Properties

namespace {

Eigen::VectorXd uniform_field(Index n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  Eigen::VectorXd v(n);
  for (Index k = 0; k < n; ++k) v(k) = d(rng);
  return v;
}

void record(PropertyResult& r, double slack, double limit) {
  r.worst = std::max(r.worst, slack);
  r.passed = r.passed && r.worst <= limit;
}

// A solver breakdown counts as a failed property, not an aborted suite.
template <class Body>
void guarded(std::initializer_list<PropertyResult*> results, Body body) {
  try {
    body();
  } catch (const ConvergenceError& e) {
    for (PropertyResult* r : results) {
      r->passed = false;
      r->worst = kInfinity;
      r->detail = e.what();
    }
  } catch (const ContradictionError& e) {
    for (PropertyResult* r : results) {
      r->passed = false;
      r->worst = kInfinity;
      r->detail = e.what();
    }
  }
}

}  // namespace

std::vector<PropertyResult> run_properties(const PropertyConfig& cfg) {
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto grid = build_grid(DomainSpec{Rectangle{point(0, 0), point(1, 1)}}, cfg.resolution);
  const Grid& g = *grid;
  const Index n = g.size();
  const double tol = 1e-13;
  const bool fault = cfg.inject_fault;

  PropertyResult cmp_n{"comparison in n (n1 >= n2 => u1 <= u2)", true, 0.0, ""};
  PropertyResult cmp_u{"comparison in data (u0 <= v0 => u <= v)", true, 0.0, ""};
  PropertyResult scale{"scaling (alpha = 0.5, 2)", true, 0.0, ""};
  PropertyResult positive{"positivity", true, 0.0, ""};
  guarded({&positive, &cmp_n, &cmp_u, &scale}, [&] {
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const double lambda = 5.0 + 45.0 * unit(rng);
      const double rho = 1.5 + unit(rng);
      const double dt = 1e-3 + 4e-3 * unit(rng);
      const Eigen::VectorXd n2 = uniform_field(n, rng, 0.0, 3.0);
      const Eigen::VectorXd n1 = n2 + uniform_field(n, rng, 0.0, 2.0);
      Eigen::VectorXd a = uniform_field(n, rng, 0.0, 2.0), b = a;
      Eigen::VectorXd v = a + uniform_field(n, rng, 0.0, 1.0);
      Eigen::VectorXd up = 2.0 * a, down = 0.5 * a;
      for (int k = 0; k < cfg.steps; ++k) {
        a = imex_step(g, a, n1, lambda, rho, dt, tol, fault);
        b = imex_step(g, b, n2, lambda, rho, dt, tol, fault);
        v = imex_step(g, v, n1, lambda, rho, dt, tol, fault);
        up = imex_step(g, up, n1, lambda, rho, dt, tol, fault);
        down = imex_step(g, down, n1, lambda, rho, dt, tol, fault);
        const double s = std::max(1.0, sup_norm(v));
        record(positive, std::max(0.0, -a.minCoeff()) / s, 1e-12);
        record(cmp_n, std::max(0.0, (a - b).maxCoeff()) / s, 1e-10);
        record(cmp_u, std::max(0.0, (a - v).maxCoeff()) / s, 1e-10);
        record(scale, std::max({0.0, (up - 2.0 * a).maxCoeff() / s, (0.5 * a - down).maxCoeff() / s}), 1e-10);
      }
    }
  });

  // Linear bound with n = 0 for data below ||u0|| phi / max(phi).
  PropertyResult linear{"linear bound, n = 0 (M = 1 for eigen-dominated data)", true, 0.0, ""};
  const EigenPair phi = principal_eigenpair(grid, g.full_mask());
  guarded({&linear}, [&] {
    Index peak;
    phi.vector.values.maxCoeff(&peak);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const double lambda = phi.value + 40.0 * unit(rng);
      const double dt = 1e-3 + 4e-3 * unit(rng);
      Eigen::VectorXd gain = uniform_field(n, rng, 0.5, 1.0);
      gain(peak) = 1.0;
      Eigen::VectorXd u = phi.vector.values.cwiseProduct(gain);
      const double u0 = sup_norm(u);
      for (int k = 1; k <= cfg.steps; ++k) {
        u = imex_step(g, u, zero, lambda, 2.0, dt, tol, fault);
        const double bound = linear_bound(lambda, phi.value, 1.0, u0, k * dt);
        record(linear, sup_norm(u) / bound - 1.0, 1e-8);
      }
    }
  });

  // Domination by the logistic ODE when n = nu0 everywhere: exact for the
  // discrete ODE step, O(dt) against the closed form.
  PropertyResult wdom{"W domination, n = nu0 (discrete ODE step)", true, 0.0, ""};
  guarded({&wdom}, [&] {
    for (int trial = 0; trial < cfg.trials; ++trial) {
      const double lambda = 5.0 + 45.0 * unit(rng), nu0 = 0.5 + 2.0 * unit(rng), rho = 1.5 + unit(rng);
      const double dt = 1e-3 + 4e-3 * unit(rng);
      const Eigen::VectorXd nn = Eigen::VectorXd::Constant(n, nu0);
      Eigen::VectorXd u = uniform_field(n, rng, 0.0, 3.0);
      double w = sup_norm(u);
      for (int k = 0; k < cfg.steps; ++k) {
        u = imex_step(g, u, nn, lambda, rho, dt, tol, fault);
        w = (1.0 + dt * lambda) * w / (1.0 + dt * nu0 * std::pow(w, rho - 1.0));
        record(wdom, (sup_norm(u) - w) / w, 1e-10);
      }
    }
  });

  PropertyResult sandwich{"initial-data sandwich", true, 0.0, ""};
  guarded({&sandwich}, [&] {
    Scenario s;
    s.domain = g.domain();
    s.resolution = cfg.resolution;
    s.params = {30.0, 2.0, NuProfile{Saturating{1.0, 0.05}, 1.0}, StaticSet{Ball{point(0.5, 0.5), 0.2}}};
    s.scheme.dt = 2e-3;
    s.scheme.inject_fault = fault;
    s.t_end = 0.3;
    for (int trial = 0; trial < std::max(1, cfg.trials / 4); ++trial) {
      auto bump = [&](double height) {
        const Point c = point(0.25 + 0.5 * unit(rng), 0.25 + 0.5 * unit(rng));
        const double r = 0.15 + 0.1 * unit(rng);
        return Field(grid, sample(g, [&](const Point& x) {
                       const double q = (x - c).norm() / r;
                       return q < 1.0 ? height * std::pow(std::cos(0.5 * pi * q), 2) : 0.0;
                     }));
      };
      const Field u0 = bump(0.5 + unit(rng)), v0 = bump(0.5 + unit(rng));
      const SandwichReport rep = initial_data_independence(s, u0, v0, 0.1, 10);
      record(sandwich, rep.worst_violation, 1e-8);
    }
  });

  std::vector<PropertyResult> out{positive, cmp_n, cmp_u, scale, linear, wdom, sandwich};
  for (auto& r : out)
    if (r.detail.empty()) r.detail = "worst relative slack " + fmt(r.worst);
  return out;
}

}  // namespace degenlog
