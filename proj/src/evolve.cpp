#include "degenlog/evolve.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "degenlog/errors.hpp"
#include "degenlog/spectral.hpp"

namespace degenlog {

void validate(const EquationParams& p) {
  if (!(p.rho > 1.0)) throw ConfigError("equation: rho must satisfy rho > 1");
  if (!std::isfinite(p.lambda)) throw ConfigError("equation: lambda must be finite");
  validate(p.nu);
  validate(p.moving_set);
}

void validate(const SchemeConfig& cfg, double lambda) {
  if (!(cfg.dt > 0.0)) throw ConfigError("scheme: dt must be > 0");
  if (!(1.0 + cfg.dt * lambda > 0.0)) throw ConfigError("scheme: requires 1 + dt lambda > 0");
  if (!(cfg.dt * std::max(lambda, 0.0) < 0.5)) throw ConfigError("scheme: requires dt max(lambda, 0) < 0.5");
  if (!(cfg.solve_tol > 0.0)) throw ConfigError("scheme: solve_tol must be > 0");
  if (!(cfg.growth_cap > 0.0)) throw ConfigError("scheme: growth_cap must be > 0");
}

Eigen::VectorXd sample_n(const Grid& grid, const EquationParams& p, double t) {
  const SetShape k = snapshot(p.moving_set, t);
  if (is_empty(k)) return Eigen::VectorXd::Constant(grid.size(), p.nu.n_empty);
  return sample(grid, [&](const Point& x) { return p.nu(distance_to_set(x, k)); });
}

Eigen::VectorXd imex_step(const Grid& grid, const Eigen::VectorXd& u, const Eigen::VectorXd& n_next,
                          double lambda, double rho, double dt, double solve_tol, bool inject_fault) {
  OperatorSpec op;
  op.shift = 1.0 / dt;
  op.diagonal = n_next.array() * u.array().abs().pow(rho - 1.0);
  if (inject_fault) op.diagonal = -op.diagonal;
  const Eigen::VectorXd rhs = (1.0 / dt + lambda) * u;
  return solve_spd(grid, op, rhs, solve_tol, &u);
}

StepState step(const StepState& state, const EquationParams& p, const SchemeConfig& cfg) {
  const Grid& g = *state.u.grid;
  const double t_next = state.t + cfg.dt;
  const Eigen::VectorXd n = sample_n(g, p, t_next);
  return {t_next, Field(state.u.grid, imex_step(g, state.u.values, n, p.lambda, p.rho, cfg.dt,
                                                cfg.solve_tol, cfg.inject_fault))};
}

// ---------------------------------------------------------------------------

bool operator==(const EquationParams& a, const EquationParams& b) {
  return a.lambda == b.lambda && a.rho == b.rho && a.nu == b.nu && a.moving_set == b.moving_set;
}

bool operator==(const SchemeConfig& a, const SchemeConfig& b) {
  return a.dt == b.dt && a.solve_tol == b.solve_tol && a.growth_cap == b.growth_cap &&
         a.inject_fault == b.inject_fault;
}

bool operator==(const Scenario& a, const Scenario& b) {
  return a.label == b.label && a.domain == b.domain && a.resolution == b.resolution &&
         a.params == b.params && a.scheme == b.scheme && a.t0 == b.t0 && a.t_end == b.t_end &&
         a.initial == b.initial && a.outputs == b.outputs;
}

void validate(const Scenario& s) {
  validate(s.domain);
  validate(s.params);
  if (!(s.t_end >= s.t0)) throw ConfigError("time: requires t_end >= t0");
  if (s.outputs.sample_every < 1) throw ConfigError("output: sample_every must be >= 1");
  if (s.outputs.snapshot_every < 0.0) throw ConfigError("output: snapshot_every must be >= 0");
  if (s.scheme.dt < 0.0) throw ConfigError("scheme: dt must be > 0");
  if (s.scheme.growth_cap < 0.0) throw ConfigError("scheme: growth_cap must be > 0");
  std::visit(
      [](const auto& init) {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, ConstantInit>) {
          if (!(init.c > 0.0)) throw ConfigError("initial: constant must be > 0 (u0 >= 0, not identically 0)");
        } else if constexpr (std::is_same_v<T, BumpInit>) {
          if (!(init.radius > 0.0 && init.height > 0.0))
            throw ConfigError("initial: bump radius and height must be > 0");
        } else if constexpr (std::is_same_v<T, EigenInit>) {
          validate(init.shape);
          if (is_empty(init.shape)) throw ConfigError("initial: eigenfunction of an empty set");
          if (!(init.scale > 0.0)) throw ConfigError("initial: scale must be > 0");
        } else {
          if (init.values.size() == 0 || (init.values.array() < 0.0).any() || !(init.values.array() > 0.0).any())
            throw ConfigError("initial: custom data must be >= 0 and not identically 0");
        }
      },
      s.initial.kind);
  if (s.t_end > s.t0) {
    const double sample_dt = std::min(0.01, (s.t_end - s.t0) / 50.0);
    check_inside(s.params.moving_set, s.domain, s.t0, s.t_end, sample_dt);
  }
}

Scenario resolved(const Scenario& s) {
  Scenario out = s;
  if (out.scheme.dt == 0.0) out.scheme.dt = 1e-3 / analytic_lambda1(s.domain);
  return out;
}

Field initial_field(const Scenario& s, const GridPtr& grid) {
  Field u(grid);
  std::visit(
      [&](const auto& init) {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, ConstantInit>) {
          u.values.setConstant(init.c);
        } else if constexpr (std::is_same_v<T, BumpInit>) {
          u.values = sample(*grid, [&](const Point& x) {
            const double r = (x - init.center).norm() / init.radius;
            if (r >= 1.0) return 0.0;
            const double c = std::cos(0.5 * std::numbers::pi * r);
            return init.height * c * c;
          });
        } else if constexpr (std::is_same_v<T, EigenInit>) {
          const Mask m = mask_from_shape(*grid, init.shape);
          const EigenPair e = principal_eigenpair(grid, m);
          u.values = e.vector.values * (init.scale / e.vector.values.maxCoeff());
        } else {
          if (init.values.size() != grid->size())
            throw ConfigError("initial: custom data does not match the grid size");
          u.values = init.values;
        }
      },
      s.initial.kind);
  if (!(u.values.array() > 0.0).any())
    throw ConfigError("initial: u0 vanishes at every interior node of the grid");
  return u;
}

Trajectory run(const Scenario& s) {
  validate(s);
  GridPtr grid = build_grid(s.domain, s.resolution);
  return run(s, grid, initial_field(s, grid));
}

Trajectory run(const Scenario& scenario, const GridPtr& grid, const Field& u0) {
  Scenario s = resolved(scenario);
  Trajectory tr;
  tr.u0_sup = sup_norm(u0.values);
  tr.growth_cap = s.scheme.growth_cap > 0.0 ? s.scheme.growth_cap : 1e4 * tr.u0_sup;
  s.scheme.growth_cap = tr.growth_cap;
  validate(s.params);
  validate(s.scheme, s.params.lambda);

  const Grid& g = *grid;
  const double cell = g.cell_measure();
  auto record = [&](double t, const Eigen::VectorXd& u) {
    tr.times.push_back(t);
    tr.sup_norms.push_back(sup_norm(u));
    tr.l2_norms.push_back(std::sqrt(u.squaredNorm() * cell));
    tr.masses.push_back(u.sum() * cell);
  };
  const double dt = s.scheme.dt;
  const double span = s.t_end - s.t0;
  const long steps = span > 0.0 ? static_cast<long>(std::ceil(span / dt - 1e-9)) : 0;
  const double snap_every = s.outputs.snapshot_every;
  double next_snapshot = s.t0;

  Eigen::VectorXd u = u0.values;
  record(s.t0, u);
  if (snap_every > 0.0) {
    tr.snapshots.emplace_back(s.t0, Field(grid, u));
    next_snapshot += snap_every;
  }

  // n only changes when the snapshot does; reuse it across steps otherwise.
  SetShape cached_shape;
  Eigen::VectorXd n;
  bool have_n = false;
  double t_prev = s.t0;
  for (long k = 1; k <= steps; ++k) {
    const double t = k == steps ? s.t_end : s.t0 + static_cast<double>(k) * dt;
    const double h = t - t_prev;
    SetShape shape = snapshot(s.params.moving_set, t);
    if (!have_n || !(shape == cached_shape)) {
      n = is_empty(shape) ? Eigen::VectorXd::Constant(g.size(), s.params.nu.n_empty)
                          : sample(g, [&](const Point& x) { return s.params.nu(distance_to_set(x, shape)); });
      cached_shape = std::move(shape);
      have_n = true;
    }
    u = imex_step(g, u, n, s.params.lambda, s.params.rho, h, s.scheme.solve_tol, s.scheme.inject_fault);
    t_prev = t;
    const double sup = sup_norm(u);
    const bool over = sup > tr.growth_cap;
    if (over || k == steps || k % s.outputs.sample_every == 0) record(t, u);
    if (snap_every > 0.0 && (t >= next_snapshot - 1e-9 * dt || k == steps)) {
      tr.snapshots.emplace_back(t, Field(grid, u));
      while (next_snapshot <= t + 1e-9 * dt) next_snapshot += snap_every;
    }
    if (over) {
      tr.cap_hit = t;
      break;
    }
  }
  return tr;
}

}  // namespace degenlog
