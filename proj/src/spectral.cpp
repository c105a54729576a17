#include "degenlog/spectral.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>

#include "degenlog/errors.hpp"

namespace degenlog {

namespace {

constexpr int kMaxSweeps = 2000;

struct Restricted {
  RestrictedOperator op;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

void require_connected(const Grid& grid, const Mask& m) {
  if (!m.any()) throw ConfigError("eigen: mask is empty");
  if (connected_components(grid, m).size() != 1)
    throw ConfigError("eigen: mask is disconnected; the principal eigenvalue needs a connected mask");
}

void factor(const Grid& grid, const Mask& m, Restricted& r) {
  r.op = restrict_neg_laplacian(grid, m);
  r.ldlt.compute(r.op.matrix);
  if (r.ldlt.info() != Eigen::Success) throw ConvergenceError("eigen: factorization failed", kInfinity);
}

// Inverse iteration; `deflate` (possibly empty) is kept orthogonal to x.
double inverse_iteration(const Restricted& r, Eigen::VectorXd& x, const Eigen::VectorXd& deflate,
                         double tol) {
  auto project = [&](Eigen::VectorXd& v) {
    if (deflate.size() > 0) v -= deflate.dot(v) * deflate;
    v.normalize();
  };
  project(x);
  double lambda = x.dot(r.op.matrix * x);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    x = r.ldlt.solve(x);
    project(x);
    const Eigen::VectorXd ax = r.op.matrix * x;
    const double next = x.dot(ax);
    const double shift = std::abs(next - lambda);
    lambda = next;
    const double residual = (ax - lambda * x).norm() / lambda;
    if (shift <= tol * lambda && residual <= 1e-7) return lambda;
  }
  std::ostringstream msg;
  msg << "eigen: inverse iteration did not settle in " << kMaxSweeps << " sweeps";
  throw ConvergenceError(msg.str(), (r.op.matrix * x - lambda * x).norm());
}

Field embed(const GridPtr& grid, const std::vector<Index>& ids, const Eigen::VectorXd& local) {
  Field f(grid);
  for (std::size_t r = 0; r < ids.size(); ++r) f.values(ids[r]) = local(static_cast<Index>(r));
  return f;
}

double neville_at_zero(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> p = y;
  const std::size_t n = x.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = 0; i + level < n; ++i)
      p[i] = (x[i + level] * p[i] - x[i] * p[i + 1]) / (x[i + level] - x[i]);
  return p[0];
}

}  // namespace

EigenPair principal_eigenpair(const GridPtr& grid, const Mask& m, double tol) {
  require_connected(*grid, m);
  Restricted r;
  factor(*grid, m, r);
  Eigen::VectorXd x = Eigen::VectorXd::Ones(static_cast<Index>(r.op.ids.size()));
  const double lambda = inverse_iteration(r, x, {}, tol);
  if (x.sum() < 0) x = -x;
  x /= std::sqrt(grid->cell_measure());
  return {lambda, embed(grid, r.op.ids, x)};
}

double second_eigenvalue(const GridPtr& grid, const Mask& m, double tol) {
  require_connected(*grid, m);
  Restricted r;
  factor(*grid, m, r);
  const auto n = static_cast<Index>(r.op.ids.size());
  if (n < 2) throw ConfigError("eigen: second eigenvalue needs at least two nodes");
  Eigen::VectorXd phi = Eigen::VectorXd::Ones(n);
  inverse_iteration(r, phi, {}, tol);

  // Asymmetric start so no symmetry class of the mask is missed.
  Eigen::VectorXd x(n);
  for (Index k = 0; k < n; ++k) {
    const auto [i, j] = grid->node_ij(r.op.ids[static_cast<std::size_t>(k)]);
    x(k) = std::sin(0.731 * i + 0.1) + 0.57 * std::cos(0.413 * j + 0.3 * i);
  }
  return inverse_iteration(r, x, phi, tol);
}

double lambda1_of_mask(const GridPtr& grid, const Mask& m, double tol) {
  if (!m.any()) throw ConfigError("eigen: mask is empty");
  double best = kInfinity;
  for (const Mask& comp : connected_components(*grid, m))
    best = std::min(best, principal_eigenpair(grid, comp, tol).value);
  return best;
}

std::vector<double> default_deltas(const Grid& grid, double delta0) {
  const double floor = 2.0 * grid.h();
  std::vector<double> deltas;
  for (double d = delta0; d > floor * (1.0 + 1e-9); d *= 0.5) deltas.push_back(d);
  deltas.push_back(floor);
  return deltas;
}

Lambda0Estimate lambda0_of_set(const GridPtr& grid, const SetShape& k, std::vector<double> deltas,
                               double cap) {
  if (is_empty(k)) throw ConfigError("lambda0: the set is empty (lambda_0 of the empty set is +inf)");
  if (deltas.empty()) deltas = default_deltas(*grid);
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw ConfigError("lambda0: deltas must be strictly decreasing");
  if (deltas.back() < 2.0 * grid->h() * (1.0 - 1e-9))
    throw ConfigError("lambda0: smallest delta must be >= 2h");

  Lambda0Estimate est;
  est.deltas = deltas;
  for (double d : deltas) {
    const Mask m = neighbourhood_mask(*grid, k, d);
    if (!m.any()) throw ConfigError("lambda0: neighbourhood mask is empty");
    est.values.push_back(lambda1_of_mask(grid, m));
  }
  const std::size_t used = std::min<std::size_t>(3, deltas.size());
  const std::vector<double> x(deltas.end() - static_cast<long>(used), deltas.end());
  const std::vector<double> y(est.values.end() - static_cast<long>(used), est.values.end());
  est.value = neville_at_zero(x, y);
  if (est.values.back() > cap || est.value > cap) {
    est.verdict = Lambda0Verdict::infinite;
    est.value = kInfinity;
  }
  return est;
}

double bessel_j0_first_zero() {
  double lo = 2.0, hi = 3.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::cyl_bessel_j(0.0, mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double analytic_lambda1(const DomainSpec& domain) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (const auto* r = std::get_if<Rectangle>(&domain.shape)) {
    const Point e = r->hi - r->lo;
    return pi2 * (1.0 / (e.x() * e.x()) + 1.0 / (e.y() * e.y()));
  }
  if (const auto* d = std::get_if<Disc>(&domain.shape)) {
    const double j = bessel_j0_first_zero();
    return j * j / (d->radius * d->radius);
  }
  const auto& iv = std::get<Interval>(domain.shape);
  return pi2 / ((iv.hi - iv.lo) * (iv.hi - iv.lo));
}

double analytic_lambda1(const SetShape& shape, int dim) {
  const auto* b = shape.get_if<Ball>();
  if (!b || !(b->radius > 0.0)) throw ConfigError("analytic lambda_1: only balls of positive radius");
  if (dim == 1) return std::numbers::pi * std::numbers::pi / (4.0 * b->radius * b->radius);
  const double j = bessel_j0_first_zero();
  return j * j / (b->radius * b->radius);
}

}  // namespace degenlog
