#include "degenlog/grid.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>

#include "degenlog/errors.hpp"

namespace degenlog {

namespace {

int checked_count(double extent, double h, const char* axis) {
  const double cells = extent / h;
  const long rounded = std::lround(cells);
  if (std::abs(cells - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, cells)) {
    std::ostringstream msg;
    msg << "grid: extent along " << axis << " is not a multiple of h = " << h;
    throw ConfigError(msg.str());
  }
  return static_cast<int>(rounded);
}

}  // namespace

Grid::Grid(DomainSpec domain, int n) : domain_(std::move(domain)) {
  validate(domain_);
  if (n < 2) throw ConfigError("grid: resolution n must be >= 2 per axis");

  if (const auto* r = std::get_if<Rectangle>(&domain_.shape)) {
    const Point ext = r->hi - r->lo;
    h_ = std::min(ext.x(), ext.y()) / n;
    nx_ = checked_count(ext.x(), h_, "x");
    ny_ = checked_count(ext.y(), h_, "y");
    anchor_ = r->lo;
  } else if (const auto* d = std::get_if<Disc>(&domain_.shape)) {
    h_ = 2.0 * d->radius / n;
    nx_ = ny_ = n;
    anchor_ = d->center;
    ci_ = cj_ = 0.5 * n;
  } else {
    const auto& iv = std::get<Interval>(domain_.shape);
    h_ = (iv.hi - iv.lo) / n;
    nx_ = n;
    ny_ = 0;
    anchor_ = point(iv.lo);
  }
  origin_ = node_point(0, 0);

  const bool rect = std::holds_alternative<Rectangle>(domain_.shape);
  const bool line = dim() == 1;
  id_of_node_.assign(static_cast<std::size_t>(nx_ + 1) * static_cast<std::size_t>(ny_ + 1), -1);
  for (int j = 0; j <= ny_; ++j) {
    for (int i = 0; i <= nx_; ++i) {
      bool interior;
      if (line) {
        interior = i > 0 && i < nx_;
      } else if (rect) {
        interior = i > 0 && i < nx_ && j > 0 && j < ny_;
      } else {
        interior = inside_open(domain_, node_point(i, j));
      }
      if (!interior) continue;
      id_of_node_[static_cast<std::size_t>(j) * (nx_ + 1) + i] = static_cast<Index>(ij_.size());
      ij_.push_back({i, j});
    }
  }
  if (ij_.empty()) throw ConfigError("grid: no interior nodes");

  const double inv_h2 = 1.0 / (h_ * h_);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(ij_.size() * 5);
  for (Index k = 0; k < size(); ++k) {
    triplets.emplace_back(k, k, 2.0 * dim() * inv_h2);
    for (Index nb : neighbours(k))
      if (nb >= 0) triplets.emplace_back(k, nb, -inv_h2);
  }
  neg_laplacian_.resize(size(), size());
  neg_laplacian_.setFromTriplets(triplets.begin(), triplets.end());
  neg_laplacian_.makeCompressed();
}

Point Grid::node_point(int i, int j) const {
  if (dim() == 1) return point(anchor_.x() + (i - ci_) * h_);
  return anchor_ + Point((i - ci_) * h_, (j - cj_) * h_);
}

Point Grid::node_point(Index id) const {
  const auto [i, j] = node_ij(id);
  return node_point(i, j);
}

Index Grid::id(int i, int j) const {
  if (i < 0 || i > nx_ || j < 0 || j > ny_) return -1;
  return id_of_node_[static_cast<std::size_t>(j) * (nx_ + 1) + i];
}

std::array<Index, 4> Grid::neighbours(Index k) const {
  const auto [i, j] = node_ij(k);
  if (dim() == 1) return {id(i - 1, j), id(i + 1, j), -1, -1};
  return {id(i - 1, j), id(i + 1, j), id(i, j - 1), id(i, j + 1)};
}

GridPtr build_grid(const DomainSpec& domain, int n) { return std::make_shared<const Grid>(domain, n); }

// ---------------------------------------------------------------------------

Mask mask_from_shape(const Grid& grid, const SetShape& s) {
  Mask m = Mask::Constant(grid.size(), false);
  if (is_empty(s)) return m;
  for (Index k = 0; k < grid.size(); ++k) m(k) = contains(s, grid.node_point(k));
  return m;
}

Mask dilate_mask(const Grid& grid, const Mask& m, double delta) {
  if (delta < 0.0) throw ConfigError("dilate: delta must be >= 0");
  Mask out = m;
  const int reach = static_cast<int>(std::floor(delta / grid.h() + 1e-9));
  if (reach == 0) return out;
  const double limit = delta * (1.0 + 1e-12);
  const int jreach = grid.dim() == 1 ? 0 : reach;
  for (Index k = 0; k < grid.size(); ++k) {
    if (!m(k)) continue;
    const auto [i, j] = grid.node_ij(k);
    for (int dj = -jreach; dj <= jreach; ++dj) {
      for (int di = -reach; di <= reach; ++di) {
        if (std::hypot(di, dj) * grid.h() > limit) continue;
        const Index nb = grid.id(i + di, j + dj);
        if (nb >= 0) out(nb) = true;
      }
    }
  }
  return out;
}

Mask neighbourhood_mask(const Grid& grid, const SetShape& s, double delta) {
  Mask m = Mask::Constant(grid.size(), false);
  if (is_empty(s)) return m;
  for (Index k = 0; k < grid.size(); ++k) m(k) = distance_to_set(grid.node_point(k), s) < delta;
  return m;
}

std::vector<Mask> connected_components(const Grid& grid, const Mask& m) {
  std::vector<Mask> comps;
  Mask seen = Mask::Constant(grid.size(), false);
  for (Index start = 0; start < grid.size(); ++start) {
    if (!m(start) || seen(start)) continue;
    Mask comp = Mask::Constant(grid.size(), false);
    std::deque<Index> queue{start};
    seen(start) = true;
    while (!queue.empty()) {
      const Index k = queue.front();
      queue.pop_front();
      comp(k) = true;
      for (Index nb : grid.neighbours(k)) {
        if (nb >= 0 && m(nb) && !seen(nb)) {
          seen(nb) = true;
          queue.push_back(nb);
        }
      }
    }
    comps.push_back(std::move(comp));
  }
  return comps;
}

bool is_subset(const Mask& a, const Mask& b) { return !(a && !b).any(); }

RestrictedOperator restrict_neg_laplacian(const Grid& grid, const Mask& m) {
  RestrictedOperator op;
  std::vector<Index> local(static_cast<std::size_t>(grid.size()), -1);
  for (Index k = 0; k < grid.size(); ++k) {
    if (m(k)) {
      local[static_cast<std::size_t>(k)] = static_cast<Index>(op.ids.size());
      op.ids.push_back(k);
    }
  }
  const double inv_h2 = 1.0 / (grid.h() * grid.h());
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t r = 0; r < op.ids.size(); ++r) {
    const auto row = static_cast<Index>(r);
    triplets.emplace_back(row, row, 2.0 * grid.dim() * inv_h2);
    for (Index nb : grid.neighbours(op.ids[r])) {
      if (nb >= 0 && local[static_cast<std::size_t>(nb)] >= 0)
        triplets.emplace_back(row, local[static_cast<std::size_t>(nb)], -inv_h2);
    }
  }
  const auto n = static_cast<Index>(op.ids.size());
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  op.matrix.makeCompressed();
  return op;
}

// ---------------------------------------------------------------------------

namespace {

SparseMatrix assemble(const Grid& grid, const OperatorSpec& op) {
  SparseMatrix a = grid.neg_laplacian();
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(grid.size(), op.shift);
  if (op.diagonal.size() > 0) {
    if (op.diagonal.size() != grid.size()) throw ConfigError("solve: diagonal size mismatch");
    diag += op.diagonal;
  }
  // Every row of the stencil matrix stores its diagonal, so coeffRef never inserts.
  for (Index k = 0; k < grid.size(); ++k) a.coeffRef(k, k) += diag(k);
  return a;
}

}  // namespace

Eigen::VectorXd solve_spd(const Grid& grid, const OperatorSpec& op, const Eigen::VectorXd& rhs,
                          double tol, const Eigen::VectorXd* guess, SolveReport* report) {
  if (rhs.size() != grid.size()) throw ConfigError("solve: rhs size mismatch");
  if (rhs.isZero(0.0)) {
    if (report) *report = {};
    return Eigen::VectorXd::Zero(rhs.size());
  }
  const SparseMatrix a = assemble(grid, op);
  Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  cg.setTolerance(tol);
  cg.setMaxIterations(std::max<Index>(1000, 20 * (grid.nx() + grid.ny())));
  cg.compute(a);
  Eigen::VectorXd x;
  if (guess)
    x = cg.solveWithGuess(rhs, *guess);
  else
    x = cg.solve(rhs);
  if (report) *report = {cg.iterations(), cg.error()};
  if (cg.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "solve: conjugate gradients stopped after " << cg.iterations()
        << " iterations at relative residual " << cg.error() << " (tol " << tol << ")";
    throw ConvergenceError(msg.str(), cg.error());
  }
  return x;
}

Field solve_spd(const OperatorSpec& op, const Field& rhs, double tol) {
  return Field(rhs.grid, solve_spd(*rhs.grid, op, rhs.values, tol));
}

Eigen::VectorXd apply_operator(const Grid& grid, const OperatorSpec& op, const Eigen::VectorXd& x) {
  Eigen::VectorXd y = neg_laplacian(grid, x) + op.shift * x;
  if (op.diagonal.size() > 0) y += op.diagonal.cwiseProduct(x);
  return y;
}

// ---------------------------------------------------------------------------

void write_pgm(const Field& f, const std::string& path, double display_max) {
  const Grid& g = *f.grid;
  if (!(display_max > 0.0)) throw ConfigError("pgm: display_max must be > 0");
  const int w = g.nx() + 1;
  const int rows = g.ny() + 1;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("pgm: cannot open " + path);
  out << "P5\n" << w << ' ' << rows << "\n255\n";
  std::vector<unsigned char> line(static_cast<std::size_t>(w));
  for (int j = rows - 1; j >= 0; --j) {
    for (int i = 0; i < w; ++i) {
      const Index k = g.id(i, j);
      const double v = k >= 0 ? f.values(k) : 0.0;
      const double level = std::clamp(v / display_max, 0.0, 1.0) * 255.0;
      line[static_cast<std::size_t>(i)] = static_cast<unsigned char>(std::lround(level));
    }
    out.write(reinterpret_cast<const char*>(line.data()), w);
  }
  if (!out) throw std::runtime_error("pgm: write failed for " + path);
  std::ofstream scale(path + ".scale");
  scale.precision(17);
  scale << display_max << '\n';
  if (!scale) throw std::runtime_error("pgm: write failed for " + path + ".scale");
}

}  // namespace degenlog
