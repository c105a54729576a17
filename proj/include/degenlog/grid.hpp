#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "degenlog/geometry.hpp"

namespace degenlog {

using Index = Eigen::Index;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Boolean per interior node of a grid (indexed like field values).
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

/// Uniform node-centred grid over a domain. Nodes strictly inside the open
/// domain are the unknowns; every other node carries the Dirichlet value 0.
class Grid {
 public:
  Grid(DomainSpec domain, int n);

  const DomainSpec& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  double h() const { return h_; }
  /// Cells per axis (ny == 0 in 1D).
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  Point origin() const { return origin_; }

  /// Number of interior nodes.
  Index size() const { return static_cast<Index>(ij_.size()); }
  /// h^dim, the quadrature weight of one node.
  double cell_measure() const { return dim() == 1 ? h_ : h_ * h_; }

  Point node_point(Index id) const;
  Point node_point(int i, int j) const;
  std::array<int, 2> node_ij(Index id) const { return ij_[static_cast<std::size_t>(id)]; }
  /// Interior id of node (i, j), or -1 when it is exterior or out of range.
  Index id(int i, int j) const;

  /// Up to 2*dim interior neighbours; -1 marks a Dirichlet neighbour.
  std::array<Index, 4> neighbours(Index id) const;

  Mask full_mask() const { return Mask::Constant(size(), true); }

  /// -Delta_h on all interior nodes.
  const SparseMatrix& neg_laplacian() const { return neg_laplacian_; }

 private:
  DomainSpec domain_;
  double h_ = 0.0;
  int nx_ = 0, ny_ = 0;
  Point origin_;
  // node_point(i, j) = anchor_ + h ((i - ci_), (j - cj_)); discs are anchored
  // at the centre so the node set is exactly symmetric.
  Point anchor_;
  double ci_ = 0.0, cj_ = 0.0;
  std::vector<Index> id_of_node_;
  std::vector<std::array<int, 2>> ij_;
  SparseMatrix neg_laplacian_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// n >= 2 cells along the shortest axis (across the diameter for discs).
GridPtr build_grid(const DomainSpec& domain, int n);

/// Scalar grid function on the interior nodes.
template <typename Scalar>
struct BasicField {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  GridPtr grid;
  Vector values;

  BasicField() = default;
  BasicField(GridPtr g, Vector v) : grid(std::move(g)), values(std::move(v)) {}
  explicit BasicField(GridPtr g) : grid(std::move(g)), values(Vector::Zero(grid->size())) {}

  Index size() const { return values.size(); }
};

using Field = BasicField<double>;

/// -Delta_h f with the 5-point (3-point in 1D) stencil; neighbours outside
/// the interior contribute 0.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> neg_laplacian(
    const Grid& grid, const Eigen::MatrixBase<Derived>& f) {
  using Scalar = typename Derived::Scalar;
  const Scalar inv_h2 = Scalar(1) / Scalar(grid.h() * grid.h());
  const int stencil = 2 * grid.dim();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(f.size());
  for (Index k = 0; k < f.size(); ++k) {
    Scalar acc = Scalar(stencil) * f(k);
    for (Index nb : grid.neighbours(k)) {
      if (nb >= 0) acc -= f(nb);
    }
    out(k) = acc * inv_h2;
  }
  return out;
}

template <typename Scalar>
BasicField<Scalar> neg_laplacian(const BasicField<Scalar>& f) {
  return BasicField<Scalar>(f.grid, neg_laplacian(*f.grid, f.values));
}

/// Discrete L2 inner product with weight h^dim.
template <typename DA, typename DB>
typename DA::Scalar inner(const Grid& grid, const Eigen::MatrixBase<DA>& a,
                          const Eigen::MatrixBase<DB>& b) {
  return a.dot(b) * typename DA::Scalar(grid.cell_measure());
}

template <typename Derived>
typename Derived::Scalar l2_norm(const Grid& grid, const Eigen::MatrixBase<Derived>& a) {
  using std::sqrt;
  return sqrt(inner(grid, a, a));
}

template <typename Derived>
typename Derived::Scalar sup_norm(const Eigen::MatrixBase<Derived>& a) {
  return a.size() == 0 ? typename Derived::Scalar(0) : a.cwiseAbs().maxCoeff();
}

/// Samples a function of position at every interior node.
template <typename Fn>
Eigen::VectorXd sample(const Grid& grid, Fn&& fn) {
  Eigen::VectorXd v(grid.size());
  for (Index k = 0; k < grid.size(); ++k) v(k) = fn(grid.node_point(k));
  return v;
}

// ---------------------------------------------------------------------------
// Masks

/// Nodes lying in s (distance 0).
Mask mask_from_shape(const Grid& grid, const SetShape& s);

/// Nodes within Euclidean distance delta of a node of m.
Mask dilate_mask(const Grid& grid, const Mask& m, double delta);

/// Open neighbourhood {x : d(x, s) < delta} sampled at the nodes.
Mask neighbourhood_mask(const Grid& grid, const SetShape& s, double delta);

/// 4-connected (2-connected in 1D) components, ordered by smallest node id.
std::vector<Mask> connected_components(const Grid& grid, const Mask& m);

bool is_subset(const Mask& a, const Mask& b);

/// -Delta_h restricted to the nodes of m (Dirichlet outside m), together with
/// the interior ids of the restricted unknowns.
struct RestrictedOperator {
  SparseMatrix matrix;
  std::vector<Index> ids;
};

RestrictedOperator restrict_neg_laplacian(const Grid& grid, const Mask& m);

// ---------------------------------------------------------------------------
// SPD solves

/// shift * I - Delta_h + diag(c) on the grid interior; c >= 0 (empty = 0).
struct OperatorSpec {
  double shift = 1.0;
  Eigen::VectorXd diagonal;
};

struct SolveReport {
  Index iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients to relative residual <= tol. Throws
/// ConvergenceError with the reached residual when the iteration cap is hit.
Eigen::VectorXd solve_spd(const Grid& grid, const OperatorSpec& op, const Eigen::VectorXd& rhs,
                          double tol = 1e-10, const Eigen::VectorXd* guess = nullptr,
                          SolveReport* report = nullptr);

Field solve_spd(const OperatorSpec& op, const Field& rhs, double tol = 1e-10);

/// Applies the operator of `op`, used for independent residual checks.
Eigen::VectorXd apply_operator(const Grid& grid, const OperatorSpec& op,
                               const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Snapshot export

/// Writes an 8-bit binary PGM with header "P5\n<w> <h>\n255\n" (boundary nodes
/// included, top row = largest y) and a sidecar `<path>.scale` holding
/// display_max. Values are mapped affinely from [0, display_max] to [0, 255].
void write_pgm(const Field& f, const std::string& path, double display_max);

}  // namespace degenlog
