#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace evomem {

/// General banded matrix, dense-in-band storage. Bandwidths are fixed at
/// construction; writes outside the band throw.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(int rows, int cols, int lower, int upper);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& at(int i, int j);
  double get(int i, int j) const;

  /// y += scale * A x  (x of size cols, y of size rows)
  void apply_add(const double* x, double* y, double scale = 1.0) const;
  Eigen::VectorXd apply(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// dense.block(r0, c0, rows, cols) += scale * A
  void add_to_dense(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0,
                    double scale = 1.0) const;

  Eigen::MatrixXd to_dense() const;

 private:
  int rows_ = 0, cols_ = 0, lower_ = 0, upper_ = 0;
  std::vector<double> data_;  // row-major bands: data_[i * width + (j - i + lower)]
  int width() const { return lower_ + upper_ + 1; }
};

/// Partition of Omega = (0,1) into cells.
struct SpaceMesh1D {
  int N = 0;
  std::vector<double> vertices;  // 0 = x_0 < ... < x_N = 1
  double h_max = 0;

  static SpaceMesh1D uniform(int N);
  static SpaceMesh1D from_vertices(std::vector<double> v);

  double cell_left(int c) const { return vertices[c]; }
  double cell_width(int c) const { return vertices[c + 1] - vertices[c]; }
  /// Cell containing x, right-continuous lookup at interior vertices.
  int locate(double x) const;
};

enum class BoundaryCondition { none, dirichlet_both };

/// Continuous piecewise-polynomial Lagrange space P_k on a 1D mesh, with
/// optional elimination of the two boundary nodes.
class FeSpace {
 public:
  FeSpace() = default;
  FeSpace(SpaceMesh1D mesh, int degree, BoundaryCondition bc);

  const SpaceMesh1D& mesh() const { return mesh_; }
  int degree() const { return degree_; }
  BoundaryCondition bc() const { return bc_; }

  int n_nodes() const { return static_cast<int>(node_coords_.size()); }
  int n_dofs() const { return n_dofs_; }
  double node_coord(int node) const { return node_coords_[node]; }
  /// Global dof of a node, or -1 for an eliminated boundary node.
  int node_dof(int node) const { return node_dof_[node]; }
  /// Global node index of local node r (0..degree) in cell c.
  int cell_node(int c, int r) const { return c * degree_ + r; }

  /// Reference Lagrange nodes r/k on [0,1] and their barycentric weights.
  const std::vector<double>& ref_nodes() const { return ref_nodes_; }
  const std::vector<double>& ref_bary() const { return ref_bary_; }

 private:
  SpaceMesh1D mesh_;
  int degree_ = 1;
  BoundaryCondition bc_ = BoundaryCondition::none;
  int n_dofs_ = 0;
  std::vector<double> node_coords_;
  std::vector<int> node_dof_;
  std::vector<double> ref_nodes_, ref_bary_;
};

/// Nodal interpolation into the space. Under dirichlet_both the function must
/// vanish at the boundary (|g| <= 1e-10 there); a violation throws rather
/// than being zeroed silently.
Eigen::VectorXd interpolate_dofs(const FeSpace& space,
                                 const std::function<double(double)>& g);

/// Point evaluation of a coefficient vector.
double eval_fe(const FeSpace& space, const Eigen::Ref<const Eigen::VectorXd>& dofs,
               double x);

/// Spatially assembled operators for an n-component system on a shared mesh.
///
/// cross_mass(a,b) holds <psi^(b)_c, psi^(a)_r> between the component spaces;
/// the weighted mass operators are M0h = sum_ab M0(a,b) cross_mass(a,b) in
/// block form. With gradient coupling (n == 2) the skew operator
///   Ah = [[0, B], [-B^T, 0]],  B_rc = <d/dx psi^(1)_c, psi^(0)_r>,
/// is stored through B only, so Ah + Ah^T = 0 holds exactly.
class BlockSystem {
 public:
  int n = 0;
  Eigen::MatrixXd M0, M1;
  std::vector<FeSpace> spaces;
  std::vector<int> offsets;  // size n+1; offsets[n] = total dofs
  std::vector<BandedMatrix> cross;  // n*n, row-major (test a, trial b)
  BandedMatrix grad_B;              // only with gradient coupling
  bool gradient_coupling = false;

  int total_dofs() const { return offsets.empty() ? 0 : offsets.back(); }
  const BandedMatrix& cross_mass(int a, int b) const { return cross[a * n + b]; }

  void add_M0h(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0, double scale) const;
  void add_M1h(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0, double scale) const;
  void add_Ah(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0, double scale) const;

  Eigen::VectorXd apply_M0h(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  Eigen::MatrixXd dense_M0h() const;
  Eigen::MatrixXd dense_M1h() const;
  Eigen::MatrixXd dense_Ah() const;

  /// y_a += scale * K_weight * cross_mass(a,b) x_b for one component pair.
  void apply_cross_add(int a, int b, const double* x_b, double* y_a, double scale) const;

  /// L2 load vector <F_a, psi^(a)_r> with n_quad Gauss points per cell.
  Eigen::VectorXd assemble_load(
      const std::function<void(double x, double* out)>& F, int n_quad) const;

  /// Componentwise nodal interpolation, stacked by offsets.
  Eigen::VectorXd interpolate(
      const std::function<void(double x, double* out)>& g) const;

  /// FE evaluation of all components at x.
  void eval(const Eigen::Ref<const Eigen::VectorXd>& dofs, double x, double* out) const;
};

/// Assembles mass/cross/gradient blocks with (k+1)-point Gauss-Legendre
/// element quadrature (exact for the polynomial integrands involved).
/// Throws if M0h is not invertible on the reduced space.
BlockSystem assemble_block_system(const SpaceMesh1D& mesh, int k,
                                  const Eigen::MatrixXd& M0, const Eigen::MatrixXd& M1,
                                  const std::vector<BoundaryCondition>& bcs,
                                  bool gradient_coupling);

/// Two-component gradient-pair convenience (u: dirichlet_both, v: none) for
/// n == 2; single unconstrained component for n == 1.
BlockSystem assemble_block_system(const SpaceMesh1D& mesh, int k,
                                  const Eigen::MatrixXd& M0, const Eigen::MatrixXd& M1);

/// <d/dx psi^(trial), psi^(test)> between two spaces on the same mesh;
/// exposed for the discrete integration-by-parts checks.
BandedMatrix assemble_gradient_block(const FeSpace& test, const FeSpace& trial);

}  // namespace evomem
