#include "evomem/space_fem.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "evomem/lagrange.hpp"
#include "evomem/quadrature.hpp"

namespace evomem {

// ---------------------------------------------------------------------------
// BandedMatrix

BandedMatrix::BandedMatrix(int rows, int cols, int lower, int upper)
    : rows_(rows), cols_(cols), lower_(lower), upper_(upper),
      data_(static_cast<size_t>(rows) * (lower + upper + 1), 0.0) {}

double& BandedMatrix::at(int i, int j) {
  const int off = j - i + lower_;
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_ || off < 0 || off >= width())
    throw std::out_of_range("BandedMatrix::at outside band");
  return data_[static_cast<size_t>(i) * width() + off];
}

double BandedMatrix::get(int i, int j) const {
  const int off = j - i + lower_;
  if (off < 0 || off >= width()) return 0.0;
  return data_[static_cast<size_t>(i) * width() + off];
}

void BandedMatrix::apply_add(const double* x, double* y, double scale) const {
  for (int i = 0; i < rows_; ++i) {
    const int j0 = std::max(0, i - lower_);
    const int j1 = std::min(cols_ - 1, i + upper_);
    double acc = 0.0;
    const double* row = data_.data() + static_cast<size_t>(i) * width();
    for (int j = j0; j <= j1; ++j) acc += row[j - i + lower_] * x[j];
    y[i] += scale * acc;
  }
}

Eigen::VectorXd BandedMatrix::apply(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(rows_);
  apply_add(x.data(), y.data(), 1.0);
  return y;
}

void BandedMatrix::add_to_dense(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0,
                                double scale) const {
  for (int i = 0; i < rows_; ++i) {
    const int j0 = std::max(0, i - lower_);
    const int j1 = std::min(cols_ - 1, i + upper_);
    const double* row = data_.data() + static_cast<size_t>(i) * width();
    for (int j = j0; j <= j1; ++j) dense(r0 + i, c0 + j) += scale * row[j - i + lower_];
  }
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(rows_, cols_);
  add_to_dense(d, 0, 0, 1.0);
  return d;
}

// ---------------------------------------------------------------------------
// SpaceMesh1D

SpaceMesh1D SpaceMesh1D::uniform(int N) {
  if (N < 1) throw std::invalid_argument("SpaceMesh1D: N must be >= 1");
  SpaceMesh1D m;
  m.N = N;
  m.vertices.resize(N + 1);
  for (int i = 0; i <= N; ++i) m.vertices[i] = static_cast<double>(i) / N;
  m.vertices[N] = 1.0;
  m.h_max = 1.0 / N;
  return m;
}

SpaceMesh1D SpaceMesh1D::from_vertices(std::vector<double> v) {
  if (v.size() < 2 || v.front() != 0.0 || v.back() != 1.0)
    throw std::invalid_argument("SpaceMesh1D: vertices must span [0,1]");
  SpaceMesh1D m;
  m.N = static_cast<int>(v.size()) - 1;
  m.h_max = 0.0;
  for (int i = 0; i < m.N; ++i) {
    if (!(v[i + 1] > v[i]))
      throw std::invalid_argument("SpaceMesh1D: vertices must be strictly increasing");
    m.h_max = std::max(m.h_max, v[i + 1] - v[i]);
  }
  m.vertices = std::move(v);
  return m;
}

int SpaceMesh1D::locate(double x) const {
  if (x < 0.0 || x > 1.0) throw std::out_of_range("SpaceMesh1D::locate: x outside [0,1]");
  auto it = std::upper_bound(vertices.begin(), vertices.end(), x);
  int c = static_cast<int>(it - vertices.begin()) - 1;
  if (c >= N) c = N - 1;  // x == 1
  if (c < 0) c = 0;
  return c;
}

// ---------------------------------------------------------------------------
// FeSpace

FeSpace::FeSpace(SpaceMesh1D mesh, int degree, BoundaryCondition bc)
    : mesh_(std::move(mesh)), degree_(degree), bc_(bc) {
  if (degree_ < 1) throw std::invalid_argument("FeSpace: degree must be >= 1");
  const int n_nodes = mesh_.N * degree_ + 1;
  node_coords_.resize(n_nodes);
  for (int c = 0; c < mesh_.N; ++c) {
    const double xl = mesh_.cell_left(c), h = mesh_.cell_width(c);
    for (int r = 0; r < degree_; ++r)
      node_coords_[c * degree_ + r] = xl + h * r / degree_;
  }
  node_coords_[n_nodes - 1] = 1.0;

  node_dof_.assign(n_nodes, -1);
  int dof = 0;
  for (int i = 0; i < n_nodes; ++i) {
    const bool boundary = (i == 0 || i == n_nodes - 1);
    if (bc_ == BoundaryCondition::dirichlet_both && boundary) continue;
    node_dof_[i] = dof++;
  }
  n_dofs_ = dof;
  if (n_dofs_ <= 0) throw std::invalid_argument("FeSpace: empty space");

  ref_nodes_.resize(degree_ + 1);
  for (int r = 0; r <= degree_; ++r) ref_nodes_[r] = static_cast<double>(r) / degree_;
  ref_bary_ = barycentric_weights(ref_nodes_);
}

Eigen::VectorXd interpolate_dofs(const FeSpace& space,
                                 const std::function<double(double)>& g) {
  if (space.bc() == BoundaryCondition::dirichlet_both) {
    for (double xb : {0.0, 1.0}) {
      const double gb = g(xb);
      if (std::abs(gb) > 1e-10) {
        std::ostringstream os;
        os << "interpolate_dofs: g(" << xb << ") = " << gb
           << " violates homogeneous Dirichlet data";
        throw std::invalid_argument(os.str());
      }
    }
  }
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(space.n_dofs());
  for (int i = 0; i < space.n_nodes(); ++i) {
    const int d = space.node_dof(i);
    if (d >= 0) dofs(d) = g(space.node_coord(i));
  }
  return dofs;
}

double eval_fe(const FeSpace& space, const Eigen::Ref<const Eigen::VectorXd>& dofs,
               double x) {
  const int c = space.mesh().locate(x);
  const int k = space.degree();
  const double xi = (x - space.mesh().cell_left(c)) / space.mesh().cell_width(c);
  double shape[16];
  lagrange_values(space.ref_nodes(), space.ref_bary(), xi, shape);
  double v = 0.0;
  for (int r = 0; r <= k; ++r) {
    const int d = space.node_dof(space.cell_node(c, r));
    if (d >= 0) v += shape[r] * dofs(d);
  }
  return v;
}

// ---------------------------------------------------------------------------
// Assembly

namespace {

// Shape values and reference derivatives at the element quadrature points.
struct ElementBasis {
  int k, nq;
  std::vector<double> qp, qw;           // reference [0,1]
  std::vector<double> val;              // [g * (k+1) + r]
  std::vector<double> der;              // d/dxi
};

ElementBasis element_basis(int k, int nq) {
  ElementBasis eb;
  eb.k = k;
  eb.nq = nq;
  const GaussRule& gr = gauss_legendre(nq);
  eb.qp.resize(nq);
  eb.qw.resize(nq);
  for (int g = 0; g < nq; ++g) {
    eb.qp[g] = 0.5 * (gr.nodes[g] + 1.0);
    eb.qw[g] = 0.5 * gr.weights[g];
  }
  std::vector<double> nodes(k + 1);
  for (int r = 0; r <= k; ++r) nodes[r] = static_cast<double>(r) / k;
  auto bary = barycentric_weights(nodes);
  eb.val.resize(static_cast<size_t>(nq) * (k + 1));
  eb.der.resize(static_cast<size_t>(nq) * (k + 1));
  for (int g = 0; g < nq; ++g) {
    const double x = eb.qp[g];
    lagrange_values(nodes, bary, x, &eb.val[static_cast<size_t>(g) * (k + 1)]);
    // phi_i'(x) = sum_{j != i} 1/(x_i - x_j) prod_{l != i,j} (x - x_l)/(x_i - x_l)
    for (int i = 0; i <= k; ++i) {
      double der = 0.0;
      for (int j = 0; j <= k; ++j) {
        if (j == i) continue;
        double prod = 1.0;
        for (int l = 0; l <= k; ++l) {
          if (l == i || l == j) continue;
          prod *= (x - nodes[l]) / (nodes[i] - nodes[l]);
        }
        der += prod / (nodes[i] - nodes[j]);
      }
      eb.der[static_cast<size_t>(g) * (k + 1) + i] = der;
    }
  }
  return eb;
}

BandedMatrix assemble_mass_block(const FeSpace& test, const FeSpace& trial,
                                 const ElementBasis& eb) {
  const int k = test.degree();
  BandedMatrix M(test.n_dofs(), trial.n_dofs(), k + 1, k + 1);
  const auto& mesh = test.mesh();
  for (int c = 0; c < mesh.N; ++c) {
    const double h = mesh.cell_width(c);
    for (int r = 0; r <= k; ++r) {
      const int dr = test.node_dof(test.cell_node(c, r));
      if (dr < 0) continue;
      for (int s = 0; s <= k; ++s) {
        const int ds = trial.node_dof(trial.cell_node(c, s));
        if (ds < 0) continue;
        double acc = 0.0;
        for (int g = 0; g < eb.nq; ++g)
          acc += eb.qw[g] * eb.val[static_cast<size_t>(g) * (k + 1) + r] *
                 eb.val[static_cast<size_t>(g) * (k + 1) + s];
        M.at(dr, ds) += h * acc;
      }
    }
  }
  return M;
}

}  // namespace

BandedMatrix assemble_gradient_block(const FeSpace& test, const FeSpace& trial) {
  if (test.degree() != trial.degree())
    throw std::invalid_argument("assemble_gradient_block: mixed degrees unsupported");
  const int k = test.degree();
  ElementBasis eb = element_basis(k, k + 1);
  BandedMatrix B(test.n_dofs(), trial.n_dofs(), k + 1, k + 1);
  const auto& mesh = test.mesh();
  for (int c = 0; c < mesh.N; ++c) {
    for (int r = 0; r <= k; ++r) {
      const int dr = test.node_dof(test.cell_node(c, r));
      if (dr < 0) continue;
      for (int s = 0; s <= k; ++s) {
        const int ds = trial.node_dof(trial.cell_node(c, s));
        if (ds < 0) continue;
        double acc = 0.0;
        for (int g = 0; g < eb.nq; ++g)
          acc += eb.qw[g] * eb.der[static_cast<size_t>(g) * (k + 1) + s] *
                 eb.val[static_cast<size_t>(g) * (k + 1) + r];
        B.at(dr, ds) += acc;  // d/dxi * (1/h) * h = 1
      }
    }
  }
  return B;
}

BlockSystem assemble_block_system(const SpaceMesh1D& mesh, int k,
                                  const Eigen::MatrixXd& M0, const Eigen::MatrixXd& M1,
                                  const std::vector<BoundaryCondition>& bcs,
                                  bool gradient_coupling) {
  const int n = static_cast<int>(M0.rows());
  if (M0.cols() != n || M1.rows() != n || M1.cols() != n)
    throw std::invalid_argument("assemble_block_system: coefficient matrices must be n x n");
  if (static_cast<int>(bcs.size()) != n)
    throw std::invalid_argument("assemble_block_system: one bc flag per component");
  if (gradient_coupling && n != 2)
    throw std::invalid_argument("assemble_block_system: gradient coupling needs n == 2");
  if (!M0.isApprox(M0.transpose(), 1e-12))
    throw std::invalid_argument("assemble_block_system: M0 must be symmetric");

  BlockSystem sys;
  sys.n = n;
  sys.M0 = M0;
  sys.M1 = M1;
  sys.gradient_coupling = gradient_coupling;
  sys.spaces.reserve(n);
  sys.offsets.assign(n + 1, 0);
  for (int a = 0; a < n; ++a) {
    sys.spaces.emplace_back(mesh, k, bcs[a]);
    sys.offsets[a + 1] = sys.offsets[a] + sys.spaces[a].n_dofs();
  }

  ElementBasis eb = element_basis(k, k + 1);
  sys.cross.resize(static_cast<size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      sys.cross[a * n + b] = assemble_mass_block(sys.spaces[a], sys.spaces[b], eb);

  if (gradient_coupling)
    sys.grad_B = assemble_gradient_block(sys.spaces[0], sys.spaces[1]);

  // M0h must be invertible for the time stepping to make sense.
  Eigen::MatrixXd m0h = sys.dense_M0h();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m0h);
  if (!lu.isInvertible())
    throw std::runtime_error("assemble_block_system: singular M0h (space too small?)");
  return sys;
}

BlockSystem assemble_block_system(const SpaceMesh1D& mesh, int k,
                                  const Eigen::MatrixXd& M0, const Eigen::MatrixXd& M1) {
  const int n = static_cast<int>(M0.rows());
  if (n == 1)
    return assemble_block_system(mesh, k, M0, M1, {BoundaryCondition::none}, false);
  if (n == 2)
    return assemble_block_system(
        mesh, k, M0, M1,
        {BoundaryCondition::dirichlet_both, BoundaryCondition::none}, true);
  throw std::invalid_argument("assemble_block_system: default layout covers n in {1,2}");
}

void BlockSystem::add_M0h(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0,
                          double scale) const {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (M0(a, b) != 0.0)
        cross_mass(a, b).add_to_dense(dense, r0 + offsets[a], c0 + offsets[b],
                                      scale * M0(a, b));
}

void BlockSystem::add_M1h(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0,
                          double scale) const {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (M1(a, b) != 0.0)
        cross_mass(a, b).add_to_dense(dense, r0 + offsets[a], c0 + offsets[b],
                                      scale * M1(a, b));
}

void BlockSystem::add_Ah(Eigen::Ref<Eigen::MatrixXd> dense, int r0, int c0,
                         double scale) const {
  if (!gradient_coupling) return;
  // [[0, B], [-B^T, 0]] -- skew by construction.
  grad_B.add_to_dense(dense, r0 + offsets[0], c0 + offsets[1], scale);
  for (int i = 0; i < grad_B.rows(); ++i)
    for (int j = std::max(0, i - spaces[0].degree() - 1);
         j <= std::min(grad_B.cols() - 1, i + spaces[0].degree() + 1); ++j) {
      const double v = grad_B.get(i, j);
      if (v != 0.0) dense(r0 + offsets[1] + j, c0 + offsets[0] + i) -= scale * v;
    }
}

Eigen::VectorXd BlockSystem::apply_M0h(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(total_dofs());
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (M0(a, b) != 0.0)
        cross_mass(a, b).apply_add(x.data() + offsets[b], y.data() + offsets[a], M0(a, b));
  return y;
}

Eigen::MatrixXd BlockSystem::dense_M0h() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(total_dofs(), total_dofs());
  add_M0h(d, 0, 0, 1.0);
  return d;
}

Eigen::MatrixXd BlockSystem::dense_M1h() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(total_dofs(), total_dofs());
  add_M1h(d, 0, 0, 1.0);
  return d;
}

Eigen::MatrixXd BlockSystem::dense_Ah() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(total_dofs(), total_dofs());
  add_Ah(d, 0, 0, 1.0);
  return d;
}

void BlockSystem::apply_cross_add(int a, int b, const double* x_b, double* y_a,
                                  double scale) const {
  cross_mass(a, b).apply_add(x_b, y_a, scale);
}

Eigen::VectorXd BlockSystem::assemble_load(
    const std::function<void(double x, double* out)>& F, int n_quad) const {
  Eigen::VectorXd load = Eigen::VectorXd::Zero(total_dofs());
  const GaussRule& gr = gauss_legendre(n_quad);
  std::vector<double> fval(n);
  std::vector<double> shape(16);
  // All component spaces share the mesh and degree, so shapes are shared too.
  const FeSpace& sp0 = spaces[0];
  const int k = sp0.degree();
  for (int c = 0; c < sp0.mesh().N; ++c) {
    const double xl = sp0.mesh().cell_left(c), h = sp0.mesh().cell_width(c);
    for (int g = 0; g < n_quad; ++g) {
      const double xi = 0.5 * (gr.nodes[g] + 1.0);
      const double w = 0.5 * gr.weights[g] * h;
      const double x = xl + h * xi;
      lagrange_values(sp0.ref_nodes(), sp0.ref_bary(), xi, shape.data());
      F(x, fval.data());
      for (int a = 0; a < n; ++a) {
        if (fval[a] == 0.0) continue;
        for (int r = 0; r <= k; ++r) {
          const int d = spaces[a].node_dof(spaces[a].cell_node(c, r));
          if (d >= 0) load(offsets[a] + d) += w * fval[a] * shape[r];
        }
      }
    }
  }
  return load;
}

Eigen::VectorXd BlockSystem::interpolate(
    const std::function<void(double x, double* out)>& g) const {
  Eigen::VectorXd dofs = Eigen::VectorXd::Zero(total_dofs());
  std::vector<double> gval(n);
  for (int a = 0; a < n; ++a) {
    auto ga = [&](double x) {
      g(x, gval.data());
      return gval[a];
    };
    dofs.segment(offsets[a], spaces[a].n_dofs()) = interpolate_dofs(spaces[a], ga);
  }
  return dofs;
}

void BlockSystem::eval(const Eigen::Ref<const Eigen::VectorXd>& dofs, double x,
                       double* out) const {
  for (int a = 0; a < n; ++a)
    out[a] = eval_fe(spaces[a], dofs.segment(offsets[a], spaces[a].n_dofs()), x);
}

}  // namespace evomem
