#include "afem/assembly.hpp"

#include <cmath>
#include <stdexcept>

namespace afem {

double SparseSymMatrix::quadratic_form(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("quadratic_form: dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
  return xv.dot(mat_ * xv);
}

std::vector<double> SparseSymMatrix::apply(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw std::invalid_argument("apply: dimension mismatch");
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), x.size());
  Eigen::VectorXd y = mat_ * xv;
  return {y.data(), y.data() + y.size()};
}

double SparseSymMatrix::max_asymmetry() const {
  Eigen::SparseMatrix<double> d = mat_ - Eigen::SparseMatrix<double>(mat_.transpose());
  double m = 0.0;
  for (int k = 0; k < d.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, k); it; ++it)
      m = std::max(m, std::abs(it.value()));
  return m;
}

const QuadratureRule& QuadratureRule::standard() {
  static const QuadratureRule rule = [] {
    QuadratureRule r;
    // Dunavant degree-4 rule.
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    auto add = [&](double l0, double l1, double w) {
      r.element.push_back({l0, l1, 1.0 - l0 - l1, w});
    };
    add(1.0 - 2.0 * a1, a1, w1);
    add(a1, 1.0 - 2.0 * a1, w1);
    add(a1, a1, w1);
    add(1.0 - 2.0 * a2, a2, w2);
    add(a2, 1.0 - 2.0 * a2, w2);
    add(a2, a2, w2);
    // 3-point Gauss on [0,1].
    const double s = std::sqrt(0.6);
    r.edge = {{0.5 * (1.0 - s), 5.0 / 18.0},
              {0.5, 8.0 / 18.0},
              {0.5 * (1.0 + s), 5.0 / 18.0}};
    return r;
  }();
  return rule;
}

namespace {

struct ElementGeometry {
  Vec2 p[3];
  Vec2 grad[3];  // gradients of the nodal basis functions
  double area;
};

ElementGeometry element_geometry(const Mesh& mesh, int t) {
  ElementGeometry g;
  g.p[0] = mesh.vertex_pos(t, 0);
  g.p[1] = mesh.vertex_pos(t, 1);
  g.p[2] = mesh.vertex_pos(t, 2);
  double two_area = cross(g.p[1] - g.p[0], g.p[2] - g.p[0]);
  g.area = mesh.triangles[t].area;
  g.grad[0] = (1.0 / two_area) * perp(g.p[1] - g.p[2]);
  g.grad[1] = (1.0 / two_area) * perp(g.p[2] - g.p[0]);
  g.grad[2] = (1.0 / two_area) * perp(g.p[0] - g.p[1]);
  return g;
}

// Quadrature average of the scalar-product weight over one element.
double element_weight(ScalarProductSpec spec, const ProblemSpec& problem,
                      const Mesh& mesh, const FeFunction* w, int t,
                      const ElementGeometry& g) {
  switch (spec) {
    case ScalarProductSpec::H1:
      return 1.0;
    case ScalarProductSpec::WeightedIterate: {
      Vec2 gw = element_gradient(mesh, *w, t);
      return problem.nonlinearity.mu(dot(gw, gw));
    }
    case ScalarProductSpec::WeightedExact: {
      const auto& rule = QuadratureRule::standard();
      double acc = 0.0;
      for (const auto& q : rule.element) {
        Vec2 x = q.l0 * g.p[0] + q.l1 * g.p[1] + q.l2 * g.p[2];
        Vec2 ge = problem.exact_gradient(x);
        acc += q.w * problem.nonlinearity.mu(dot(ge, ge));
      }
      return acc;
    }
  }
  return 1.0;
}

}  // namespace

SparseSymMatrix assemble_scalar_product(const Mesh& mesh, const DofMap& dofs,
                                        ScalarProductSpec spec,
                                        const ProblemSpec& problem,
                                        const FeFunction* w) {
  if (spec == ScalarProductSpec::WeightedIterate && w == nullptr)
    throw std::invalid_argument(
        "assemble_scalar_product: iterate weight requires a linearization point");
  if (spec == ScalarProductSpec::WeightedExact && !problem.exact_gradient)
    throw std::invalid_argument(
        "assemble_scalar_product: exact weight requires exact_gradient");

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.num_triangles() * 9);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    double wt = element_weight(spec, problem, mesh, w, t, g);
    const auto& vv = mesh.triangles[t].v;
    for (int i = 0; i < 3; ++i) {
      int di = dofs.vertex_to_dof[vv[i]];
      if (di < 0) continue;
      for (int j = 0; j < 3; ++j) {
        int dj = dofs.vertex_to_dof[vv[j]];
        if (dj < 0) continue;
        trip.emplace_back(di, dj, wt * g.area * dot(g.grad[i], g.grad[j]));
      }
    }
  }
  Eigen::SparseMatrix<double> m(dofs.n_free, dofs.n_free);
  m.setFromTriplets(trip.begin(), trip.end());
  return SparseSymMatrix(std::move(m));
}

std::vector<double> assemble_residual(const Mesh& mesh, const DofMap& dofs,
                                      const ProblemSpec& problem,
                                      const FeFunction& w) {
  if (w.mesh_id != mesh.id)
    throw std::invalid_argument("assemble_residual: function/mesh mismatch");
  const auto& rule = QuadratureRule::standard();
  std::vector<double> b(dofs.n_free, 0.0);
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    const auto& vv = mesh.triangles[t].v;
    Vec2 gw = element_gradient(mesh, w, t);
    Vec2 flux_w = flux(problem.nonlinearity, gw);
    Vec2 fv = problem.fvec ? problem.fvec(mesh.centroid(t)) : Vec2{0.0, 0.0};
    Vec2 vec_term = fv - flux_w;
    for (int i = 0; i < 3; ++i) {
      int di = dofs.vertex_to_dof[vv[i]];
      if (di < 0) continue;
      double acc = g.area * dot(vec_term, g.grad[i]);
      if (problem.f) {
        double lin = 0.0;
        for (const auto& q : rule.element) {
          Vec2 x = q.l0 * g.p[0] + q.l1 * g.p[1] + q.l2 * g.p[2];
          double li = i == 0 ? q.l0 : (i == 1 ? q.l1 : q.l2);
          lin += q.w * problem.f(x) * li;
        }
        acc += g.area * lin;
      }
      b[di] += acc;
    }
    if (problem.neumann) {
      for (int e = 0; e < 3; ++e) {
        if (mesh.edge_adjacency[t][e].label != BoundaryLabel::Neumann) continue;
        int ia = (e + 1) % 3, ib = (e + 2) % 3;
        Vec2 pa = g.p[ia], pb = g.p[ib];
        double len = norm(pb - pa);
        Vec2 n = (1.0 / len) * perp(pb - pa);
        // perp maps the CCW edge direction to the outward normal
        for (const auto& [s, qw] : rule.edge) {
          Vec2 x = (1.0 - s) * pa + s * pb;
          double phi_n = problem.neumann(x, n);
          int da = dofs.vertex_to_dof[mesh.triangles[t].v[ia]];
          int db = dofs.vertex_to_dof[mesh.triangles[t].v[ib]];
          if (da >= 0) b[da] += len * qw * phi_n * (1.0 - s);
          if (db >= 0) b[db] += len * qw * phi_n * s;
        }
      }
    }
  }
  return b;
}

double energy_norm(const SparseSymMatrix& M, std::span<const double> x) {
  double q = M.quadratic_form(x);
  if (q < -1e-12 * (1.0 + std::abs(q)))
    throw std::runtime_error("energy_norm: matrix not positive definite");
  return std::sqrt(std::max(q, 0.0));
}

double h1_error(const Mesh& mesh, const FeFunction& u,
                const std::function<Vec2(Vec2)>& exact_gradient) {
  if (!exact_gradient)
    throw std::invalid_argument("h1_error: exact gradient required");
  const auto& rule = QuadratureRule::standard();
  double acc = 0.0;
  for (int t = 0; t < mesh.num_triangles(); ++t) {
    ElementGeometry g = element_geometry(mesh, t);
    Vec2 gu = element_gradient(mesh, u, t);
    double local = 0.0;
    for (const auto& q : rule.element) {
      Vec2 x = q.l0 * g.p[0] + q.l1 * g.p[1] + q.l2 * g.p[2];
      Vec2 d = exact_gradient(x) - gu;
      local += q.w * dot(d, d);
    }
    acc += g.area * local;
  }
  return std::sqrt(acc);
}

}  // namespace afem
