#include <doctest.h>

#include <cmath>
#include <random>

#include "afem/space.hpp"
#include "helpers.hpp"

using namespace afem;

TEST_CASE("lshape constrains exactly the reentrant-edge vertices") {
  Mesh m = build_initial_mesh(DomainId::LShape);
  DofMap dofs = build_dof_map(m);
  int constrained = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    const auto& p = m.vertices[v];
    bool on_gamma_d = (p.x == 0.0 && p.y <= 0.0 && p.y >= -1.0) ||
                      (p.y == 0.0 && p.x >= 0.0 && p.x <= 1.0);
    CHECK((dofs.vertex_to_dof[v] < 0) == on_gamma_d);
    if (on_gamma_d) ++constrained;
  }
  CHECK(constrained == 3);  // (0,-1), (0,0), (1,0)
  CHECK(dofs.n_free == m.num_vertices() - 3);
}

TEST_CASE("zshape constrains every boundary vertex") {
  Mesh m = build_initial_mesh(DomainId::ZShape);
  DofMap dofs = build_dof_map(m);
  std::vector<bool> on_boundary(m.num_vertices(), false);
  for (int t = 0; t < m.num_triangles(); ++t)
    for (int e = 0; e < 3; ++e)
      if (m.edge_adjacency[t][e].neighbor < 0) {
        on_boundary[m.triangles[t].v[(e + 1) % 3]] = true;
        on_boundary[m.triangles[t].v[(e + 2) % 3]] = true;
      }
  int free_count = 0;
  for (int v = 0; v < m.num_vertices(); ++v) {
    CHECK((dofs.vertex_to_dof[v] < 0) == on_boundary[v]);
    if (!on_boundary[v]) ++free_count;
  }
  CHECK(free_count == dofs.n_free);
  CHECK(dofs.n_free > 0);
}

TEST_CASE("a space without free dofs is rejected") {
  Mesh m = testutil::unit_square_mesh(BoundaryLabel::Dirichlet);
  CHECK_THROWS_WITH_AS(build_dof_map(m), doctest::Contains("empty space"),
                       std::runtime_error);
}

TEST_CASE("free vector scatter and gather are inverse") {
  Mesh m = build_initial_mesh(DomainId::LShape);
  DofMap dofs = build_dof_map(m);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  std::vector<double> x(dofs.n_free);
  for (double& v : x) v = dist(rng);
  FeFunction f = from_free_vector(m, dofs, x);
  CHECK(to_free_vector(dofs, f) == x);
  for (int v = 0; v < m.num_vertices(); ++v)
    if (dofs.vertex_to_dof[v] < 0) CHECK(f.values[v] == 0.0);
}

TEST_CASE("prolongation of zero is zero") {
  Mesh m = build_initial_mesh(DomainId::ZShape);
  Mesh fine = uniform_refine(m);
  FeFunction z = FeFunction::zero(m);
  FeFunction zf = prolongate(z, m, fine);
  for (double v : zf.values) CHECK(v == 0.0);
}

TEST_CASE("prolongation reproduces linear coordinates") {
  Mesh m = testutil::unit_square_mesh(BoundaryLabel::Neumann);
  FeFunction f = FeFunction::zero(m);
  for (int v = 0; v < m.num_vertices(); ++v) f.values[v] = m.vertices[v].x;
  Mesh fine = uniform_refine(uniform_refine(m));
  FeFunction ff = prolongate(f, m, fine);
  for (int v = 0; v < fine.num_vertices(); ++v)
    CHECK(ff.values[v] == doctest::Approx(fine.vertices[v].x).epsilon(1e-15));
}

TEST_CASE("prolongation agrees pointwise with the coarse function") {
  Mesh m = build_initial_mesh(DomainId::LShape);
  std::mt19937_64 rng(11);
  FeFunction f = testutil::random_fe_function(m, rng);
  Mesh fine = refine_nvb(m, {0, 3, 5});
  FeFunction ff = prolongate(f, m, fine);

  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  int tested = 0;
  while (tested < 10000) {
    Vec2 p{dist(rng), dist(rng)};
    if (p.x > 0.0 && p.y < 0.0) continue;  // outside the L
    double a = evaluate(m, f, p);
    double b = evaluate(fine, ff, p);
    CHECK(std::abs(a - b) < 1e-12);
    ++tested;
  }
}

TEST_CASE("prolongation rejects unrelated meshes") {
  Mesh m = build_initial_mesh(DomainId::LShape);
  Mesh a = refine_nvb(m, {0});
  Mesh b = refine_nvb(m, {1});
  FeFunction f = FeFunction::zero(a);
  CHECK_THROWS_AS(prolongate(f, a, b), std::invalid_argument);
}

TEST_CASE("element gradients of affine interpolants are exact") {
  Mesh m = build_initial_mesh(DomainId::ZShape);
  FeFunction fx = FeFunction::zero(m), fc = FeFunction::zero(m),
             fa = FeFunction::zero(m);
  for (int v = 0; v < m.num_vertices(); ++v) {
    fx.values[v] = m.vertices[v].x;
    fc.values[v] = 4.25;
    fa.values[v] = 2.0 * m.vertices[v].x - 3.0 * m.vertices[v].y + 1.0;
  }
  for (int t = 0; t < m.num_triangles(); ++t) {
    Vec2 gx = element_gradient(m, fx, t);
    CHECK(gx.x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gx.y == doctest::Approx(0.0).epsilon(1e-14));
    Vec2 gc = element_gradient(m, fc, t);
    CHECK(std::abs(gc.x) < 1e-13);
    CHECK(std::abs(gc.y) < 1e-13);
    Vec2 ga = element_gradient(m, fa, t);
    CHECK(ga.x == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(ga.y == doctest::Approx(-3.0).epsilon(1e-14));
  }
}

TEST_CASE("gradient on the unit right triangle matches the hand solve") {
  // nodal values (0,1,0) at (0,0),(1,0),(0,1): the plane is z = x
  std::vector<Vertex> verts = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<std::array<int, 3>> tris = {{0, 1, 2}};
  Mesh m = make_mesh(std::move(verts), tris, {});
  FeFunction f = FeFunction::zero(m);
  f.values = {0.0, 1.0, 0.0};
  f.mesh_id = m.id;
  Vec2 g = element_gradient(m, f, 0);
  CHECK(g.x == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(g.y == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("evaluation interpolates nodal data") {
  Mesh m = testutil::unit_square_mesh();
  FeFunction f = FeFunction::zero(m);
  f.values = {0.0, 1.0, 0.0, 0.0};
  // midpoint of the edge (1,0)-(1,1) is the mean of the endpoint values
  CHECK(evaluate(m, f, {1.0, 0.5}) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(evaluate(m, f, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-14));
  FeFunction c = FeFunction::zero(m);
  c.values = {3.0, 3.0, 3.0, 3.0};
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    // partition of unity: the constant is reproduced everywhere
    CHECK(evaluate(m, c, {dist(rng), dist(rng)}) ==
          doctest::Approx(3.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(evaluate(m, f, {5.0, 5.0}), std::domain_error);
}
