#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "locp/stinespring.hpp"

using namespace locp;

namespace {

MultilinearMap pairing_map_k2() {
  const BlockAlgebra a = make_block_algebra({2});
  const QuantizedDomain d = make_quantized_domain(1, {1});
  std::vector<Matrix> values(16, Matrix::Zero(1, 1));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const auto q = a.product_index(i, j);
      if (q && *q == a.basis_index(0, 0, 0)) values[i * 4 + j](0, 0) = 1.0;
    }
  return make_multilinear_map(a, d, 2, {1}, std::move(values));
}

// phi(a) = diag(a) over blocks [1,1] with flag (1,2): the canonical example
// whose minimal dilation has level dimensions (1,2).
MultilinearMap diag_map_k1() {
  const BlockAlgebra a = make_block_algebra({1, 1});
  const QuantizedDomain d = make_quantized_domain(2, {1, 2});
  std::vector<Matrix> values(2, Matrix::Zero(2, 2));
  values[0](0, 0) = 1.0;
  values[1](1, 1) = 1.0;
  return make_multilinear_map(a, d, 1, {1, 2}, std::move(values));
}

MultilinearMap transpose_map_m2() {
  const BlockAlgebra a = make_block_algebra({2});
  const QuantizedDomain d = make_quantized_domain(2, {2});
  std::vector<Matrix> values;
  for (int i = 0; i < 4; ++i) {
    const auto u = a.basis_at(i);
    Matrix v = Matrix::Zero(2, 2);
    v(u.col, u.row) = 1.0;
    values.push_back(v);
  }
  return make_multilinear_map(a, d, 1, {1}, std::move(values));
}

// Direct sum with a dead coordinate that the spanning vectors never reach.
StinespringTriple pad_with_dead_coordinate(const StinespringTriple& t) {
  StinespringTriple s = t;
  const int r = t.dim;
  s.dim = r + 1;
  s.flag.back() = r + 1;
  s.V = Matrix::Zero(r + 1, t.codomain.dim);
  s.V.topRows(r) = t.V;
  for (int p = 0; p < t.m; ++p)
    for (int i = 0; i < t.domain.vec_dim; ++i) {
      Matrix m = Matrix::Zero(r + 1, r + 1);
      m.topLeftCorner(r, r) = t.reps[p][i];
      // keep the lift unital: route the unit of the first diagonal unit
      // through the dead coordinate
      if (i == t.domain.basis_index(0, 0, 0)) m(r, r) = 1.0;
      s.reps[p][i] = std::move(m);
    }
  s.embed = Matrix::Zero(r + 1, t.embed.cols());
  s.embed.topRows(r) = t.embed;
  return s;
}

}  // namespace

TEST_CASE("tensor enumeration round-trips") {
  const MultilinearMap f = zero_map(make_block_algebra({1, 2}),
                                    make_quantized_domain(2, {1, 2}), 3);
  const GramData g = gram_matrix(f);
  CHECK(g.m == 2);
  CHECK(g.tensor_dim == 5 * 5 * 2);
  std::vector<int> slots(g.m);
  for (int idx = 0; idx < g.tensor_dim; ++idx) {
    int h = 0;
    g.tensor_at(idx, slots, h);
    CHECK(g.tensor_index(slots, h) == idx);
  }
}

TEST_CASE("gram matrix of the pairing map is the diagonal first-column form") {
  const GramData g = gram_matrix(pairing_map_k2());
  CHECK(g.tensor_dim == 4);
  Matrix expect = Matrix::Zero(4, 4);
  expect(0, 0) = 1.0;  // e00 tensor f0
  expect(2, 2) = 1.0;  // e10 tensor f0
  CHECK(max_abs(g.G - expect) == doctest::Approx(0.0));
  CHECK(g.asymmetry == doctest::Approx(0.0));
  CHECK(g.is_psd(1e-9));
  CHECK(g.min_eig() == doctest::Approx(0.0));
  CHECK(g.max_eig() == doctest::Approx(1.0));
}

TEST_CASE("gram preconditions reject asymmetric or non-invariant maps") {
  MultilinearMap f = pairing_map_k2();
  f.values[0](0, 0) += 0.5;  // breaks invariance, keeps symmetry
  CHECK_THROWS_AS(gram_matrix(f), PreconditionError);

  MultilinearMap g = pairing_map_k2();
  g.values[g.flat_index(std::vector<int>{1, 2})](0, 0) += Complex(0, 0.5);
  CHECK_THROWS_AS(gram_matrix(g), PreconditionError);

  GramOptions opts;
  opts.check_preconditions = false;
  CHECK_NOTHROW(gram_matrix(f, opts));
}

TEST_CASE("dilate reconstructs the pairing map on a two-dimensional space") {
  const MultilinearMap f = pairing_map_k2();
  const StinespringTriple t = dilate(f);

  CHECK(t.dim == 2);
  CHECK(t.flag == std::vector<int>{2});
  CHECK(verify_dilation(f, t) <= 1e-12);
  CHECK(t.residuals.reconstruction <= 1e-12);

  const TripleChecks checks = validate_triple(t);
  CHECK(checks.worst() <= 1e-9);
  CHECK(checks.unit_defect <= 1e-9);  // phi(1,1) = 1, so V is an isometry
  CHECK(is_minimal(t));

  // reps commute with themselves and reconstruct every stored value
  for (int flat = 0; flat < f.tuple_count(); ++flat) {
    const auto tuple = f.tuple_at(flat);
    CHECK(max_abs(reconstruct_value(t, tuple) - f.values[flat]) <= 1e-12);
  }
}

TEST_CASE("dilate on the diagonal embedding has level dimensions (1,2)") {
  const MultilinearMap f = diag_map_k1();
  const StinespringTriple t = dilate(f);
  CHECK(t.flag == std::vector<int>{1, 2});
  CHECK(t.dim == 2);
  CHECK(verify_dilation(f, t) <= 1e-12);
  CHECK(validate_triple(t).worst() <= 1e-9);
  CHECK(is_minimal(t));
}

TEST_CASE("dilate of the zero map is the empty triple") {
  const MultilinearMap f =
      zero_map(make_block_algebra({2}), make_quantized_domain(2, {1, 2}), 1);
  const StinespringTriple t = dilate(f);
  CHECK(t.dim == 0);
  CHECK(t.flag == std::vector<int>{0, 0});
  CHECK(verify_dilation(f, t) == doctest::Approx(0.0));
  CHECK(is_minimal(t));
}

TEST_CASE("dilate refuses an inadmissible gram matrix") {
  CHECK_THROWS_AS(dilate(transpose_map_m2()), NotAdmissibleError);
  CHECK_THROWS_AS(dilate(map_scale(-1.0, pairing_map_k2())), NotAdmissibleError);
}

TEST_CASE("tuple products vanish when a paired factor vanishes") {
  const StinespringTriple t = dilate(pairing_map_k2());
  // e01 e01 = 0
  CHECK(max_abs(tuple_product_rep(t, std::vector<int>{1, 1})) ==
        doctest::Approx(0.0));
  // e01 e10 = e00: nonzero product
  CHECK(spectral_norm(tuple_product_rep(t, std::vector<int>{1, 2})) > 0.5);
}

TEST_CASE("spanning vectors coincide with the spectral factor classes") {
  const StinespringTriple t = dilate(pairing_map_k2());
  const Matrix X = spanning_matrix(t);
  CHECK(X.cols() == 4);  // vd^m * N = 4 * 1
  CHECK(max_abs(X - t.embed) <= 1e-9);
}

TEST_CASE("verify_dilation rejects mismatched shapes") {
  const StinespringTriple t = dilate(pairing_map_k2());
  CHECK_THROWS_AS(verify_dilation(diag_map_k1(), t), MismatchError);
}

TEST_CASE("a dead coordinate is detected and compressed away") {
  const MultilinearMap f = diag_map_k1();
  const StinespringTriple t = dilate(f);
  const StinespringTriple padded = pad_with_dead_coordinate(t);

  CHECK(validate_triple(padded).worst() <= 1e-9);
  CHECK(verify_dilation(f, padded) <= 1e-12);
  CHECK_FALSE(is_minimal(padded));
  CHECK_THROWS_AS(unitary_equivalence(padded, t), PreconditionError);

  const StinespringTriple shrunk = minimize(padded);
  CHECK(shrunk.dim == t.dim);
  CHECK(shrunk.flag == t.flag);
  CHECK(verify_dilation(f, shrunk) <= 1e-9);
  CHECK(is_minimal(shrunk));

  const UnitaryEquivalence eq = unitary_equivalence(shrunk, t);
  CHECK(eq.unitarity <= 1e-9);
  CHECK(eq.correspondence <= 1e-9);
  CHECK(eq.v_residual <= 1e-8);
  CHECK(eq.intertwine <= 1e-8);
  CHECK(eq.flag_leak <= 1e-8);
}

TEST_CASE("a permuted tensor enumeration yields an equivalent minimal triple") {
  const MultilinearMap f = diag_map_k1();
  const StinespringTriple t1 = dilate(f);
  DilateOptions opts;
  opts.tensor_permutation_seed = 42;
  const StinespringTriple t2 = dilate(f, opts);

  CHECK(t2.flag == t1.flag);
  CHECK(verify_dilation(f, t2) <= 1e-10);
  const UnitaryEquivalence eq = unitary_equivalence(t1, t2);
  CHECK(eq.unitarity <= 1e-8);
  CHECK(eq.intertwine <= 1e-8);
}

TEST_CASE("unitary equivalence rejects triples of different maps") {
  const StinespringTriple t1 = dilate(diag_map_k1());
  const StinespringTriple t2 = dilate(pairing_map_k2());
  CHECK_THROWS_AS(unitary_equivalence(t1, t2), MismatchError);

  // same shape, different map: flag dims differ
  const MultilinearMap z =
      zero_map(diag_map_k1().domain, diag_map_k1().codomain, 1, {1, 2});
  const StinespringTriple tz = dilate(z);
  CHECK_THROWS_AS(unitary_equivalence(t1, tz), InconsistencyError);
}

TEST_CASE("rep_apply extends linearly") {
  const StinespringTriple t = dilate(diag_map_k1());
  Vector c(2);
  c << Complex(2, 1), Complex(0, -3);
  const AlgebraElement x = element_from_coords(t.domain, c);
  const Matrix got = t.rep_apply(0, x);
  const Matrix expect = c(0) * t.reps[0][0] + c(1) * t.reps[0][1];
  CHECK(max_abs(got - expect) == doctest::Approx(0.0));
  CHECK_THROWS_AS(t.rep_apply(0, unit_element(make_block_algebra({3}))),
                  MismatchError);
}
