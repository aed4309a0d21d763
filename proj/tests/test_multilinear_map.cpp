#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "locp/multilinear_map.hpp"

using namespace locp;

namespace {

// phi(a, b) = (ab)(0, 0) over a single 2x2 block; the (0,0) compression of a
// product is symmetric, invariant and admissible.
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

// phi(a) = a on one 2x2 block.
MultilinearMap identity_map_m2() {
  const BlockAlgebra a = make_block_algebra({2});
  const QuantizedDomain d = make_quantized_domain(2, {2});
  std::vector<Matrix> values;
  for (int i = 0; i < 4; ++i) {
    const auto u = a.basis_at(i);
    Matrix v = Matrix::Zero(2, 2);
    v(u.row, u.col) = 1.0;
    values.push_back(v);
  }
  return make_multilinear_map(a, d, 1, {1}, std::move(values));
}

// phi(a) = a^T on one 2x2 block: positive but not completely positive.
MultilinearMap transpose_map_m2() {
  MultilinearMap f = identity_map_m2();
  for (auto& v : f.values) v.transposeInPlace();
  return f;
}

}  // namespace

TEST_CASE("flat tuple enumeration is lexicographic, first slot major") {
  const MultilinearMap f = pairing_map_k2();
  CHECK(f.tuple_count() == 16);
  CHECK(f.flat_index(std::vector<int>{2, 3}) == 11);
  CHECK(f.tuple_at(11) == std::vector<int>{2, 3});
  for (int flat = 0; flat < f.tuple_count(); ++flat)
    CHECK(f.flat_index(f.tuple_at(flat)) == flat);
}

TEST_CASE("constructor validates shape, flag membership and alpha monotonicity") {
  const BlockAlgebra a = make_block_algebra({1, 1});
  const QuantizedDomain d = make_quantized_domain(2, {1, 2});

  CHECK(default_alpha_of(a, make_quantized_domain(3, {1, 2, 3})) ==
        std::vector<int>{1, 2, 2});

  std::vector<Matrix> values(2, Matrix::Zero(2, 2));
  CHECK_THROWS_AS(
      make_multilinear_map(a, d, 2, {1, 2}, values),  // 4 tuples expected
      SpecError);
  CHECK_THROWS_AS(make_multilinear_map(a, d, 1, {2, 1}, values), SpecError);
  CHECK_THROWS_AS(make_multilinear_map(a, d, 1, {1, 3}, values), SpecError);
  CHECK_THROWS_AS(make_multilinear_map(a, d, 0, {1, 2}, values), SpecError);

  std::vector<Matrix> bad_shape(2, Matrix::Zero(3, 3));
  CHECK_THROWS_AS(make_multilinear_map(a, d, 1, {1, 2}, bad_shape),
                  MismatchError);

  std::vector<Matrix> leaking(2, Matrix::Zero(2, 2));
  leaking[0](0, 1) = 1.0;  // does not commute with the level-1 projection
  CHECK_THROWS_AS(make_multilinear_map(a, d, 1, {1, 2}, leaking),
                  NotInFlagAlgebraError);

  CHECK(zero_map(a, d, 3).tuple_count() == 8);
}

TEST_CASE("evaluate extends the table multilinearly with zero pruning") {
  const MultilinearMap f = pairing_map_k2();
  const BlockAlgebra& a = f.domain;

  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const AlgebraElement args[2] = {basis_element(a, i), basis_element(a, j)};
      const Matrix got = evaluate(f, args).matrix;
      CHECK(max_abs(got - f.values[i * 4 + j]) == doctest::Approx(0.0));
    }

  Vector c1(4), c2(4);
  c1 << Complex(1, 1), Complex(0, 2), 3.0, Complex(-1, 0);
  c2 << 2.0, Complex(0, -1), Complex(1, 1), 0.5;
  const AlgebraElement x = element_from_coords(a, c1);
  const AlgebraElement y = element_from_coords(a, c2);
  const AlgebraElement args[2] = {x, y};
  // phi(x, y) = (xy)(0,0) by construction
  const Complex direct = (x * y).blocks[0](0, 0);
  CHECK(std::abs(evaluate(f, args).matrix(0, 0) - direct) < 1e-12);

  const AlgebraElement scaled[2] = {Complex(0, 2) * x, y};
  CHECK(std::abs(evaluate(f, scaled).matrix(0, 0) - Complex(0, 2) * direct) < 1e-12);

  const AlgebraElement wrong[1] = {x};
  CHECK_THROWS_AS(evaluate(f, wrong), MismatchError);
}

TEST_CASE("adjoint map is an involution and detects symmetry") {
  const MultilinearMap f = pairing_map_k2();
  const MultilinearMap ff = adjoint_map(adjoint_map(f));
  for (int t = 0; t < f.tuple_count(); ++t)
    CHECK(max_abs(f.values[t] - ff.values[t]) == doctest::Approx(0.0));

  CHECK(is_symmetric(f).verdict == Verdict::Pass);
  CHECK(is_symmetric(transpose_map_m2()).verdict == Verdict::Pass);

  MultilinearMap bumped = f;
  bumped.values[f.flat_index(std::vector<int>{1, 2})](0, 0) += Complex(0, 1e-3);
  const MapCheckReport rep = is_symmetric(bumped);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.residual > 1e-4);
  CHECK_FALSE(rep.witness.is_null());
}

TEST_CASE("invariance identities slide factors across the middle") {
  const MultilinearMap f = pairing_map_k2();
  CHECK(is_invariant(f).verdict == Verdict::Pass);

  // bumping phi(e00, e00) breaks phi(e01 c, e00) = phi(e01, c e00) at c = e10
  MultilinearMap bumped = f;
  bumped.values[0](0, 0) += 1e-3;
  const MapCheckReport rep = is_invariant(bumped);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.residual == doctest::Approx(1e-3));
  CHECK_FALSE(rep.witness.is_null());

  // k = 1 has nothing to slide
  CHECK(is_invariant(transpose_map_m2()).verdict == Verdict::Pass);
}

TEST_CASE("amplifying the transpose map at the planted tuple gives the swap") {
  const MultilinearMap f = transpose_map_m2();
  const BlockAlgebra& a = f.domain;

  AlgebraMatrix x = zero_algebra_matrix(a, 2);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) x.at(i, j) = basis_element(a, a.basis_index(0, i, j));
  const AlgebraMatrix args[1] = {x};
  const Matrix big = amplify(f, args);

  Matrix swap = Matrix::Zero(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int h = 0; h < 2; ++h) swap(i * 2 + h, h * 2 + i) = 1.0;
  CHECK(max_abs(big - swap) == doctest::Approx(0.0));
  CHECK(min_hermitian_eig(big) == doctest::Approx(-1.0));

  // same tuple under the identity map stays PSD
  const Matrix good = amplify(identity_map_m2(), args);
  CHECK(min_hermitian_eig(good) >= -1e-12);
}

TEST_CASE("matrix seminorm and compression act per level") {
  const BlockAlgebra a = make_block_algebra({1, 1});
  AlgebraMatrix x = zero_algebra_matrix(a, 2);
  x.at(0, 0) = element_from_coords(a, (Vector(2) << 1.0, 7.0).finished());
  CHECK(matrix_seminorm(x, 1) == doctest::Approx(1.0));
  CHECK(matrix_seminorm(x, 2) == doctest::Approx(7.0));
  CHECK_THROWS_AS(matrix_seminorm(x, 3), LevelError);

  const QuantizedDomain d = make_quantized_domain(2, {1, 2});
  Matrix big = Matrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) big(i, i) = i + 1;
  const Matrix low = compress_amplified(big, 2, d, 1);
  CHECK(low.rows() == 2);
  CHECK(low(0, 0) == Complex(1.0));
  CHECK(low(1, 1) == Complex(3.0));  // second copy keeps its leading corner
}

TEST_CASE("local positivity sampling accepts honest maps and kills the transpose") {
  SamplingOptions opts;
  opts.trials = 40;

  const MapCheckReport good = check_local_positivity(identity_map_m2(), opts);
  CHECK(good.verdict == Verdict::InconclusivePass);
  CHECK(good.residual <= opts.tol);

  const MapCheckReport bad = check_local_positivity(transpose_map_m2(), opts);
  CHECK(bad.verdict == Verdict::Fail);
  CHECK(bad.residual == doctest::Approx(0.5));  // eig -1 against scale 1 + ||.||
  CHECK(bad.witness["phase"] == "positivity-planted");
  CHECK(bad.witness["n"] == 2);

  SamplingOptions shallow = opts;
  shallow.n_max = 1;  // 1x1 amplifications never see the defect
  CHECK(check_local_positivity(transpose_map_m2(), shallow).verdict ==
        Verdict::InconclusivePass);

  SamplingOptions out_of_range = opts;
  out_of_range.only_level = 2;
  CHECK_THROWS_AS(check_local_positivity(identity_map_m2(), out_of_range),
                  LevelError);
}

TEST_CASE("kernel-supported garbage stays invisible at the level it avoids") {
  // level 2 sees both blocks; the value on the second block is garbage, but
  // any tuple with a slot supported past block 1 must still vanish at level 1.
  const BlockAlgebra a = make_block_algebra({1, 1});
  const QuantizedDomain d = make_quantized_domain(2, {1, 2});
  std::vector<Matrix> values(2, Matrix::Zero(2, 2));
  values[0](0, 0) = 1.0;
  values[1](1, 1) = -2.5;
  const MultilinearMap f = make_multilinear_map(a, d, 1, {1, 2}, values);

  SamplingOptions level1;
  level1.only_level = 1;
  level1.trials = 60;
  CHECK(check_local_positivity(f, level1).verdict == Verdict::InconclusivePass);

  SamplingOptions level2;
  level2.only_level = 2;
  const MapCheckReport rep = check_local_positivity(f, level2);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.residual > 0.5);
}

TEST_CASE("contractivity sampling scales tuples by their level seminorm") {
  SamplingOptions opts;
  opts.trials = 30;
  CHECK(check_local_contractivity(identity_map_m2(), opts).verdict ==
        Verdict::InconclusivePass);

  const MapCheckReport rep =
      check_local_contractivity(map_scale(3.0, identity_map_m2()), opts);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.witness["phase"] == "unit");
  CHECK(rep.residual == doctest::Approx(2.0));
}

TEST_CASE("map arithmetic requires matching shapes") {
  const MultilinearMap f = identity_map_m2();
  CHECK(max_value_norm(map_sub(f, f)) == doctest::Approx(0.0));
  CHECK(max_value_norm(map_add(f, f)) == doctest::Approx(2.0));
  CHECK_THROWS_AS(map_add(f, pairing_map_k2()), MismatchError);
}
