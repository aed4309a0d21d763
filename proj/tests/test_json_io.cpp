#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <limits>
#include <unistd.h>

#include "locp/json_io.hpp"

using namespace locp;

namespace {

MultilinearMap pairing_map_k2() {
  const BlockAlgebra a = make_block_algebra({2});
  const QuantizedDomain d = make_quantized_domain(1, {1});
  const int vd = a.vec_dim;
  std::vector<Matrix> values(vd * vd, Matrix::Zero(1, 1));
  const int target = a.basis_index(0, 0, 0);
  for (int i = 0; i < vd; ++i)
    for (int j = 0; j < vd; ++j)
      if (a.product_index(i, j) == target) values[i * vd + j](0, 0) = 1.0;
  return make_multilinear_map(a, d, 2, {1}, std::move(values));
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("locp_json_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_CASE("canonical dumps are stable under reparsing") {
  Json j;
  j["b"] = 2;
  j["a"] = Json::array({1.5, true, nullptr, "x\"y\n", Json::object()});
  j["c"]["nested"] = -0.0;
  const std::string once = canonical_dump(j);
  CHECK(canonical_dump(Json::parse(once)) == once);
  CHECK(once.find("\"b\"") < once.find("\"a\""));  // insertion order kept
}

TEST_CASE("doubles are printed with 17 significant digits") {
  CHECK(canonical_dump(Json(0.1)) == "0.10000000000000001");
  CHECK(canonical_dump(Json(1.0)) == "1");
  CHECK_THROWS_AS(canonical_dump(Json(std::numeric_limits<double>::quiet_NaN())),
                  IoError);
  CHECK_THROWS_AS(canonical_dump(Json(std::numeric_limits<double>::infinity())),
                  IoError);
}

TEST_CASE("complex numbers and matrices survive a round trip") {
  const Complex z(0.125, -3.5);
  CHECK(complex_from_json(complex_to_json(z)) == z);

  Matrix m(2, 3);
  m << Complex(1, 2), Complex(0, -1), 0.5, 7, Complex(-2, 0.25), 0;
  const Matrix back = matrix_from_json(matrix_to_json(m));
  CHECK(max_abs(back - m) == 0.0);

  CHECK_THROWS_AS(complex_from_json(Json::array({1})), IoError);
  Json ragged = Json::array();
  ragged.push_back(Json::array({complex_to_json(1.0)}));
  ragged.push_back(Json::array({complex_to_json(1.0), complex_to_json(2.0)}));
  CHECK_THROWS_AS(matrix_from_json(ragged), IoError);
}

TEST_CASE("algebra elements reject non-square blocks") {
  const BlockAlgebra a = make_block_algebra({1, 2});
  AlgebraElement x{a, {Matrix::Identity(1, 1), 2.0 * Matrix::Identity(2, 2)}};
  const AlgebraElement y = element_from_json(element_to_json(x));
  CHECK(y.algebra.block_dims == a.block_dims);
  CHECK(max_abs(y.blocks[1] - x.blocks[1]) == 0.0);

  Json bad = element_to_json(x);
  bad["blocks"][0] = matrix_to_json(Matrix::Zero(1, 2));
  CHECK_THROWS_AS(element_from_json(bad), IoError);
}

TEST_CASE("maps round-trip both bare and bundled") {
  const MultilinearMap f = pairing_map_k2();
  const Json bare = map_to_json(f);
  const MultilinearMap g = map_from_json(bare);
  CHECK(g.k == f.k);
  CHECK(g.alpha_of == f.alpha_of);
  CHECK(max_value_norm(map_sub(f, g)) == 0.0);

  InstanceSpec spec;
  spec.block_dims = {2};
  spec.codomain_dim = 1;
  spec.flag = {1};
  spec.k = 2;
  const Json bundle = instance_to_json(spec, f);
  CHECK(max_value_norm(map_sub(f, instance_from_json(bundle))) == 0.0);
  CHECK(max_value_norm(map_sub(f, map_from_any_json(bundle))) == 0.0);
  CHECK(max_value_norm(map_sub(f, map_from_any_json(bare))) == 0.0);
  CHECK_THROWS_AS(map_from_any_json(Json::array({1, 2})), IoError);
}

TEST_CASE("triples survive serialization with their certificates intact") {
  const MultilinearMap f = pairing_map_k2();
  const StinespringTriple t = dilate(f);
  const StinespringTriple back = triple_from_json(triple_to_json(t));
  CHECK(back.dim == t.dim);
  CHECK(back.flag == t.flag);
  CHECK(back.k == t.k);
  CHECK(max_abs(back.V - t.V) == 0.0);
  CHECK(verify_dilation(f, back) <= 1e-12);
  CHECK(validate_triple(back).worst() <= 1e-9);
  CHECK(back.residuals.reconstruction == t.residuals.reconstruction);

  Json mangled = triple_to_json(t);
  mangled.erase("reps");
  CHECK_THROWS_AS(triple_from_json(mangled), IoError);
}

TEST_CASE("certificates and generator requests round-trip") {
  RNCertificate cert;
  cert.T = Matrix::Identity(2, 3);
  cert.Delta = 0.5 * Matrix::Identity(3, 3);
  cert.reconstruction = 1e-11;
  cert.commutant = 2e-12;
  cert.contraction = 0.0;
  const RNCertificate back = certificate_from_json(certificate_to_json(cert));
  CHECK(max_abs(back.T - cert.T) == 0.0);
  CHECK(max_abs(back.Delta - cert.Delta) == 0.0);
  CHECK(back.reconstruction == cert.reconstruction);

  InstanceSpec spec;
  spec.seed = 99;
  spec.block_dims = {1, 2};
  spec.codomain_dim = 3;
  spec.flag = {1, 3};
  spec.k = 3;
  spec.kind = InstanceSpec::Kind::Adversarial;
  spec.alpha_of = {1, 2, 2};
  spec.leg_budget = 5;
  spec.unital = false;
  spec.defect = "transpose";
  const InstanceSpec s2 = spec_from_json(spec_to_json(spec));
  CHECK(s2.seed == spec.seed);
  CHECK(s2.block_dims == spec.block_dims);
  CHECK(s2.flag == spec.flag);
  CHECK(s2.kind == spec.kind);
  CHECK(s2.alpha_of == spec.alpha_of);
  CHECK(s2.leg_budget == spec.leg_budget);
  CHECK(s2.unital == spec.unital);
  CHECK(s2.defect == spec.defect);
}

TEST_CASE("files round-trip and missing files are reported") {
  TempDir dir;
  const Json j = instance_to_json(InstanceSpec{}, pairing_map_k2());
  save_json_file(dir.file("inst.json"), j);
  CHECK(canonical_dump(load_json_file(dir.file("inst.json"))) ==
        canonical_dump(j));

  CHECK_THROWS_AS(load_json_file(dir.file("absent.json")), IoError);
  {
    std::FILE* fp = std::fopen(dir.file("broken.json").c_str(), "w");
    std::fputs("{ not json", fp);
    std::fclose(fp);
  }
  CHECK_THROWS_AS(load_json_file(dir.file("broken.json")), IoError);
}
