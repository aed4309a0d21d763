#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "locp/json_io.hpp"
#include "locp/workbench.hpp"

using namespace locp;

namespace {

InstanceSpec small_spec(std::uint64_t seed, int k) {
  InstanceSpec s;
  s.seed = seed;
  s.k = k;
  s.block_dims = {1, 2};
  s.codomain_dim = 3;
  s.flag = {1, 3};
  return s;
}

}  // namespace

TEST_CASE("kind names round-trip and unknown names are refused") {
  for (const auto kind :
       {InstanceSpec::Kind::Dilated, InstanceSpec::Kind::PlantedPair,
        InstanceSpec::Kind::Adversarial})
    CHECK(kind_from_name(kind_name(kind)) == kind);
  CHECK_THROWS_AS(kind_from_name("garbage"), IoError);
}

TEST_CASE("the generator is byte-deterministic") {
  const InstanceSpec spec = small_spec(17, 2);
  const MultilinearMap f = generate_instance(spec);
  const MultilinearMap g = generate_instance(spec);
  CHECK(canonical_dump(instance_to_json(spec, f)) ==
        canonical_dump(instance_to_json(spec, g)));

  InstanceSpec other = spec;
  other.seed = 18;
  CHECK(canonical_dump(instance_to_json(spec, f)) !=
        canonical_dump(instance_to_json(other, generate_instance(other))));
}

TEST_CASE("dilated instances are honest and carry a working ground truth") {
  for (const int k : {1, 2, 3}) {
    const InstanceSpec spec = small_spec(100 + k, k);
    const DilatedInstance inst = random_dilated_map(spec);

    CHECK(is_symmetric(inst.map).verdict == Verdict::Pass);
    CHECK(is_invariant(inst.map).verdict == Verdict::Pass);
    const GramData g =
        gram_matrix(inst.map, {.check_preconditions = true, .tol = 1e-9});
    CHECK(g.is_psd(1e-9));

    const double scale = std::max(max_value_norm(inst.map), 1.0);
    CHECK(verify_dilation(inst.map, inst.ground_truth) <= 1e-9 * scale);
    CHECK(validate_triple(inst.ground_truth).worst() <= 1e-9);

    // the freshly dilated triple is minimal, the planted one need not be
    const StinespringTriple t = dilate(inst.map);
    CHECK(is_minimal(t));
    CHECK(t.dim <= inst.ground_truth.dim);
  }
}

TEST_CASE("unital instances evaluate to the identity on the unit tuple") {
  const InstanceSpec spec = small_spec(7, 2);
  const DilatedInstance inst = random_dilated_map(spec);
  const std::vector<AlgebraElement> units(2, unit_element(inst.map.domain));
  const Matrix u = evaluate(inst.map, units).matrix;
  CHECK(max_abs(u - Matrix::Identity(3, 3)) <= 1e-9);
  CHECK(spectral_norm(inst.ground_truth.V) <= 1.0 + 1e-12);

  InstanceSpec loose = spec;
  loose.unital = false;
  const DilatedInstance weak = random_dilated_map(loose);
  CHECK(spectral_norm(weak.ground_truth.V) == doctest::Approx(0.7));
  const Matrix u2 = evaluate(weak.map, units).matrix;
  CHECK(spectral_norm(u2) < 0.75);
  CHECK(check_local_contractivity(weak.map).verdict ==
        Verdict::InconclusivePass);
}

TEST_CASE("planted pairs are dominated with a recoverable derivative") {
  InstanceSpec spec = small_spec(23, 1);
  spec.kind = InstanceSpec::Kind::PlantedPair;
  const PlantedPairInstance pair = planted_pair(spec);

  CHECK(dominates(pair.phi, pair.psi));
  CHECK(is_symmetric(pair.psi).verdict == Verdict::Pass);
  CHECK(min_hermitian_eig(pair.delta0) >= -1e-12);
  CHECK(max_hermitian_eig(pair.delta0) <= 1.0 + 1e-12);

  const RNCertificate cert =
      rn_derivative_with(pair.phi, pair.phi_triple, pair.psi, dilate(pair.psi));
  CHECK(max_abs(cert.Delta - pair.delta0) <= 1e-8);
  CHECK(cert.reconstruction <= 1e-8);
  CHECK(cert.commutant <= 1e-9);
}

TEST_CASE("the transpose control fails positivity with a planted witness") {
  InstanceSpec spec;
  spec.kind = InstanceSpec::Kind::Adversarial;
  spec.defect = "transpose";
  const AdversarialInstance inst = adversarial_map(spec);

  CHECK(is_symmetric(inst.map).verdict == Verdict::Pass);
  const MapCheckReport rep = check_local_positivity(inst.map);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.residual == doctest::Approx(0.5));
  CHECK(rep.witness["n"] == 2);
  CHECK_FALSE(rep.witness["tuple"].is_null());
}

TEST_CASE("the invariance control keeps symmetry but breaks factor sliding") {
  InstanceSpec spec = small_spec(31, 2);
  spec.kind = InstanceSpec::Kind::Adversarial;
  spec.defect = "invariance";
  const AdversarialInstance inst = adversarial_map(spec);

  CHECK(is_symmetric(inst.map).verdict == Verdict::Pass);
  const MapCheckReport rep = is_invariant(inst.map);
  CHECK(rep.verdict == Verdict::Fail);
  CHECK(rep.residual > 1e-4);
  CHECK_FALSE(rep.witness.is_null());
}

TEST_CASE("the symmetry control drives dilate into a construction failure") {
  InstanceSpec spec;
  spec.seed = 41;
  spec.kind = InstanceSpec::Kind::Adversarial;
  spec.defect = "symmetry";
  const AdversarialInstance inst = adversarial_map(spec);

  CHECK(is_symmetric(inst.map).verdict == Verdict::Fail);
  try {
    (void)dilate(inst.map);
    CHECK(false);
  } catch (const ConstructionError& e) {
    CHECK(e.slot >= 1);
    CHECK(e.basis_index >= 0);
  }

  CHECK_THROWS_AS(adversarial_map(InstanceSpec{.kind =
                                      InstanceSpec::Kind::Adversarial}),
                  IoError);
}

TEST_CASE("the brute-force gram oracle agrees with the indexed build") {
  for (const int k : {1, 2, 3}) {
    const InstanceSpec spec = small_spec(200 + k, k);
    const MultilinearMap f = generate_instance(spec);
    const GramData g = gram_matrix(f);
    const Matrix raw = brute_force_gram(f);
    CHECK(max_abs(raw - g.G) <= 1e-12);
  }
}

TEST_CASE("the choi oracle reproduces the dilation flag dimensions for k = 1") {
  for (const std::uint64_t seed : {2ULL, 5ULL, 9ULL, 12ULL}) {
    const InstanceSpec spec = small_spec(seed, 1);
    const MultilinearMap f = generate_instance(spec);
    const StinespringTriple t = dilate(f);
    const ChoiOracleResult oracle = choi_stinespring_oracle_k1(f);
    CHECK(oracle.dims == t.flag);
    CHECK(oracle.reconstruction <= 1e-8);
  }
  CHECK_THROWS_AS(
      choi_stinespring_oracle_k1(generate_instance(small_spec(3, 2))),
      PreconditionError);
}
