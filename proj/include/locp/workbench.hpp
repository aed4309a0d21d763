#pragma once

#include "locp/radon_nikodym.hpp"
#include "locp/rng.hpp"

namespace locp {

/// Reproducible generator request. Identical specs produce byte-identical
/// instances.
struct InstanceSpec {
  std::uint64_t seed = 1;
  std::vector<int> block_dims{1, 1};
  int codomain_dim = 2;
  std::vector<int> flag{1, 2};
  int k = 1;

  enum class Kind { Dilated, PlantedPair, Adversarial };
  Kind kind = Kind::Dilated;

  std::vector<int> alpha_of;  ///< empty = default min(level, block count)
  int leg_budget = 4;         ///< max dimension of each representation leg
  bool unital = true;         ///< isometric V (else a strict contraction)
  std::string defect;         ///< adversarial: symmetry | invariance | transpose
};

std::string kind_name(InstanceSpec::Kind k);
InstanceSpec::Kind kind_from_name(const std::string& name);

/// Map tabulated from planted tensor-leg representations and a
/// flag-intertwining contraction V; the construction data come back as a
/// (generally non-minimal) ground-truth triple.
struct DilatedInstance {
  MultilinearMap map;
  StinespringTriple ground_truth;
};
DilatedInstance random_dilated_map(const InstanceSpec& spec);

/// Dominated pair psi = phi_{Delta0} with Delta0 planted in the commutant.
struct PlantedPairInstance {
  MultilinearMap phi;
  MultilinearMap psi;
  Matrix delta0;
  StinespringTriple phi_triple;  ///< dilate(phi)
};
PlantedPairInstance planted_pair(const InstanceSpec& spec);

/// Negative-control instances with a known planted defect.
struct AdversarialInstance {
  MultilinearMap map;
  std::string defect;
};
AdversarialInstance adversarial_map(const InstanceSpec& spec);

/// Generator dispatch used by the CLI (planted pairs return phi).
MultilinearMap generate_instance(const InstanceSpec& spec);

/// Independent Gram oracle: naive loops over tensor basis pairs, building
/// actual elements and calling evaluate (no index-table shortcuts).
Matrix brute_force_gram(const MultilinearMap& f);

/// Classical blockwise Choi-matrix Stinespring construction for k = 1:
/// per-level minimal dimensions and a Kraus reconstruction residual.
struct ChoiOracleResult {
  std::vector<int> dims;  ///< one per codomain level
  double reconstruction = 0.0;
};
ChoiOracleResult choi_stinespring_oracle_k1(const MultilinearMap& f,
                                            double tol_rank = 1e-10);

}  // namespace locp
