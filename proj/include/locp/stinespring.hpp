#pragma once

#include "locp/multilinear_map.hpp"

namespace locp {

/// Sesquilinear-form data on (A tensor ... tensor A) tensor H with
/// m = floor((k+1)/2) algebra slots. Tensor coordinates are enumerated
/// lexicographically over (i_1, ..., i_m, h) with h least significant.
struct GramData {
  BlockAlgebra domain;
  QuantizedDomain codomain;
  int k = 1;
  int m = 1;
  std::vector<int> alpha_of;
  int tensor_dim = 0;
  Matrix G;                ///< Hermitian-symmetrized
  double asymmetry = 0.0;  ///< max-abs of the skew part before symmetrization
  RealVector eigs;         ///< ascending
  Matrix eigvecs;

  double min_eig() const { return eigs.size() ? eigs(0) : 0.0; }
  double max_eig() const { return eigs.size() ? eigs(eigs.size() - 1) : 0.0; }

  /// PSD within -tol: min eigenvalue >= -tol * max(max eigenvalue, 1).
  bool is_psd(double tol) const {
    return min_eig() >= -tol * std::max(max_eig(), 1.0);
  }

  int tensor_index(std::span<const int> slots, int h) const;
  void tensor_at(int index, std::span<int> slots, int& h) const;
};

struct GramOptions {
  bool check_preconditions = true;  ///< symmetry + invariance of the map
  double tol = 1e-9;
};

GramData gram_matrix(const MultilinearMap& f, const GramOptions& opts = {});

/// Stinespring-type triple: flag space H^phi (dim r, nondecreasing flag cuts,
/// one per codomain level), m pairwise commuting unital representations given
/// on basis elements, the connecting contraction V, and the spectral factor
/// `embed` with G = embed* embed.
struct StinespringTriple {
  BlockAlgebra domain;
  QuantizedDomain codomain;
  int k = 1;
  int m = 1;
  std::vector<int> alpha_of;

  int dim = 0;            ///< r
  std::vector<int> flag;  ///< size L, nondecreasing, back() == dim
  Matrix V;               ///< r x N
  std::vector<std::vector<Matrix>> reps;  ///< [m][vec_dim], r x r
  Matrix embed;                           ///< r x tensor_dim

  struct Residuals {
    double gram_asymmetry = 0.0;
    double gram_min_eig = 0.0;
    double well_definedness = 0.0;
    double reconstruction = 0.0;
    double representation = 0.0;  ///< unit / star / multiplicativity
    double commutation = 0.0;     ///< across slots
    double flag_leak = 0.0;       ///< reps and V against the flag
    double contractivity = 0.0;
    double v_norm = 0.0;  ///< max(0, ||V|| - 1)
  } residuals;

  int level_rank(int level) const;
  Matrix rep_basis(int p, int i) const { return reps[p][i]; }
  /// Linear extension of slot p to an arbitrary element.
  Matrix rep_apply(int p, const AlgebraElement& x) const;
  /// prod_p pi_p(e_{tuple[p]}) over the m slots.
  Matrix product_rep(std::span<const int> mtuple) const;
};

struct DilateOptions {
  double tol_rank = 1e-10;         ///< eigenvalue cutoff, relative to max eig
  double tol = 1e-9;               ///< validation tolerance
  double tol_well_defined = 1e-6;  ///< kernel-preservation audit, rel sqrt(max eig)
  std::uint64_t tensor_permutation_seed = 0;  ///< 0 = natural enumeration
};

/// GNS-style dilation: spectral factorization of the Gram matrix, a
/// flag-adapted orthonormal basis level by level, least-squares lifts of the
/// slot actions (with a kernel-preservation audit), and V = embed applied to
/// the unit tensor embedding of H.
StinespringTriple dilate(const MultilinearMap& f, const DilateOptions& opts = {});

/// Product pi_1(...) ... pi_m(...) for a basis k-tuple under the middle
/// pairing; zero when any paired product vanishes.
Matrix tuple_product_rep(const StinespringTriple& t, std::span<const int> ktuple);

/// Reconstruction value V* pi_1(...) ... pi_m(...) V for a basis k-tuple,
/// pairing the slots around the middle.
Matrix reconstruct_value(const StinespringTriple& t, std::span<const int> ktuple);

/// Spanning vectors prod_p pi_p(e_{i_p}) V f_h as columns, m-tuple major and
/// h minor, in a fixed deterministic order.
Matrix spanning_matrix(const StinespringTriple& t);

/// Max spectral-norm residual between stored and reconstructed values over
/// all basis k-tuples.
double verify_dilation(const MultilinearMap& f, const StinespringTriple& t);

/// Data-driven triple validation (criterion set for dilate outputs).
struct TripleChecks {
  double representation = 0.0;
  double commutation = 0.0;
  double flag_leak = 0.0;
  double contractivity = 0.0;
  double v_norm = 0.0;
  double v_leak = 0.0;
  double unit_defect = 0.0;  ///< ||V*V - I|| when the map is unital

  double worst() const;
};
TripleChecks validate_triple(const StinespringTriple& t, std::uint64_t seed = 7,
                             int samples = 8);

/// True iff the spanning vectors prod pi_p(e) V h, h in H_l, have full rank
/// r_l at every level.
bool is_minimal(const StinespringTriple& t, double rank_tol = 1e-9);

/// Compression onto the flag-adapted span of the spanning vectors.
StinespringTriple minimize(const StinespringTriple& t, double rank_tol = 1e-9);

struct UnitaryEquivalence {
  Matrix U;  ///< dim(t2) x dim(t1)
  double unitarity = 0.0;
  double correspondence = 0.0;  ///< ||U X1 - X2|| over spanning vectors
  double v_residual = 0.0;
  double intertwine = 0.0;
  double flag_leak = 0.0;
};

/// Canonical unitary between two minimal triples of the same map; throws
/// InconsistencyError when the spanning correspondences do not match.
UnitaryEquivalence unitary_equivalence(const StinespringTriple& t1,
                                       const StinespringTriple& t2,
                                       double tol = 1e-9);

}  // namespace locp
