#pragma once

#include "locp/rng.hpp"
#include "locp/stinespring.hpp"

namespace locp {

/// phi >= psi in the complete order: the difference is symmetric, invariant,
/// and has a PSD Gram matrix within -tol.
bool dominates(const MultilinearMap& phi, const MultilinearMap& psi,
               double tol = 1e-9);

/// Least-squares operator T: H^phi -> H^psi (returned r_psi x r_phi) mapping
/// the spanning vectors of the dominating triple onto those of the dominated
/// one. Certifies ||T|| <= 1 + tol, T V_phi = V_psi, the per-slot
/// intertwinings, and flag containment.
Matrix connecting_contraction(const StinespringTriple& phi_t,
                              const StinespringTriple& psi_t, double tol = 1e-9);

struct RNCertificate {
  Matrix T;      ///< r_psi x r_phi
  Matrix Delta;  ///< T* T, r_phi x r_phi
  double reconstruction = 0.0;  ///< max-norm of psi - phi_Delta on basis tuples
  double commutant = 0.0;       ///< worst commutator with reps and flags
  double contraction = 0.0;     ///< max(0, ||T|| - 1)
};

struct RNOptions {
  double tol = 1e-9;
  DilateOptions dilate;
};

/// Radon-Nikodym derivative Delta of psi with respect to phi, computed on the
/// minimal triples produced by dilate(). Throws OrderError if phi does not
/// dominate psi.
RNCertificate rn_derivative(const MultilinearMap& phi, const MultilinearMap& psi,
                            const RNOptions& opts = {});

/// Same, reusing precomputed triples (must be dilate()-style minimal triples).
RNCertificate rn_derivative_with(const MultilinearMap& phi,
                                 const StinespringTriple& phi_t,
                                 const MultilinearMap& psi,
                                 const StinespringTriple& psi_t,
                                 double tol = 1e-9);

/// phi_T(a_1,..,a_k) = V* T pi_1(...) ... pi_m(...) V on basis tuples.
/// Requires T in the commutant of the triple (within tol).
MultilinearMap map_from_operator(const StinespringTriple& t, const Matrix& T,
                                 double tol = 1e-9);

/// Worst commutator norm of T against every pi_p(e_i) and flag projection.
double commutant_defect(const StinespringTriple& t, const Matrix& T);

struct CommutantBasis {
  std::vector<Matrix> basis;  ///< orthonormal in the Frobenius inner product
  int dimension() const { return static_cast<int>(basis.size()); }
};

/// Orthonormal basis of {T : [T, pi_p(e_i)] = [T, P_l] = 0} via the null
/// space of the stacked commutator constraints.
CommutantBasis commutant_basis(const StinespringTriple& t, double tol = 1e-9);

/// Draw a Hermitian element of the commutant span, spectrally clipped to
/// [0, 1]; membership is re-verified numerically.
Matrix random_interval_element(const CommutantBasis& basis, int dim, Rng& rng,
                               const StinespringTriple& t, double tol = 1e-9);

/// Sampling check of the order isomorphism T <-> phi_T on [0, I]: affineness,
/// monotonicity via domination, injectivity at separation delta, and the
/// rn_derivative roundtrip.
struct OrderIntervalOptions {
  int samples = 10;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  double affine_tol = 1e-10;
  double roundtrip_tol = 1e-8;
  double separation = 1e-6;
};
MapCheckReport order_interval_check(const MultilinearMap& phi,
                                    const OrderIntervalOptions& opts = {});

}  // namespace locp
