#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "locp/block_algebra.hpp"

namespace locp {

using Json = nlohmann::ordered_json;

/// k-linear map A^k -> C*_E(D), stored densely on canonical basis k-tuples
/// (lexicographic, first slot most significant). alpha_of assigns to every
/// codomain flag level the algebra level it is allowed to see; it must be
/// monotone. Values are N x N matrices commuting with the codomain flag.
struct MultilinearMap {
  BlockAlgebra domain;
  QuantizedDomain codomain;
  int k = 1;
  int m = 1;  ///< floor((k + 1) / 2)
  std::vector<int> alpha_of;
  std::vector<Matrix> values;

  int tuple_count() const { return static_cast<int>(values.size()); }
  int flat_index(std::span<const int> tuple) const;
  std::vector<int> tuple_at(int flat) const;

  bool same_shape(const MultilinearMap& o) const {
    return domain == o.domain && codomain == o.codomain && k == o.k &&
           alpha_of == o.alpha_of;
  }
};

std::vector<int> default_alpha_of(const BlockAlgebra& a, const QuantizedDomain& d);

MultilinearMap make_multilinear_map(BlockAlgebra domain, QuantizedDomain codomain,
                                    int k, std::vector<int> alpha_of,
                                    std::vector<Matrix> values, double tol = 1e-9);

MultilinearMap zero_map(const BlockAlgebra& domain, const QuantizedDomain& codomain,
                        int k, std::vector<int> alpha_of = {});

MultilinearMap map_add(const MultilinearMap& f, const MultilinearMap& g);
MultilinearMap map_sub(const MultilinearMap& f, const MultilinearMap& g);
MultilinearMap map_scale(Complex c, const MultilinearMap& f);

/// Max spectral norm of the values over all basis tuples.
double max_value_norm(const MultilinearMap& f);

/// Multilinear extension from the stored basis values. Zero coordinates are
/// pruned exactly, so matrix-unit arguments evaluate in O(1) lookups.
FlagOperator evaluate(const MultilinearMap& f, std::span<const AlgebraElement> args);

/// phi*(a_1,..,a_k) = phi(a_k*,..,a_1*)*; again k-linear.
MultilinearMap adjoint_map(const MultilinearMap& f);

enum class Verdict { Pass, Fail, InconclusivePass };
std::string verdict_name(Verdict v);

struct MapCheckReport {
  std::string property;
  Verdict verdict = Verdict::Pass;
  double residual = 0.0;
  Json witness;  ///< null unless verdict == Fail
  Json params;

  bool failed() const { return verdict == Verdict::Fail; }
};

/// Complete check of phi == phi* on basis tuples (max entrywise residual).
MapCheckReport is_symmetric(const MultilinearMap& f, double tol = 1e-9);

/// Complete check of the middle-slot invariance identities on basis tuples;
/// both sides are linear in every slot, so this decides the property.
MapCheckReport is_invariant(const MultilinearMap& f, double tol = 1e-9);

/// n x n matrix over the algebra, row-major.
struct AlgebraMatrix {
  BlockAlgebra algebra;
  int n = 0;
  std::vector<AlgebraElement> entries;

  const AlgebraElement& at(int i, int j) const { return entries[i * n + j]; }
  AlgebraElement& at(int i, int j) { return entries[i * n + j]; }
};

AlgebraMatrix zero_algebra_matrix(const BlockAlgebra& a, int n);
AlgebraMatrix unit_algebra_matrix(const BlockAlgebra& a, int n);
AlgebraMatrix matrix_add(const AlgebraMatrix& x, const AlgebraMatrix& y);
AlgebraMatrix matrix_mul(const AlgebraMatrix& x, const AlgebraMatrix& y);
AlgebraMatrix matrix_adjoint(const AlgebraMatrix& x);

/// Level seminorm on M_n(A): max over leading blocks of the big
/// (n*m_b) x (n*m_b) block matrix's spectral norm.
double matrix_seminorm(const AlgebraMatrix& x, int level);

/// Amplification phi_n: entry (i, j) contracts phi along matrix products.
/// Returns the (n*N) x (n*N) matrix with N x N blocks.
Matrix amplify(const MultilinearMap& f, std::span<const AlgebraMatrix> args);

/// Compression of an amplified value to level l: keeps coordinates
/// (i, h) with h < d_l in every copy.
Matrix compress_amplified(const Matrix& big, int n, const QuantizedDomain& d, int level);

struct SamplingOptions {
  int n_max = 2;
  int trials = 50;
  std::uint64_t seed = 1;
  double tol = 1e-9;
  int only_level = 0;  ///< 0 = all levels
};

/// Sampling check of local complete positivity: planted matrix-unit tuples
/// plus random alpha_l-symmetric tuples, and the level kernel condition.
/// Success is only "inconclusive-pass".
MapCheckReport check_local_positivity(const MultilinearMap& f,
                                      const SamplingOptions& opts = {});

/// Sampling check of local complete contractivity on normalized tuples.
MapCheckReport check_local_contractivity(const MultilinearMap& f,
                                         const SamplingOptions& opts = {});

}  // namespace locp
