#pragma once

#include <optional>
#include <span>
#include <vector>

#include "locp/errors.hpp"
#include "locp/linalg.hpp"

namespace locp {

/// Finite product of full matrix blocks M_{m_1} x ... x M_{m_LA} together
/// with its truncation filtration: level alpha (1-based) sees the leading
/// alpha blocks. The canonical basis consists of the matrix units of each
/// block, blocks in order, row-major inside a block.
struct BlockAlgebra {
  std::vector<int> block_dims;
  std::vector<int> block_offsets;  ///< coordinate offset of each block
  int vec_dim = 0;                 ///< sum of squared block dims

  int levels() const { return static_cast<int>(block_dims.size()); }

  struct BasisRef {
    int block, row, col;
  };

  int basis_index(int block, int row, int col) const;
  BasisRef basis_at(int index) const;

  /// e_i* = e_{adjoint_index(i)} (transpose inside the block).
  int adjoint_index(int index) const;

  /// e_i e_j is either zero or a single matrix unit.
  std::optional<int> product_index(int i, int j) const;

  bool is_diagonal_unit(int index) const;

  bool operator==(const BlockAlgebra& o) const { return block_dims == o.block_dims; }
};

BlockAlgebra make_block_algebra(std::vector<int> block_dims);

/// Immutable element: one dense complex matrix per block.
struct AlgebraElement {
  BlockAlgebra algebra;
  std::vector<Matrix> blocks;
};

AlgebraElement zero_element(const BlockAlgebra& a);
AlgebraElement unit_element(const BlockAlgebra& a);
AlgebraElement basis_element(const BlockAlgebra& a, int index);
AlgebraElement element_from_coords(const BlockAlgebra& a, const Vector& coords);

/// Coordinates in the canonical basis (linear in the element: entries are
/// read off without conjugation).
Vector coords(const AlgebraElement& x);

AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y);
AlgebraElement operator*(Complex c, const AlgebraElement& x);
AlgebraElement adjoint(const AlgebraElement& x);

/// Zeroes every block past the given level. Idempotent, multiplicative,
/// unital onto the leading blocks.
AlgebraElement truncate(const AlgebraElement& x, int level);

/// Max spectral norm over the leading `level` blocks.
double seminorm(const AlgebraElement& x, int level);

/// p_level(x - x*) <= tol.
bool is_local_selfadjoint(const AlgebraElement& x, int level, double tol = 1e-9);

/// Leading blocks Hermitian within tol and eigenvalues >= -tol*(1 + p_level(x)).
bool is_local_positive(const AlgebraElement& x, int level, double tol = 1e-9);

/// Tuple condition a_p* = a_{k+1-p} (mod the level kernel) for p <= ceil(k/2),
/// plus middle-entry local positivity when the length is odd.
bool is_alpha_symmetric(std::span<const AlgebraElement> tuple, int level,
                        double tol = 1e-9);

/// C^dim with the coordinate flag H_l = span{f_0..f_{d_l - 1}},
/// d_1 < ... < d_L = dim (1-based levels).
struct QuantizedDomain {
  int dim = 0;
  std::vector<int> flag;

  int levels() const { return static_cast<int>(flag.size()); }
  int level_dim(int level) const;

  bool operator==(const QuantizedDomain& o) const {
    return dim == o.dim && flag == o.flag;
  }
};

QuantizedDomain make_quantized_domain(int dim, std::vector<int> flag);

/// Member of the flag algebra: an operator commuting with every flag
/// projection (block diagonal across successive flag differences).
struct FlagOperator {
  QuantizedDomain domain;
  Matrix matrix;
};

/// Frobenius norm of T P_l - P_l T for the 1-based level l.
double flag_commutation_defect(const QuantizedDomain& d, const Matrix& m, int level);

/// Validates membership; reports the first offending level.
FlagOperator make_flag_operator(const QuantizedDomain& d, Matrix m, double tol = 1e-9);

/// Spectral norm of the leading d_l x d_l corner.
double flag_seminorm(const FlagOperator& t, int level);
double flag_seminorm(const QuantizedDomain& d, const Matrix& m, int level);

FlagOperator operator+(const FlagOperator& s, const FlagOperator& t);
FlagOperator operator-(const FlagOperator& s, const FlagOperator& t);
FlagOperator operator*(const FlagOperator& s, const FlagOperator& t);
FlagOperator operator*(Complex c, const FlagOperator& t);
FlagOperator adjoint(const FlagOperator& t);
FlagOperator unit_flag_operator(const QuantizedDomain& d);

}  // namespace locp
