#include "locp/block_algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace locp {

double spectral_norm(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double max_abs(const Matrix& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double hermitian_defect(const Matrix& m) { return spectral_norm(m - m.adjoint()); }

void hermitian_eigs(const Matrix& m, RealVector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m));
  values = es.eigenvalues();
  vectors = es.eigenvectors();
}

double min_hermitian_eig(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_hermitian_eig(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

Matrix pseudo_inverse(const Matrix& m, double rel_tol) {
  if (m.rows() == 0 || m.cols() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cut = rel_tol * (sv.size() ? sv(0) : 0.0);
  RealVector inv = RealVector::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cut) inv(i) = 1.0 / sv(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

Matrix psd_sqrt(const Matrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(hermitian));
  RealVector v = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

Matrix spectral_clip(const Matrix& hermitian, double lo, double hi) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(hermitian));
  RealVector v = es.eigenvalues().cwiseMax(lo).cwiseMin(hi);
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

// ---------------------------------------------------------------------------

BlockAlgebra make_block_algebra(std::vector<int> block_dims) {
  if (block_dims.empty()) throw SpecError("block algebra needs at least one block");
  BlockAlgebra a;
  a.block_dims = std::move(block_dims);
  a.block_offsets.reserve(a.block_dims.size());
  for (int d : a.block_dims) {
    if (d <= 0) throw SpecError("block dimensions must be positive");
    a.block_offsets.push_back(a.vec_dim);
    a.vec_dim += d * d;
  }
  return a;
}

int BlockAlgebra::basis_index(int block, int row, int col) const {
  return block_offsets[block] + row * block_dims[block] + col;
}

BlockAlgebra::BasisRef BlockAlgebra::basis_at(int index) const {
  if (index < 0 || index >= vec_dim) throw SpecError("basis index out of range");
  int b = levels() - 1;
  while (block_offsets[b] > index) --b;
  const int local = index - block_offsets[b];
  return {b, local / block_dims[b], local % block_dims[b]};
}

int BlockAlgebra::adjoint_index(int index) const {
  const BasisRef u = basis_at(index);
  return basis_index(u.block, u.col, u.row);
}

std::optional<int> BlockAlgebra::product_index(int i, int j) const {
  const BasisRef u = basis_at(i), v = basis_at(j);
  if (u.block != v.block || u.col != v.row) return std::nullopt;
  return basis_index(u.block, u.row, v.col);
}

bool BlockAlgebra::is_diagonal_unit(int index) const {
  const BasisRef u = basis_at(index);
  return u.row == u.col;
}

// ---------------------------------------------------------------------------

namespace {

void require_same_algebra(const AlgebraElement& x, const AlgebraElement& y) {
  if (!(x.algebra == y.algebra))
    throw MismatchError("elements belong to different block algebras");
}

void require_level(int level, int levels, const char* what) {
  if (level < 1 || level > levels)
    throw LevelError(std::string(what) + ": level out of range");
}

}  // namespace

AlgebraElement zero_element(const BlockAlgebra& a) {
  AlgebraElement x{a, {}};
  x.blocks.reserve(a.block_dims.size());
  for (int d : a.block_dims) x.blocks.push_back(Matrix::Zero(d, d));
  return x;
}

AlgebraElement unit_element(const BlockAlgebra& a) {
  AlgebraElement x{a, {}};
  x.blocks.reserve(a.block_dims.size());
  for (int d : a.block_dims) x.blocks.push_back(Matrix::Identity(d, d));
  return x;
}

AlgebraElement basis_element(const BlockAlgebra& a, int index) {
  AlgebraElement x = zero_element(a);
  const auto u = a.basis_at(index);
  x.blocks[u.block](u.row, u.col) = 1.0;
  return x;
}

AlgebraElement element_from_coords(const BlockAlgebra& a, const Vector& c) {
  if (c.size() != a.vec_dim) throw MismatchError("coordinate vector has wrong length");
  AlgebraElement x = zero_element(a);
  for (int b = 0; b < a.levels(); ++b) {
    const int d = a.block_dims[b];
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) x.blocks[b](r, s) = c(a.basis_index(b, r, s));
  }
  return x;
}

Vector coords(const AlgebraElement& x) {
  Vector c(x.algebra.vec_dim);
  for (int b = 0; b < x.algebra.levels(); ++b) {
    const int d = x.algebra.block_dims[b];
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) c(x.algebra.basis_index(b, r, s)) = x.blocks[b](r, s);
  }
  return c;
}

AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_algebra(x, y);
  AlgebraElement z = x;
  for (size_t b = 0; b < z.blocks.size(); ++b) z.blocks[b] += y.blocks[b];
  return z;
}

AlgebraElement operator-(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_algebra(x, y);
  AlgebraElement z = x;
  for (size_t b = 0; b < z.blocks.size(); ++b) z.blocks[b] -= y.blocks[b];
  return z;
}

AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y) {
  require_same_algebra(x, y);
  AlgebraElement z = x;
  for (size_t b = 0; b < z.blocks.size(); ++b) z.blocks[b] *= y.blocks[b];
  return z;
}

AlgebraElement operator*(Complex c, const AlgebraElement& x) {
  AlgebraElement z = x;
  for (auto& blk : z.blocks) blk *= c;
  return z;
}

AlgebraElement adjoint(const AlgebraElement& x) {
  AlgebraElement z = x;
  for (auto& blk : z.blocks) blk = blk.adjoint().eval();
  return z;
}

AlgebraElement truncate(const AlgebraElement& x, int level) {
  require_level(level, x.algebra.levels(), "truncate");
  AlgebraElement z = x;
  for (int b = level; b < x.algebra.levels(); ++b) z.blocks[b].setZero();
  return z;
}

double seminorm(const AlgebraElement& x, int level) {
  require_level(level, x.algebra.levels(), "seminorm");
  double p = 0.0;
  for (int b = 0; b < level; ++b) p = std::max(p, spectral_norm(x.blocks[b]));
  return p;
}

bool is_local_selfadjoint(const AlgebraElement& x, int level, double tol) {
  return seminorm(x - adjoint(x), level) <= tol;
}

bool is_local_positive(const AlgebraElement& x, int level, double tol) {
  require_level(level, x.algebra.levels(), "is_local_positive");
  const double scale = tol * (1.0 + seminorm(x, level));
  if (seminorm(x - adjoint(x), level) > scale) return false;
  for (int b = 0; b < level; ++b)
    if (min_hermitian_eig(x.blocks[b]) < -scale) return false;
  return true;
}

bool is_alpha_symmetric(std::span<const AlgebraElement> tuple, int level, double tol) {
  const int k = static_cast<int>(tuple.size());
  if (k == 0) throw SpecError("is_alpha_symmetric: empty tuple");
  for (int p = 0; p < k / 2; ++p)
    if (seminorm(adjoint(tuple[p]) - tuple[k - 1 - p], level) > tol) return false;
  if (k % 2 == 1) {
    const auto& mid = tuple[k / 2];
    if (seminorm(adjoint(mid) - mid, level) > tol) return false;
    if (!is_local_positive(mid, level, tol)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

QuantizedDomain make_quantized_domain(int dim, std::vector<int> flag) {
  if (dim <= 0) throw SpecError("quantized domain dimension must be positive");
  if (flag.empty()) throw SpecError("flag must be nonempty");
  int prev = 0;
  for (int d : flag) {
    if (d <= prev) throw SpecError("flag must be strictly increasing");
    prev = d;
  }
  if (flag.back() != dim) throw SpecError("flag must end at the space dimension");
  return {dim, std::move(flag)};
}

int QuantizedDomain::level_dim(int level) const {
  if (level < 1 || level > levels()) throw LevelError("flag level out of range");
  return flag[level - 1];
}

double flag_commutation_defect(const QuantizedDomain& d, const Matrix& m, int level) {
  const int cut = d.level_dim(level);
  // [m, P_l] has the two off-diagonal blocks of m at the cut.
  const double upper = m.topRightCorner(cut, d.dim - cut).norm();
  const double lower = m.bottomLeftCorner(d.dim - cut, cut).norm();
  return std::sqrt(upper * upper + lower * lower);
}

FlagOperator make_flag_operator(const QuantizedDomain& d, Matrix m, double tol) {
  if (m.rows() != d.dim || m.cols() != d.dim)
    throw MismatchError("operator shape does not match the domain dimension");
  for (int level = 1; level <= d.levels(); ++level) {
    if (flag_commutation_defect(d, m, level) > tol)
      throw NotInFlagAlgebraError(level,
                                  "operator does not commute with flag projection at level " +
                                      std::to_string(level));
  }
  return {d, std::move(m)};
}

double flag_seminorm(const QuantizedDomain& d, const Matrix& m, int level) {
  const int cut = d.level_dim(level);
  return spectral_norm(m.topLeftCorner(cut, cut));
}

double flag_seminorm(const FlagOperator& t, int level) {
  return flag_seminorm(t.domain, t.matrix, level);
}

namespace {
void require_same_domain(const FlagOperator& s, const FlagOperator& t) {
  if (!(s.domain == t.domain))
    throw MismatchError("flag operators live on different quantized domains");
}
}  // namespace

FlagOperator operator+(const FlagOperator& s, const FlagOperator& t) {
  require_same_domain(s, t);
  return {s.domain, s.matrix + t.matrix};
}

FlagOperator operator-(const FlagOperator& s, const FlagOperator& t) {
  require_same_domain(s, t);
  return {s.domain, s.matrix - t.matrix};
}

FlagOperator operator*(const FlagOperator& s, const FlagOperator& t) {
  require_same_domain(s, t);
  return {s.domain, s.matrix * t.matrix};
}

FlagOperator operator*(Complex c, const FlagOperator& t) { return {t.domain, c * t.matrix}; }

FlagOperator adjoint(const FlagOperator& t) { return {t.domain, t.matrix.adjoint()}; }

FlagOperator unit_flag_operator(const QuantizedDomain& d) {
  return {d, Matrix::Identity(d.dim, d.dim)};
}

}  // namespace locp
