#include "locp/multilinear_map.hpp"

#include <functional>

#include "locp/json_io.hpp"
#include "locp/rng.hpp"

namespace locp {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::InconclusivePass: return "inconclusive-pass";
  }
  return "fail";
}

int MultilinearMap::flat_index(std::span<const int> tuple) const {
  int flat = 0;
  for (int i : tuple) flat = flat * domain.vec_dim + i;
  return flat;
}

std::vector<int> MultilinearMap::tuple_at(int flat) const {
  std::vector<int> tuple(k);
  for (int t = k - 1; t >= 0; --t) {
    tuple[t] = flat % domain.vec_dim;
    flat /= domain.vec_dim;
  }
  return tuple;
}

std::vector<int> default_alpha_of(const BlockAlgebra& a, const QuantizedDomain& d) {
  std::vector<int> alpha(d.levels());
  for (int l = 1; l <= d.levels(); ++l) alpha[l - 1] = std::min(l, a.levels());
  return alpha;
}

MultilinearMap make_multilinear_map(BlockAlgebra domain, QuantizedDomain codomain,
                                    int k, std::vector<int> alpha_of,
                                    std::vector<Matrix> values, double tol) {
  if (k < 1) throw SpecError("map arity must be at least 1");
  if (alpha_of.empty()) alpha_of = default_alpha_of(domain, codomain);
  if (static_cast<int>(alpha_of.size()) != codomain.levels())
    throw SpecError("alpha_of must assign one algebra level per flag level");
  int prev = 1;
  for (int a : alpha_of) {
    if (a < prev || a > domain.levels())
      throw SpecError("alpha_of must be monotone with values in [1, block count]");
    prev = a;
  }
  std::size_t expect = 1;
  for (int t = 0; t < k; ++t) expect *= static_cast<std::size_t>(domain.vec_dim);
  if (values.size() != expect)
    throw SpecError("value table must cover every basis tuple exactly once");
  for (const auto& v : values) {
    if (v.rows() != codomain.dim || v.cols() != codomain.dim)
      throw MismatchError("map value has wrong shape");
    make_flag_operator(codomain, v, tol);  // membership check
  }
  MultilinearMap f;
  f.domain = std::move(domain);
  f.codomain = std::move(codomain);
  f.k = k;
  f.m = (k + 1) / 2;
  f.alpha_of = std::move(alpha_of);
  f.values = std::move(values);
  return f;
}

MultilinearMap zero_map(const BlockAlgebra& domain, const QuantizedDomain& codomain,
                        int k, std::vector<int> alpha_of) {
  std::size_t count = 1;
  for (int t = 0; t < k; ++t) count *= static_cast<std::size_t>(domain.vec_dim);
  std::vector<Matrix> values(count, Matrix::Zero(codomain.dim, codomain.dim));
  return make_multilinear_map(domain, codomain, k, std::move(alpha_of),
                              std::move(values));
}

namespace {
void require_same_shape(const MultilinearMap& f, const MultilinearMap& g) {
  if (!f.same_shape(g))
    throw MismatchError("maps have different arity, domain, codomain or alpha_of");
}
}  // namespace

MultilinearMap map_add(const MultilinearMap& f, const MultilinearMap& g) {
  require_same_shape(f, g);
  MultilinearMap h = f;
  for (int i = 0; i < h.tuple_count(); ++i) h.values[i] += g.values[i];
  return h;
}

MultilinearMap map_sub(const MultilinearMap& f, const MultilinearMap& g) {
  require_same_shape(f, g);
  MultilinearMap h = f;
  for (int i = 0; i < h.tuple_count(); ++i) h.values[i] -= g.values[i];
  return h;
}

MultilinearMap map_scale(Complex c, const MultilinearMap& f) {
  MultilinearMap h = f;
  for (auto& v : h.values) v *= c;
  return h;
}

double max_value_norm(const MultilinearMap& f) {
  double s = 0.0;
  for (const auto& v : f.values) s = std::max(s, spectral_norm(v));
  return s;
}

FlagOperator evaluate(const MultilinearMap& f, std::span<const AlgebraElement> args) {
  if (static_cast<int>(args.size()) != f.k)
    throw MismatchError("evaluate: argument count differs from arity");
  const int vd = f.domain.vec_dim;
  std::vector<Vector> c;
  std::vector<std::vector<int>> support(f.k);
  c.reserve(f.k);
  for (int t = 0; t < f.k; ++t) {
    if (!(args[t].algebra == f.domain))
      throw MismatchError("evaluate: argument from a different algebra");
    c.push_back(coords(args[t]));
    for (int i = 0; i < vd; ++i)
      if (c[t](i) != 0.0) support[t].push_back(i);
  }
  Matrix acc = Matrix::Zero(f.codomain.dim, f.codomain.dim);
  // Depth-first multilinear expansion; exact zero coordinates are pruned, so
  // matrix-unit arguments cost a single table access.
  std::function<void(int, int, Complex)> rec = [&](int depth, int flat, Complex coeff) {
    if (depth == f.k) {
      acc += coeff * f.values[flat];
      return;
    }
    for (int i : support[depth]) rec(depth + 1, flat * vd + i, coeff * c[depth](i));
  };
  rec(0, 0, Complex(1.0, 0.0));
  return {f.codomain, std::move(acc)};
}

MultilinearMap adjoint_map(const MultilinearMap& f) {
  MultilinearMap g = f;
  std::vector<int> rev(f.k);
  for (int flat = 0; flat < f.tuple_count(); ++flat) {
    const auto tuple = f.tuple_at(flat);
    for (int t = 0; t < f.k; ++t)
      rev[t] = f.domain.adjoint_index(tuple[f.k - 1 - t]);
    g.values[flat] = f.values[f.flat_index(rev)].adjoint();
  }
  return g;
}

MapCheckReport is_symmetric(const MultilinearMap& f, double tol) {
  MapCheckReport rep;
  rep.property = "symmetry";
  rep.params = Json{{"tol", tol}};
  std::vector<int> rev(f.k);
  double worst = 0.0;
  int worst_flat = -1;
  for (int flat = 0; flat < f.tuple_count(); ++flat) {
    const auto tuple = f.tuple_at(flat);
    for (int t = 0; t < f.k; ++t)
      rev[t] = f.domain.adjoint_index(tuple[f.k - 1 - t]);
    const double r =
        max_abs(f.values[flat] - f.values[f.flat_index(rev)].adjoint().eval());
    if (r > worst) {
      worst = r;
      worst_flat = flat;
    }
  }
  rep.residual = worst;
  if (worst > tol) {
    rep.verdict = Verdict::Fail;
    rep.witness = Json{{"tuple", f.tuple_at(worst_flat)}};
  } else {
    rep.verdict = Verdict::Pass;
  }
  return rep;
}

MapCheckReport is_invariant(const MultilinearMap& f, double tol) {
  MapCheckReport rep;
  rep.property = "invariance";
  rep.params = Json{{"tol", tol}};
  const int vd = f.domain.vec_dim;
  const int cs = (f.k % 2 == 1) ? f.m - 1 : f.m;  // # of moved factors
  if (cs == 0) {
    rep.verdict = Verdict::Pass;
    return rep;
  }
  int ccount = 1;
  for (int t = 0; t < cs; ++t) ccount *= vd;
  const Matrix zero = Matrix::Zero(f.codomain.dim, f.codomain.dim);
  double worst = 0.0;
  Json witness;
  std::vector<int> ctuple(cs), lhs(f.k), rhs(f.k);
  for (int flat = 0; flat < f.tuple_count(); ++flat) {
    const auto tuple = f.tuple_at(flat);
    for (int cflat = 0; cflat < ccount; ++cflat) {
      int rem = cflat;
      for (int t = cs - 1; t >= 0; --t) {
        ctuple[t] = rem % vd;
        rem /= vd;
      }
      // left side: slot p < cs multiplied by c_p on the right
      bool lzero = false, rzero = false;
      for (int t = 0; t < f.k; ++t) lhs[t] = rhs[t] = tuple[t];
      for (int p = 0; p < cs && !lzero; ++p) {
        auto q = f.domain.product_index(tuple[p], ctuple[p]);
        if (!q) lzero = true;
        else lhs[p] = *q;
      }
      // right side: slot s >= m multiplied by c_{k-1-s} on the left
      for (int s = f.m; s < f.k && !rzero; ++s) {
        auto q = f.domain.product_index(ctuple[f.k - 1 - s], tuple[s]);
        if (!q) rzero = true;
        else rhs[s] = *q;
      }
      const Matrix& left = lzero ? zero : f.values[f.flat_index(lhs)];
      const Matrix& right = rzero ? zero : f.values[f.flat_index(rhs)];
      const double r = max_abs(left - right);
      if (r > worst) {
        worst = r;
        witness = Json{{"tuple", tuple}, {"factors", ctuple}};
      }
    }
  }
  rep.residual = worst;
  if (worst > tol) {
    rep.verdict = Verdict::Fail;
    rep.witness = witness;
  } else {
    rep.verdict = Verdict::Pass;
  }
  return rep;
}

// ---------------------------------------------------------------------------

AlgebraMatrix zero_algebra_matrix(const BlockAlgebra& a, int n) {
  AlgebraMatrix x{a, n, {}};
  x.entries.assign(static_cast<std::size_t>(n) * n, zero_element(a));
  return x;
}

AlgebraMatrix unit_algebra_matrix(const BlockAlgebra& a, int n) {
  AlgebraMatrix x = zero_algebra_matrix(a, n);
  for (int i = 0; i < n; ++i) x.at(i, i) = unit_element(a);
  return x;
}

AlgebraMatrix matrix_add(const AlgebraMatrix& x, const AlgebraMatrix& y) {
  if (!(x.algebra == y.algebra) || x.n != y.n)
    throw MismatchError("algebra matrices of different shape");
  AlgebraMatrix z = x;
  for (std::size_t i = 0; i < z.entries.size(); ++i)
    z.entries[i] = z.entries[i] + y.entries[i];
  return z;
}

AlgebraMatrix matrix_mul(const AlgebraMatrix& x, const AlgebraMatrix& y) {
  if (!(x.algebra == y.algebra) || x.n != y.n)
    throw MismatchError("algebra matrices of different shape");
  AlgebraMatrix z = zero_algebra_matrix(x.algebra, x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      AlgebraElement acc = zero_element(x.algebra);
      for (int r = 0; r < x.n; ++r) acc = acc + x.at(i, r) * y.at(r, j);
      z.at(i, j) = std::move(acc);
    }
  return z;
}

AlgebraMatrix matrix_adjoint(const AlgebraMatrix& x) {
  AlgebraMatrix z = zero_algebra_matrix(x.algebra, x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) z.at(i, j) = adjoint(x.at(j, i));
  return z;
}

double matrix_seminorm(const AlgebraMatrix& x, int level) {
  if (level < 1 || level > x.algebra.levels())
    throw LevelError("matrix_seminorm: level out of range");
  double p = 0.0;
  for (int b = 0; b < level; ++b) {
    const int d = x.algebra.block_dims[b];
    Matrix big(x.n * d, x.n * d);
    for (int i = 0; i < x.n; ++i)
      for (int j = 0; j < x.n; ++j)
        big.block(i * d, j * d, d, d) = x.at(i, j).blocks[b];
    p = std::max(p, spectral_norm(big));
  }
  return p;
}

Matrix amplify(const MultilinearMap& f, std::span<const AlgebraMatrix> args) {
  if (static_cast<int>(args.size()) != f.k)
    throw MismatchError("amplify: argument count differs from arity");
  const int n = args.empty() ? 1 : args[0].n;
  const int vd = f.domain.vec_dim;
  const int N = f.codomain.dim;
  for (const auto& a : args) {
    if (!(a.algebra == f.domain)) throw MismatchError("amplify: algebra mismatch");
    if (a.n != n) throw MismatchError("amplify: ragged amplification degree");
  }
  // Per slot: coordinate matrices C[t][i] (n x n) and their supports.
  std::vector<std::vector<Matrix>> C(f.k);
  std::vector<std::vector<int>> support(f.k);
  for (int t = 0; t < f.k; ++t) {
    C[t].assign(vd, Matrix::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const Vector co = coords(args[t].at(i, j));
        for (int b = 0; b < vd; ++b) C[t][b](i, j) += co(b);
      }
    for (int b = 0; b < vd; ++b)
      if (C[t][b].cwiseAbs().maxCoeff() != 0.0) support[t].push_back(b);
  }
  Matrix big = Matrix::Zero(n * N, n * N);
  std::function<void(int, int, const Matrix&)> rec = [&](int depth, int flat,
                                                         const Matrix& prod) {
    if (depth == f.k) {
      const Matrix& val = f.values[flat];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (prod(i, j) != 0.0) big.block(i * N, j * N, N, N) += prod(i, j) * val;
      return;
    }
    for (int i : support[depth]) {
      Matrix next = (depth == 0) ? C[0][i] : Matrix(prod * C[depth][i]);
      rec(depth + 1, flat * vd + i, next);
    }
  };
  rec(0, 0, Matrix::Identity(n, n));
  return big;
}

Matrix compress_amplified(const Matrix& big, int n, const QuantizedDomain& d,
                          int level) {
  const int N = d.dim;
  const int cut = d.level_dim(level);
  Matrix out(n * cut, n * cut);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      out.block(i * cut, j * cut, cut, cut) = big.block(i * N, j * N, cut, cut);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

AlgebraElement random_element(Rng& rng, const BlockAlgebra& a, double scale) {
  AlgebraElement x = zero_element(a);
  for (auto& blk : x.blocks)
    for (Eigen::Index r = 0; r < blk.rows(); ++r)
      for (Eigen::Index c = 0; c < blk.cols(); ++c) blk(r, c) = scale * rng.cnormal();
  return x;
}

/// Random element supported on the blocks past `level` (the level kernel).
AlgebraElement random_kernel_element(Rng& rng, const BlockAlgebra& a, int level,
                                     double scale) {
  AlgebraElement x = zero_element(a);
  for (int b = level; b < a.levels(); ++b)
    for (Eigen::Index r = 0; r < x.blocks[b].rows(); ++r)
      for (Eigen::Index c = 0; c < x.blocks[b].cols(); ++c)
        x.blocks[b](r, c) = scale * rng.cnormal();
  return x;
}

AlgebraMatrix random_algebra_matrix(Rng& rng, const BlockAlgebra& a, int n,
                                    double scale) {
  AlgebraMatrix x = zero_algebra_matrix(a, n);
  for (auto& e : x.entries) e = random_element(rng, a, scale);
  return x;
}

AlgebraMatrix random_kernel_matrix(Rng& rng, const BlockAlgebra& a, int n, int level,
                                   double scale) {
  AlgebraMatrix x = zero_algebra_matrix(a, n);
  for (auto& e : x.entries) e = random_kernel_element(rng, a, level, scale);
  return x;
}

/// Random alpha-symmetric k-tuple in M_n(A), optionally with garbage
/// supported past the level in the mirrored and middle slots.
std::vector<AlgebraMatrix> random_symmetric_tuple(Rng& rng, const BlockAlgebra& a,
                                                  int k, int n, int alpha) {
  std::vector<AlgebraMatrix> tuple;
  tuple.reserve(k);
  for (int t = 0; t < k; ++t) tuple.push_back(random_algebra_matrix(rng, a, n, 0.6));
  const bool garbage = alpha < a.levels();
  for (int p = 0; p < k / 2; ++p) {
    tuple[k - 1 - p] = matrix_adjoint(tuple[p]);
    if (garbage && rng.below(2) == 0)
      tuple[k - 1 - p] =
          matrix_add(tuple[k - 1 - p], random_kernel_matrix(rng, a, n, alpha, 0.8));
  }
  if (k % 2 == 1) {
    const AlgebraMatrix b = random_algebra_matrix(rng, a, n, 0.6);
    tuple[k / 2] = matrix_mul(matrix_adjoint(b), b);
    if (garbage && rng.below(2) == 0)
      tuple[k / 2] =
          matrix_add(tuple[k / 2], random_kernel_matrix(rng, a, n, alpha, 0.8));
  }
  return tuple;
}

/// Matrix-unit tuple: R1 carries the first-row window of block b, the other
/// slots hold unit diagonals. For odd arity the middle slot is R1* R1; for
/// even arity the two middle slots are R1*, R1.
std::vector<AlgebraMatrix> planted_unit_tuple(const BlockAlgebra& a, int k, int block,
                                              int n) {
  AlgebraMatrix r1 = zero_algebra_matrix(a, n);
  for (int j = 0; j < n; ++j)
    r1.at(0, j) = basis_element(a, a.basis_index(block, 0, j));
  std::vector<AlgebraMatrix> tuple(static_cast<std::size_t>(k),
                                   unit_algebra_matrix(a, n));
  const int m = (k + 1) / 2;
  if (k % 2 == 1) {
    tuple[m - 1] = matrix_mul(matrix_adjoint(r1), r1);
  } else {
    tuple[m - 1] = matrix_adjoint(r1);
    tuple[m] = r1;
  }
  return tuple;
}

Json tuple_witness(const std::vector<AlgebraMatrix>& tuple, int level, int n,
                   const char* phase) {
  Json arr = Json::array();
  for (const auto& t : tuple) arr.push_back(algebra_matrix_to_json(t));
  return Json{{"phase", phase}, {"level", level}, {"n", n}, {"tuple", arr}};
}

struct LevelRange {
  int first, last;
};

LevelRange level_range(const MultilinearMap& f, const SamplingOptions& opts) {
  if (opts.only_level != 0) {
    if (opts.only_level < 1 || opts.only_level > f.codomain.levels())
      throw LevelError("check: level out of range");
    return {opts.only_level, opts.only_level};
  }
  return {1, f.codomain.levels()};
}

}  // namespace

MapCheckReport check_local_positivity(const MultilinearMap& f,
                                      const SamplingOptions& opts) {
  MapCheckReport rep;
  rep.property = "local-positivity";
  rep.params = Json{{"n_max", opts.n_max},
                    {"trials", opts.trials},
                    {"seed", opts.seed},
                    {"tol", opts.tol},
                    {"only_level", opts.only_level}};
  Rng rng(opts.seed);
  const auto range = level_range(f, opts);
  double worst = 0.0;

  auto positivity_residual = [&](const std::vector<AlgebraMatrix>& tuple, int level) {
    const int n = tuple[0].n;
    const Matrix big = amplify(f, tuple);
    const Matrix low = compress_amplified(big, n, f.codomain, level);
    const double scale = 1.0 + spectral_norm(low);
    const double skew = hermitian_defect(low);
    const double neg = std::max(0.0, -min_hermitian_eig(low));
    return std::max(skew, neg) / scale;
  };

  for (int level = range.first; level <= range.last; ++level) {
    const int alpha = f.alpha_of[level - 1];

    // Planted matrix-unit witnesses (deterministic).
    for (int n = 1; n <= opts.n_max; ++n)
      for (int b = 0; b < f.domain.levels(); ++b) {
        if (f.domain.block_dims[b] < n) continue;
        const auto tuple = planted_unit_tuple(f.domain, f.k, b, n);
        const double r = positivity_residual(tuple, level);
        worst = std::max(worst, r);
        if (r > opts.tol) {
          rep.verdict = Verdict::Fail;
          rep.residual = r;
          rep.witness = tuple_witness(tuple, level, n, "positivity-planted");
          return rep;
        }
      }

    // Random alpha_l-symmetric tuples.
    for (int trial = 0; trial < opts.trials; ++trial) {
      const int n = 1 + rng.below(opts.n_max);
      const auto tuple = random_symmetric_tuple(rng, f.domain, f.k, n, alpha);
      const double r = positivity_residual(tuple, level);
      worst = std::max(worst, r);
      if (r > opts.tol) {
        rep.verdict = Verdict::Fail;
        rep.residual = r;
        rep.witness = tuple_witness(tuple, level, n, "positivity-sampled");
        return rep;
      }
    }

    // Kernel condition: one slot supported past alpha_l forces a level-l zero.
    if (alpha < f.domain.levels()) {
      for (int trial = 0; trial < opts.trials; ++trial) {
        const int n = 1 + rng.below(opts.n_max);
        std::vector<AlgebraMatrix> tuple;
        tuple.reserve(f.k);
        for (int t = 0; t < f.k; ++t)
          tuple.push_back(random_algebra_matrix(rng, f.domain, n, 0.6));
        const int slot = rng.below(f.k);
        tuple[slot] = random_kernel_matrix(rng, f.domain, n, alpha, 0.8);
        double scale = 1.0;
        for (const auto& t : tuple)
          scale = std::max(scale, matrix_seminorm(t, f.domain.levels()));
        const Matrix big = amplify(f, tuple);
        const Matrix low = compress_amplified(big, n, f.codomain, level);
        const double r = spectral_norm(low) / scale;
        worst = std::max(worst, r);
        if (r > opts.tol) {
          rep.verdict = Verdict::Fail;
          rep.residual = r;
          rep.witness = tuple_witness(tuple, level, n, "kernel");
          rep.witness["slot"] = slot;
          return rep;
        }
      }
    }
  }
  rep.verdict = Verdict::InconclusivePass;
  rep.residual = worst;
  return rep;
}

MapCheckReport check_local_contractivity(const MultilinearMap& f,
                                         const SamplingOptions& opts) {
  MapCheckReport rep;
  rep.property = "local-contractivity";
  rep.params = Json{{"n_max", opts.n_max},
                    {"trials", opts.trials},
                    {"seed", opts.seed},
                    {"tol", opts.tol},
                    {"only_level", opts.only_level}};
  Rng rng(opts.seed);
  const auto range = level_range(f, opts);
  double worst = 0.0;

  auto contraction_residual = [&](const std::vector<AlgebraMatrix>& tuple, int level) {
    const int n = tuple[0].n;
    const Matrix big = amplify(f, tuple);
    const Matrix low = compress_amplified(big, n, f.codomain, level);
    return std::max(0.0, spectral_norm(low) - 1.0);
  };

  for (int level = range.first; level <= range.last; ++level) {
    const int alpha = f.alpha_of[level - 1];

    {  // Unit tuple: ||phi(1,..,1)||_l <= 1 must hold for any contraction.
      std::vector<AlgebraMatrix> unit(static_cast<std::size_t>(f.k),
                                      unit_algebra_matrix(f.domain, 1));
      const double r = contraction_residual(unit, level);
      worst = std::max(worst, r);
      if (r > opts.tol) {
        rep.verdict = Verdict::Fail;
        rep.residual = r;
        rep.witness = tuple_witness(unit, level, 1, "unit");
        return rep;
      }
    }

    for (int trial = 0; trial < opts.trials; ++trial) {
      const int n = 1 + rng.below(opts.n_max);
      std::vector<AlgebraMatrix> tuple;
      tuple.reserve(f.k);
      for (int t = 0; t < f.k; ++t)
        tuple.push_back(random_algebra_matrix(rng, f.domain, n, 0.6));
      if (alpha < f.domain.levels() && rng.below(2) == 0) {
        const int slot = rng.below(f.k);
        tuple[slot] =
            matrix_add(tuple[slot], random_kernel_matrix(rng, f.domain, n, alpha, 1.5));
      }
      double s = 0.0;
      for (const auto& t : tuple) s = std::max(s, matrix_seminorm(t, alpha));
      if (s < 1e-12) continue;
      for (auto& t : tuple)
        for (auto& e : t.entries) e = Complex(1.0 / s, 0.0) * e;
      const double r = contraction_residual(tuple, level);
      worst = std::max(worst, r);
      if (r > opts.tol) {
        rep.verdict = Verdict::Fail;
        rep.residual = r;
        rep.witness = tuple_witness(tuple, level, n, "contractivity");
        return rep;
      }
    }
  }
  rep.verdict = Verdict::InconclusivePass;
  rep.residual = worst;
  return rep;
}

}  // namespace locp
