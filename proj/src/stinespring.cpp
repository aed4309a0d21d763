#include "locp/stinespring.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <numeric>

#include "locp/rng.hpp"

namespace locp {

int GramData::tensor_index(std::span<const int> slots, int h) const {
  int idx = 0;
  for (int s : slots) idx = idx * domain.vec_dim + s;
  return idx * codomain.dim + h;
}

void GramData::tensor_at(int index, std::span<int> slots, int& h) const {
  h = index % codomain.dim;
  index /= codomain.dim;
  for (int p = m - 1; p >= 0; --p) {
    slots[p] = index % domain.vec_dim;
    index /= domain.vec_dim;
  }
}

GramData gram_matrix(const MultilinearMap& f, const GramOptions& opts) {
  if (opts.check_preconditions) {
    const auto sym = is_symmetric(f, opts.tol);
    if (sym.failed())
      throw PreconditionError("gram_matrix: map is not symmetric (residual " +
                              std::to_string(sym.residual) + ")");
    const auto inv = is_invariant(f, opts.tol);
    if (inv.failed())
      throw PreconditionError("gram_matrix: map is not invariant (residual " +
                              std::to_string(inv.residual) + ")");
  }
  GramData gd;
  gd.domain = f.domain;
  gd.codomain = f.codomain;
  gd.k = f.k;
  gd.m = f.m;
  gd.alpha_of = f.alpha_of;
  const int vd = f.domain.vec_dim;
  const int N = f.codomain.dim;
  int td = N;
  for (int p = 0; p < f.m; ++p) td *= vd;
  gd.tensor_dim = td;

  Matrix G(td, td);
  std::vector<int> srow(f.m), scol(f.m), ktuple(f.k);
  const bool odd = (f.k % 2 == 1);
  for (int s = 0; s < td; ++s) {
    int hs = 0;
    gd.tensor_at(s, srow, hs);
    for (int t = 0; t < td; ++t) {
      int ht = 0;
      gd.tensor_at(t, scol, ht);
      // slot list (s_m*, ..., s_2*, s_1* t_1 | s_1*, t_1, t_2, ..., t_m)
      bool zero = false;
      int pos = 0;
      for (int p = f.m - 1; p >= 1; --p)
        ktuple[pos++] = f.domain.adjoint_index(srow[p]);
      if (odd) {
        const auto prod =
            f.domain.product_index(f.domain.adjoint_index(srow[0]), scol[0]);
        if (!prod) zero = true;
        else ktuple[pos++] = *prod;
      } else {
        ktuple[pos++] = f.domain.adjoint_index(srow[0]);
        ktuple[pos++] = scol[0];
      }
      for (int p = 1; p < f.m; ++p) ktuple[pos++] = scol[p];
      G(s, t) = zero ? Complex(0.0, 0.0) : f.values[f.flat_index(ktuple)](hs, ht);
    }
  }
  gd.asymmetry = max_abs(G - G.adjoint().eval());
  gd.G = hermitian_part(G);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gd.G);
  gd.eigs = es.eigenvalues();
  gd.eigvecs = es.eigenvectors();
  return gd;
}

// ---------------------------------------------------------------------------

int StinespringTriple::level_rank(int level) const {
  if (level < 1 || level > static_cast<int>(flag.size()))
    throw LevelError("triple level out of range");
  return flag[level - 1];
}

Matrix StinespringTriple::rep_apply(int p, const AlgebraElement& x) const {
  if (!(x.algebra == domain)) throw MismatchError("rep_apply: algebra mismatch");
  const Vector c = coords(x);
  Matrix out = Matrix::Zero(dim, dim);
  for (int i = 0; i < domain.vec_dim; ++i)
    if (c(i) != 0.0) out += c(i) * reps[p][i];
  return out;
}

Matrix StinespringTriple::product_rep(std::span<const int> mtuple) const {
  Matrix out = Matrix::Identity(dim, dim);
  for (int p = 0; p < m; ++p) out = out * reps[p][mtuple[p]];
  return out;
}

namespace {

/// Column-sparse action of left multiplication by e_i in tensor slot p,
/// under a permuted enumeration of the tensor coordinates.
struct SlotAction {
  std::vector<int> row;  ///< row[col] in permuted coords, -1 for zero column
};

SlotAction slot_action(const GramData& gd, const std::vector<int>& perm,
                       const std::vector<int>& inv, int p, int i) {
  const int td = gd.tensor_dim;
  SlotAction act;
  act.row.assign(td, -1);
  std::vector<int> slots(gd.m);
  for (int q = 0; q < td; ++q) {
    int h = 0;
    gd.tensor_at(perm[q], slots, h);
    const auto prod = gd.domain.product_index(i, slots[p]);
    if (!prod) continue;
    const int keep = slots[p];
    slots[p] = *prod;
    act.row[q] = inv[gd.tensor_index(slots, h)];
    slots[p] = keep;
  }
  return act;
}

Matrix apply_action(const SlotAction& act, const Matrix& m) {
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int q = 0; q < static_cast<int>(act.row.size()); ++q)
    if (act.row[q] >= 0) out.row(act.row[q]) += m.row(q);
  return out;
}

}  // namespace

StinespringTriple dilate(const MultilinearMap& f, const DilateOptions& opts) {
  const GramData gd = gram_matrix(f, {.check_preconditions = false, .tol = opts.tol});
  const int td = gd.tensor_dim;
  const int vd = f.domain.vec_dim;
  const int N = f.codomain.dim;
  const int L = f.codomain.levels();

  if (!gd.is_psd(opts.tol))
    throw NotAdmissibleError("dilate: Gram matrix not PSD within tolerance (min eig " +
                             std::to_string(gd.min_eig()) + ")");

  std::vector<int> perm(td), inv(td);
  std::iota(perm.begin(), perm.end(), 0);
  if (opts.tensor_permutation_seed != 0) {
    Rng rng(opts.tensor_permutation_seed);
    for (int i = td - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  }
  for (int q = 0; q < td; ++q) inv[perm[q]] = q;

  Matrix G(td, td);
  for (int s = 0; s < td; ++s)
    for (int t = 0; t < td; ++t) G(s, t) = gd.G(perm[s], perm[t]);

  Eigen::SelfAdjointEigenSolver<Matrix> es(G);
  const RealVector lam = es.eigenvalues();
  const Matrix U = es.eigenvectors();
  const double lam_max = std::max(lam(td - 1), 0.0);
  const double cutoff = opts.tol_rank * lam_max;

  int r = 0;
  for (int i = 0; i < td; ++i)
    if (lam(i) > cutoff) ++r;
  const int kd = td - r;  // kernel dimension
  const Matrix Uk = U.rightCols(r);
  const Matrix K = U.leftCols(kd);
  RealVector lam_k = lam.tail(r);
  RealVector sq = lam_k.cwiseSqrt();
  Matrix F0 = sq.asDiagonal() * Uk.adjoint();  // r x td

  StinespringTriple t;
  t.domain = f.domain;
  t.codomain = f.codomain;
  t.k = f.k;
  t.m = f.m;
  t.alpha_of = f.alpha_of;
  t.dim = r;
  t.residuals.gram_asymmetry = gd.asymmetry;
  t.residuals.gram_min_eig = gd.min_eig();

  // Slot actions, kernel-preservation audit, and raw rep lifts.
  const double audit_tol = opts.tol_well_defined * std::sqrt(std::max(lam_max, 0.0));
  std::vector<std::vector<SlotAction>> acts(f.m);
  std::vector<std::vector<Matrix>> reps0(f.m);
  double worst_audit = 0.0;
  for (int p = 0; p < f.m; ++p) {
    acts[p].reserve(vd);
    reps0[p].reserve(vd);
    for (int i = 0; i < vd; ++i) {
      acts[p].push_back(slot_action(gd, perm, inv, p, i));
      const auto& act = acts[p].back();
      if (kd > 0 && r > 0) {
        const Matrix leak = F0 * apply_action(act, K);
        const double resid = spectral_norm(leak);
        worst_audit = std::max(worst_audit, resid);
        if (resid > audit_tol)
          throw ConstructionError(
              p + 1, i,
              "dilate: slot action does not preserve the Gram kernel (slot " +
                  std::to_string(p + 1) + ", basis " + std::to_string(i) +
                  ", residual " + std::to_string(resid) + ")");
      }
      // Least-squares lift in the eigenbasis: sqrt(L)-conjugation.
      Matrix M = Uk.adjoint() * apply_action(acts[p][i], Uk);
      for (int a = 0; a < r; ++a)
        for (int b = 0; b < r; ++b) M(a, b) *= sq(a) / sq(b);
      reps0[p].push_back(std::move(M));
    }
  }
  t.residuals.well_definedness = worst_audit;

  // Flag-adapted orthonormal basis, level by level over new h-ranges.
  const double tau_flag = 0.5 * std::sqrt(cutoff);
  Matrix Q(r, 0);
  t.flag.assign(L, 0);
  int prev_cut = 0;
  for (int level = 1; level <= L; ++level) {
    const int cut = f.codomain.level_dim(level);
    std::vector<int> cols;
    for (int q = 0; q < td; ++q) {
      const int h = perm[q] % N;
      if (h >= prev_cut && h < cut) cols.push_back(q);
    }
    prev_cut = cut;
    if (r > 0 && !cols.empty()) {
      Matrix Mnew(r, static_cast<int>(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c) Mnew.col(c) = F0.col(cols[c]);
      Matrix R = Mnew - Q * (Q.adjoint() * Mnew);
      R -= Q * (Q.adjoint() * R);
      Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeThinU);
      const auto& sv = svd.singularValues();
      int add = 0;
      while (add < sv.size() && sv(add) > tau_flag) ++add;
      if (add > 0) {
        Matrix Qn(r, Q.cols() + add);
        if (Q.cols() > 0) Qn.leftCols(Q.cols()) = Q;
        Qn.rightCols(add) = svd.matrixU().leftCols(add);
        Q = std::move(Qn);
      }
    }
    t.flag[level - 1] = static_cast<int>(Q.cols());
  }
  if (static_cast<int>(Q.cols()) != r)
    throw InconsistencyError("dilate: flag basis rank disagrees with Gram rank");

  // Rotate into the flag-adapted coordinates.
  Matrix F = Q.adjoint() * F0;
  t.reps.assign(f.m, {});
  for (int p = 0; p < f.m; ++p) {
    t.reps[p].reserve(vd);
    for (int i = 0; i < vd; ++i)
      t.reps[p].push_back(Q.adjoint() * reps0[p][i] * Q);
  }

  // V = F applied to the unit-tensor embedding of H.
  t.V = Matrix::Zero(r, N);
  {
    std::vector<int> slots(f.m);
    for (int q = 0; q < td; ++q) {
      int h = 0;
      gd.tensor_at(perm[q], slots, h);
      bool diag = true;
      for (int s : slots)
        if (!f.domain.is_diagonal_unit(s)) diag = false;
      if (diag) t.V.col(h) += F.col(q);
    }
  }

  // Embed back in the natural tensor enumeration.
  t.embed = Matrix(r, td);
  for (int nat = 0; nat < td; ++nat) t.embed.col(nat) = F.col(inv[nat]);

  t.residuals.reconstruction = verify_dilation(f, t);
  const TripleChecks checks = validate_triple(t);
  t.residuals.representation = checks.representation;
  t.residuals.commutation = checks.commutation;
  t.residuals.flag_leak = std::max(checks.flag_leak, checks.v_leak);
  t.residuals.contractivity = checks.contractivity;
  t.residuals.v_norm = checks.v_norm;
  return t;
}

Matrix tuple_product_rep(const StinespringTriple& t, std::span<const int> ktuple) {
  std::vector<int> args(t.m);
  bool zero = false;
  if (t.k % 2 == 1) {
    const int mid = t.m - 1;
    args[0] = ktuple[mid];
    for (int p = 1; p < t.m && !zero; ++p) {
      const auto prod = t.domain.product_index(ktuple[mid - p], ktuple[mid + p]);
      if (!prod) zero = true;
      else args[p] = *prod;
    }
  } else {
    for (int p = 0; p < t.m && !zero; ++p) {
      const auto prod = t.domain.product_index(ktuple[t.m - 1 - p], ktuple[t.m + p]);
      if (!prod) zero = true;
      else args[p] = *prod;
    }
  }
  if (zero) return Matrix::Zero(t.dim, t.dim);
  return t.product_rep(args);
}

Matrix reconstruct_value(const StinespringTriple& t, std::span<const int> ktuple) {
  return t.V.adjoint() * tuple_product_rep(t, ktuple) * t.V;
}

double verify_dilation(const MultilinearMap& f, const StinespringTriple& t) {
  if (!(f.domain == t.domain) || !(f.codomain == t.codomain) || f.k != t.k ||
      f.alpha_of != t.alpha_of)
    throw MismatchError("verify_dilation: map and triple shapes differ");
  double worst = 0.0;
  for (int flat = 0; flat < f.tuple_count(); ++flat) {
    const auto tuple = f.tuple_at(flat);
    worst = std::max(worst,
                     spectral_norm(f.values[flat] - reconstruct_value(t, tuple)));
  }
  return worst;
}

double TripleChecks::worst() const {
  double w = representation;
  w = std::max(w, commutation);
  w = std::max(w, flag_leak);
  w = std::max(w, contractivity);
  w = std::max(w, v_norm);
  w = std::max(w, v_leak);
  return w;
}

TripleChecks validate_triple(const StinespringTriple& t, std::uint64_t seed,
                             int samples) {
  TripleChecks out;
  const int vd = t.domain.vec_dim;
  const int r = t.dim;
  const int L = t.codomain.levels();
  const Matrix id = Matrix::Identity(r, r);

  for (int p = 0; p < t.m; ++p) {
    // unital: the diagonal units sum to the identity
    Matrix unit = Matrix::Zero(r, r);
    for (int i = 0; i < vd; ++i)
      if (t.domain.is_diagonal_unit(i)) unit += t.reps[p][i];
    out.representation = std::max(out.representation, spectral_norm(unit - id));
    for (int i = 0; i < vd; ++i) {
      // star
      out.representation = std::max(
          out.representation,
          spectral_norm(t.reps[p][i].adjoint() - t.reps[p][t.domain.adjoint_index(i)]));
      // multiplicative
      for (int j = 0; j < vd; ++j) {
        const auto prod = t.domain.product_index(i, j);
        const Matrix expect = prod ? t.reps[p][*prod] : Matrix(Matrix::Zero(r, r));
        out.representation = std::max(
            out.representation, spectral_norm(t.reps[p][i] * t.reps[p][j] - expect));
      }
      // commuting slots
      for (int q = p + 1; q < t.m; ++q)
        for (int j = 0; j < vd; ++j)
          out.commutation = std::max(
              out.commutation,
              spectral_norm(t.reps[p][i] * t.reps[q][j] - t.reps[q][j] * t.reps[p][i]));
    }
  }

  // flag containment of reps and V, and local contractivity
  Rng rng(seed);
  for (int level = 1; level <= L; ++level) {
    const int cut = t.level_rank(level);
    const int alpha = t.alpha_of[level - 1];
    for (int p = 0; p < t.m; ++p) {
      for (int i = 0; i < vd; ++i) {
        const Matrix& rep = t.reps[p][i];
        const double up = rep.topRightCorner(cut, r - cut).norm();
        const double lo = rep.bottomLeftCorner(r - cut, cut).norm();
        out.flag_leak = std::max(out.flag_leak, std::hypot(up, lo));
        const double corner = spectral_norm(rep.topLeftCorner(cut, cut));
        const double bound = (t.domain.basis_at(i).block < alpha) ? 1.0 : 0.0;
        out.contractivity = std::max(out.contractivity, corner - bound);
      }
      for (int s = 0; s < samples; ++s) {
        AlgebraElement x = zero_element(t.domain);
        for (auto& blk : x.blocks)
          for (Eigen::Index a = 0; a < blk.rows(); ++a)
            for (Eigen::Index b = 0; b < blk.cols(); ++b) blk(a, b) = rng.cnormal();
        const Matrix rep = t.rep_apply(p, x);
        const double corner = spectral_norm(rep.topLeftCorner(cut, cut));
        out.contractivity =
            std::max(out.contractivity, corner - seminorm(x, alpha));
      }
    }
    const int hcut = t.codomain.level_dim(level);
    if (r - cut > 0)
      out.v_leak =
          std::max(out.v_leak, t.V.bottomLeftCorner(r - cut, hcut).norm());
  }
  out.contractivity = std::max(out.contractivity, 0.0);
  out.v_norm = std::max(0.0, spectral_norm(t.V) - 1.0);
  out.unit_defect = spectral_norm(Matrix(t.V.adjoint() * t.V) -
                                  Matrix::Identity(t.codomain.dim, t.codomain.dim));
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Columns prod_p pi_p(e_{i_p}) V f_h for all basis m-tuples and the given
/// h-range, in a fixed deterministic order (m-tuple major, h minor).
Matrix spanning_columns(const StinespringTriple& t, int h_begin, int h_end) {
  const int vd = t.domain.vec_dim;
  int mcount = 1;
  for (int p = 0; p < t.m; ++p) mcount *= vd;
  Matrix X(t.dim, mcount * (h_end - h_begin));
  std::vector<int> mtuple(t.m, 0);
  for (int mc = 0; mc < mcount; ++mc) {
    int rem = mc;
    for (int p = t.m - 1; p >= 0; --p) {
      mtuple[p] = rem % vd;
      rem /= vd;
    }
    const Matrix P = t.product_rep(mtuple);
    for (int h = h_begin; h < h_end; ++h)
      X.col(mc * (h_end - h_begin) + (h - h_begin)) = P * t.V.col(h);
  }
  return X;
}

}  // namespace

Matrix spanning_matrix(const StinespringTriple& t) {
  return spanning_columns(t, 0, t.codomain.dim);
}

namespace {

int numerical_rank(const Matrix& X, double tau) {
  if (X.rows() == 0 || X.cols() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(X);
  const auto& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv(rank) > tau) ++rank;
  return rank;
}

}  // namespace

bool is_minimal(const StinespringTriple& t, double rank_tol) {
  const Matrix Xtop = spanning_columns(t, 0, t.codomain.dim);
  const double scale = spectral_norm(Xtop);
  const double tau = rank_tol * std::max(scale, 1e-300);
  int prev = 0;
  for (int level = 1; level <= t.codomain.levels(); ++level) {
    const int cut = t.codomain.level_dim(level);
    (void)prev;
    const Matrix X = spanning_columns(t, 0, cut);
    if (numerical_rank(X, tau) != t.level_rank(level)) return false;
    prev = cut;
  }
  return true;
}

StinespringTriple minimize(const StinespringTriple& t, double rank_tol) {
  const int r = t.dim;
  const Matrix Xtop = spanning_columns(t, 0, t.codomain.dim);
  const double tau = rank_tol * std::max(spectral_norm(Xtop), 1e-300);
  Matrix W(r, 0);
  std::vector<int> cuts(t.codomain.levels(), 0);
  int prev = 0;
  for (int level = 1; level <= t.codomain.levels(); ++level) {
    const int cut = t.codomain.level_dim(level);
    Matrix Xnew = spanning_columns(t, prev, cut);
    prev = cut;
    if (r == 0 || Xnew.cols() == 0) {
      cuts[level - 1] = static_cast<int>(W.cols());
      continue;
    }
    Matrix R = Xnew - W * (W.adjoint() * Xnew);
    R -= W * (W.adjoint() * R);
    Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    int add = 0;
    while (add < sv.size() && sv(add) > tau) ++add;
    if (add > 0) {
      Matrix Wn(r, W.cols() + add);
      if (W.cols() > 0) Wn.leftCols(W.cols()) = W;
      Wn.rightCols(add) = svd.matrixU().leftCols(add);
      W = std::move(Wn);
    }
    cuts[level - 1] = static_cast<int>(W.cols());
  }

  StinespringTriple s;
  s.domain = t.domain;
  s.codomain = t.codomain;
  s.k = t.k;
  s.m = t.m;
  s.alpha_of = t.alpha_of;
  s.dim = static_cast<int>(W.cols());
  s.flag = std::move(cuts);
  s.V = W.adjoint() * t.V;
  s.reps.assign(t.m, {});
  for (int p = 0; p < t.m; ++p) {
    s.reps[p].reserve(t.domain.vec_dim);
    for (int i = 0; i < t.domain.vec_dim; ++i)
      s.reps[p].push_back(W.adjoint() * t.reps[p][i] * W);
  }
  s.embed = (t.embed.size() > 0) ? Matrix(W.adjoint() * t.embed)
                                 : Matrix::Zero(s.dim, 0);
  s.residuals = t.residuals;
  const TripleChecks checks = validate_triple(s);
  s.residuals.representation = checks.representation;
  s.residuals.commutation = checks.commutation;
  s.residuals.flag_leak = std::max(checks.flag_leak, checks.v_leak);
  s.residuals.contractivity = checks.contractivity;
  s.residuals.v_norm = checks.v_norm;
  return s;
}

UnitaryEquivalence unitary_equivalence(const StinespringTriple& t1,
                                       const StinespringTriple& t2, double tol) {
  if (!(t1.domain == t2.domain) || !(t1.codomain == t2.codomain) || t1.k != t2.k ||
      t1.alpha_of != t2.alpha_of)
    throw MismatchError("unitary_equivalence: triples have different shapes");
  if (!is_minimal(t1) || !is_minimal(t2))
    throw PreconditionError("unitary_equivalence: both triples must be minimal");
  if (t1.flag != t2.flag)
    throw InconsistencyError(
        "unitary_equivalence: flag dimensions differ; triples do not dilate the "
        "same map");

  const Matrix X1 = spanning_columns(t1, 0, t1.codomain.dim);
  const Matrix X2 = spanning_columns(t2, 0, t2.codomain.dim);
  UnitaryEquivalence eq;
  eq.U = X2 * pseudo_inverse(X1);

  const double scale = std::max({spectral_norm(X1), spectral_norm(X2), 1.0});
  eq.correspondence = spectral_norm(eq.U * X1 - X2) / scale;
  const Matrix idr = Matrix::Identity(t1.dim, t1.dim);
  eq.unitarity = std::max(spectral_norm(Matrix(eq.U.adjoint() * eq.U) - idr),
                          spectral_norm(Matrix(eq.U * eq.U.adjoint()) - idr));
  eq.v_residual = spectral_norm(eq.U * t1.V - t2.V);
  for (int p = 0; p < t1.m; ++p)
    for (int i = 0; i < t1.domain.vec_dim; ++i)
      eq.intertwine = std::max(
          eq.intertwine,
          spectral_norm(eq.U * t1.reps[p][i] - t2.reps[p][i] * eq.U));
  for (int level = 1; level <= t1.codomain.levels(); ++level) {
    const int c1 = t1.level_rank(level);
    const int c2 = t2.level_rank(level);
    if (t2.dim - c2 > 0 && c1 > 0)
      eq.flag_leak =
          std::max(eq.flag_leak, eq.U.bottomLeftCorner(t2.dim - c2, c1).norm());
  }

  if (eq.correspondence > tol || eq.unitarity > tol)
    throw InconsistencyError(
        "unitary_equivalence: triples are not dilations of the same map "
        "(correspondence " +
        std::to_string(eq.correspondence) + ", unitarity " +
        std::to_string(eq.unitarity) + ")");
  if (eq.v_residual > tol || eq.intertwine > tol || eq.flag_leak > tol)
    throw InconsistencyError("unitary_equivalence: certification failed");
  return eq;
}

}  // namespace locp
