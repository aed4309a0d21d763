#include "locp/workbench.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <array>
#include <numeric>

namespace locp {

std::string kind_name(InstanceSpec::Kind k) {
  switch (k) {
    case InstanceSpec::Kind::Dilated: return "dilated";
    case InstanceSpec::Kind::PlantedPair: return "planted-pair";
    case InstanceSpec::Kind::Adversarial: return "adversarial";
  }
  throw IoError("unknown instance kind");
}

InstanceSpec::Kind kind_from_name(const std::string& name) {
  if (name == "dilated") return InstanceSpec::Kind::Dilated;
  if (name == "planted-pair") return InstanceSpec::Kind::PlantedPair;
  if (name == "adversarial") return InstanceSpec::Kind::Adversarial;
  throw IoError("unknown instance kind '" + name + "'");
}

namespace {

struct Leg {
  int block = 0;
  int entry = 1;  ///< first flag level whose subspace contains this copy
};

struct SlotSpace {
  std::vector<Leg> legs;
  int dim = 0;
  std::vector<int> basis_entry;  ///< per coordinate
  std::vector<int> basis_block;
  std::vector<int> basis_row;  ///< row inside the block copy

  void rebuild(const BlockAlgebra& a) {
    std::stable_sort(legs.begin(), legs.end(),
                     [](const Leg& x, const Leg& y) { return x.entry < y.entry; });
    dim = 0;
    basis_entry.clear();
    basis_block.clear();
    basis_row.clear();
    for (const Leg& leg : legs) {
      for (int row = 0; row < a.block_dims[leg.block]; ++row) {
        basis_entry.push_back(leg.entry);
        basis_block.push_back(leg.block);
        basis_row.push_back(row);
        ++dim;
      }
    }
  }

  int dim_up_to(const BlockAlgebra& a, int level) const {
    int s = 0;
    for (const Leg& leg : legs)
      if (leg.entry <= level) s += a.block_dims[leg.block];
    return s;
  }
};

Matrix haar_unitary(int n, Rng& rng) {
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = rng.cnormal();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// sigma(e^b_{uv}) acting copy-wise on the slot space.
Matrix slot_rep(const SlotSpace& s, const BlockAlgebra& a, int basis) {
  const auto ref = a.basis_at(basis);
  Matrix out = Matrix::Zero(s.dim, s.dim);
  int offset = 0;
  for (const Leg& leg : s.legs) {
    const int w = a.block_dims[leg.block];
    if (leg.block == ref.block) out(offset + ref.row, offset + ref.col) = 1.0;
    offset += w;
  }
  return out;
}

}  // namespace

DilatedInstance random_dilated_map(const InstanceSpec& spec) {
  const BlockAlgebra a = make_block_algebra(spec.block_dims);
  const QuantizedDomain d = make_quantized_domain(spec.codomain_dim, spec.flag);
  const std::vector<int> alpha =
      spec.alpha_of.empty() ? default_alpha_of(a, d) : spec.alpha_of;
  const int k = spec.k;
  const int m = (k + 1) / 2;
  const int L = d.levels();
  const int N = d.dim;
  const int vd = a.vec_dim;
  Rng rng(spec.seed);

  // Tensor legs per slot: one level-1 copy each, random extras within the
  // budget, then forced coverage so an isometric V fits when requested.
  std::vector<SlotSpace> slots(m);
  for (auto& s : slots) {
    s.legs.push_back({static_cast<int>(rng.below(alpha[0])), 1});
    const int extras = static_cast<int>(rng.below(3));
    for (int e = 0; e < extras; ++e) {
      const int lev = 1 + static_cast<int>(rng.below(L));
      const Leg leg{static_cast<int>(rng.below(alpha[lev - 1])), lev};
      if (s.dim_up_to(a, L) + a.block_dims[leg.block] <= spec.leg_budget)
        s.legs.push_back(leg);
    }
  }
  if (spec.unital) {
    // V columns for level lev live in the lev segment of the tensor basis,
    // so each segment needs room for the new codomain coordinates.
    for (int lev = 1; lev <= L; ++lev) {
      auto segment = [&] {
        long long above = 1;
        long long below = lev == 1 ? 0 : 1;
        for (const auto& s : slots) {
          above *= s.dim_up_to(a, lev);
          if (lev > 1) below *= s.dim_up_to(a, lev - 1);
        }
        return above - below;
      };
      const int need =
          d.level_dim(lev) - (lev == 1 ? 0 : d.level_dim(lev - 1));
      while (segment() < need) {
        int target = 0;
        for (int p = 1; p < m; ++p)
          if (slots[p].dim_up_to(a, lev) < slots[target].dim_up_to(a, lev))
            target = p;
        int best = 0;
        for (int b = 1; b < alpha[lev - 1]; ++b)
          if (a.block_dims[b] < a.block_dims[best]) best = b;
        slots[target].legs.push_back({best, lev});
      }
    }
  }
  for (auto& s : slots) s.rebuild(a);

  // Per-slot reps, conjugated by a random flag-preserving unitary
  // (block-diagonal across the entry-level segments).
  std::vector<std::vector<Matrix>> sig(m);
  for (int p = 0; p < m; ++p) {
    Matrix u = Matrix::Zero(slots[p].dim, slots[p].dim);
    int start = 0;
    while (start < slots[p].dim) {
      int stop = start;
      while (stop < slots[p].dim &&
             slots[p].basis_entry[stop] == slots[p].basis_entry[start])
        ++stop;
      u.block(start, start, stop - start, stop - start) =
          haar_unitary(stop - start, rng);
      start = stop;
    }
    sig[p].reserve(vd);
    for (int i = 0; i < vd; ++i)
      sig[p].push_back(u * slot_rep(slots[p], a, i) * u.adjoint());
  }

  // Tensor space, basis ordered by entry level so the flag is a coordinate
  // prefix at every level.
  int r = 1;
  for (const auto& s : slots) r *= s.dim;
  std::vector<std::vector<int>> multi(r, std::vector<int>(m));
  std::vector<int> entry(r);
  for (int j = 0; j < r; ++j) {
    int rem = j;
    for (int p = m - 1; p >= 0; --p) {
      multi[j][p] = rem % slots[p].dim;
      rem /= slots[p].dim;
    }
    int lev = 1;
    for (int p = 0; p < m; ++p)
      lev = std::max(lev, slots[p].basis_entry[multi[j][p]]);
    entry[j] = lev;
  }
  std::vector<int> order(r);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return entry[x] < entry[y]; });

  StinespringTriple gt;
  gt.domain = a;
  gt.codomain = d;
  gt.k = k;
  gt.m = m;
  gt.alpha_of = alpha;
  gt.dim = r;
  gt.flag.assign(L, 0);
  for (int lev = 1; lev <= L; ++lev) {
    int c = 0;
    for (int j = 0; j < r; ++j)
      if (entry[order[j]] <= lev) ++c;
    gt.flag[lev - 1] = c;
  }

  gt.reps.assign(m, {});
  for (int p = 0; p < m; ++p) {
    gt.reps[p].reserve(vd);
    for (int i = 0; i < vd; ++i) {
      Matrix rep = Matrix::Zero(r, r);
      for (int x = 0; x < r; ++x)
        for (int y = 0; y < r; ++y) {
          bool same = true;
          for (int q = 0; q < m && same; ++q)
            if (q != p && multi[order[x]][q] != multi[order[y]][q]) same = false;
          if (same)
            rep(x, y) = sig[p][i](multi[order[x]][p], multi[order[y]][p]);
        }
      gt.reps[p].push_back(std::move(rep));
    }
  }

  // Connecting contraction: columns for level lev are supported on the lev
  // segment of the tensor basis only. The reps preserve the segments, so the
  // tabulated values commute with the flag projections exactly; isometric per
  // level when unital, otherwise a strict contraction of norm 0.7.
  gt.V = Matrix::Zero(r, N);
  int prev = 0;
  for (int lev = 1; lev <= L; ++lev) {
    const int cut = d.level_dim(lev);
    const int seglo = lev == 1 ? 0 : gt.flag[lev - 2];
    const int seghi = gt.flag[lev - 1];
    for (int h = prev; h < cut; ++h) {
      Vector col = Vector::Zero(r);
      for (int j = seglo; j < seghi; ++j) col(j) = rng.cnormal();
      if (spec.unital) {
        for (int pass = 0; pass < 2; ++pass)
          for (int h2 = prev; h2 < h; ++h2)
            col -= gt.V.col(h2).dot(col) * gt.V.col(h2);
        col /= col.norm();
      }
      gt.V.col(h) = col;
    }
    prev = cut;
  }
  if (!spec.unital) gt.V *= 0.7 / spectral_norm(gt.V);

  // Tabulate the map from the construction and keep it as ground truth.
  int count = 1;
  for (int p = 0; p < k; ++p) count *= vd;
  std::vector<Matrix> values;
  values.reserve(count);
  std::vector<int> tuple(k);
  for (int flat = 0; flat < count; ++flat) {
    int rem = flat;
    for (int p = k - 1; p >= 0; --p) {
      tuple[p] = rem % vd;
      rem /= vd;
    }
    values.push_back(reconstruct_value(gt, tuple));
  }

  int td = N;
  for (int p = 0; p < m; ++p) td *= vd;
  gt.embed = Matrix(r, td);
  std::vector<int> tslots(m);
  for (int t = 0; t < td; ++t) {
    int rem = t;
    const int h = rem % N;
    rem /= N;
    for (int p = m - 1; p >= 0; --p) {
      tslots[p] = rem % vd;
      rem /= vd;
    }
    Vector v = gt.V.col(h);
    for (int p = m - 1; p >= 0; --p) v = gt.reps[p][tslots[p]] * v;
    gt.embed.col(t) = v;
  }

  DilatedInstance inst;
  inst.map = make_multilinear_map(a, d, k, alpha, std::move(values));
  inst.ground_truth = std::move(gt);
  inst.ground_truth.residuals.reconstruction =
      verify_dilation(inst.map, inst.ground_truth);
  const TripleChecks checks = validate_triple(inst.ground_truth);
  inst.ground_truth.residuals.representation = checks.representation;
  inst.ground_truth.residuals.commutation = checks.commutation;
  inst.ground_truth.residuals.flag_leak = std::max(checks.flag_leak, checks.v_leak);
  inst.ground_truth.residuals.contractivity = checks.contractivity;
  inst.ground_truth.residuals.v_norm = checks.v_norm;
  return inst;
}

PlantedPairInstance planted_pair(const InstanceSpec& spec) {
  PlantedPairInstance out;
  out.phi = random_dilated_map(spec).map;
  out.phi_triple = dilate(out.phi);
  const CommutantBasis cb = commutant_basis(out.phi_triple);
  Rng rng(spec.seed ^ 0x5851f42d4c957f2dULL);
  out.delta0 = random_interval_element(cb, out.phi_triple.dim, rng, out.phi_triple);
  out.psi = map_from_operator(out.phi_triple, out.delta0);
  return out;
}

namespace {

AdversarialInstance transpose_map() {
  const BlockAlgebra a = make_block_algebra({2});
  const QuantizedDomain d = make_quantized_domain(2, {2});
  std::vector<Matrix> values;
  for (int row = 0; row < 2; ++row)
    for (int col = 0; col < 2; ++col) {
      Matrix v = Matrix::Zero(2, 2);
      v(col, row) = 1.0;  // transpose of the matrix unit
      values.push_back(std::move(v));
    }
  AdversarialInstance inst;
  inst.map = make_multilinear_map(a, d, 1, {1}, std::move(values));
  inst.defect = "transpose";
  return inst;
}

AdversarialInstance invariance_defect(const InstanceSpec& spec) {
  InstanceSpec base = spec;
  base.kind = InstanceSpec::Kind::Dilated;
  base.block_dims = {2};
  base.k = 2;
  base.alpha_of.clear();
  MultilinearMap f = random_dilated_map(base).map;
  // e01 e10 = e00 but e10 e00 = e10: bumping the (e01, e10) value breaks the
  // factor-sliding identity while the bump itself is reversal-symmetric.
  const int e01 = f.domain.basis_index(0, 0, 1);
  const int e10 = f.domain.basis_index(0, 1, 0);
  const std::array<int, 2> tuple{e01, e10};
  f.values[f.flat_index(tuple)] +=
      1e-3 * Matrix::Identity(f.codomain.dim, f.codomain.dim);
  AdversarialInstance inst;
  inst.map = std::move(f);
  inst.defect = "invariance";
  return inst;
}

/// k = 3 over a single 2x2 block with scalar codomain. The Gram matrix is
/// I_2 tensor M for an 8x8 window M indexed by (middle row, adjointed first
/// slot), so adding eps |z><z| to M keeps the Gram PSD while rotating part of
/// its kernel; the slot-2 left actions then fail to preserve the kernel and
/// dilate() must refuse. A separate imaginary bump on a self-paired tuple
/// breaks phi = phi* without touching the Hermitized Gram.
AdversarialInstance symmetry_defect(const InstanceSpec& spec) {
  InstanceSpec base = spec;
  base.kind = InstanceSpec::Kind::Dilated;
  base.block_dims = {2};
  base.codomain_dim = 1;
  base.flag = {1};
  base.k = 3;
  base.alpha_of = {1};
  base.unital = true;

  for (int attempt = 0; attempt < 16; ++attempt) {
    base.seed = spec.seed + 131 * attempt;
    MultilinearMap f = random_dilated_map(base).map;
    const BlockAlgebra& a = f.domain;
    const int vd = a.vec_dim;  // 4

    // Window M over (b, beta): M[(b,beta),(c,gamma)] = value(beta*, e_bc, gamma).
    const int w = 2 * vd;
    Matrix M(w, w);
    for (int b = 0; b < 2; ++b)
      for (int beta = 0; beta < vd; ++beta)
        for (int c = 0; c < 2; ++c)
          for (int gamma = 0; gamma < vd; ++gamma) {
            const std::array<int, 3> tuple{a.adjoint_index(beta),
                                           a.basis_index(0, b, c), gamma};
            M(b * vd + beta, c * vd + gamma) = f.values[f.flat_index(tuple)](0, 0);
          }
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(M));
    const Vector kern = es.eigenvectors().col(0);
    const Vector range = es.eigenvectors().col(w - 1);
    Vector z = kern + 0.5 * range;
    z /= z.norm();

    MultilinearMap g = f;
    const double eps = 1e-2;
    for (int b = 0; b < 2; ++b)
      for (int beta = 0; beta < vd; ++beta)
        for (int c = 0; c < 2; ++c)
          for (int gamma = 0; gamma < vd; ++gamma) {
            const std::array<int, 3> tuple{a.adjoint_index(beta),
                                           a.basis_index(0, b, c), gamma};
            g.values[g.flat_index(tuple)](0, 0) +=
                eps * std::conj(z(b * vd + beta)) * z(c * vd + gamma);
          }
    // phi != phi*: imaginary bump on the self-paired tuple (e00, e00, e00).
    const int e00 = a.basis_index(0, 0, 0);
    const std::array<int, 3> fixed{e00, e00, e00};
    g.values[g.flat_index(fixed)](0, 0) += Complex(0.0, 1e-3);

    if (!is_symmetric(g).failed()) continue;
    try {
      (void)dilate(g);
    } catch (const ConstructionError&) {
      AdversarialInstance inst;
      inst.map = std::move(g);
      inst.defect = "symmetry";
      return inst;
    } catch (const MathError&) {
      continue;  // wrong failure mode; retry with a fresh base
    }
  }
  throw InconsistencyError(
      "symmetry defect: no attempt produced the intended construction failure");
}

}  // namespace

AdversarialInstance adversarial_map(const InstanceSpec& spec) {
  if (spec.defect == "transpose") return transpose_map();
  if (spec.defect == "invariance") return invariance_defect(spec);
  if (spec.defect == "symmetry") return symmetry_defect(spec);
  throw IoError("unknown adversarial defect '" + spec.defect + "'");
}

MultilinearMap generate_instance(const InstanceSpec& spec) {
  switch (spec.kind) {
    case InstanceSpec::Kind::Dilated: return random_dilated_map(spec).map;
    case InstanceSpec::Kind::PlantedPair: return planted_pair(spec).phi;
    case InstanceSpec::Kind::Adversarial: return adversarial_map(spec).map;
  }
  throw IoError("unknown instance kind");
}

Matrix brute_force_gram(const MultilinearMap& f) {
  const BlockAlgebra& a = f.domain;
  const int N = f.codomain.dim;
  const int vd = a.vec_dim;
  const int m = f.m;
  int td = N;
  for (int p = 0; p < m; ++p) td *= vd;

  const bool odd = (f.k % 2 == 1);
  Matrix G(td, td);
  std::vector<int> srow(m), scol(m);
  for (int s = 0; s < td; ++s) {
    int rem = s;
    const int hs = rem % N;
    rem /= N;
    for (int p = m - 1; p >= 0; --p) {
      srow[p] = rem % vd;
      rem /= vd;
    }
    for (int t = 0; t < td; ++t) {
      rem = t;
      const int ht = rem % N;
      rem /= N;
      for (int p = m - 1; p >= 0; --p) {
        scol[p] = rem % vd;
        rem /= vd;
      }
      std::vector<AlgebraElement> args;
      for (int p = m - 1; p >= 1; --p)
        args.push_back(adjoint(basis_element(a, srow[p])));
      if (odd) {
        args.push_back(adjoint(basis_element(a, srow[0])) *
                       basis_element(a, scol[0]));
      } else {
        args.push_back(adjoint(basis_element(a, srow[0])));
        args.push_back(basis_element(a, scol[0]));
      }
      for (int p = 1; p < m; ++p) args.push_back(basis_element(a, scol[p]));
      const FlagOperator val = evaluate(f, args);
      G(s, t) = val.matrix(hs, ht);
    }
  }
  return G;
}

ChoiOracleResult choi_stinespring_oracle_k1(const MultilinearMap& f,
                                            double tol_rank) {
  if (f.k != 1)
    throw PreconditionError("choi_stinespring_oracle_k1 requires a 1-linear map");
  const BlockAlgebra& a = f.domain;
  const int N = f.codomain.dim;
  const int L = f.codomain.levels();

  std::vector<Matrix> choi;
  double lam_max = 0.0;
  for (int b = 0; b < a.levels(); ++b) {
    const int w = a.block_dims[b];
    Matrix c(w * N, w * N);
    for (int row = 0; row < w; ++row)
      for (int col = 0; col < w; ++col) {
        const Matrix& v = f.values[a.basis_index(b, row, col)];
        for (int h = 0; h < N; ++h)
          for (int h2 = 0; h2 < N; ++h2) c(row * N + h, col * N + h2) = v(h, h2);
      }
    c = hermitian_part(c);
    lam_max = std::max(lam_max, max_hermitian_eig(c));
    choi.push_back(std::move(c));
  }
  const double tau2 = 0.25 * tol_rank * lam_max;

  ChoiOracleResult out;
  out.dims.assign(L, 0);
  for (int lev = 1; lev <= L; ++lev) {
    const int cut = f.codomain.level_dim(lev);
    for (int b = 0; b < a.levels(); ++b) {
      const int w = a.block_dims[b];
      Matrix sub(w * cut, w * cut);
      for (int row = 0; row < w; ++row)
        for (int col = 0; col < w; ++col)
          sub.block(row * cut, col * cut, cut, cut) =
              choi[b].block(row * N, col * N, cut, cut);
      Eigen::SelfAdjointEigenSolver<Matrix> es(sub);
      int rank = 0;
      for (int j = 0; j < es.eigenvalues().size(); ++j)
        if (es.eigenvalues()(j) > tau2) ++rank;
      out.dims[lev - 1] += w * rank;
    }
  }

  // Kraus reconstruction per block at the top level.
  for (int b = 0; b < a.levels(); ++b) {
    const int w = a.block_dims[b];
    Eigen::SelfAdjointEigenSolver<Matrix> es(choi[b]);
    std::vector<Matrix> kraus;
    for (int j = 0; j < es.eigenvalues().size(); ++j) {
      if (es.eigenvalues()(j) <= tau2) continue;
      Matrix ks(N, w);
      for (int c = 0; c < w; ++c)
        for (int h = 0; h < N; ++h)
          ks(h, c) = std::sqrt(es.eigenvalues()(j)) *
                     es.eigenvectors()(c * N + h, j);
      kraus.push_back(std::move(ks));
    }
    for (int row = 0; row < w; ++row)
      for (int col = 0; col < w; ++col) {
        Matrix recon = Matrix::Zero(N, N);
        for (const Matrix& ks : kraus)
          recon += ks.col(row) * ks.col(col).adjoint();
        out.reconstruction =
            std::max(out.reconstruction,
                     spectral_norm(f.values[a.basis_index(b, row, col)] - recon));
      }
  }
  return out;
}

}  // namespace locp
