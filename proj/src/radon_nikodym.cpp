#include "locp/radon_nikodym.hpp"

#include <Eigen/Eigenvalues>

namespace locp {

bool dominates(const MultilinearMap& phi, const MultilinearMap& psi, double tol) {
  if (!phi.same_shape(psi)) throw MismatchError("dominates: maps have different shapes");
  if (is_symmetric(psi, tol).failed() || is_invariant(psi, tol).failed()) return false;
  const auto diff = map_sub(phi, psi);
  const auto gd = gram_matrix(diff, {.check_preconditions = false, .tol = tol});
  return gd.is_psd(tol);
}

Matrix connecting_contraction(const StinespringTriple& phi_t,
                              const StinespringTriple& psi_t, double tol) {
  if (!(phi_t.domain == psi_t.domain) || !(phi_t.codomain == psi_t.codomain) ||
      phi_t.k != psi_t.k || phi_t.alpha_of != psi_t.alpha_of)
    throw MismatchError("connecting_contraction: triples have different shapes");

  const Matrix X1 = spanning_matrix(phi_t);
  const Matrix X2 = spanning_matrix(psi_t);
  Matrix T = X2 * pseudo_inverse(X1);

  const double norm = spectral_norm(T);
  if (norm > 1.0 + tol)
    throw OrderError("connecting_contraction: ||T|| = " + std::to_string(norm) +
                     " exceeds 1; the first triple does not dominate the second");
  const double scale = std::max({spectral_norm(X1), spectral_norm(X2), 1.0});
  const double corr = spectral_norm(T * X1 - X2) / scale;
  if (corr > tol)
    throw InconsistencyError(
        "connecting_contraction: spanning correspondence residual " +
        std::to_string(corr));
  if (spectral_norm(T * phi_t.V - psi_t.V) > tol)
    throw InconsistencyError("connecting_contraction: T V_phi != V_psi");
  for (int p = 0; p < phi_t.m; ++p)
    for (int i = 0; i < phi_t.domain.vec_dim; ++i)
      if (spectral_norm(T * phi_t.reps[p][i] - psi_t.reps[p][i] * T) > tol)
        throw InconsistencyError("connecting_contraction: intertwining failed at slot " +
                                 std::to_string(p + 1) + ", basis " + std::to_string(i));
  for (int level = 1; level <= phi_t.codomain.levels(); ++level) {
    const int c1 = phi_t.level_rank(level);
    const int c2 = psi_t.level_rank(level);
    if (psi_t.dim - c2 > 0 && c1 > 0 &&
        T.bottomLeftCorner(psi_t.dim - c2, c1).norm() > tol)
      throw InconsistencyError("connecting_contraction: flag containment failed at level " +
                               std::to_string(level));
  }
  return T;
}

double commutant_defect(const StinespringTriple& t, const Matrix& T) {
  double worst = 0.0;
  for (int p = 0; p < t.m; ++p)
    for (int i = 0; i < t.domain.vec_dim; ++i)
      worst = std::max(worst,
                       spectral_norm(T * t.reps[p][i] - t.reps[p][i] * T));
  for (int level = 1; level <= t.codomain.levels(); ++level) {
    const int cut = t.level_rank(level);
    Matrix P = Matrix::Zero(t.dim, t.dim);
    P.topLeftCorner(cut, cut).setIdentity();
    worst = std::max(worst, spectral_norm(T * P - P * T));
  }
  return worst;
}

MultilinearMap map_from_operator(const StinespringTriple& t, const Matrix& T,
                                 double tol) {
  if (T.rows() != t.dim || T.cols() != t.dim)
    throw MismatchError("map_from_operator: operator size does not match the triple");
  const double defect = commutant_defect(t, T);
  if (defect > tol * (1.0 + spectral_norm(T)))
    throw NotInCommutantError("map_from_operator: commutant defect " +
                              std::to_string(defect));
  int count = 1;
  for (int p = 0; p < t.k; ++p) count *= t.domain.vec_dim;
  std::vector<Matrix> values;
  values.reserve(count);
  std::vector<int> tuple(t.k, 0);
  for (int flat = 0; flat < count; ++flat) {
    int rem = flat;
    for (int p = t.k - 1; p >= 0; --p) {
      tuple[p] = rem % t.domain.vec_dim;
      rem /= t.domain.vec_dim;
    }
    values.push_back(t.V.adjoint() * T * tuple_product_rep(t, tuple) * t.V);
  }
  return make_multilinear_map(t.domain, t.codomain, t.k, t.alpha_of,
                              std::move(values), tol);
}

RNCertificate rn_derivative_with(const MultilinearMap& phi,
                                 const StinespringTriple& phi_t,
                                 const MultilinearMap& psi,
                                 const StinespringTriple& psi_t, double tol) {
  if (!dominates(phi, psi, tol))
    throw OrderError("rn_derivative: the first map does not dominate the second");
  RNCertificate cert;
  cert.T = connecting_contraction(phi_t, psi_t, tol);
  cert.Delta = cert.T.adjoint() * cert.T;
  cert.contraction = std::max(0.0, spectral_norm(cert.T) - 1.0);
  cert.commutant = commutant_defect(phi_t, cert.Delta);
  const MultilinearMap back = map_from_operator(phi_t, cert.Delta, tol);
  cert.reconstruction = max_value_norm(map_sub(psi, back));
  return cert;
}

RNCertificate rn_derivative(const MultilinearMap& phi, const MultilinearMap& psi,
                            const RNOptions& opts) {
  if (!dominates(phi, psi, opts.tol))
    throw OrderError("rn_derivative: the first map does not dominate the second");
  const StinespringTriple phi_t = dilate(phi, opts.dilate);
  const StinespringTriple psi_t = dilate(psi, opts.dilate);
  return rn_derivative_with(phi, phi_t, psi, psi_t, opts.tol);
}

CommutantBasis commutant_basis(const StinespringTriple& t, double tol) {
  const int r = t.dim;
  CommutantBasis out;
  if (r == 0) return out;

  std::vector<Matrix> constraints;
  for (int p = 0; p < t.m; ++p)
    for (int i = 0; i < t.domain.vec_dim; ++i) constraints.push_back(t.reps[p][i]);
  for (int level = 1; level <= t.codomain.levels(); ++level) {
    Matrix P = Matrix::Zero(r, r);
    P.topLeftCorner(t.level_rank(level), t.level_rank(level)).setIdentity();
    constraints.push_back(std::move(P));
  }

  // vec is column-major: vec(TX) = (X^T kron I) vec T, vec(XT) = (I kron X) vec T.
  Matrix C = Matrix::Zero(r * r, r * r);
  for (const Matrix& X : constraints) {
    Matrix M = Matrix::Zero(r * r, r * r);
    for (int a = 0; a < r; ++a)
      for (int b = 0; b < r; ++b) {
        // (X^T kron I)(col b*r + a) entries
        for (int c = 0; c < r; ++c) {
          M(c * r + a, b * r + a) += X(b, c);
          M(b * r + c, b * r + a) -= X(c, a);
        }
      }
    C += M.adjoint() * M;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(C);
  const RealVector eig = es.eigenvalues();
  const double cutoff = tol * std::max(eig(r * r - 1), 1.0);
  for (int j = 0; j < r * r; ++j) {
    if (eig(j) > cutoff) break;
    Matrix B(r, r);
    for (int c = 0; c < r; ++c) B.col(c) = es.eigenvectors().col(j).segment(c * r, r);
    out.basis.push_back(std::move(B));
  }
  return out;
}

Matrix random_interval_element(const CommutantBasis& basis, int dim, Rng& rng,
                               const StinespringTriple& t, double tol) {
  Matrix H = Matrix::Zero(dim, dim);
  for (const Matrix& B : basis.basis) H += rng.cnormal() * B;
  H = hermitian_part(H);
  Matrix T = spectral_clip(H, 0.0, 1.0);
  const double defect = commutant_defect(t, T);
  if (defect > tol * (1.0 + spectral_norm(T)))
    throw InconsistencyError("random_interval_element: clipped element left the "
                             "commutant (defect " + std::to_string(defect) + ")");
  return T;
}

MapCheckReport order_interval_check(const MultilinearMap& phi,
                                    const OrderIntervalOptions& opts) {
  MapCheckReport report;
  report.property = "order-interval";
  report.params = Json{{"samples", opts.samples},
                       {"seed", opts.seed},
                       {"separation", opts.separation}};

  const StinespringTriple phi_t = dilate(phi);
  const CommutantBasis cb = commutant_basis(phi_t);
  Rng rng(opts.seed);
  double worst = 0.0;

  for (int s = 0; s < opts.samples; ++s) {
    const Matrix T2 = random_interval_element(cb, phi_t.dim, rng, phi_t);
    // A random element below T2: since 0 <= T2 <= I, any w (v T2 + (1-v) T2^2)
    // with v, w in [0, 1] stays in [0, T2]. A polynomial in T2 keeps the
    // commutant defect of the draw (a square root would amplify it near
    // vanishing eigenvalues).
    const double v = rng.uniform();
    const double w = rng.uniform();
    const Matrix T1 = w * (v * T2 + (1.0 - v) * T2 * T2);

    const MultilinearMap psi2 = map_from_operator(phi_t, T2);
    const MultilinearMap psi1 = map_from_operator(phi_t, T1);

    const auto fail = [&](const std::string& what, double resid) {
      report.verdict = Verdict::Fail;
      report.residual = resid;
      report.witness = Json{{"sample", s}, {"check", what}};
    };

    // affine in the operator
    const double lam = rng.uniform();
    const Matrix Tc = lam * T1 + (1.0 - lam) * T2;
    const MultilinearMap combo = map_from_operator(phi_t, Tc);
    const double affine = max_value_norm(map_sub(
        combo, map_add(map_scale(lam, psi1), map_scale(1.0 - lam, psi2))));
    worst = std::max(worst, affine);
    if (affine > opts.affine_tol) {
      fail("affine", affine);
      return report;
    }
    // monotone: T1 <= T2 <= I transports to psi1 <= psi2 <= phi
    if (!dominates(psi2, psi1, opts.tol)) {
      fail("monotone", 0.0);
      return report;
    }
    if (!dominates(phi, psi2, opts.tol)) {
      fail("upper", 0.0);
      return report;
    }
    // injective beyond the separation threshold
    const double gap = spectral_norm(T2 - T1);
    if (gap > opts.separation && max_value_norm(map_sub(psi2, psi1)) == 0.0) {
      fail("injective", gap);
      return report;
    }
    // derivative roundtrip: the certificate recovers T1
    const StinespringTriple psi1_t = dilate(psi1);
    const RNCertificate cert = rn_derivative_with(phi, phi_t, psi1, psi1_t, opts.tol);
    const double roundtrip = spectral_norm(cert.Delta - T1);
    worst = std::max(worst, roundtrip);
    if (roundtrip > opts.roundtrip_tol) {
      fail("roundtrip", roundtrip);
      return report;
    }
  }
  report.verdict = Verdict::InconclusivePass;
  report.residual = worst;
  return report;
}

}  // namespace locp
