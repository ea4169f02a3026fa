#pragma once

// Matrix geometry: Cartan and Jordan projections, the majorization order,
// Weyl-group orbits and Theta-hull support functions, and the space of
// positive-definite matrices with its vectorial distance, geodesics and
// midpoints.

#include <Eigen/Dense>
#include <numbers>
#include <set>

#include "common.hpp"

namespace ergopt {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerance on prefix sums used by every majorization check.
inline constexpr double kMajorizationTol = 1e-9;

/// Weakly decreasing real vector: an element of the positive chamber.
class ChamberVector {
 public:
  ChamberVector() = default;

  /// Accepts v if it is weakly decreasing up to tol, then stores it sorted.
  explicit ChamberVector(Vector v, double tol = 1e-12) : v_(std::move(v)) {
    for (Eigen::Index i = 1; i < v_.size(); ++i)
      require(v_[i] <= v_[i - 1] + tol, "vector is not in the positive chamber");
    sort_desc();
  }

  /// Canonical sort of an arbitrary vector into the chamber.
  static ChamberVector sorted(Vector v) {
    ChamberVector c;
    c.v_ = std::move(v);
    c.sort_desc();
    return c;
  }

  static ChamberVector zero(int d) { return sorted(Vector::Zero(d)); }

  int dim() const { return static_cast<int>(v_.size()); }
  double operator[](int i) const { return v_[i]; }
  const Vector& values() const { return v_; }
  double sum() const { return v_.sum(); }

  ChamberVector operator+(const ChamberVector& o) const {
    require(dim() == o.dim(), "dimension mismatch");
    return sorted(v_ + o.v_);
  }
  /// Multiplication by s >= 0 (stays in the chamber).
  ChamberVector scaled(double s) const {
    require(s >= 0, "chamber vectors scale by nonnegative factors");
    return sorted(v_ * s);
  }

  std::vector<double> to_std() const { return {v_.data(), v_.data() + v_.size()}; }

 private:
  void sort_desc() { std::sort(v_.data(), v_.data() + v_.size(), std::greater<>()); }
  Vector v_;
};

// ---------------------------------------------------------------------------
// projections

inline void require_square_finite(const Matrix& g) {
  require(g.rows() == g.cols() && g.rows() >= 1, "square matrix expected");
  if (!g.allFinite()) throw NumericalError("matrix has non-finite entries");
}

/// Log singular values, descending.
inline ChamberVector cartan(const Matrix& g) {
  require_square_finite(g);
  Eigen::JacobiSVD<Matrix> svd(g);
  Vector s = svd.singularValues();
  if (!(s[s.size() - 1] > 0) || !(s[s.size() - 1] > s[0] * 1e-300))
    throw NumericalError("matrix is singular");
  return ChamberVector::sorted(s.array().log().matrix());
}

namespace detail {
inline ChamberVector jordan_2x2(const Matrix& g, double log_abs_det) {
  const double a = g(0, 0), b = g(0, 1), c = g(1, 0), d = g(1, 1);
  const double half = 0.5 * (a - d);
  const double disc = half * half + b * c;
  Vector out(2);
  if (disc < 0) {
    out << 0.5 * log_abs_det, 0.5 * log_abs_det;
  } else {
    const double tr2 = 0.5 * (a + d);
    const double z1 = tr2 + std::copysign(std::sqrt(disc), tr2);
    if (z1 == 0) throw NumericalError("matrix is singular");
    const double l1 = std::log(std::abs(z1));
    out << l1, log_abs_det - l1;
  }
  return ChamberVector::sorted(out);
}
}  // namespace detail

/// Log moduli of eigenvalues, descending.
inline ChamberVector jordan(const Matrix& g) {
  require_square_finite(g);
  if (g.rows() == 1) {
    if (g(0, 0) == 0) throw NumericalError("matrix is singular");
    return ChamberVector::sorted(Vector::Constant(1, std::log(std::abs(g(0, 0)))));
  }
  if (g.rows() == 2) {
    const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    if (det == 0) throw NumericalError("matrix is singular");
    return detail::jordan_2x2(g, std::log(std::abs(det)));
  }
  Eigen::EigenSolver<Matrix> es(g, false);
  Vector m = es.eigenvalues().cwiseAbs();
  if (!(m.minCoeff() > 0)) throw NumericalError("matrix is singular");
  return ChamberVector::sorted(m.array().log().matrix());
}

// ---------------------------------------------------------------------------
// majorization

/// Worst prefix-sum slack of xi majorized by eta (both sorted decreasingly):
/// min over i<d of (eta_1+..+eta_i) - (xi_1+..+xi_i), and -|total difference|.
/// xi is majorized by eta iff the slack is >= -tolerance.
inline double majorization_slack(const Vector& eta, const Vector& xi) {
  require(eta.size() == xi.size(), "dimension mismatch in majorization");
  Vector a = eta, b = xi;
  std::sort(a.data(), a.data() + a.size(), std::greater<>());
  std::sort(b.data(), b.data() + b.size(), std::greater<>());
  double pa = 0, pb = 0, slack = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    pa += a[i];
    pb += b[i];
    if (i + 1 < a.size()) slack = std::min(slack, pa - pb);
  }
  slack = std::min(slack, -std::abs(pa - pb));
  return slack;
}

/// Answers "xi is majorized by eta", i.e. xi lies in the permutohedron co(W eta).
inline bool majorizes(const Vector& eta, const Vector& xi, double tol = kMajorizationTol) {
  return majorization_slack(eta, xi) >= -tol;
}
inline bool majorizes(const ChamberVector& eta, const ChamberVector& xi, double tol = kMajorizationTol) {
  return majorizes(eta.values(), xi.values(), tol);
}

/// (xi_1..xi_d) -> (-xi_d..-xi_1).
inline ChamberVector opposition(const ChamberVector& xi) {
  return ChamberVector::sorted(-xi.values().reverse());
}

// ---------------------------------------------------------------------------
// Theta sets and hulls

/// Subset of {1..d-1}; index i stands for the wall xi_i = xi_{i+1}.
class ThetaSet {
 public:
  ThetaSet() = default;
  ThetaSet(int dim, std::set<int> indices) : dim_(dim), idx_(std::move(indices)) {
    require(dim >= 1, "dimension must be >= 1");
    for (int i : idx_) require(i >= 1 && i <= dim - 1, "Theta index " + std::to_string(i) + " out of range");
  }
  static ThetaSet empty(int dim) { return ThetaSet(dim, {}); }
  static ThetaSet full(int dim) {
    std::set<int> s;
    for (int i = 1; i < dim; ++i) s.insert(i);
    return ThetaSet(dim, s);
  }

  int dim() const { return dim_; }
  const std::set<int>& indices() const { return idx_; }
  bool contains(int i) const { return idx_.count(i) != 0; }
  bool is_empty() const { return idx_.empty(); }
  bool is_full() const { return static_cast<int>(idx_.size()) == dim_ - 1; }

  /// Coordinate blocks (0-based [begin, end)) permuted by W_Theta.
  std::vector<std::pair<int, int>> blocks() const {
    std::vector<std::pair<int, int>> out;
    int begin = 0;
    for (int i = 1; i <= dim_; ++i) {
      if (i == dim_ || !contains(i)) {
        out.emplace_back(begin, i);
        begin = i;
      }
    }
    return out;
  }

  friend bool operator==(const ThetaSet&, const ThetaSet&) = default;

 private:
  int dim_ = 1;
  std::set<int> idx_;
};

/// Membership in the Theta-superchamber: xi_i >= xi_k whenever some j in
/// [i, k) is outside Theta.
inline bool in_superchamber(const Vector& xi, const ThetaSet& theta, double tol = 1e-12) {
  const auto blocks = theta.blocks();
  for (std::size_t b = 0; b + 1 < blocks.size(); ++b) {
    const double lo = xi.segment(blocks[b].first, blocks[b].second - blocks[b].first).minCoeff();
    const double hi = xi.segment(blocks[b + 1].first, xi.size() - blocks[b + 1].first).maxCoeff();
    if (lo < hi - tol) return false;
  }
  return true;
}

/// Support value in `direction` of co(W_Theta . points), W_Theta generated by
/// the adjacent transpositions (i, i+1), i in Theta. Within each block the
/// optimal permutation pairs sorted coordinates (rearrangement inequality).
inline double theta_hull_support(std::span<const ChamberVector> points, const ThetaSet& theta,
                                 const Vector& direction) {
  require(!points.empty(), "support of an empty set");
  require(direction.size() == theta.dim(), "direction dimension mismatch");
  const auto blocks = theta.blocks();
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> cb, xb;
  for (const auto& p : points) {
    require(p.dim() == theta.dim(), "point dimension mismatch");
    for (int i = 1; i < p.dim(); ++i)
      require(p[i] <= p[i - 1] + 1e-9, "point lies outside the positive chamber");
    double s = 0;
    for (auto [b, e] : blocks) {
      cb.assign(direction.data() + b, direction.data() + e);
      xb.assign(p.values().data() + b, p.values().data() + e);
      std::sort(cb.begin(), cb.end());
      std::sort(xb.begin(), xb.end());
      for (std::size_t i = 0; i < cb.size(); ++i) s += cb[i] * xb[i];
    }
    best = std::max(best, s);
  }
  return best;
}

// ---------------------------------------------------------------------------
// scaled products

/// Matrix stored as e^{log_scale} * m with max|m_ij| in [1, 2). The log of
/// |det| and its sign are tracked separately so the smallest Cartan and Jordan
/// coordinates stay accurate for badly conditioned products.
class ScaledMatrix {
 public:
  ScaledMatrix() = default;

  static ScaledMatrix identity(int d) {
    ScaledMatrix s;
    s.m_ = Matrix::Identity(d, d);
    s.renormalize();
    return s;
  }

  static ScaledMatrix from(const Matrix& a) {
    require_square_finite(a);
    ScaledMatrix s;
    s.m_ = a;
    const double det = a.rows() == 2 ? a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0) : a.partialPivLu().determinant();
    if (det == 0 || !std::isfinite(det)) throw NumericalError("matrix is singular");
    s.log_abs_det_ = std::log(std::abs(det));
    s.det_sign_ = det > 0 ? 1 : -1;
    s.renormalize();
    return s;
  }

  /// e^{log_scale} * m with the given determinant data, renormalized.
  static ScaledMatrix from_parts(Matrix m, double log_scale, double log_abs_det, int det_sign) {
    require_square_finite(m);
    ScaledMatrix s;
    s.m_ = std::move(m);
    s.log_scale_ = log_scale;
    s.log_abs_det_ = log_abs_det;
    s.det_sign_ = det_sign;
    s.renormalize();
    return s;
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mantissa() const { return m_; }
  double log_scale() const { return log_scale_; }
  double log_abs_det() const { return log_abs_det_; }
  int det_sign() const { return det_sign_; }
  /// The represented matrix (may overflow for long products).
  Matrix value() const { return m_ * std::exp(log_scale_); }

  friend ScaledMatrix operator*(const ScaledMatrix& a, const ScaledMatrix& b) {
    ScaledMatrix s;
    s.m_.noalias() = a.m_ * b.m_;
    s.log_scale_ = a.log_scale_ + b.log_scale_;
    s.log_abs_det_ = a.log_abs_det_ + b.log_abs_det_;
    s.det_sign_ = a.det_sign_ * b.det_sign_;
    s.renormalize();
    return s;
  }

  ScaledMatrix inverse() const {
    ScaledMatrix s;
    s.m_ = m_.inverse();
    s.log_scale_ = -log_scale_;
    s.log_abs_det_ = -log_abs_det_;
    s.det_sign_ = det_sign_;
    s.renormalize();
    return s;
  }

  /// Log singular values; the last one is recovered from log|det|.
  ChamberVector cartan() const {
    Eigen::JacobiSVD<Matrix> svd(m_);
    Vector s = svd.singularValues();
    const Eigen::Index d = s.size();
    Vector out(d);
    double head = 0;
    for (Eigen::Index i = 0; i + 1 < d; ++i) {
      out[i] = std::log(s[i]) + log_scale_;
      head += out[i];
    }
    out[d - 1] = d == 1 ? log_abs_det_ : log_abs_det_ - head;
    return ChamberVector::sorted(out);
  }

  /// Log of the operator 2-norm.
  double log_norm() const {
    Eigen::JacobiSVD<Matrix> svd(m_);
    return std::log(svd.singularValues()[0]) + log_scale_;
  }

  /// Log moduli of eigenvalues; the smallest one is recovered from log|det|.
  ChamberVector jordan() const {
    const int d = dim();
    const double mantissa_log_det = log_abs_det_ - d * log_scale_;
    if (d == 1) return ChamberVector::sorted(Vector::Constant(1, log_abs_det_));
    if (d == 2) {
      Vector v = detail::jordan_2x2(m_, mantissa_log_det).values();
      return ChamberVector::sorted((v.array() + log_scale_).matrix());
    }
    Eigen::EigenSolver<Matrix> es(m_, false);
    Vector mod = es.eigenvalues().cwiseAbs();
    std::sort(mod.data(), mod.data() + d, std::greater<>());
    Vector out(d);
    double head = 0;
    for (int i = 0; i + 1 < d; ++i) {
      out[i] = std::log(mod[i]) + log_scale_;
      head += out[i];
    }
    out[d - 1] = log_abs_det_ - head;
    return ChamberVector::sorted(out);
  }

 private:
  void renormalize() {
    const double mx = m_.cwiseAbs().maxCoeff();
    if (!(mx > 0) || !std::isfinite(mx)) throw NumericalError("product underflowed or overflowed");
    int e = 0;
    std::frexp(mx, &e);
    --e;
    m_ *= std::ldexp(1.0, -e);
    log_scale_ += e * std::numbers::ln2;
  }

  Matrix m_;
  double log_scale_ = 0;
  double log_abs_det_ = 0;
  int det_sign_ = 1;
};

// ---------------------------------------------------------------------------
// positive-definite matrices

/// Factor of the geodesic midpoint of B B^t and C C^t. With B^{-1} C = U S V^t
/// the midpoint is B U S U^t B^t, so B U S^{1/2} is a factor.
inline ScaledMatrix factor_geodesic(const ScaledMatrix& b, const ScaledMatrix& c, double s) {
  const ScaledMatrix m = b.inverse() * c;
  Eigen::JacobiSVD<Matrix> svd(m.mantissa(), Eigen::ComputeFullU);
  const Vector sv = svd.singularValues();
  if (!(sv.minCoeff() > 0) || !sv.allFinite()) throw NumericalError("geodesic between numerically indefinite points");
  const Matrix us = svd.matrixU() * sv.array().log().unaryExpr([s](double l) { return std::exp(s * l); }).matrix().asDiagonal();
  return b * ScaledMatrix::from_parts(us, s * m.log_scale(), s * m.log_abs_det(), 1);
}

inline ScaledMatrix factor_midpoint(const ScaledMatrix& b, const ScaledMatrix& c) { return factor_geodesic(b, c, 0.5); }

/// Vectorial distance between B B^t and C C^t: 2 sigma(B^{-1} C).
inline ChamberVector factor_vdist(const ScaledMatrix& b, const ScaledMatrix& c) {
  return (b.inverse() * c).cartan().scaled(2.0);
}

/// Symmetric square root (B B^t)^{1/2} = U S U^t from B = U S V^t.
inline ScaledMatrix factor_sqrt(const ScaledMatrix& b) {
  Eigen::JacobiSVD<Matrix> svd(b.mantissa(), Eigen::ComputeFullU);
  const Matrix r = svd.matrixU() * svd.singularValues().asDiagonal() * svd.matrixU().transpose();
  return ScaledMatrix::from_parts(0.5 * (r + r.transpose()), b.log_scale(), b.log_abs_det(), 1);
}

/// Positive-definite symmetric matrix, read as the inner product
/// <u,v>_p = <p^{-1} u, v>; the identity is the base point o. Stored as a
/// factor p = B B^t so that operations act on B and never square its
/// condition number.
class SpdPoint {
 public:
  SpdPoint() = default;

  explicit SpdPoint(const Matrix& p) {
    require_square_finite(p);
    const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
    if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NumericalError("matrix is not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p + p.transpose()));
    if (!(es.eigenvalues().minCoeff() > 0)) throw NumericalError("matrix is not positive definite");
    *this = from_eigen(es);
  }

  static SpdPoint identity(int d) { return from_factor(ScaledMatrix::identity(d)); }

  /// B B^t.
  static SpdPoint from_factor(const ScaledMatrix& b) {
    SpdPoint s;
    s.b_ = b;
    return s;
  }
  static SpdPoint from_factor(const Matrix& b) { return from_factor(ScaledMatrix::from(b)); }

  /// Symmetrizes p and clamps its eigenvalues at 1e-300 instead of rejecting
  /// it; for values produced by the module's own kernels.
  static SpdPoint trusted(const Matrix& p) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (p + p.transpose()));
    return from_eigen(es);
  }

  int dim() const { return b_.dim(); }
  const ScaledMatrix& factor() const { return b_; }
  Matrix matrix() const {
    const Matrix m = b_.mantissa() * b_.mantissa().transpose();
    return std::exp(2 * b_.log_scale()) * 0.5 * (m + m.transpose());
  }
  double log_det() const { return 2 * b_.log_abs_det(); }

  /// U f(S^2) U^t from the factor B = U S V^t, i.e. f applied to the
  /// eigenvalues of p.
  template <class Fn>
  Matrix spectral(Fn&& fn) const {
    Eigen::JacobiSVD<Matrix> svd(b_.mantissa(), Eigen::ComputeFullU);
    Vector lam = svd.singularValues();
    const double ls = b_.log_scale();
    for (Eigen::Index i = 0; i < lam.size(); ++i) lam[i] = fn(std::max(std::exp(2 * (std::log(lam[i]) + ls)), 1e-300));
    Matrix r = svd.matrixU() * lam.asDiagonal() * svd.matrixU().transpose();
    return 0.5 * (r + r.transpose());
  }

  Matrix sqrt() const { return factor_sqrt(b_).value(); }
  Matrix inv_sqrt() const { return factor_sqrt(b_).inverse().value(); }
  Matrix inverse() const { return spectral([](double l) { return 1.0 / l; }); }
  Matrix power(double s) const { return spectral([s](double l) { return std::exp(s * std::log(l)); }); }

  /// Log eigenvalues, descending (the Cartan projection of p).
  ChamberVector log_eigenvalues() const { return b_.cartan().scaled(2.0); }

 private:
  static SpdPoint from_eigen(const Eigen::SelfAdjointEigenSolver<Matrix>& es) {
    const Vector lam = es.eigenvalues().cwiseMax(1e-300);
    double log_det = 0;
    for (Eigen::Index i = 0; i < lam.size(); ++i) log_det += std::log(lam[i]);
    const Matrix b = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
    return from_factor(ScaledMatrix::from_parts(b, 0.0, 0.5 * log_det, 1));
  }

  ScaledMatrix b_;
};

/// g * p = g p g^t.
inline SpdPoint act(const Matrix& g, const SpdPoint& p) {
  require(g.rows() == p.dim() && g.cols() == p.dim(), "shape mismatch in group action");
  return SpdPoint::from_factor(ScaledMatrix::from(g) * p.factor());
}
inline SpdPoint act(const ScaledMatrix& g, const SpdPoint& p) {
  require(g.dim() == p.dim(), "shape mismatch in group action");
  return SpdPoint::from_factor(g * p.factor());
}

/// Vectorial distance 2 sigma(p^{-1/2} q^{1/2}), computed as 2 sigma(B^{-1} C)
/// for factors p = B B^t, q = C C^t.
inline ChamberVector vdist(const SpdPoint& p, const SpdPoint& q) {
  require(p.dim() == q.dim(), "dimension mismatch");
  return factor_vdist(p.factor(), q.factor());
}

/// Literal form 2 * cartan(p^{-1/2} q^{1/2}) through symmetric square roots.
inline ChamberVector vdist_via_cartan(const SpdPoint& p, const SpdPoint& q) {
  require(p.dim() == q.dim(), "dimension mismatch");
  return (factor_sqrt(p.factor()).inverse() * factor_sqrt(q.factor())).cartan().scaled(2.0);
}

/// Point at parameter s on the geodesic from p (s=0) to q (s=1):
/// p^{1/2} (p^{-1/2} q p^{-1/2})^s p^{1/2}.
inline SpdPoint geodesic(const SpdPoint& p, const SpdPoint& q, double s) {
  require(p.dim() == q.dim(), "dimension mismatch");
  return SpdPoint::from_factor(factor_geodesic(p.factor(), q.factor(), s));
}

inline SpdPoint midpoint(const SpdPoint& p, const SpdPoint& q) { return geodesic(p, q, 0.5); }

}  // namespace ergopt
