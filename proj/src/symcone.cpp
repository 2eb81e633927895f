#include "gensol/symcone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gensol {

namespace {

void check_dim(int d) {
  if (d < 1 || d > kMaxDim) throw InputError("matrix dimension must be 1, 2 or 3");
}

// Sign-normalize: first component with |c| > eps becomes positive.
void normalize_sign(Vec& v, int dim) {
  for (int i = 0; i < dim; ++i) {
    if (std::abs(v[i]) > 1e-14) {
      if (v[i] < 0)
        for (int j = 0; j < dim; ++j) v[j] = -v[j];
      return;
    }
  }
}

void order(EigenDecomp& e) {
  const int d = e.dim;
  for (int k = 0; k < d; ++k) normalize_sign(e.vectors[k], d);
  std::array<int, 3> idx{0, 1, 2};
  const double scale = std::max({std::abs(e.values[0]), std::abs(e.values[1]),
                                 std::abs(e.values[2]), 1e-300});
  auto tied = [&](int a, int b) { return std::abs(e.values[a] - e.values[b]) <= 1e-13 * scale; };
  std::stable_sort(idx.begin(), idx.begin() + d, [&](int a, int b) {
    if (!tied(a, b)) return e.values[a] > e.values[b];
    for (int i = 0; i < d; ++i) {
      if (e.vectors[a][i] != e.vectors[b][i]) return e.vectors[a][i] < e.vectors[b][i];
    }
    return false;
  });
  EigenDecomp out = e;
  for (int k = 0; k < d; ++k) {
    out.values[k] = e.values[idx[k]];
    out.vectors[k] = e.vectors[idx[k]];
  }
  e = out;
}

EigenDecomp eigen2(const SymMat& m) {
  EigenDecomp e;
  e.dim = 2;
  const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
  const double mean = 0.5 * (a + c);
  const double r = std::hypot(0.5 * (a - c), b);
  e.values = {mean + r, mean - r, 0.0};
  if (r == 0.0) {
    e.vectors[0] = {1, 0, 0};
    e.vectors[1] = {0, 1, 0};
  } else {
    // Eigenvector for the larger eigenvalue via the half-angle formula.
    const double theta = 0.5 * std::atan2(2 * b, a - c);
    e.vectors[0] = {std::cos(theta), std::sin(theta), 0};
    e.vectors[1] = {-std::sin(theta), std::cos(theta), 0};
  }
  return e;
}

EigenDecomp eigen3(const SymMat& m) {
  double a[3][3];
  double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[i][j] = m(i, j);

  double scale = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(a[i][j]));

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off <= 1e-13 * scale || off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double tau = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        const double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1 + tau * tau));
        const double c = 1 / std::sqrt(1 + t * t);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }
  EigenDecomp e;
  e.dim = 3;
  for (int k = 0; k < 3; ++k) {
    e.values[k] = a[k][k];
    e.vectors[k] = {v[0][k], v[1][k], v[2][k]};
  }
  return e;
}

}  // namespace

Mat::Mat(int d) : dim(d) { check_dim(d); }

SymMat::SymMat(int dim) : dim_(dim) { check_dim(dim); }

int SymMat::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  // Row-major packed upper triangle: row i starts after sum_{r<i} (dim - r).
  return i * dim_ - i * (i - 1) / 2 + (j - i);
}

SymMat SymMat::identity(int dim) {
  SymMat m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
  return m;
}

SymMat SymMat::diag(const Vec& d, int dim) {
  SymMat m(dim);
  for (int i = 0; i < dim; ++i) m.set(i, i, d[i]);
  return m;
}

SymMat SymMat::outer(const Vec& u, int dim) {
  SymMat m(dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) m.set(i, j, u[i] * u[j]);
  return m;
}

SymMat SymMat::sym_part(const Mat& a) {
  SymMat m(a.dim);
  for (int i = 0; i < a.dim; ++i)
    for (int j = i; j < a.dim; ++j) m.set(i, j, 0.5 * (a(i, j) + a(j, i)));
  return m;
}

SymMat SymMat::from_upper(const double* coeffs, int dim) {
  SymMat m(dim);
  std::copy(coeffs, coeffs + m.packed_size(), m.c_.begin());
  return m;
}

double SymMat::trace() const {
  double t = 0;
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

bool SymMat::finite() const {
  return std::all_of(c_.begin(), c_.begin() + packed_size(),
                     [](double x) { return std::isfinite(x); });
}

SymMat& SymMat::operator+=(const SymMat& o) {
  if (o.dim_ != dim_) throw InputError("dimension mismatch in SymMat addition");
  for (int k = 0; k < 6; ++k) c_[k] += o.c_[k];
  return *this;
}

SymMat& SymMat::operator-=(const SymMat& o) {
  if (o.dim_ != dim_) throw InputError("dimension mismatch in SymMat subtraction");
  for (int k = 0; k < 6; ++k) c_[k] -= o.c_[k];
  return *this;
}

SymMat& SymMat::operator*=(double s) {
  for (double& x : c_) x *= s;
  return *this;
}

double frob(const SymMat& a, const SymMat& b) {
  if (a.dim() != b.dim()) throw InputError("dimension mismatch in Frobenius product");
  double s = 0;
  for (int i = 0; i < a.dim(); ++i) {
    s += a(i, i) * b(i, i);
    for (int j = i + 1; j < a.dim(); ++j) s += 2 * a(i, j) * b(i, j);
  }
  return s;
}

double frob(const Mat& a, const SymMat& b) {
  if (a.dim != b.dim()) throw InputError("dimension mismatch in Frobenius product");
  double s = 0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) s += a(i, j) * b(i, j);
  return s;
}

double frobenius_distance(const SymMat& a, const SymMat& b) {
  const SymMat d = a - b;
  return std::sqrt(frob(d, d));
}

SymMat EigenDecomp::reconstruct() const {
  return spectral_map(*this, [](double l) { return l; });
}

EigenDecomp eigen(const SymMat& a) {
  if (!a.finite()) throw InputError("non-finite matrix entry");
  EigenDecomp e;
  switch (a.dim()) {
    case 1:
      e.dim = 1;
      e.values = {a(0, 0), 0, 0};
      e.vectors[0] = {1, 0, 0};
      break;
    case 2:
      e = eigen2(a);
      break;
    default:
      e = eigen3(a);
      break;
  }
  order(e);
  return e;
}

SymSplit sym_split(const SymMat& s) {
  const EigenDecomp e = eigen(s);
  SymSplit out{spectral_map(e, [](double l) { return std::max(l, 0.0); }),
               spectral_map(e, [](double l) { return std::min(l, 0.0); }), s};
  out.dev -= (s.trace() / s.dim()) * SymMat::identity(s.dim());
  return out;
}

SymSplit sym_split(const Mat& a) {
  for (int k = 0; k < 9; ++k)
    if (!std::isfinite(a.a[k])) throw InputError("non-finite matrix entry");
  return sym_split(SymMat::sym_part(a));
}

double mat_norm(const EigenDecomp& e, MatNormKind kind) {
  double spec = 0, tr = 0, fro = 0;
  for (int k = 0; k < e.dim; ++k) {
    const double l = std::abs(e.values[k]);
    spec = std::max(spec, l);
    tr += l;
    fro += l * l;
  }
  switch (kind) {
    case MatNormKind::Spectral: return spec;
    case MatNormKind::Trace: return tr;
    case MatNormKind::Frobenius: return std::sqrt(fro);
    case MatNormKind::MMax: return std::max(0.5 * tr, spec);
    case MatNormKind::MDual: return 2 * spec + tr;
  }
  return 0;
}

double mat_norm(const SymMat& a, MatNormKind kind) {
  if (kind == MatNormKind::Frobenius) {
    if (!a.finite()) throw InputError("non-finite matrix entry");
    return std::sqrt(frob(a, a));
  }
  return mat_norm(eigen(a), kind);
}

MatNormKind dual_norm_kind(MatNormKind kind) {
  switch (kind) {
    case MatNormKind::Spectral: return MatNormKind::Trace;
    case MatNormKind::Trace: return MatNormKind::Spectral;
    case MatNormKind::Frobenius: return MatNormKind::Frobenius;
    case MatNormKind::MMax: return MatNormKind::MDual;
    case MatNormKind::MDual: return MatNormKind::MMax;
  }
  return kind;
}

std::string to_string(MatNormKind kind) {
  switch (kind) {
    case MatNormKind::Spectral: return "spectral";
    case MatNormKind::Trace: return "trace";
    case MatNormKind::Frobenius: return "frobenius";
    case MatNormKind::MMax: return "mmax";
    case MatNormKind::MDual: return "mdual";
  }
  return "?";
}

std::string to_string(MatCone cone) {
  switch (cone) {
    case MatCone::PSD: return "psd";
    case MatCone::NSD: return "nsd";
    case MatCone::IdentityRay: return "identity-ray";
    case MatCone::FullSym: return "full-sym";
  }
  return "?";
}

SymMat project_cone(const SymMat& a, MatCone cone) {
  switch (cone) {
    case MatCone::PSD:
      return spectral_map(eigen(a), [](double l) { return std::max(l, 0.0); });
    case MatCone::NSD:
      return spectral_map(eigen(a), [](double l) { return std::min(l, 0.0); });
    case MatCone::IdentityRay:
      return std::max(a.trace() / a.dim(), 0.0) * SymMat::identity(a.dim());
    case MatCone::FullSym:
      return a;
  }
  return a;
}

bool cone_contains(const SymMat& a, MatCone cone, double tol) {
  switch (cone) {
    case MatCone::PSD: {
      const EigenDecomp e = eigen(a);
      return e.values[e.dim - 1] >= -tol;
    }
    case MatCone::NSD: return eigen(a).values[0] <= tol;
    case MatCone::IdentityRay: {
      const double alpha = a.trace() / a.dim();
      return alpha >= -tol && frobenius_distance(a, alpha * SymMat::identity(a.dim())) <= tol;
    }
    case MatCone::FullSym: return a.finite();
  }
  return false;
}

bool PolarCone::contains(const SymMat& a, double tol) const {
  if (cone_) return cone_contains(a, *cone_, tol);
  if (pred_ == Predicate::TraceNonPositive) return a.trace() <= tol;
  return std::sqrt(frob(a, a)) <= tol;
}

SymMat PolarCone::project(const SymMat& a) const {
  if (cone_) return project_cone(a, *cone_);
  if (pred_ == Predicate::ZeroOnly) return SymMat::zero(a.dim());
  // Half-space {tr S <= 0}: remove the positive trace along I/sqrt(d).
  const double excess = std::max(a.trace(), 0.0) / a.dim();
  return a - excess * SymMat::identity(a.dim());
}

PolarCone polar_cone(MatCone cone) {
  switch (cone) {
    case MatCone::PSD: return PolarCone(MatCone::NSD);
    case MatCone::NSD: return PolarCone(MatCone::PSD);
    case MatCone::IdentityRay: return PolarCone(PolarCone::Predicate::TraceNonPositive);
    case MatCone::FullSym: return PolarCone(PolarCone::Predicate::ZeroOnly);
  }
  return PolarCone(cone);
}

}  // namespace gensol
