#pragma once

// Small dense symmetric matrices (d <= 3): eigendecomposition, signed parts,
// Schatten-type norms and their duals, and projections onto matrix cones.

#include <array>
#include <optional>
#include <stdexcept>
#include <string>

namespace gensol {

/// Thrown for malformed or out-of-contract input anywhere in the library.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vec = std::array<double, 3>;

inline constexpr int kMaxDim = 3;

/// General square matrix of dimension 1..3, row-major; unused slots are zero.
struct Mat {
  int dim = 2;
  std::array<double, 9> a{};

  Mat() = default;
  explicit Mat(int d);
  double& operator()(int i, int j) { return a[3 * i + j]; }
  double operator()(int i, int j) const { return a[3 * i + j]; }
};

/// Symmetric matrix stored as its packed upper triangle (row-major).
class SymMat {
 public:
  SymMat() : SymMat(2) {}
  explicit SymMat(int dim);

  static SymMat zero(int dim) { return SymMat(dim); }
  static SymMat identity(int dim);
  static SymMat diag(const Vec& d, int dim);
  static SymMat outer(const Vec& u, int dim);
  /// Symmetric part (A + A^T)/2.
  static SymMat sym_part(const Mat& a);
  /// Build from packed upper-triangle coefficients (dim(dim+1)/2 of them).
  static SymMat from_upper(const double* coeffs, int dim);

  int dim() const { return dim_; }
  int packed_size() const { return dim_ * (dim_ + 1) / 2; }
  double operator()(int i, int j) const { return c_[index(i, j)]; }
  void set(int i, int j, double v) { c_[index(i, j)] = v; }
  const double* upper() const { return c_.data(); }

  double trace() const;
  bool finite() const;

  SymMat& operator+=(const SymMat& o);
  SymMat& operator-=(const SymMat& o);
  SymMat& operator*=(double s);
  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }
  friend SymMat operator*(SymMat a, double s) { return a *= s; }
  friend bool operator==(const SymMat&, const SymMat&) = default;

 private:
  int index(int i, int j) const;

  int dim_;
  std::array<double, 6> c_{};
};

/// Frobenius product A:B.
double frob(const SymMat& a, const SymMat& b);
/// A:B for a general matrix against a symmetric one (equals (A)_sym : B).
double frob(const Mat& a, const SymMat& b);
double frobenius_distance(const SymMat& a, const SymMat& b);

struct EigenDecomp {
  int dim = 2;
  Vec values{};                   // descending
  std::array<Vec, 3> vectors{};   // orthonormal, vectors[i] pairs with values[i]

  SymMat reconstruct() const;
};

/// Closed form for d <= 2, cyclic Jacobi for d = 3. Eigenvalues descending;
/// every eigenvector is sign-normalized (first nonzero component positive) and
/// ties are ordered lexicographically.
EigenDecomp eigen(const SymMat& a);

/// Rebuild sum_i f(lambda_i) e_i (x) e_i.
template <class F>
SymMat spectral_map(const EigenDecomp& e, F&& f) {
  SymMat out(e.dim);
  for (int k = 0; k < e.dim; ++k) out += f(e.values[k]) * SymMat::outer(e.vectors[k], e.dim);
  return out;
}

struct SymSplit {
  SymMat pos;  // PSD part, eigenvalues max(lambda, 0)
  SymMat neg;  // NSD part, eigenvalues min(lambda, 0)
  SymMat dev;  // trace-free part
};

SymSplit sym_split(const Mat& a);
SymSplit sym_split(const SymMat& a);

enum class MatNormKind { Spectral, Trace, Frobenius, MMax, MDual };

double mat_norm(const SymMat& a, MatNormKind kind);
double mat_norm(const EigenDecomp& e, MatNormKind kind);
MatNormKind dual_norm_kind(MatNormKind kind);
std::string to_string(MatNormKind kind);

enum class MatCone { PSD, NSD, IdentityRay, FullSym };

std::string to_string(MatCone cone);

/// Frobenius-nearest point of the cone.
SymMat project_cone(const SymMat& a, MatCone cone);

/// Polar cone. PSD and NSD are each other's polar; the polars of IdentityRay
/// ({S : tr S <= 0}) and FullSym ({0}) are carried as membership predicates.
class PolarCone {
 public:
  enum class Predicate { None, TraceNonPositive, ZeroOnly };

  explicit PolarCone(MatCone cone) : cone_(cone) {}
  explicit PolarCone(Predicate p) : pred_(p) {}

  /// The polar as a MatCone when it is one of the four enum cones.
  std::optional<MatCone> as_cone() const { return cone_; }
  Predicate predicate() const { return pred_; }
  bool contains(const SymMat& a, double tol = 1e-10) const;
  SymMat project(const SymMat& a) const;

 private:
  std::optional<MatCone> cone_;
  Predicate pred_ = Predicate::None;
};

PolarCone polar_cone(MatCone cone);

bool cone_contains(const SymMat& a, MatCone cone, double tol = 1e-10);

}  // namespace gensol
