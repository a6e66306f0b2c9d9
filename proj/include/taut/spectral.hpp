#pragma once

// Exact spectral analysis of integer matrices and the suspension models they
// generate: the frame E_0, E_1..E_n with [E_0, E_i] = ln(lambda_i) E_i.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "taut/model.hpp"

namespace taut {

inline constexpr std::size_t kMaxMatrixSize = 8;

class IntegerMatrix {
 public:
  IntegerMatrix() = default;
  IntegerMatrix(std::size_t n, std::vector<std::int64_t> row_major);
  explicit IntegerMatrix(const std::vector<std::vector<std::int64_t>>& rows);

  /// "2,0,-1;0,3,-1;-1,-1,1" (rows by ';', entries by ',').
  static IntegerMatrix parse(std::string_view text);

  std::size_t size() const { return n_; }
  std::int64_t operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::int64_t trace() const;
  std::string to_string() const;

 private:
  std::size_t n_ = 0;
  std::vector<std::int64_t> data_;
};

/// Integer polynomial, coefficients from the constant term upward.
struct IntPolynomial {
  std::vector<std::int64_t> coefficients;

  std::size_t degree() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  double evaluate(double x) const;
  /// "-x^3+6x^2-9x+1"
  std::string to_string() const;
};

/// Exact determinant via fraction-free elimination.
std::int64_t determinant(const IntegerMatrix& a);

/// det(A - xI), leading coefficient (-1)^n, computed exactly
/// (Faddeev-LeVerrier over big integers). Throws OverflowError when a
/// coefficient leaves the signed 64-bit range.
IntPolynomial char_poly(const IntegerMatrix& a);

struct RealRoot {
  double value = 0.0;
  /// Integer enclosure: floor/ceil bracket. Equal when the root is an integer.
  std::int64_t lower = 0;
  std::int64_t upper = 0;
  /// Refined isolating interval with exact dyadic endpoints, as doubles.
  double refined_lower = 0.0;
  double refined_upper = 0.0;
};

/// Sturm-sequence isolation on integer intervals, then exact dyadic bisection
/// to ~1e-15 relative width. Throws DomainError ("complex or repeated roots")
/// unless the polynomial has deg distinct real roots. Sorted ascending.
std::vector<RealRoot> real_eigenvalues(const IntPolynomial& p);

/// Number of distinct real roots in (lo, hi] (Sturm count).
std::size_t count_real_roots(const IntPolynomial& p, std::int64_t lo, std::int64_t hi);

struct SpectralData {
  IntPolynomial char_poly;
  std::vector<RealRoot> eigenvalues;  ///< ascending
  std::vector<double> log_eigenvalues;
};

struct SuspensionDiagnostics {
  std::int64_t det = 0;
  std::int64_t trace = 0;
  bool det_is_one = false;
  bool real_distinct = false;
  bool positive = false;
  bool none_equal_one = false;
  std::optional<bool> trace_above_two;  ///< 2x2 only
  bool admissible = false;
  std::vector<std::string> messages;
  std::optional<SpectralData> spectral;
};

SuspensionDiagnostics validate_suspension_matrix(const IntegerMatrix& a);

struct Suspension {
  FrameModel model;
  FoliationSplit split;
  SpectralData spectral;
};

/// Suspension model of dimension n+1. `leaf_index` (1-based) picks the sorted
/// eigenvalue whose eigen-direction spans the leaves; that direction is frame
/// index leaf_index (zero-based), E_0 being the suspension direction.
Suspension build_suspension(const IntegerMatrix& a, std::size_t leaf_index, std::string name = {});

/// Parameter name holding ln(lambda_i), i 1-based.
std::string log_eigenvalue_parameter(std::size_t i);

}  // namespace taut
