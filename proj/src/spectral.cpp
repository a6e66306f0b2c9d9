#include "taut/spectral.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace taut {

using boost::multiprecision::cpp_int;

IntegerMatrix::IntegerMatrix(std::size_t n, std::vector<std::int64_t> row_major) : n_(n), data_(std::move(row_major)) {
  if (n_ == 0 || data_.size() != n_ * n_) throw SchemaError("matrix must be square and nonempty");
  if (n_ > kMaxMatrixSize) throw SchemaError("matrix size exceeds " + std::to_string(kMaxMatrixSize));
}

IntegerMatrix::IntegerMatrix(const std::vector<std::vector<std::int64_t>>& rows) {
  std::vector<std::int64_t> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.size()) throw SchemaError("matrix must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  *this = IntegerMatrix(rows.size(), std::move(flat));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

IntegerMatrix IntegerMatrix::parse(std::string_view text) {
  std::vector<std::vector<std::int64_t>> rows;
  for (auto row : split(text, ';')) {
    std::vector<std::int64_t> entries;
    for (auto cell : split(row, ',')) {
      cell = trim(cell);
      if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
      std::int64_t v = 0;
      const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || res.ec != std::errc{} || res.ptr != cell.data() + cell.size())
        throw SchemaError("invalid matrix entry '" + std::string(cell) + "'");
      entries.push_back(v);
    }
    rows.push_back(std::move(entries));
  }
  return IntegerMatrix(rows);
}

std::int64_t IntegerMatrix::trace() const {
  std::int64_t t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += (*this)(i, i);
  return t;
}

std::string IntegerMatrix::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < n_; ++i) {
    if (i) os << ';';
    for (std::size_t j = 0; j < n_; ++j) os << (j ? "," : "") << (*this)(i, j);
  }
  return os.str();
}

double IntPolynomial::evaluate(double x) const {
  double r = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) r = r * x + static_cast<double>(*it);
  return r;
}

std::string IntPolynomial::to_string() const {
  std::string out;
  for (std::size_t d = coefficients.size(); d-- > 0;) {
    const std::int64_t c = coefficients[d];
    if (c == 0) continue;
    const auto mag = c < 0 ? -static_cast<std::uint64_t>(c) : static_cast<std::uint64_t>(c);
    if (c < 0) out += '-';
    else if (!out.empty()) out += '+';
    if (mag != 1 || d == 0) out += std::to_string(mag);
    if (d >= 1) out += 'x';
    if (d >= 2) out += '^' + std::to_string(d);
  }
  return out.empty() ? "0" : out;
}

namespace {

using BigPoly = std::vector<cpp_int>;  // constant term first

std::int64_t narrow(const cpp_int& v, const char* what) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min())
    throw OverflowError(std::string(what) + " exceeds the signed 64-bit range");
  return static_cast<std::int64_t>(v);
}

std::vector<cpp_int> to_big(const IntegerMatrix& a) {
  std::vector<cpp_int> m;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) m.emplace_back(a(i, j));
  return m;
}

}  // namespace

std::int64_t determinant(const IntegerMatrix& a) {
  // Bareiss fraction-free elimination.
  const std::size_t n = a.size();
  auto m = to_big(a);
  auto at = [&](std::size_t i, std::size_t j) -> cpp_int& { return m[i * n + j]; };
  cpp_int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (at(k, k) == 0) {
      std::size_t swap = k + 1;
      while (swap < n && at(swap, k) == 0) ++swap;
      if (swap == n) return 0;
      for (std::size_t j = 0; j < n; ++j) std::swap(at(k, j), at(swap, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
    prev = at(k, k);
  }
  return narrow(sign * at(n - 1, n - 1), "determinant");
}

IntPolynomial char_poly(const IntegerMatrix& a) {
  const std::size_t n = a.size();
  const auto A = to_big(a);
  // Faddeev-LeVerrier: det(xI - A) = sum_k c_k x^k, c_n = 1,
  // M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k (exact division).
  std::vector<cpp_int> c(n + 1);
  c[n] = 1;
  std::vector<cpp_int> M(n * n, 0);
  std::vector<cpp_int> AM(n * n, 0);
  // AM holds A M_{k-1}; M_0 = 0.
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < n * n; ++i) M[i] = AM[i];
    for (std::size_t i = 0; i < n; ++i) M[i * n + i] += c[n - k + 1];
    cpp_int tr = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        cpp_int s = 0;
        for (std::size_t l = 0; l < n; ++l) s += A[i * n + l] * M[l * n + j];
        AM[i * n + j] = s;
      }
      tr += AM[i * n + i];
    }
    c[n - k] = -tr / static_cast<long>(k);
  }
  IntPolynomial p;
  const int flip = (n % 2 == 0) ? 1 : -1;
  for (std::size_t k = 0; k <= n; ++k) p.coefficients.push_back(narrow(flip * c[k], "characteristic polynomial coefficient"));
  return p;
}

// ---------------------------------------------------------------------------
// Sturm sequences over big integers

namespace {

void trim_poly(BigPoly& p) {
  while (p.size() > 1 && p.back() == 0) p.pop_back();
}

BigPoly derivative(const BigPoly& p) {
  BigPoly d;
  for (std::size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  if (d.empty()) d.push_back(0);
  return d;
}

bool is_zero(const BigPoly& p) { return p.size() == 1 && p[0] == 0; }

void make_primitive(BigPoly& p) {
  cpp_int g = 0;
  for (const auto& c : p) g = gcd(g, abs(c));
  if (g > 1)
    for (auto& c : p) c /= g;
}

// Remainder of a by b, scaled by a positive constant.
BigPoly positive_pseudo_remainder(BigPoly a, const BigPoly& b) {
  const cpp_int lead = b.back();
  const cpp_int scale = abs(lead);
  const int sgn = lead < 0 ? -1 : 1;
  while (!is_zero(a) && a.size() >= b.size()) {
    const std::size_t shift = a.size() - b.size();
    const cpp_int q = a.back();
    // a <- |lead| a - sgn * q x^shift b, killing the leading term.
    for (auto& c : a) c *= scale;
    for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= sgn * q * b[i];
    a.pop_back();
    if (a.empty()) a.push_back(0);
    trim_poly(a);
  }
  return a;
}

std::vector<BigPoly> sturm_sequence(const IntPolynomial& p) {
  BigPoly p0(p.coefficients.begin(), p.coefficients.end());
  trim_poly(p0);
  std::vector<BigPoly> seq{p0};
  BigPoly p1 = derivative(p0);
  make_primitive(p1);
  if (is_zero(p1)) return seq;
  seq.push_back(p1);
  while (seq.back().size() > 1) {
    BigPoly r = positive_pseudo_remainder(seq[seq.size() - 2], seq.back());
    if (is_zero(r)) break;
    for (auto& c : r) c = -c;
    make_primitive(r);
    seq.push_back(std::move(r));
  }
  return seq;
}

// Sign of p at num / 2^shift.
int sign_at(const BigPoly& p, const cpp_int& num, unsigned shift) {
  const std::size_t d = p.size() - 1;
  cpp_int acc = 0;
  cpp_int pow_x = 1;
  for (std::size_t i = 0; i <= d; ++i) {
    acc += p[i] * pow_x * (cpp_int(1) << static_cast<unsigned>(shift * (d - i)));
    pow_x *= num;
  }
  return acc > 0 ? 1 : (acc < 0 ? -1 : 0);
}

std::size_t sign_changes(const std::vector<int>& signs) {
  std::size_t changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

std::size_t variations(const std::vector<BigPoly>& seq, const cpp_int& num, unsigned shift) {
  std::vector<int> s;
  for (const auto& q : seq) s.push_back(sign_at(q, num, shift));
  return sign_changes(s);
}

std::size_t variations_at_infinity(const std::vector<BigPoly>& seq, bool positive) {
  std::vector<int> s;
  for (const auto& q : seq) {
    int sg = q.back() > 0 ? 1 : -1;
    if (!positive && (q.size() - 1) % 2 == 1) sg = -sg;
    s.push_back(sg);
  }
  return sign_changes(s);
}

// Roots in (lo, hi] with lo = a / 2^s, hi = b / 2^s.
std::size_t count_in(const std::vector<BigPoly>& seq, const cpp_int& a, const cpp_int& b, unsigned s) {
  return variations(seq, a, s) - variations(seq, b, s);
}

std::int64_t cauchy_bound(const IntPolynomial& p) {
  const auto& c = p.coefficients;
  const double lead = std::abs(static_cast<double>(c.back()));
  double m = 0.0;
  for (std::size_t i = 0; i + 1 < c.size(); ++i) m = std::max(m, std::abs(static_cast<double>(c[i])) / lead);
  return static_cast<std::int64_t>(std::ceil(1.0 + m));
}

double to_double(const cpp_int& num, unsigned shift) {
  return std::ldexp(num.convert_to<double>(), -static_cast<int>(shift));
}

struct Interval {
  cpp_int a;
  cpp_int b;
  unsigned shift;
  std::int64_t integer_lower;
};

constexpr unsigned kMaxShift = 120;

RealRoot refine(const std::vector<BigPoly>& seq, Interval iv) {
  const BigPoly& p = seq.front();
  while (iv.shift < kMaxShift) {
    if (sign_at(p, iv.b, iv.shift) == 0) {
      iv.a = iv.b;
      break;
    }
    const double lo = to_double(iv.a, iv.shift);
    const double hi = to_double(iv.b, iv.shift);
    if (hi - lo <= 1e-15 * std::max(std::abs(lo), std::abs(hi))) break;
    cpp_int a2 = iv.a * 2;
    cpp_int b2 = iv.b * 2;
    cpp_int mid = iv.a + iv.b;
    ++iv.shift;
    if (count_in(seq, a2, mid, iv.shift) == 1) {
      iv.a = std::move(a2);
      iv.b = std::move(mid);
    } else {
      iv.a = std::move(mid);
      iv.b = std::move(b2);
    }
  }
  RealRoot r;
  r.refined_lower = to_double(iv.a, iv.shift);
  r.refined_upper = to_double(iv.b, iv.shift);
  r.value = iv.a == iv.b ? r.refined_upper : 0.5 * (r.refined_lower + r.refined_upper);
  r.lower = iv.integer_lower;
  r.upper = iv.integer_lower + 1;
  if (r.value == static_cast<double>(r.upper) && sign_at(p, cpp_int(r.upper), 0) == 0) r.lower = r.upper;
  return r;
}

}  // namespace

std::size_t count_real_roots(const IntPolynomial& p, std::int64_t lo, std::int64_t hi) {
  const auto seq = sturm_sequence(p);
  return count_in(seq, cpp_int(lo), cpp_int(hi), 0);
}

std::vector<RealRoot> real_eigenvalues(const IntPolynomial& poly) {
  IntPolynomial p = poly;
  while (p.coefficients.size() > 1 && p.coefficients.back() == 0) p.coefficients.pop_back();
  const std::size_t deg = p.degree();
  if (deg == 0) return {};
  const auto seq = sturm_sequence(p);
  const std::size_t total = variations_at_infinity(seq, false) - variations_at_infinity(seq, true);
  if (total < deg) throw DomainError("complex or repeated roots: " + std::to_string(total) +
                                     " distinct real roots for degree " + std::to_string(deg));

  const std::int64_t bound = cauchy_bound(p);
  std::vector<RealRoot> roots;
  for (std::int64_t k = -bound; k < bound; ++k) {
    std::vector<Interval> pending{{cpp_int(k), cpp_int(k + 1), 0, k}};
    while (!pending.empty()) {
      Interval iv = pending.back();
      pending.pop_back();
      const std::size_t count = count_in(seq, iv.a, iv.b, iv.shift);
      if (count == 0) continue;
      if (count == 1) {
        roots.push_back(refine(seq, iv));
        continue;
      }
      const cpp_int mid = iv.a + iv.b;
      const unsigned s = iv.shift + 1;
      pending.push_back({mid, iv.b * 2, s, k});
      pending.push_back({iv.a * 2, mid, s, k});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const RealRoot& x, const RealRoot& y) { return x.value < y.value; });
  return roots;
}

// ---------------------------------------------------------------------------

SuspensionDiagnostics validate_suspension_matrix(const IntegerMatrix& a) {
  SuspensionDiagnostics d;
  d.det = determinant(a);
  d.trace = a.trace();
  d.det_is_one = d.det == 1;
  if (!d.det_is_one) d.messages.push_back("determinant is " + std::to_string(d.det) + ", expected 1");
  if (a.size() == 2) {
    d.trace_above_two = d.trace > 2;
    if (!*d.trace_above_two) d.messages.push_back("trace " + std::to_string(d.trace) + " is not > 2");
  }

  IntPolynomial p;
  try {
    p = char_poly(a);
  } catch (const OverflowError& e) {
    d.messages.push_back(e.what());
    return d;
  }
  SpectralData spectral{p, {}, {}};
  try {
    spectral.eigenvalues = real_eigenvalues(p);
    d.real_distinct = true;
  } catch (const DomainError& e) {
    d.messages.push_back(e.what());
  }
  // Exact checks on the polynomial: p(1) != 0 and no root in (-B, 0].
  std::int64_t at_one = 0;
  for (auto c : p.coefficients) at_one += c;
  d.none_equal_one = at_one != 0;
  if (!d.none_equal_one) d.messages.push_back("1 is an eigenvalue");
  if (d.real_distinct) {
    d.positive = count_real_roots(p, -cauchy_bound(p) - 1, 0) == 0;
    if (!d.positive) d.messages.push_back("non-positive eigenvalue");
    for (const auto& r : spectral.eigenvalues)
      spectral.log_eigenvalues.push_back(r.value > 0.0 ? std::log(r.value) : std::numeric_limits<double>::quiet_NaN());
  }
  d.admissible = d.det_is_one && d.real_distinct && d.positive && d.none_equal_one;
  if (d.real_distinct) d.spectral = std::move(spectral);
  return d;
}

std::string log_eigenvalue_parameter(std::size_t i) { return "ln_lambda" + std::to_string(i); }

Suspension build_suspension(const IntegerMatrix& a, std::size_t leaf_index, std::string name) {
  auto diag = validate_suspension_matrix(a);
  if (!diag.admissible) {
    std::string why;
    for (const auto& m : diag.messages) why += (why.empty() ? "" : "; ") + m;
    throw ValidationError("matrix " + a.to_string() + " is not admissible for a suspension: " + why);
  }
  const std::size_t n = a.size();
  if (leaf_index < 1 || leaf_index > n)
    throw ValidationError("leaf index must be between 1 and " + std::to_string(n));

  SpectralData spectral = std::move(*diag.spectral);
  Parameters params;
  std::vector<StructureConstant> entries;
  for (std::size_t i = 1; i <= n; ++i) {
    params[log_eigenvalue_parameter(i)] = spectral.log_eigenvalues[i - 1];
    entries.push_back({0, i, i, Expr::variable(log_eigenvalue_parameter(i))});
  }
  if (name.empty()) name = "suspension";
  FrameModel model = FrameModel::constant_structure(std::move(name), n + 1, std::move(params), std::move(entries));
  model.notes = "left-invariant frame on R x_A R^" + std::to_string(n) + " for A = " + a.to_string() +
                "; the quotient by Z x_A Z^" + std::to_string(n) + " is assumed compact";
  auto split = FoliationSplit::from_leaf_indices(n + 1, {leaf_index});
  return Suspension{std::move(model), std::move(split), std::move(spectral)};
}

}  // namespace taut
