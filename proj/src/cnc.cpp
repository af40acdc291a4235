#include "qlab/cnc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qlab {

namespace {

constexpr int kValid = 3;

MultiIndex unit(int i) {
  MultiIndex m{0, 0, 0, 0};
  m[i] = 1;
  return m;
}
MultiIndex unit2(int i, int j) {
  MultiIndex m = unit(i);
  m[j] += 1;
  return m;
}
MultiIndex unit3(int i, int j, int k) {
  MultiIndex m = unit2(i, j);
  m[k] += 1;
  return m;
}

Rational rabs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// (index tuple, sign) images of R_{abcd} under its pair symmetries.
std::array<std::pair<std::array<int, 4>, int>, 8> riemann_images(int a, int b, int c, int d) {
  return {{{{a, b, c, d}, 1},
           {{b, a, c, d}, -1},
           {{a, b, d, c}, -1},
           {{b, a, d, c}, 1},
           {{c, d, a, b}, 1},
           {{d, c, a, b}, -1},
           {{c, d, b, a}, -1},
           {{d, c, b, a}, 1}}};
}

// Symmetry defect of an array laid out as R_{abcd} followed by `tail` trailing indices.
Rational symmetry_defect_of(const std::vector<Rational>& r, int tail) {
  Rational worst = 0;
  for (int t = 0; t < tail; ++t) {
    auto at = [&](int a, int b, int c, int d) -> const Rational& { return r[idx4(a, b, c, d) * tail + t]; };
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          for (int d = 0; d < kDim; ++d) {
            worst = std::max(worst, rabs(at(a, b, c, d) + at(b, a, c, d)));
            worst = std::max(worst, rabs(at(a, b, c, d) + at(a, b, d, c)));
            worst = std::max(worst, rabs(at(a, b, c, d) - at(c, d, a, b)));
            worst = std::max(worst, rabs(at(a, b, c, d) + at(a, c, d, b) + at(a, d, b, c)));
          }
  }
  return worst;
}

Rational max_abs_of(const std::vector<Rational>& v) {
  Rational m = 0;
  for (const auto& x : v) m = std::max(m, rabs(x));
  return m;
}

// Linearized Riemann tensor of a metric perturbation h (delta + h):
// 1/2 (d_b d_c h_ad + d_a d_d h_bc - d_a d_c h_bd - d_b d_d h_ac).
std::vector<ExactPoly> linearized_riemann(const PolyMatrix& h) {
  std::vector<ExactPoly> r(256);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c)
        for (int d = 0; d < kDim; ++d) {
          ExactPoly s = h[a][d].derivative(b).derivative(c) + h[b][c].derivative(a).derivative(d) -
                        h[b][d].derivative(a).derivative(c) - h[a][c].derivative(b).derivative(d);
          r[idx4(a, b, c, d)] = s * Rational(1, 2);
        }
  return r;
}

// R_{abcd,e}(0) for a cubic perturbation.
std::vector<Rational> curvature_derivative_of_cubic(const PolyMatrix& h3) {
  std::vector<ExactPoly> lin = linearized_riemann(h3);
  std::vector<Rational> r1(1024);
  for (int i = 0; i < 256; ++i)
    for (int e = 0; e < kDim; ++e) r1[i * 4 + e] = lin[i].coeff(unit(e));
  return r1;
}

// Ricci derivative Ric_{bd,e} of a first-derivative array.
Rational ricci_derivative(const std::vector<Rational>& r1, int b, int d, int e) {
  Rational s = 0;
  for (int a = 0; a < kDim; ++a) s += r1[idx5(a, b, a, d, e)];
  return s;
}

// Cubic symmetric-matrix coefficients: components (a<=b) x cubic monomials.
struct CubicBasis {
  std::vector<std::pair<int, int>> components;
  std::vector<MultiIndex> monomials;
  CubicBasis() {
    for (int a = 0; a < kDim; ++a)
      for (int b = a; b < kDim; ++b) components.emplace_back(a, b);
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j)
        for (int k = j; k < kDim; ++k) monomials.push_back(unit3(i, j, k));
  }
  std::size_t size() const { return components.size() * monomials.size(); }
  PolyMatrix matrix(const std::vector<Rational>& c) const {
    PolyMatrix h;
    for (auto& row : h) row.fill(ExactPoly(kValid));
    for (std::size_t p = 0; p < components.size(); ++p)
      for (std::size_t m = 0; m < monomials.size(); ++m) {
        const Rational& v = c[p * monomials.size() + m];
        if (v == 0) continue;
        auto [a, b] = components[p];
        h[a][b].add_term(monomials[m], v);
        if (a != b) h[b][a].add_term(monomials[m], v);
      }
    return h;
  }
};

using Constraint = std::function<std::vector<Rational>(const std::vector<Rational>& r1)>;

// Removes from the cubic coefficient vector a particular solution of
// constraint(R1(h)) = constraint(R1(h_random)), leaving h in the kernel.
std::vector<Rational> project_cubic_to_kernel(const CubicBasis& basis, std::vector<Rational> coeffs,
                                              const Constraint& constraint) {
  const std::size_t n = basis.size();
  std::vector<std::vector<Rational>> columns(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Rational> e(n, 0);
    e[j] = 1;
    columns[j] = constraint(curvature_derivative_of_cubic(basis.matrix(e)));
  }
  const std::size_t m = columns[0].size();
  std::vector<std::vector<Rational>> aug(m, std::vector<Rational>(n + 1));
  std::vector<Rational> rhs = constraint(curvature_derivative_of_cubic(basis.matrix(coeffs)));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug[i][j] = columns[j][i];
    aug[i][n] = rhs[i];
  }
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n && row < m; ++col) {
    std::size_t p = row;
    while (p < m && aug[p][col] == 0) ++p;
    if (p == m) continue;
    std::swap(aug[p], aug[row]);
    Rational inv = Rational(1) / aug[row][col];
    for (auto& v : aug[row]) v *= inv;
    for (std::size_t i = 0; i < m; ++i) {
      if (i == row || aug[i][col] == 0) continue;
      Rational f = aug[i][col];
      for (std::size_t j = col; j <= n; ++j) aug[i][j] -= f * aug[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  for (std::size_t i = row; i < m; ++i)
    if (aug[i][n] != 0) throw std::logic_error("constraint right-hand side is outside the image");
  for (std::size_t i = 0; i < pivots.size(); ++i) coeffs[pivots[i]] -= aug[i][n];
  return coeffs;
}

std::vector<Rational> symmetrized_ricci_derivative(const std::vector<Rational>& r1) {
  std::vector<Rational> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j)
      for (int k = j; k < kDim; ++k)
        out.push_back(ricci_derivative(r1, i, j, k) + ricci_derivative(r1, j, k, i) + ricci_derivative(r1, k, i, j));
  return out;
}

std::vector<Rational> full_ricci_derivative(const std::vector<Rational>& r1) {
  std::vector<Rational> out;
  for (int i = 0; i < kDim; ++i)
    for (int j = i; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k) out.push_back(ricci_derivative(r1, i, j, k));
  return out;
}

std::vector<Rational> random_weyl_r0(std::mt19937_64& rng, int amplitude) {
  std::uniform_int_distribution<int> coef(-amplitude, amplitude);
  PolyMatrix h2;
  for (auto& row : h2) row.fill(ExactPoly(kValid));
  for (int a = 0; a < kDim; ++a)
    for (int b = a; b < kDim; ++b)
      for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) {
          Rational v = coef(rng);
          h2[a][b].add_term(unit2(i, j), v);
          if (a != b) h2[b][a].add_term(unit2(i, j), v);
        }
  std::vector<ExactPoly> lin = linearized_riemann(h2);
  std::vector<Rational> r0(256);
  for (int i = 0; i < 256; ++i) r0[i] = lin[i].coeff({0, 0, 0, 0});
  return weyl_projection(r0);
}

CurvatureJet random_jet_with_constraint(std::mt19937_64& rng, int amplitude, const Constraint& constraint) {
  if (amplitude < 1) throw std::invalid_argument("amplitude must be positive");
  CurvatureJet jet;
  std::vector<Rational> r0 = random_weyl_r0(rng, amplitude);
  CubicBasis basis;
  std::uniform_int_distribution<int> coef(-amplitude, amplitude);
  std::vector<Rational> c(basis.size());
  for (auto& v : c) v = coef(rng);
  c = project_cubic_to_kernel(basis, std::move(c), constraint);
  std::vector<Rational> r1 = curvature_derivative_of_cubic(basis.matrix(c));
  for (int i = 0; i < 256; ++i) jet.set_r0(i / 64, (i / 16) % 4, (i / 4) % 4, i % 4, r0[i]);
  for (int i = 0; i < 1024; ++i) jet.set_r1(i / 256, (i / 64) % 4, (i / 16) % 4, (i / 4) % 4, i % 4, r1[i]);
  jet.set_conformal_normal(true);
  jet.validate();
  return jet;
}

Rational r0_sym(const CurvatureJet& jet, int a, int c, int i, int b) {
  // R_{a(ci)b}
  return (jet.r0(a, c, i, b) + jet.r0(a, i, c, b)) / 2;
}

Rational r1_sym(const CurvatureJet& jet, int a, int c, int i, int b, int j) {
  // R_{a(ci)b,j}
  return (jet.r1(a, c, i, b, j) + jet.r1(a, i, c, b, j)) / 2;
}

void require_flag(const CurvatureJet& jet, const char* what) {
  if (!jet.conformal_normal()) throw std::invalid_argument(std::string(what) + " needs a conformal-normal jet");
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  if (s.empty()) throw std::invalid_argument("empty number");
  if (s.find('/') != std::string::npos) {
    auto slash = s.find('/');
    Rational num = parse_rational(s.substr(0, slash));
    Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return num / den;
  }
  bool negative = false;
  std::size_t pos = 0;
  if (s[0] == '+' || s[0] == '-') {
    negative = s[0] == '-';
    pos = 1;
  }
  boost::multiprecision::cpp_int mantissa = 0;
  int scale = 0;
  bool seen_digit = false, after_point = false;
  for (; pos < s.size(); ++pos) {
    char ch = s[pos];
    if (ch >= '0' && ch <= '9') {
      mantissa = mantissa * 10 + (ch - '0');
      if (after_point) ++scale;
      seen_digit = true;
    } else if (ch == '.' && !after_point) {
      after_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw std::invalid_argument("malformed number '" + text + "'");
  int exponent = 0;
  if (pos < s.size()) {
    if (s[pos] != 'e' && s[pos] != 'E') throw std::invalid_argument("malformed number '" + text + "'");
    std::size_t used = 0;
    try {
      exponent = std::stoi(s.substr(pos + 1), &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed exponent in '" + text + "'");
    }
    if (pos + 1 + used != s.size()) throw std::invalid_argument("malformed number '" + text + "'");
  }
  int p10 = exponent - scale;
  boost::multiprecision::cpp_int ten = boost::multiprecision::pow(boost::multiprecision::cpp_int(10), std::abs(p10));
  Rational r = p10 >= 0 ? Rational(mantissa * ten) : Rational(mantissa, ten);
  return negative ? Rational(-r) : r;
}

CurvatureJet::CurvatureJet() : r0_(256, 0), r1_(1024, 0) {}

void CurvatureJet::set_r2(int a, int b, int c, int d, int e, int f, const Rational& v) {
  if (!r2_) r2_.emplace(4096, 0);
  (*r2_)[idx5(a, b, c, d, e) * 4 + f] = v;
}

CurvatureJet CurvatureJet::constant_curvature(const Rational& k) {
  CurvatureJet jet;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c)
        for (int d = 0; d < kDim; ++d) jet.set_r0(a, b, c, d, k * (int(a == c && b == d) - int(a == d && b == c)));
  return jet;
}

CurvatureJet CurvatureJet::from_doubles(const Tensor4& r0, const Tensor5& r1, bool conformal_normal) {
  CurvatureJet jet;
  for (int i = 0; i < 256; ++i) jet.r0_[i] = Rational(r0[i]);
  for (int i = 0; i < 1024; ++i) jet.r1_[i] = Rational(r1[i]);
  jet.conformal_normal_ = conformal_normal;
  return jet;
}

CurvatureJet CurvatureJet::load(std::istream& in) {
  CurvatureJet jet;
  std::vector<bool> set0(256, false), set1(1024, false), set2(4096, false);
  auto assign = [](std::vector<Rational>& store, std::vector<bool>& seen, const std::array<int, 4>& abcd, int tail,
                   int t, const Rational& v, int line) {
    for (const auto& [img, sign] : riemann_images(abcd[0], abcd[1], abcd[2], abcd[3])) {
      int k = idx4(img[0], img[1], img[2], img[3]) * tail + t;
      Rational val = sign * v;
      if (seen[k] && store[k] != val)
        throw std::invalid_argument("line " + std::to_string(line) + ": entry conflicts with an earlier one");
      if (img[0] == img[1] || img[2] == img[3]) {
        if (val != 0) throw std::invalid_argument("line " + std::to_string(line) + ": entry violates antisymmetry");
      }
      store[k] = val;
      seen[k] = true;
    }
  };
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "conformal_normal") {
      jet.conformal_normal_ = true;
      continue;
    }
    int count = tag == "R" ? 4 : tag == "DR" ? 5 : tag == "DDR" ? 6 : 0;
    if (count == 0) throw std::invalid_argument("line " + std::to_string(line) + ": unknown tag '" + tag + "'");
    std::array<int, 6> ix{};
    for (int i = 0; i < count; ++i) {
      if (!(ls >> ix[i]) || ix[i] < 1 || ix[i] > 4)
        throw std::invalid_argument("line " + std::to_string(line) + ": indices must be in 1..4");
      --ix[i];
    }
    std::string value;
    if (!(ls >> value)) throw std::invalid_argument("line " + std::to_string(line) + ": missing value");
    std::string extra;
    if (ls >> extra) throw std::invalid_argument("line " + std::to_string(line) + ": trailing text");
    Rational v = parse_rational(value);
    std::array<int, 4> abcd{ix[0], ix[1], ix[2], ix[3]};
    if (count == 4) {
      assign(jet.r0_, set0, abcd, 1, 0, v, line);
    } else if (count == 5) {
      assign(jet.r1_, set1, abcd, 4, ix[4], v, line);
    } else {
      if (!jet.r2_) jet.r2_.emplace(4096, 0);
      assign(*jet.r2_, set2, abcd, 16, ix[4] * 4 + ix[5], v, line);
    }
  }
  return jet;
}

CurvatureJet CurvatureJet::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open jet file '" + path + "'");
  return load(in);
}

void CurvatureJet::save(std::ostream& out) const {
  if (conformal_normal_) out << "conformal_normal\n";
  // One representative per symmetry class: a<b, c<d, (a,b) <= (c,d).
  auto canonical = [](int a, int b, int c, int d) { return a < b && c < d && (a < c || (a == c && b <= d)); };
  auto emit = [&](const char* tag, const std::vector<Rational>& store, int tail, int extra) {
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          for (int d = 0; d < kDim; ++d) {
            if (!canonical(a, b, c, d)) continue;
            for (int t = 0; t < tail; ++t) {
              const Rational& v = store[idx4(a, b, c, d) * tail + t];
              if (v == 0) continue;
              out << tag << ' ' << a + 1 << ' ' << b + 1 << ' ' << c + 1 << ' ' << d + 1;
              if (extra >= 1) out << ' ' << (extra == 2 ? t / 4 : t) + 1;
              if (extra == 2) out << ' ' << t % 4 + 1;
              out << ' ' << v << '\n';
            }
          }
  };
  emit("R", r0_, 1, 0);
  emit("DR", r1_, 4, 1);
  if (r2_) emit("DDR", *r2_, 16, 2);
}

Rational CurvatureJet::ricci0(int b, int d) const {
  Rational s = 0;
  for (int a = 0; a < kDim; ++a) s += r0(a, b, a, d);
  return s;
}

Rational CurvatureJet::ricci1(int b, int d, int e) const { return ricci_derivative(r1_, b, d, e); }

Rational CurvatureJet::scalar_gradient(int e) const {
  Rational s = 0;
  for (int b = 0; b < kDim; ++b) s += ricci1(b, b, e);
  return s;
}

CurvatureJet CurvatureJet::blow_up(const Rational& eps) const {
  CurvatureJet out = *this;
  Rational e2 = eps * eps, e3 = e2 * eps;
  for (auto& v : out.r0_) v *= e2;
  for (auto& v : out.r1_) v *= e3;
  if (out.r2_)
    for (auto& v : *out.r2_) v *= e3 * eps;
  return out;
}

CurvatureJet CurvatureJet::scaled(const Rational& s) const {
  CurvatureJet out = *this;
  for (auto& v : out.r0_) v *= s;
  for (auto& v : out.r1_) v *= s;
  if (out.r2_)
    for (auto& v : *out.r2_) v *= s;
  return out;
}

double CurvatureJet::symmetry_defect() const {
  Rational worst = std::max(symmetry_defect_of(r0_, 1), symmetry_defect_of(r1_, 4));
  if (r2_) worst = std::max(worst, symmetry_defect_of(*r2_, 16));
  return to_double(worst);
}

double CurvatureJet::max_abs() const {
  Rational m = std::max(max_abs_of(r0_), max_abs_of(r1_));
  if (r2_) m = std::max(m, max_abs_of(*r2_));
  return to_double(m);
}

void CurvatureJet::validate(double tolerance) const {
  const double bound = tolerance * std::max(1.0, max_abs());
  if (double d = symmetry_defect(); d > bound)
    throw std::invalid_argument("curvature jet violates the Riemann symmetries (defect " + std::to_string(d) + ")");
  if (!conformal_normal_) return;
  for (const auto& c : cnc_identity_suite(*this, tolerance)) {
    if ((c.name == "ricci_vanishes" || c.name == "symmetrized_ricci_derivative") && c.status == IdentityStatus::fail)
      throw std::invalid_argument("conformal-normal flag set but " + c.name + " fails (residual " +
                                  std::to_string(c.residual) + ")");
  }
}

std::vector<Rational> weyl_projection(const std::vector<Rational>& r) {
  if (r.size() != 256) throw std::invalid_argument("weyl_projection expects 256 entries");
  std::array<std::array<Rational, kDim>, kDim> ric{};
  Rational scal = 0;
  for (int b = 0; b < kDim; ++b)
    for (int d = 0; d < kDim; ++d) {
      for (int a = 0; a < kDim; ++a) ric[b][d] += r[idx4(a, b, a, d)];
    }
  for (int b = 0; b < kDim; ++b) scal += ric[b][b];
  auto delta = [](int i, int j) { return Rational(i == j ? 1 : 0); };
  std::vector<Rational> w(256);
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b)
      for (int c = 0; c < kDim; ++c)
        for (int d = 0; d < kDim; ++d) {
          Rational kn = ric[a][c] * delta(b, d) + ric[b][d] * delta(a, c) - ric[a][d] * delta(b, c) -
                        ric[b][c] * delta(a, d);
          Rational gg = delta(a, c) * delta(b, d) - delta(a, d) * delta(b, c);
          w[idx4(a, b, c, d)] = r[idx4(a, b, c, d)] - kn / 2 + scal * gg / 6;
        }
  return w;
}

CurvatureJet random_conformal_normal_jet(std::mt19937_64& rng, int amplitude) {
  return random_jet_with_constraint(rng, amplitude, symmetrized_ricci_derivative);
}

CurvatureJet random_jet_without_ricci_derivative(std::mt19937_64& rng, int amplitude) {
  return random_jet_with_constraint(rng, amplitude, full_ricci_derivative);
}

CurvatureJet with_scalar_gradient(const CurvatureJet& jet, const std::array<Rational, 4>& gradient) {
  // Ricci-derivative perturbation T_{ijk} = delta_ij v_k - (delta_ik v_j + delta_jk v_i)/2 with
  // v = gradient/3: its symmetrization vanishes and its (i,j) trace is `gradient`.
  // It is realized slot-wise by the Kulkarni-Nomizu product of delta with
  // A_k = (T_k - tr(T_k)/6 delta)/2.
  CurvatureJet out = jet;
  std::array<Rational, 4> v;
  for (int k = 0; k < kDim; ++k) v[k] = gradient[k] / 3;
  auto delta = [](int i, int j) { return Rational(i == j ? 1 : 0); };
  for (int e = 0; e < kDim; ++e) {
    std::array<std::array<Rational, kDim>, kDim> t{}, a{};
    Rational tr = 0;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) t[i][j] = delta(i, j) * v[e] - (delta(i, e) * v[j] + delta(j, e) * v[i]) / 2;
    for (int i = 0; i < kDim; ++i) tr += t[i][i];
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) a[i][j] = (t[i][j] - tr / 6 * delta(i, j)) / 2;
    for (int p = 0; p < kDim; ++p)
      for (int q = 0; q < kDim; ++q)
        for (int r = 0; r < kDim; ++r)
          for (int s = 0; s < kDim; ++s) {
            Rational kn = a[p][r] * delta(q, s) + a[q][s] * delta(p, r) - a[p][s] * delta(q, r) - a[q][r] * delta(p, s);
            out.set_r1(p, q, r, s, e, out.r1(p, q, r, s, e) + kn);
          }
  }
  return out;
}

MetricTaylor metric_taylor_from_jet(const CurvatureJet& jet) {
  jet.validate();
  MetricTaylor mt{identity_poly_matrix(kValid), jet, false};
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      ExactPoly& p = mt.coeffs[a][b];
      for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
          p.add_term(unit2(i, j), jet.r0(a, i, j, b) / 3);
          for (int k = 0; k < kDim; ++k) p.add_term(unit3(i, j, k), jet.r1(a, i, j, b, k) / 6);
        }
    }
  return mt;
}

MetricTaylor inverse_metric_taylor(const MetricTaylor& mt) {
  // (I + A)^{-1} = I - A + A^2 - A^3; A starts at degree 2, so the series
  // closes after finitely many terms at the tracked degree.
  PolyMatrix a = mt.coeffs;
  for (int i = 0; i < kDim; ++i) a[i][i] -= ExactPoly::constant(1, kValid);
  PolyMatrix result = identity_poly_matrix(kValid), power = identity_poly_matrix(kValid);
  for (int n = 1; n <= kValid; ++n) {
    power = power * a;
    Rational sign = n % 2 ? -1 : 1;
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j) result[i][j] += power[i][j] * sign;
  }
  return MetricTaylor{result, mt.jet, !mt.inverse};
}

PolyMatrix inverse_product_residual(const MetricTaylor& g, const MetricTaylor& g_inv) {
  PolyMatrix p = g.coeffs * g_inv.coeffs;
  for (int i = 0; i < kDim; ++i) p[i][i] -= ExactPoly::constant(1, kValid);
  return p;
}

ExactPoly log_det(const MetricTaylor& mt) {
  // log det(I + A) = sum_n (-1)^{n+1} tr(A^n) / n
  PolyMatrix a = mt.coeffs;
  for (int i = 0; i < kDim; ++i) a[i][i] -= ExactPoly::constant(1, kValid);
  ExactPoly out(kValid);
  PolyMatrix power = identity_poly_matrix(kValid);
  for (int n = 1; n <= kValid; ++n) {
    power = power * a;
    Rational f = Rational(n % 2 ? 1 : -1, n);
    for (int i = 0; i < kDim; ++i) out += power[i][i] * f;
  }
  return out;
}

PolyArray3 d_inverse_metric(const MetricTaylor& mt) {
  const MetricTaylor inv = mt.inverse ? mt : inverse_metric_taylor(mt);
  PolyArray3 out;
  for (int c = 0; c < kDim; ++c)
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) out[c][a][b] = inv.coeffs[a][b].derivative(c);
  return out;
}

PolyArray3 d_inverse_metric_closed_form(const CurvatureJet& jet) {
  PolyArray3 out;
  for (int c = 0; c < kDim; ++c)
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b) {
        ExactPoly p(kValid - 1);
        for (int i = 0; i < kDim; ++i) {
          p.add_term(unit(i), Rational(-2, 3) * r0_sym(jet, a, c, i, b));
          for (int j = 0; j < kDim; ++j)
            p.add_term(unit2(i, j), Rational(-1, 6) * (2 * r1_sym(jet, a, c, i, b, j) + jet.r1(a, i, j, b, c)));
        }
        out[c][a][b] = p;
      }
  return out;
}

std::array<std::array<PolyMatrix, kDim>, kDim> dd_inverse_metric(const MetricTaylor& mt) {
  PolyArray3 first = d_inverse_metric(mt);
  std::array<std::array<PolyMatrix, kDim>, kDim> out;
  for (int c = 0; c < kDim; ++c)
    for (int d = 0; d < kDim; ++d)
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) out[c][d][a][b] = first[c][a][b].derivative(d);
  return out;
}

std::array<std::array<PolyMatrix, kDim>, kDim> dd_inverse_metric_closed_form(const CurvatureJet& jet) {
  std::array<std::array<PolyMatrix, kDim>, kDim> out;
  for (int c = 0; c < kDim; ++c)
    for (int d = 0; d < kDim; ++d)
      for (int a = 0; a < kDim; ++a)
        for (int b = 0; b < kDim; ++b) {
          ExactPoly p = ExactPoly::constant(Rational(-2, 3) * r0_sym(jet, a, c, d, b), kValid - 2);
          for (int i = 0; i < kDim; ++i) {
            Rational t = r1_sym(jet, a, c, d, b, i) + (jet.r1(i, b, a, c, d) + jet.r1(i, b, a, d, c)) / 2 -
                         (jet.r1(a, i, b, c, d) + jet.r1(a, i, b, d, c)) / 2;
            p.add_term(unit(i), Rational(-1, 3) * t);
          }
          out[c][d][a][b] = p;
        }
  return out;
}

PolyVector contracted_first_derivative(const MetricTaylor& mt) {
  require_flag(mt.jet, "contracted_first_derivative");
  PolyArray3 d = d_inverse_metric(mt);
  PolyVector out;
  for (int b = 0; b < kDim; ++b) {
    ExactPoly s(kValid - 1);
    for (int a = 0; a < kDim; ++a) s += d[a][a][b];
    out[b] = s;
  }
  return out;
}

PolyVector contracted_first_derivative_closed_form(const CurvatureJet& jet) {
  require_flag(jet, "contracted_first_derivative_closed_form");
  PolyVector out;
  for (int b = 0; b < kDim; ++b) {
    ExactPoly p(kValid - 1);
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        p.add_term(unit2(i, j), Rational(-1, 6) * (2 * jet.ricci1(i, b, j) - jet.ricci1(i, j, b)));
    out[b] = p;
  }
  return out;
}

PolyMatrix contracted_second_derivative(const MetricTaylor& mt) {
  require_flag(mt.jet, "contracted_second_derivative");
  auto dd = dd_inverse_metric(mt);
  PolyMatrix out;
  for (int d = 0; d < kDim; ++d)
    for (int b = 0; b < kDim; ++b) {
      ExactPoly s(kValid - 2);
      for (int a = 0; a < kDim; ++a) s += dd[a][d][a][b];
      out[d][b] = s;
    }
  return out;
}

PolyMatrix contracted_second_derivative_closed_form(const CurvatureJet& jet) {
  require_flag(jet, "contracted_second_derivative_closed_form");
  PolyMatrix out;
  for (int d = 0; d < kDim; ++d)
    for (int b = 0; b < kDim; ++b) {
      ExactPoly p(kValid - 2);
      for (int i = 0; i < kDim; ++i) p.add_term(unit(i), Rational(2, 3) * jet.ricci1(i, d, b));
      out[d][b] = p;
    }
  return out;
}

std::string to_string(IdentityStatus s) {
  switch (s) {
    case IdentityStatus::pass: return "pass";
    case IdentityStatus::fail: return "fail";
    case IdentityStatus::not_checkable: return "not checkable";
  }
  return "unknown";
}

std::vector<IdentityCheck> cnc_identity_suite(const CurvatureJet& jet, double tolerance) {
  const double bound = tolerance * std::max(1.0, jet.max_abs());
  std::vector<IdentityCheck> out;
  auto record = [&](const std::string& name, const Rational& residual) {
    double r = to_double(residual);
    out.push_back({name, r <= bound ? IdentityStatus::pass : IdentityStatus::fail, r});
  };
  auto skip = [&](const std::string& name) { out.push_back({name, IdentityStatus::not_checkable, 0.0}); };

  Rational worst = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) worst = std::max(worst, rabs(jet.ricci0(i, j)));
  record("ricci_vanishes", worst);

  worst = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        worst = std::max(worst, rabs(jet.ricci1(i, j, k) + jet.ricci1(j, k, i) + jet.ricci1(k, i, j)));
  record("symmetrized_ricci_derivative", worst);

  worst = 0;
  for (int e = 0; e < kDim; ++e) worst = std::max(worst, rabs(jet.scalar_gradient(e)));
  record("scalar_gradient", worst);

  if (jet.has_r2()) {
    std::vector<Rational> r0(256);
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int c = 0; c < kDim; ++c)
          for (int d = 0; d < kDim; ++d) r0[idx4(a, b, c, d)] = jet.r0(a, b, c, d);
    std::vector<Rational> w = weyl_projection(r0);
    Rational w2 = 0, lap = 0;
    for (const auto& x : w) w2 += x * x;
    for (int a = 0; a < kDim; ++a)
      for (int b = 0; b < kDim; ++b)
        for (int j = 0; j < kDim; ++j) lap += jet.r2(a, b, a, b, j, j);
    record("scalar_laplacian_weyl", rabs(lap + w2 / 6));

    // Full symmetrization over (i,j,k,l) of Ric_{ij,kl} + 2/9 R_{pijm} R_{pklm}.
    std::array<Rational, 256> t{};
    for (int i = 0; i < kDim; ++i)
      for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k)
          for (int l = 0; l < kDim; ++l) {
            Rational s = 0;
            for (int a = 0; a < kDim; ++a) s += jet.r2(a, i, a, j, k, l);
            for (int p = 0; p < kDim; ++p)
              for (int m = 0; m < kDim; ++m) s += Rational(2, 9) * jet.r0(p, i, j, m) * jet.r0(p, k, l, m);
            t[idx4(i, j, k, l)] = s;
          }
    worst = 0;
    for (int i = 0; i < kDim; ++i)
      for (int j = i; j < kDim; ++j)
        for (int k = j; k < kDim; ++k)
          for (int l = k; l < kDim; ++l) {
            std::array<int, 4> ix{i, j, k, l};
            Rational s = 0;
            int n = 0;
            do {
              s += t[idx4(ix[0], ix[1], ix[2], ix[3])];
              ++n;
            } while (std::next_permutation(ix.begin(), ix.end()));
            worst = std::max(worst, rabs(s / n));
          }
    record("symmetrized_second_ricci", worst);
  } else {
    skip("scalar_laplacian_weyl");
    skip("symmetrized_second_ricci");
  }

  worst = 0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int q = 0; q < kDim; ++q) {
        Rational lhs = 0;
        for (int p = 0; p < kDim; ++p) lhs += jet.r1(p, i, j, q, p);
        worst = std::max(worst, rabs(lhs - (jet.ricci1(i, q, j) - jet.ricci1(i, j, q))));
      }
  record("contracted_bianchi", worst);
  return out;
}

double detone_laplacian(const MetricTaylor& mt, const ScalarField& u, const Point& x) {
  const MetricTaylor inv = mt.inverse ? mt : inverse_metric_taylor(mt);
  Jet uj = u.jet(x, 2);
  JetPoint xp = jet_point(x, 1);
  double s = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j) {
      Jet gij = FloatPoly(inv.coeffs[i][j]).eval(xp);
      MultiIndex ei = unit(i), ej = unit(j), eij = unit2(i, j);
      s += gij.partial(ej) * uj.partial(ei) + gij.value() * uj.partial(eij);
    }
  return s;
}

MetricField metric_field(const MetricTaylor& mt, double amplitude) {
  if (mt.inverse) throw std::invalid_argument("metric_field expects the metric expansion, not its inverse");
  std::array<std::array<FloatPoly, kDim>, kDim> parts;
  for (int a = 0; a < kDim; ++a)
    for (int b = 0; b < kDim; ++b) {
      ExactPoly p = mt.coeffs[a][b];
      if (a == b) p -= ExactPoly::constant(1, kValid);
      parts[a][b] = FloatPoly(p);
    }
  return MetricField::analytic([parts, amplitude](const JetPoint& x) {
    MetricJet g;
    const int order = x[0].order();
    for (int a = 0; a < kDim; ++a)
      for (int b = a; b < kDim; ++b) {
        g[a][b] = parts[a][b].eval(x) * amplitude;
        if (a == b) g[a][b] += Jet::constant(1.0, order);
        g[b][a] = g[a][b];
      }
    return g;
  });
}

}  // namespace qlab
