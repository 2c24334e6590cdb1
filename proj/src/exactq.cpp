#include "feketelab/exactq.hpp"

#include <cmath>
#include <stdexcept>

namespace feketelab {

namespace {

// Gaussian integer with exact division (Z[i] is an integral domain; Bareiss
// pivots divide exactly).
struct GaussZ {
  mpz_class re, im;

  bool is_zero() const { return re == 0 && im == 0; }
  GaussZ operator*(const GaussZ& o) const {
    return {re * o.re - im * o.im, re * o.im + im * o.re};
  }
  GaussZ operator-(const GaussZ& o) const { return {re - o.re, im - o.im}; }
  GaussZ divexact(const GaussZ& o) const {
    mpz_class n = o.re * o.re + o.im * o.im;
    mpz_class nr = re * o.re + im * o.im;
    mpz_class ni = im * o.re - re * o.im;
    GaussZ out;
    mpz_divexact(out.re.get_mpz_t(), nr.get_mpz_t(), n.get_mpz_t());
    mpz_divexact(out.im.get_mpz_t(), ni.get_mpz_t(), n.get_mpz_t());
    return out;
  }
};

// Bareiss fraction-free determinant over Z[i].
GaussZ bareiss_det(std::vector<std::vector<GaussZ>> m) {
  const std::size_t n = m.size();
  GaussZ prev{mpz_class(1), mpz_class(0)};
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t piv = k + 1;
      while (piv < n && m[piv][k].is_zero()) ++piv;
      if (piv == n) return {mpz_class(0), mpz_class(0)};
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]).divexact(prev);
    prev = m[k][k];
  }
  GaussZ det = m[n - 1][n - 1];
  if (sign < 0) det = GaussZ{mpz_class(0), mpz_class(0)} - det;
  return det;
}

mpz_class lcm_of_denominators(const ExactForm& f) {
  mpz_class l = 1;
  for (const auto& c : f) {
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.re.get_den().get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.im.get_den().get_mpz_t());
  }
  return l;
}

}  // namespace

GaussQ resultant_exact(const ExactForm& P, const ExactForm& Q) {
  if (P.size() != Q.size() || P.size() < 2)
    throw std::invalid_argument("resultant_exact: forms must share degree >= 1");
  const int d = static_cast<int>(P.size()) - 1;

  // Clear denominators: Res(aP, bQ) = a^d b^d Res(P, Q).
  mpz_class la = lcm_of_denominators(P), lb = lcm_of_denominators(Q);
  auto to_gz = [](const GaussQ& c, const mpz_class& l) {
    mpq_class r = c.re * l, i = c.im * l;
    return GaussZ{r.get_num(), i.get_num()};
  };

  const int n = 2 * d;
  std::vector<std::vector<GaussZ>> m(
      n, std::vector<GaussZ>(n, GaussZ{mpz_class(0), mpz_class(0)}));
  for (int r = 0; r < d; ++r) {
    for (int j = 0; j <= d; ++j) {
      m[r][r + j] = to_gz(P[j], la);
      m[d + r][r + j] = to_gz(Q[j], lb);
    }
  }
  GaussZ det = bareiss_det(std::move(m));

  mpq_class scale = 1;
  for (int i = 0; i < d; ++i) scale *= mpq_class(la) * mpq_class(lb);
  GaussQ out(mpq_class(det.re) / scale, mpq_class(det.im) / scale);
  out.re.canonicalize();
  out.im.canonicalize();
  return out;
}

double log_abs_mpq(const mpq_class& q) {
  if (q == 0) throw std::domain_error("log_abs_mpq: zero");
  signed long en, ed;
  double mn = mpz_get_d_2exp(&en, q.get_num().get_mpz_t());
  double md = mpz_get_d_2exp(&ed, q.get_den().get_mpz_t());
  return std::log(std::abs(mn)) - std::log(std::abs(md)) +
         (static_cast<double>(en) - static_cast<double>(ed)) * std::log(2.0);
}

double log_abs_gaussq(const GaussQ& g) {
  if (g.is_zero()) throw std::domain_error("log_abs_gaussq: zero");
  mpq_class n2 = g.re * g.re + g.im * g.im;
  return 0.5 * log_abs_mpq(n2);
}

std::optional<long> padic_valuation(const mpq_class& q, unsigned long p) {
  if (q == 0) return std::nullopt;
  mpz_class pz(p), tmp;
  mp_bitcnt_t vn = mpz_remove(tmp.get_mpz_t(), q.get_num().get_mpz_t(), pz.get_mpz_t());
  mp_bitcnt_t vd = mpz_remove(tmp.get_mpz_t(), q.get_den().get_mpz_t(), pz.get_mpz_t());
  return static_cast<long>(vn) - static_cast<long>(vd);
}

std::string mpq_to_string(const mpq_class& q) {
  mpq_class c = q;
  c.canonicalize();
  if (c.get_den() == 1) return c.get_num().get_str();
  return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace feketelab
