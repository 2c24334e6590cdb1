#include "feketelab/nonarch.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "feketelab/binaryform.hpp"

namespace feketelab {

double LogValue::to_double(unsigned long p) const {
  if (neg_inf) return -std::numeric_limits<double>::infinity();
  return coeff.get_d() * std::log(static_cast<double>(p));
}

ExtValuation min3(const ExtValuation& a, const ExtValuation& b, const ExtValuation& c) {
  const ExtValuation* m = &a;
  if (b < *m) m = &b;
  if (c < *m) m = &c;
  return *m;
}

ExtValuation vp(const mpq_class& x, unsigned long p) {
  auto v = padic_valuation(x, p);
  if (!v) return ExtValuation::inf();
  return ExtValuation::of(mpq_class(*v));
}

LogValue log_absp(const mpq_class& x, unsigned long p) {
  ExtValuation v = vp(x, p);
  if (v.infinite) return LogValue::minus_infinity();
  return {-v.value, false};
}

bool PadicBall::same_ball_as(const PadicBall& o) const {
  if (prime != o.prime || !(radius_val == o.radius_val)) return false;
  ExtValuation vd = vp(center - o.center, prime);
  // |c - c'|_p <= radius <=> v_p(c - c') >= radius_val
  return !(vd < radius_val);
}

ExtValuation PadicBall::sup_norm_val() const {
  // |S| = p^(-min(v_p(center), radius_val))
  ExtValuation vc = vp(center, prime);
  return (vc < radius_val) ? vc : radius_val;
}

PadicBall join(const PadicBall& s, const PadicBall& t) {
  if (s.prime != t.prime) throw std::invalid_argument("join: prime mismatch");
  PadicBall out;
  out.prime = s.prime;
  out.center = s.center;
  out.radius_val = min3(s.radius_val, t.radius_val, vp(s.center - t.center, s.prime));
  return out;
}

LogValue hsia(const PadicBall& s, const PadicBall& t) {
  ExtValuation rv = join(s, t).radius_val;
  if (rv.infinite) return LogValue::minus_infinity();
  return {-rv.value, false};
}

LogValue rho(const PadicBall& s, const PadicBall& t) {
  if (s.is_point() || t.is_point())
    throw std::domain_error("rho: defined only for balls of positive radius");
  ExtValuation rv = join(s, t).radius_val;
  // 2 log diam(join) - log diam S - log diam S'
  return {-2 * rv.value + s.radius_val.value + t.radius_val.value, false};
}

LogValue log_delta_can(const PadicBall& s, const PadicBall& t) {
  ExtValuation rv = join(s, t).radius_val;
  if (rv.infinite) return LogValue::minus_infinity();
  auto log_max1 = [](const ExtValuation& sup) {
    // log max(1, |S|) = -min(0, m) log p for |S| = p^(-m)
    if (sup.infinite) return mpq_class(0);
    return (sup.value < 0) ? -sup.value : mpq_class(0);
  };
  return {-rv.value - log_max1(s.sup_norm_val()) - log_max1(t.sup_norm_val()), false};
}

PadicBall tree_median_with_gauss(const PadicBall& s, const PadicBall& t) {
  PadicBall g = PadicBall::gauss(s.prime);
  PadicBall j1 = join(s, t), j2 = join(s, g), j3 = join(t, g);
  // the smallest join (largest radius_val) is the median
  const PadicBall* m = &j1;
  if (m->radius_val < j2.radius_val) m = &j2;
  if (m->radius_val < j3.radius_val) m = &j3;
  return *m;
}

std::pair<LogValue, LogValue> gromov_check(const PadicBall& s, const PadicBall& t) {
  LogValue lhs = log_delta_can(s, t);
  PadicBall med = tree_median_with_gauss(s, t);
  LogValue r = rho(med, PadicBall::gauss(s.prime));
  LogValue rhs{-r.coeff, r.neg_inf};
  return {lhs, rhs};
}

namespace {

ExactForm to_exact(const RatForm& f) {
  ExactForm out;
  out.reserve(f.size());
  for (const auto& c : f) out.push_back(GaussQ(c));
  return out;
}

// min v_p over the coefficients of both coordinates; the Gauss norm of the
// pair is p^(-that).
ExtValuation min_valuation(const std::vector<mpq_class>& P, const std::vector<mpq_class>& Q,
                           unsigned long p) {
  ExtValuation m = ExtValuation::inf();
  for (const auto& c : P) {
    ExtValuation v = vp(c, p);
    if (v < m) m = v;
  }
  for (const auto& c : Q) {
    ExtValuation v = vp(c, p);
    if (v < m) m = v;
  }
  return m;
}

}  // namespace

LogValue vf_padic(const RatForm& P, const RatForm& Q, unsigned long p) {
  GaussQ res = resultant_exact(to_exact(P), to_exact(Q));
  if (!(res.im == 0)) throw std::invalid_argument("vf_padic: coefficients must be rational");
  if (res.re == 0) throw NumericError("vf_padic: degenerate map (Res F = 0)");
  const long d = static_cast<long>(P.size()) - 1;
  ExtValuation v = vp(res.re, p);
  // V_F = -(1/(d(d-1))) log|Res|_p = v_p(Res)/(d(d-1)) * log p
  return {v.value / mpq_class(d * (d - 1)), false};
}

GaussGreenReport gauss_green(const RatForm& P, const RatForm& Q, unsigned long p, int k_max) {
  if (k_max < 1 || k_max > 6)
    throw BudgetError("gauss_green: k_max must be 1..6 (coefficient growth budget)");
  GaussGreenReport rep;
  rep.prime = p;
  rep.degree = static_cast<int>(P.size()) - 1;
  rep.vf = vf_padic(P, Q, p);

  std::vector<mpq_class> rp = P, rq = Q;
  mpq_class dk = rep.degree;
  for (int k = 1; k <= k_max; ++k) {
    ExtValuation m = min_valuation(rp, rq, p);
    // g_k = d^-k log||F^k|| = (-m / d^k) log p
    rep.green_seq.push_back({-m.value / dk, false});
    if (k < k_max) {
      std::vector<mpq_class> np = form_compose(P, rp, rq);
      std::vector<mpq_class> nq = form_compose(Q, rp, rq);
      rp = std::move(np);
      rq = std::move(nq);
      dk *= rep.degree;
    }
  }
  for (std::size_t i = 0; i + 1 < rep.green_seq.size(); ++i)
    rep.cauchy_diffs.push_back({rep.green_seq[i + 1].coeff - rep.green_seq[i].coeff, false});
  rep.phi_self = {-2 * rep.green_seq.back().coeff - rep.vf.coeff, false};
  return rep;
}

std::string GaussGreenReport::to_json() const {
  nlohmann::json j;
  j["p"] = prime;
  j["d"] = degree;
  j["VF_logp"] = vf.to_string();
  nlohmann::json seq = nlohmann::json::array();
  for (const auto& g : green_seq) seq.push_back(g.to_string());
  j["gauss_green"] = seq;
  nlohmann::json diffs = nlohmann::json::array();
  for (const auto& g : cauchy_diffs) diffs.push_back(g.to_string());
  j["cauchy_diffs"] = diffs;
  j["phi_self"] = phi_self.to_string();
  return j.dump();
}

}  // namespace feketelab
