#include "feketelab/ratmap.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

namespace feketelab {

namespace {

std::mutex g_lazy_mutex;

// Dense complex determinant by partially pivoted elimination, returned as
// log-magnitude plus phase so huge resultants stay representable.
struct DetLog {
  double log_abs;
  Cpx phase;     // unit modulus (or 0 for a singular matrix)
};

DetLog complex_det_log(std::vector<std::vector<Cpx>> m) {
  const std::size_t n = m.size();
  DetLog out{0.0, Cpx(1.0, 0.0)};
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m[i][k]) > std::abs(m[piv][k])) piv = i;
    if (std::abs(m[piv][k]) == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
    if (piv != k) {
      std::swap(m[piv], m[k]);
      out.phase = -out.phase;
    }
    Cpx p = m[k][k];
    out.log_abs += std::log(std::abs(p));
    out.phase *= p / std::abs(p);
    for (std::size_t i = k + 1; i < n; ++i) {
      Cpx f = m[i][k] / p;
      for (std::size_t j = k; j < n; ++j) m[i][j] -= f * m[k][j];
    }
  }
  return out;
}

std::vector<std::vector<Cpx>> sylvester(const Form& P, const Form& Q) {
  const int d = form_degree(P);
  const int n = 2 * d;
  std::vector<std::vector<Cpx>> m(n, std::vector<Cpx>(n, 0.0));
  for (int r = 0; r < d; ++r)
    for (int j = 0; j <= d; ++j) {
      m[r][r + j] = P[j];
      m[d + r][r + j] = Q[j];
    }
  return m;
}

// Affine coefficient vector (descending powers of the chart variable) of one
// lift coordinate: P(z,1) in the standard chart, P(1,u) in the flipped one.
std::vector<Cpx> chart_coeffs(const Form& f, bool flip) {
  if (!flip) return f;
  return std::vector<Cpx>(f.rbegin(), f.rend());
}

Cpx horner(const std::vector<Cpx>& c, Cpx t) {
  Cpx v = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) v = v * t + c[i];
  return v;
}

Cpx horner_deriv(const std::vector<Cpx>& c, Cpx t) {
  int n = static_cast<int>(c.size()) - 1;
  Cpx v = 0.0;
  for (int i = 0; i < n; ++i) v = v * t + c[i] * static_cast<double>(n - i);
  return v;
}

}  // namespace

int CriticalSet::total_multiplicity() const {
  int s = 0;
  for (const auto& a : atoms) s += a.multiplicity;
  return s;
}

HomLift::HomLift(Form P_raw, Form Q_raw)
    : p_raw_(std::move(P_raw)), q_raw_(std::move(Q_raw)) {
  init();
}

HomLift::HomLift(ExactForm P_raw, ExactForm Q_raw) {
  p_raw_.reserve(P_raw.size());
  q_raw_.reserve(Q_raw.size());
  for (const auto& c : P_raw) p_raw_.push_back(c.to_complex());
  for (const auto& c : Q_raw) q_raw_.push_back(c.to_complex());
  exact_ = std::make_pair(std::move(P_raw), std::move(Q_raw));
  init();
}

void HomLift::init() {
  if (p_raw_.size() != q_raw_.size() || p_raw_.size() < 3)
    throw std::invalid_argument("HomLift: need two forms of equal degree >= 2");
  d_ = form_degree(p_raw_);
  double cmax = 0.0;
  for (const auto& c : p_raw_) cmax = std::max(cmax, std::abs(c));
  for (const auto& c : q_raw_) cmax = std::max(cmax, std::abs(c));
  if (!(cmax > 0.0) || !std::isfinite(cmax))
    throw std::invalid_argument("HomLift: coefficients must be finite, not all zero");
  p_ = form_scale(p_raw_, Cpx(1.0 / cmax));
  q_ = form_scale(q_raw_, Cpx(1.0 / cmax));

  // Degeneracy check; skipped for the huge lifts of high iterates, whose
  // validity follows from the base map's.
  if (d_ <= 64) {
    if (exact_) {
      GaussQ res = resultant_exact(exact_->first, exact_->second);
      if (res.is_zero()) throw NumericError("HomLift: degenerate map (Res F = 0)");
    } else {
      // Threshold on the normalized lift, whose coefficient scale is 1.
      if (log_abs_resultant_normalized() < std::log(1e-12))
        throw NumericError("HomLift: degenerate map (|Res F| below threshold)");
    }
  }
}

ProjPoint HomLift::evaluate(const ProjPoint& p) const {
  return ProjPoint(form_eval(p_, p), form_eval(q_, p));
}

ProjPoint HomLift::evaluate_iter(const ProjPoint& p, int k) const {
  ProjPoint w = p;
  for (int i = 0; i < k; ++i) w = evaluate(w);
  return w;
}

Form HomLift::jacobian_form() const {
  Form j = form_add(form_mul(form_dx(p_), form_dy(q_)),
                    form_scale(form_mul(form_dy(p_), form_dx(q_)), Cpx(-1.0)));
  double m = 0.0;
  for (const auto& c : j) m = std::max(m, std::abs(c));
  if (!(m > 0.0)) throw NumericError("jacobian_form: identically zero (degenerate map)");
  return j;
}

const CriticalSet& HomLift::critical_points() const {
  {
    std::lock_guard<std::mutex> lk(g_lazy_mutex);
    if (critical_) return *critical_;
  }
  RootList roots = roots_binary_form(jacobian_form());
  auto cs = std::make_shared<CriticalSet>();
  for (const auto& atom : roots.atoms)
    cs->atoms.push_back({atom.point, atom.multiplicity});
  if (cs->total_multiplicity() != 2 * d_ - 2) {
    std::ostringstream msg;
    msg << "critical_points: multiplicity sum " << cs->total_multiplicity()
        << " != " << 2 * d_ - 2 << " (residual_max " << roots.residual_max << ")";
    throw NumericError(msg.str());
  }
  std::lock_guard<std::mutex> lk(g_lazy_mutex);
  if (!critical_) critical_ = cs;
  return *critical_;
}

int HomLift::local_degree(const ProjPoint& p) const {
  for (const auto& atom : critical_points().atoms)
    if (chordal(p, atom.point) <= kPointTol) return 1 + atom.multiplicity;
  return 1;
}

Cpx HomLift::resultant() const {
  if (exact_) return resultant_exact(exact_->first, exact_->second).to_complex();
  DetLog det = complex_det_log(sylvester(p_raw_, q_raw_));
  return std::exp(det.log_abs) * det.phase;
}

double HomLift::log_abs_resultant_raw() const {
  if (exact_) return log_abs_gaussq(resultant_exact(exact_->first, exact_->second));
  return complex_det_log(sylvester(p_raw_, q_raw_)).log_abs;
}

double HomLift::log_abs_resultant_normalized() const {
  double cmax = 0.0;
  for (const auto& c : p_raw_) cmax = std::max(cmax, std::abs(c));
  for (const auto& c : q_raw_) cmax = std::max(cmax, std::abs(c));
  if (exact_)
    return log_abs_resultant_raw() - 2.0 * d_ * std::log(cmax);
  return complex_det_log(sylvester(p_, q_)).log_abs;
}

HomLift HomLift::iterate(int k, int max_degree) const {
  if (k < 1) throw std::invalid_argument("iterate: k >= 1 required");
  double deg = std::pow(static_cast<double>(d_), k);
  if (deg > static_cast<double>(max_degree))
    throw BudgetError("iterate: degree d^k exceeds budget");
  Form rp = p_, rq = q_;
  for (int i = 1; i < k; ++i) {
    Form np = form_compose(p_, rp, rq);
    Form nq = form_compose(q_, rp, rq);
    // renormalize between steps to keep coefficients at unit scale
    double m = 0.0;
    for (const auto& c : np) m = std::max(m, std::abs(c));
    for (const auto& c : nq) m = std::max(m, std::abs(c));
    rp = form_scale(np, Cpx(1.0 / m));
    rq = form_scale(nq, Cpx(1.0 / m));
  }
  return HomLift(rp, rq);
}

HomLift HomLift::conjugate(const Mat2& h) const {
  if (!h.is_unitary())
    throw std::invalid_argument("conjugate: matrix is not unitary within 1e-12");
  Form l0 = {h.a, h.b}, l1 = {h.c, h.d};
  Form ph = form_compose(p_raw_, l0, l1);
  Form qh = form_compose(q_raw_, l0, l1);
  Cpx det = h.det();
  Form np = form_add(form_scale(ph, h.d / det), form_scale(qh, -h.b / det));
  Form nq = form_add(form_scale(ph, -h.c / det), form_scale(qh, h.a / det));
  return HomLift(np, nq);
}

Cpx orbit_multiplier(const HomLift& F, const std::vector<ProjPoint>& cycle) {
  const std::size_t p = cycle.size();
  Cpx lambda = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    const ProjPoint& w = cycle[j];
    const ProjPoint& next = cycle[(j + 1) % p];
    bool flip_in = w.is_infinity() || std::abs(w.affine_value()) > 1.0;
    bool flip_out = next.is_infinity() || std::abs(next.affine_value()) > 1.0;
    std::vector<Cpx> num = chart_coeffs(F.P(), flip_in);
    std::vector<Cpx> den = chart_coeffs(F.Q(), flip_in);
    if (flip_out) std::swap(num, den);
    Cpx t = flip_in ? (w.is_infinity() ? Cpx(0.0) : 1.0 / w.affine_value())
                    : w.affine_value();
    Cpx n = horner(num, t), dn = horner_deriv(num, t);
    Cpx d = horner(den, t), dd = horner_deriv(den, t);
    lambda *= (dn * d - n * dd) / (d * d);
  }
  return lambda;
}

HomLift lift_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  bool all_integer = true;
  auto read_form = [&](const nlohmann::json& arr, Form& flt, ExactForm& exact) {
    for (const auto& entry : arr) {
      double re = 0.0, im = 0.0;
      if (entry.is_array()) {
        if (!entry.empty()) re = entry[0].get<double>();
        if (entry.size() >= 2) im = entry[1].get<double>();
        if (!entry.empty() && !entry[0].is_number_integer()) all_integer = false;
        if (entry.size() >= 2 && !entry[1].is_number_integer()) all_integer = false;
      } else if (entry.is_number()) {
        re = entry.get<double>();
        if (!entry.is_number_integer()) all_integer = false;
      } else {
        throw std::invalid_argument("lift JSON: coefficients must be numbers or [re,im] pairs");
      }
      flt.emplace_back(re, im);
      exact.emplace_back(GaussQ(mpq_class(re), mpq_class(im)));
    }
  };
  Form pf, qf;
  ExactForm pe, qe;
  read_form(doc.at("P"), pf, pe);
  read_form(doc.at("Q"), qf, qe);
  if (doc.contains("d")) {
    std::size_t want = doc["d"].get<std::size_t>() + 1;
    if (pf.size() != want || qf.size() != want)
      throw std::invalid_argument("lift JSON: coefficient count does not match degree");
  }
  if (all_integer) return HomLift(std::move(pe), std::move(qe));
  return HomLift(std::move(pf), std::move(qf));
}

std::vector<PeriodicPoint> HomLift::classify_periodic(int p_max) const {
  if (p_max < 1 || p_max > 3)
    throw std::invalid_argument("classify_periodic: p_max must be in 1..3");
  std::vector<PeriodicPoint> out;
  const double match_tol = 1e-8;
  for (int p = 1; p <= p_max; ++p) {
    HomLift fp = (p == 1) ? *this : iterate(p);
    // fixed-point divisor X*Q_p - Y*P_p, degree d^p + 1
    Form fix(fp.P().size() + 1, 0.0);
    for (std::size_t i = 0; i < fp.Q().size(); ++i) fix[i] += fp.Q()[i];
    for (std::size_t i = 0; i < fp.P().size(); ++i) fix[i + 1] -= fp.P()[i];
    RootList roots = roots_binary_form(fix);
    for (const auto& atom : roots.atoms) {
      std::vector<ProjPoint> orbit = {atom.point};
      int minimal = p;
      for (int q = 1; q < p; ++q) {
        orbit.push_back(evaluate(orbit.back()));
        if (chordal(orbit.back(), atom.point) <= match_tol) {
          minimal = q;
          break;
        }
      }
      if (minimal < p) continue;  // already reported at its minimal period
      orbit.resize(1);
      for (int q = 1; q < p; ++q) orbit.push_back(evaluate(orbit.back()));
      Cpx lambda = orbit_multiplier(*this, orbit);
      double a = std::abs(lambda);
      PeriodicPoint pp;
      pp.point = atom.point;
      pp.period = p;
      pp.multiplier = lambda;
      if (a <= 1e-8)
        pp.cls = "superattracting";
      else if (a < 1.0 - 1e-8)
        pp.cls = "attracting";
      else if (a <= 1.0 + 1e-8)
        pp.cls = "indifferent";
      else
        pp.cls = "repelling";
      out.push_back(pp);
    }
  }
  return out;
}

}  // namespace feketelab
