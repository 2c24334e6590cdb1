#include "feketelab/fekete.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "feketelab/parallel.hpp"

namespace feketelab {

namespace {

std::mutex g_cf_mutex;

constexpr int kOrbitHorizon = 128;  // cycle-detection horizon for critical orbits

double dpow(int d, int k) { return std::pow(static_cast<double>(d), k); }

}  // namespace

FeketeAnalyzer::FeketeAnalyzer(GreenEvaluator green) : green_(std::move(green)) {}

double FeketeAnalyzer::energy_direct(const PullbackMeasure& nu) const {
  const std::size_t n = nu.atoms.size();
  const int d = green_.degree();

  // Escape rates once per atom, in parallel blocks.
  std::vector<double> g(n);
  const std::size_t block = 64;
  const std::size_t nblocks = (n + block - 1) / block;
  run_blocks(nblocks, [&](std::size_t b) {
    for (std::size_t i = b * block; i < std::min(n, (b + 1) * block); ++i)
      g[i] = green_.escape_rate(nu.atoms[i].point);
  });

  // Off-diagonal pair sum, fixed block order.
  std::vector<NeumaierSum> partial(nblocks);
  run_blocks(nblocks, [&](std::size_t b) {
    for (std::size_t i = b * block; i < std::min(n, (b + 1) * block); ++i) {
      const auto& ai = nu.atoms[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        const auto& aj = nu.atoms[j];
        double phi = green_.phi_f_cached(ai.point, aj.point, g[i], g[j]);
        partial[b].add(static_cast<double>(ai.weight) * static_cast<double>(aj.weight) * phi);
      }
    }
  });
  NeumaierSum total;
  for (const auto& p : partial) total.add(p);
  return 2.0 * total.value() / dpow(d, 2 * nu.level);
}

double FeketeAnalyzer::c_z_regular(const ProjPoint& z) const {
  const auto& crit = green_.lift().critical_points();
  for (const auto& c : crit.atoms)
    if (chordal(z, c.point) <= kPointTol)
      throw std::domain_error("c_z_regular: z is critical; use c_z_limit or c_z_analytic");
  double v = -std::log(static_cast<double>(green_.degree())) + green_.bifurcation_potential();
  for (const auto& c : crit.atoms) v += c.multiplicity * green_.phi_f(z, c.point);
  return v;
}

double FeketeAnalyzer::c_z_limit(const ProjPoint& z, double* spread) const {
  const int m = green_.lift().local_degree(z);
  const ProjPoint fz = green_.lift().evaluate(z);
  Cpx p0 = z.z0(), p1 = z.z1();
  Cpx t0 = -std::conj(p1), t1 = std::conj(p0);  // unit tangent

  // h(u) = Phi_f(f(u), f(z)) - m Phi_f(u, z), averaged over 4 tangent
  // directions, then extrapolated on the radius ladder. The Green function is
  // only Lipschitz across the Julia set, so after averaging h still carries a
  // genuine O(r) term; two Richardson levels (r, then r^2) remove the leading
  // orders.
  const double radii[] = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  double h[5];
  for (int ri = 0; ri < 5; ++ri) {
    double s = std::asin(radii[ri]);
    double cs = std::cos(s), sn = std::sin(s);
    NeumaierSum acc;
    for (int dir = 0; dir < 4; ++dir) {
      double th = 0.5 * M_PI * dir + 0.37;
      Cpx ph = Cpx(std::cos(th), std::sin(th));
      ProjPoint u(cs * p0 + sn * ph * t0, cs * p1 + sn * ph * t1);
      acc.add(green_.phi_f(green_.lift().evaluate(u), fz) - m * green_.phi_f(u, z));
    }
    h[ri] = acc.value() / 4.0;
  }
  double r1[4];
  for (int i = 0; i < 4; ++i) r1[i] = (10.0 * h[i + 1] - h[i]) / 9.0;
  double r2[3];
  for (int i = 0; i < 3; ++i) r2[i] = (100.0 * r1[i + 1] - r1[i]) / 99.0;
  // The finest radii amplify rounding in the image-distance log (worst at
  // critical z); take the middle extrapolant and report the full spread.
  double value = r2[1];
  double sp = std::max({std::abs(r2[0] - r2[1]), std::abs(r2[2] - r2[1]), std::abs(r2[0] - r2[2])});
  if (spread) *spread = sp;
  return value;
}

double FeketeAnalyzer::c_z_analytic(const ProjPoint& z) const {
  const int m = green_.lift().local_degree(z);
  const ProjPoint fz = green_.lift().evaluate(z);
  double am = green_.chordal_taylor_coeff(z, m);
  return std::log(am) - 2.0 * green_.green_gf(fz) + 2.0 * m * green_.green_gf(z);
}

double FeketeAnalyzer::c_z_iterate(const ProjPoint& z, int k) const {
  // orbit z, f(z), ..., f^k(z) with the local degree of f at each point
  std::vector<ProjPoint> orbit(1, z);
  for (int j = 0; j < k; ++j) orbit.push_back(green_.lift().evaluate(orbit.back()));
  std::vector<int> deg(k + 1);
  for (int j = 0; j <= k; ++j) deg[j] = green_.lift().local_degree(orbit[j]);

  NeumaierSum acc;
  for (int j = 1; j <= k; ++j) {
    // deg_{f^j(z)}(f^(k-j)) = prod_{i=j..k-1} deg_{f^i(z)} f
    double w = 1.0;
    for (int i = j; i < k; ++i) w *= deg[i];
    const ProjPoint& at = orbit[j - 1];
    double cz = (deg[j - 1] > 1) ? c_z_analytic(at) : c_z_regular(at);
    acc.add(w * cz);
  }
  return acc.value();
}

double FeketeAnalyzer::energy_cz(const PullbackMeasure& nu) const {
  const int d = green_.degree();
  const int k = nu.level;
  NeumaierSum acc;
  for (const auto& atom : nu.atoms)
    acc.add(static_cast<double>(atom.weight) * c_z_iterate(atom.point, k));
  return acc.value() / dpow(d, 2 * k);
}

ProximityData FeketeAnalyzer::proximity_terms(const ProjPoint& a, int k,
                                              const std::vector<std::int64_t>& eta_seq) const {
  const auto& crit = green_.lift().critical_points();
  const int d = green_.degree();
  ProximityData out;
  out.terms.resize(k);

  std::vector<ProjPoint> orbit;
  orbit.reserve(crit.atoms.size());
  for (const auto& c : crit.atoms) orbit.push_back(c.point);

  NeumaierSum plain, weighted;
  for (int j = 1; j <= k; ++j) {
    for (auto& w : orbit) w = green_.lift().evaluate(w);
    out.terms[j - 1].resize(crit.atoms.size());
    NeumaierSum level;
    for (std::size_t ci = 0; ci < crit.atoms.size(); ++ci) {
      double dist = chordal(orbit[ci], a);
      if (dist <= kPointTol) {
        out.terms[j - 1][ci] = std::numeric_limits<double>::quiet_NaN();
        out.excluded.emplace_back(j, static_cast<int>(ci));
        continue;
      }
      double term = -std::log(dist) / dpow(d, j);
      out.terms[j - 1][ci] = term;
      out.max_term = std::max(out.max_term, term);
      level.add(crit.atoms[ci].multiplicity * term);
    }
    plain.add(level.value());
    weighted.add(static_cast<double>(eta_seq[j - 1]) * level.value());
  }
  out.sum_plain = plain.value();
  out.sum_eta_weighted = weighted.value();
  return out;
}

void FeketeAnalyzer::compute_cf() const {
  const auto& crit = green_.lift().critical_points();
  const int d = green_.degree();
  auto cf = std::make_shared<CfEstimate>();

  cf->b_abs = std::abs(green_.bifurcation_potential());

  for (const auto& c : crit.atoms)
    cf->max_cc = std::max(cf->max_cc, std::abs(c_z_analytic(c.point)));

  // Classify each critical orbit preperiodic/wandering within the horizon;
  // for preperiodic ones take the sup of |c_w(f)| over tail plus cycle.
  cf->critical_wandering.resize(crit.atoms.size(), true);
  for (std::size_t ci = 0; ci < crit.atoms.size(); ++ci) {
    std::vector<ProjPoint> orbit = {crit.atoms[ci].point};
    bool preperiodic = false;
    for (int step = 0; step < kOrbitHorizon && !preperiodic; ++step) {
      orbit.push_back(green_.lift().evaluate(orbit.back()));
      for (std::size_t prev = 0; prev + 1 < orbit.size(); ++prev)
        if (chordal(orbit.back(), orbit[prev]) <= kPointTol) {
          preperiodic = true;
          orbit.pop_back();  // orbit now lists the support once
          break;
        }
    }
    if (!preperiodic) {
      cf->heuristic = true;  // could be wandering or just a long cycle
      continue;
    }
    cf->critical_wandering[ci] = false;
    double sup = 0.0;
    for (const auto& w : orbit) {
      double cw = (green_.lift().local_degree(w) > 1) ? c_z_analytic(w)
                                                      : c_z_regular(w);
      sup = std::max(sup, std::abs(cw));
    }
    cf->preperiodic_sup = std::max(cf->preperiodic_sup, sup);
  }

  double max_log_sep = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < crit.atoms.size(); ++i)
    for (std::size_t j = i + 1; j < crit.atoms.size(); ++j)
      max_log_sep = std::max(max_log_sep, std::log(chordal(crit.atoms[i].point, crit.atoms[j].point)));
  cf->crit_sep_term = std::isfinite(max_log_sep) ? -(2.0 * d - 2.0) * max_log_sep : 0.0;

  cf->gf_term = (8.0 * d - 8.0) * green_.gf_sup_estimate();
  if (!green_.gf_sup_stable()) cf->heuristic = true;

  cf->value = cf->b_abs + cf->max_cc + 2.0 * cf->preperiodic_sup + cf->crit_sep_term +
              std::log(static_cast<double>(d)) + cf->gf_term;

  std::lock_guard<std::mutex> lk(g_cf_mutex);
  if (!cf_) cf_ = cf;
}

const CfEstimate& FeketeAnalyzer::cf_estimate() const {
  {
    std::lock_guard<std::mutex> lk(g_cf_mutex);
    if (cf_) return *cf_;
  }
  compute_cf();
  return *cf_;
}

double FeketeAnalyzer::cfa_constant(const ProjPoint& a, int k,
                                    const std::vector<std::int64_t>& eta_seq, int* k_a) const {
  const auto& crit = green_.lift().critical_points();
  const CfEstimate& cf = cf_estimate();
  if (k_a) *k_a = 0;

  double total = 0.0;
  std::vector<ProjPoint> orbit;
  for (const auto& c : crit.atoms) orbit.push_back(c.point);
  for (int j = 1; j <= k; ++j) {
    for (auto& w : orbit) w = green_.lift().evaluate(w);
    for (std::size_t ci = 0; ci < crit.atoms.size(); ++ci) {
      if (!cf.critical_wandering[ci]) continue;
      if (chordal(orbit[ci], a) <= kPointTol) {
        total += static_cast<double>(eta_seq[j - 1]) *
                 std::abs(c_z_iterate(crit.atoms[ci].point, j));
        if (k_a) *k_a = j;
      }
    }
  }
  return total;
}

std::pair<double, double> FeketeAnalyzer::sandwich_bounds(
    int k, const ProximityData& prox, const std::vector<std::int64_t>& eta_seq, double cf,
    double cfa) const {
  const int d = green_.degree();
  double dk = dpow(d, k);
  double eta_sum = 0.0;
  for (auto e : eta_seq) eta_sum += static_cast<double>(e);
  double lower = -prox.sum_eta_weighted / dk - cf * eta_sum / dk - cfa / dk;
  double upper = -prox.sum_plain / dk + cf * eta_sum / dk + cfa / dk;
  return {lower, upper};
}

RateBundle FeketeAnalyzer::rate_bundle(int d, const std::vector<std::int64_t>& eta_seq,
                                       const std::vector<std::int64_t>& D_seq) {
  const int k = static_cast<int>(eta_seq.size());
  RateBundle r;
  double dk = dpow(d, k);
  std::int64_t eta_sum = 0;
  for (auto e : eta_seq) eta_sum += e;
  r.r1 = static_cast<double>(eta_sum) / dk;
  r.r2 = static_cast<double>(k) * static_cast<double>(D_seq[k - 1]) / (dk * dk);
  r.r3 = static_cast<double>(k) * static_cast<double>(eta_seq[k - 1]) / dk;

  // max(r1, r2) <= r3, checked in exact integer arithmetic:
  // sum eta_j <= k eta_k  and  D_k <= d^k eta_k.
  std::int64_t dk_int = 1;
  for (int i = 0; i < k; ++i) dk_int *= d;
  if (eta_sum > static_cast<std::int64_t>(k) * eta_seq[k - 1] ||
      D_seq[k - 1] > dk_int * eta_seq[k - 1])
    throw NumericError("rate_bundle: rate inequality violated (corrupt weights)");
  return r;
}

EnergyReport FeketeAnalyzer::analyze(const std::vector<PullbackMeasure>& levels) const {
  if (levels.empty()) throw std::invalid_argument("analyze: need at least one level");
  const PullbackMeasure& nu = levels.back();
  const int k = nu.level;

  EnergyReport rep;
  rep.k = k;
  rep.point = nu.base.to_string();
  for (const auto& lvl : levels) {
    rep.eta_seq.push_back(lvl.eta());
    rep.D_seq.push_back(lvl.D());
  }
  rep.energy_direct = energy_direct(nu);
  rep.energy_cz = energy_cz(nu);

  ProximityData prox = proximity_terms(nu.base, k, rep.eta_seq);
  rep.proximity_max = prox.max_term;
  rep.proximity_sum = prox.sum_plain;
  rep.proximity_sum_weighted = prox.sum_eta_weighted;

  const CfEstimate& cf = cf_estimate();
  rep.cf_est = cf.value;
  rep.cfa = cfa_constant(nu.base, k, rep.eta_seq, &rep.k_a);
  auto [lo, hi] = sandwich_bounds(k, prox, rep.eta_seq, cf.value, rep.cfa);
  rep.lower_bound = lo;
  rep.upper_bound = hi;
  rep.rates = rate_bundle(green_.degree(), rep.eta_seq, rep.D_seq);

  rep.flags.at_critical_value = nu.at_critical_value;
  rep.flags.cf_heuristic = cf.heuristic;
  rep.flags.sandwich_warning =
      !(rep.lower_bound <= rep.energy_direct && rep.energy_direct <= rep.upper_bound);
  return rep;
}

std::string EnergyReport::to_json() const {
  nlohmann::json j;
  j["k"] = k;
  j["point"] = point;
  j["energy_direct"] = energy_direct;
  j["energy_cz"] = energy_cz;
  j["eta_seq"] = eta_seq;
  j["D_seq"] = D_seq;
  j["proximity_max"] = proximity_max;
  j["proximity_sum"] = proximity_sum;
  j["proximity_sum_weighted"] = proximity_sum_weighted;
  j["lower_bound"] = lower_bound;
  j["upper_bound"] = upper_bound;
  j["C_f_est"] = cf_est;
  j["C_fa"] = cfa;
  j["k_a"] = k_a;
  j["rates"] = {{"r1", rates.r1}, {"r2", rates.r2}, {"r3", rates.r3}};
  j["flags"] = {{"at_critical_value", flags.at_critical_value},
                {"cf_heuristic", flags.cf_heuristic},
                {"sandwich_warning", flags.sandwich_warning}};
  return j.dump();
}

std::string EnergyReport::csv_header() {
  return "k,point,energy_direct,energy_cz,eta_k,D_k,proximity_max,proximity_sum,"
         "proximity_sum_weighted,lower_bound,upper_bound,C_f_est,C_fa,r1,r2,r3,"
         "at_critical_value,cf_heuristic,sandwich_warning";
}

std::string EnergyReport::to_csv_row() const {
  std::ostringstream os;
  os << k << "," << point << "," << fmt_g17(energy_direct) << "," << fmt_g17(energy_cz) << ","
     << eta_seq.back() << "," << D_seq.back() << "," << fmt_g17(proximity_max) << ","
     << fmt_g17(proximity_sum) << "," << fmt_g17(proximity_sum_weighted) << ","
     << fmt_g17(lower_bound) << "," << fmt_g17(upper_bound) << "," << fmt_g17(cf_est) << ","
     << fmt_g17(cfa) << "," << fmt_g17(rates.r1) << "," << fmt_g17(rates.r2) << ","
     << fmt_g17(rates.r3) << "," << flags.at_critical_value << "," << flags.cf_heuristic << ","
     << flags.sandwich_warning;
  return os.str();
}

}  // namespace feketelab
