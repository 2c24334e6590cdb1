#include "feketelab/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "feketelab/parallel.hpp"
#include "feketelab/rootsolve.hpp"

namespace feketelab {

namespace {

bool atom_less(const WeightedAtom& a, const WeightedAtom& b) {
  bool ia = a.point.is_infinity(), ib = b.point.is_infinity();
  if (ia != ib) return ib;
  if (ia) return false;
  Cpx za = a.point.affine_value(), zb = b.point.affine_value();
  if (za.real() != zb.real()) return za.real() < zb.real();
  return za.imag() < zb.imag();
}

// Merges atoms within kPointTol. Cells of a hash grid over the R^3 sphere
// embedding (where the chordal metric is the Euclidean one) provide the
// candidate pairs, so the pass stays near-linear; union-find plus a fixed
// ordering keeps the result scheduling-independent.
std::vector<WeightedAtom> merge_atoms(std::vector<WeightedAtom> atoms) {
  const std::size_t n = atoms.size();
  if (n <= 1) return atoms;

  std::sort(atoms.begin(), atoms.end(), atom_less);

  auto embed = [](const ProjPoint& p) {
    // coordinates of the radius-1/2 sphere model, scaled to diameter 1
    Cpx z0 = p.z0(), z1 = p.z1();
    Cpx cross = z0 * std::conj(z1);
    return std::array<double, 3>{cross.real(), cross.imag(),
                                 0.5 * (std::norm(z0) - std::norm(z1))};
  };

  const double cell = 4.0 * kPointTol;
  std::map<std::array<long long, 3>, std::vector<std::size_t>> grid;
  std::vector<std::array<double, 3>> xyz(n);
  for (std::size_t i = 0; i < n; ++i) {
    xyz[i] = embed(atoms[i].point);
    grid[{static_cast<long long>(std::floor(xyz[i][0] / cell)),
          static_cast<long long>(std::floor(xyz[i][1] / cell)),
          static_cast<long long>(std::floor(xyz[i][2] / cell))}]
        .push_back(i);
  }

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  for (std::size_t i = 0; i < n; ++i) {
    std::array<long long, 3> base{static_cast<long long>(std::floor(xyz[i][0] / cell)),
                                  static_cast<long long>(std::floor(xyz[i][1] / cell)),
                                  static_cast<long long>(std::floor(xyz[i][2] / cell))};
    for (long long dx = -1; dx <= 1; ++dx)
      for (long long dy = -1; dy <= 1; ++dy)
        for (long long dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({base[0] + dx, base[1] + dy, base[2] + dz});
          if (it == grid.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            if (chordal(atoms[i].point, atoms[j].point) <= kPointTol) {
              std::size_t a = find(i), b = find(j);
              if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
          }
        }
  }

  std::vector<WeightedAtom> out;
  std::vector<long long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long long>(out.size());
      out.push_back(atoms[i]);
    } else {
      out[static_cast<std::size_t>(slot[r])].weight += atoms[i].weight;
    }
  }
  std::sort(out.begin(), out.end(), atom_less);
  return out;
}

}  // namespace

std::int64_t PullbackMeasure::total_mass() const {
  std::int64_t s = 0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

std::int64_t PullbackMeasure::eta() const {
  std::int64_t m = 0;
  for (const auto& a : atoms) m = std::max(m, a.weight);
  return m;
}

std::int64_t PullbackMeasure::D() const {
  std::int64_t s = 0;
  for (const auto& a : atoms) s += a.weight * a.weight;
  return s;
}

PullbackMeasure PullbackMeasure::dirac(const ProjPoint& a) {
  PullbackMeasure nu;
  nu.level = 0;
  nu.base = a;
  nu.atoms = {{a, 1}};
  return nu;
}

std::string PullbackMeasure::to_csv() const {
  std::ostringstream os;
  os << "# feketelab v1\n";
  os << "re,im,is_infinity,weight\n";
  for (const auto& a : atoms) {
    if (a.point.is_infinity()) {
      os << "0,0,1," << a.weight << "\n";
    } else {
      Cpx z = a.point.affine_value();
      os << fmt_g17(z.real()) << "," << fmt_g17(z.imag()) << ",0," << a.weight << "\n";
    }
  }
  return os.str();
}

PullbackMeasure pull_back_once(const HomLift& F, const PullbackMeasure& nu,
                               std::int64_t max_atoms) {
  const int d = F.degree();
  std::int64_t next_mass = nu.total_mass() * d;
  if (next_mass > max_atoms)
    throw BudgetError("pull_back_once: level would exceed the atom budget (raise it explicitly)");

  PullbackMeasure out;
  out.level = nu.level + 1;
  out.base = nu.base;
  out.at_critical_value = nu.at_critical_value;

  // One degree-d solve per atom; independent, deterministic per input.
  std::vector<std::vector<WeightedAtom>> per_atom(nu.atoms.size());
  std::vector<bool> hit_critical(nu.atoms.size(), false);
  std::vector<std::string> errors(nu.atoms.size());
  run_blocks(nu.atoms.size(), [&](std::size_t i) {
    const auto& src = nu.atoms[i];
    Form form(F.P().size());
    Cpx b0 = src.point.z0(), b1 = src.point.z1();
    for (std::size_t j = 0; j < form.size(); ++j)
      form[j] = b1 * F.P()[j] - b0 * F.Q()[j];
    try {
      RootList roots = roots_binary_form(form);
      for (const auto& r : roots.atoms) {
        per_atom[i].push_back({r.point, src.weight * r.multiplicity});
        if (r.multiplicity > 1) hit_critical[i] = true;
      }
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (!e.empty()) throw NumericError("pull_back_once: " + e);

  std::vector<WeightedAtom> collected;
  collected.reserve(static_cast<std::size_t>(next_mass));
  for (std::size_t i = 0; i < per_atom.size(); ++i) {
    if (hit_critical[i]) out.at_critical_value = true;
    collected.insert(collected.end(), per_atom[i].begin(), per_atom[i].end());
  }
  out.atoms = merge_atoms(std::move(collected));

  if (out.total_mass() != next_mass) {
    std::ostringstream msg;
    msg << "pull_back_once: mass " << out.total_mass() << " != d^(k+1) = " << next_mass;
    throw NumericError(msg.str());
  }
  return out;
}

std::pair<std::int64_t, std::int64_t> eta_and_D(const PullbackMeasure& nu) {
  std::int64_t eta = nu.eta(), D = nu.D(), mass = nu.total_mass();
  if (D < mass || D > mass * eta)
    throw NumericError("eta_and_D: diagonal mass outside [d^k, d^k eta] (corrupt weights)");
  return {eta, D};
}

std::vector<PullbackMeasure> pullback_levels(const HomLift& F, const ProjPoint& a, int k_max,
                                             std::int64_t max_atoms) {
  std::vector<PullbackMeasure> levels;
  PullbackMeasure nu = PullbackMeasure::dirac(a);
  for (int k = 1; k <= k_max; ++k) {
    nu = pull_back_once(F, nu, max_atoms);
    levels.push_back(nu);
  }
  return levels;
}

EtaGrowthReport eta_growth_probe(const HomLift& F, const ProjPoint& a, int k_max,
                                 std::int64_t max_atoms) {
  const int d = F.degree();
  EtaGrowthReport rep;
  rep.bound = 1;
  for (int i = 0; i < 2 * d - 2; ++i) rep.bound *= d;

  std::int64_t dpow = 1;
  bool exceptional = true;
  bool super = false;
  for (const auto& nu : pullback_levels(F, a, k_max, max_atoms)) {
    dpow *= d;
    std::int64_t eta = nu.eta();
    rep.eta_seq.push_back(eta);
    rep.sup_eta = std::max(rep.sup_eta, eta);
    if (eta != dpow) exceptional = false;
    if (eta > rep.bound) super = true;
  }
  rep.classification =
      exceptional ? "exceptional-candidate" : (super ? "superattracting-candidate" : "ordinary");
  return rep;
}

}  // namespace feketelab
