#include "qdyn/rescaling.hpp"

#include <cmath>
#include <stdexcept>

namespace qdyn {

namespace {

double loc_prefactor(const PseudoIonParams& p, double omega) {
  return 4 * M_PI * std::pow(p.r_loc, 3) / omega * std::sqrt(M_PI / 2);
}

IVec3 doubled(const IVec3& p) { return {2 * p[0], 2 * p[1], 2 * p[2]}; }

std::vector<const PseudoIonParams*> census_species(const InstanceSpec& inst) {
  std::vector<const PseudoIonParams*> out;
  for (const auto& s : inst.census) out.push_back(&s.params);
  return out;
}

double ion_coulomb(const InstanceSpec& inst, Exec exec) {
  auto t = box_sum(doubled(inst.trunc.p_max), inst.trunc.b, true, 1,
                   [](const Eigen::Vector3d&, double k2, double* a) { a[0] += 1.0 / k2; }, exec);
  return 2 * M_PI / inst.cell.volume() * inst.ion_charge_pairs() * t[0];
}

}  // namespace

std::vector<LocalSums> local_sums(const std::vector<const PseudoIonParams*>& species, const BasisSpec& electron,
                                  double* coulomb, Exec exec) {
  const int ns = static_cast<int>(species.size());
  std::vector<double> r2(ns);
  for (int i = 0; i < ns; ++i) r2[i] = species[i]->r_loc * species[i]->r_loc;
  const int width = 5 * ns + 1;
  auto acc = box_sum(
      doubled(electron.p_max), electron.b, true, width,
      [&](const Eigen::Vector3d&, double k2, double* a) {
        a[5 * ns] += 1.0 / k2;
        for (int i = 0; i < ns; ++i) {
          double x2 = k2 * r2[i];
          if (x2 > 1400.0) continue;
          double e = std::exp(-0.5 * x2);
          double* s = a + 5 * i;
          s[0] += e / x2;
          s[1] += e;
          s[2] += e * x2;
          s[3] += e * x2 * x2;
          s[4] += e * x2 * x2 * x2;
        }
      },
      exec);
  if (coulomb) *coulomb = acc[5 * ns];
  std::vector<LocalSums> out(ns);
  for (int i = 0; i < ns; ++i)
    for (int s = 0; s < 5; ++s) out[i].S[s] = acc[5 * i + s];
  return out;
}

std::vector<NlSums> nonlocal_sums(const std::vector<const PseudoIonParams*>& species, const BasisSpec& electron,
                                  Exec exec) {
  struct Chan {
    int species, l;
    NonlocalEigen e;
  };
  std::vector<Chan> chans;
  for (int i = 0; i < static_cast<int>(species.size()); ++i)
    for (const auto& b : species[i]->blocks) chans.push_back({i, b.l, nonlocal_eigen(b)});
  const int nc = static_cast<int>(chans.size());
  std::vector<NlSums> out(species.size());
  for (auto& o : out)
    for (auto& r : o) r.fill(0.0);
  if (nc == 0) return out;
  auto acc = box_sum(
      electron.p_max, electron.b, false, 3 * nc,
      [&](const Eigen::Vector3d&, double k2, double* a) {
        double k = std::sqrt(k2);
        for (int c = 0; c < nc; ++c) {
          const auto& ch = chans[c];
          double x = k * ch.e.r;
          double g[3] = {g_radial(1, ch.l, x), g_radial(2, ch.l, x), g_radial(3, ch.l, x)};
          for (int al = 0; al < 3; ++al) {
            double G = ch.e.X(0, al) * g[0] + ch.e.X(1, al) * g[1] + ch.e.X(2, al) * g[2];
            a[3 * c + al] += G * G;
          }
        }
      },
      exec);
  for (int c = 0; c < nc; ++c)
    for (int al = 0; al < 3; ++al) out[chans[c].species][chans[c].l][al] = acc[3 * c + al];
  return out;
}

double pair_loc_from_sums(const PseudoIonParams& p, const LocalSums& s, double omega) {
  auto c = local_coeffs(p);
  double v = 0.0;
  for (int i = 0; i < 5; ++i) v += std::abs(c[i]) * s.S[i];
  return loc_prefactor(p, omega) * v;
}

double pair_nl_from_sums(const PseudoIonParams& p, const NlSums& s, double omega) {
  double v = 0.0;
  for (const auto& b : p.blocks) {
    auto e = nonlocal_eigen(b);
    for (int al = 0; al < 3; ++al)
      v += 4 * M_PI / omega * std::pow(b.r, 3) * (2 * b.l + 1) * std::abs(e.D[al]) * s[b.l][al];
  }
  return v;
}

double lambda_tilde_loc(const PseudoIonParams& p, const BasisSpec& electron, Exec exec) {
  auto s = local_sums({&p}, electron, nullptr, exec);
  return pair_loc_from_sums(p, s[0], electron.volume);
}

double lambda_tilde_nl(const PseudoIonParams& p, const BasisSpec& electron, Exec exec) {
  auto s = nonlocal_sums({&p}, electron, exec);
  return pair_nl_from_sums(p, s[0], electron.volume);
}

double lambda_tilde_loc_bound(const PseudoIonParams& p) {
  auto c = local_coeffs(p);
  return std::abs(c[0]) + std::abs(c[1]) + 3 * std::abs(c[2]) + 15 * std::abs(c[3]) + 105 * std::abs(c[4]);
}

double lambda_tilde_nl_bound(const PseudoIonParams& p) {
  double v = 0.0;
  for (const auto& b : p.blocks) {
    auto e = nonlocal_eigen(b);
    for (int al = 0; al < 3; ++al)
      if (e.D[al] != 0.0) v += (2 * b.l + 1) * std::abs(e.D[al]) * nl_bound_coefficient(e, al);
  }
  return v;
}

std::pair<double, double> lambda_kinetic(const InstanceSpec& inst) {
  double t_el = static_cast<double>(inst.eta_val) * max_ksq_box(inst.electron.p_max, inst.electron.b) / 2;
  double t_ion = inst.inverse_mass_sum() * max_ksq_box(inst.ion.p_max, inst.ion.b) / 2;
  return {t_el, t_ion};
}

std::pair<double, double> lambda_coulomb(const InstanceSpec& inst, Exec exec) {
  const double omega = inst.cell.volume();
  double ev = static_cast<double>(inst.eta_val);
  double v_el = 0.0;
  if (inst.eta_val > 1) {
    auto s = box_sum(doubled(inst.electron.p_max), inst.electron.b, true, 1,
                     [](const Eigen::Vector3d&, double k2, double* a) { a[0] += 1.0 / k2; }, exec);
    v_el = 2 * M_PI / omega * ev * (ev - 1) * s[0];
  }
  return {v_el, ion_coulomb(inst, exec)};
}

std::pair<double, std::vector<double>> lambda_local(const InstanceSpec& inst, Exec exec) {
  auto sp = census_species(inst);
  auto sums = local_sums(sp, inst.electron, nullptr, exec);
  std::vector<double> per(sp.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    per[i] = pair_loc_from_sums(*sp[i], sums[i], inst.electron.volume);
    total += inst.census[i].count * per[i];
  }
  return {static_cast<double>(inst.eta_val) * total, per};
}

std::pair<double, std::vector<double>> lambda_nonlocal(const InstanceSpec& inst, Exec exec) {
  auto sp = census_species(inst);
  auto sums = nonlocal_sums(sp, inst.electron, exec);
  std::vector<double> per(sp.size());
  double total = 0.0;
  for (std::size_t i = 0; i < sp.size(); ++i) {
    per[i] = pair_nl_from_sums(*sp[i], sums[i], inst.electron.volume);
    total += inst.census[i].count * per[i];
  }
  return {static_cast<double>(inst.eta_val) * total, per};
}

TermLambdas lambda_bounds(const InstanceSpec& inst) {
  TermLambdas b;
  std::tie(b.T_el, b.T_ion) = lambda_kinetic(inst);
  double ev = static_cast<double>(inst.eta_val);
  double Q = std::sqrt(max_ksq_box(doubled(inst.electron.p_max), inst.electron.b));
  double Qt = std::sqrt(max_ksq_box(doubled(inst.trunc.p_max), inst.trunc.b));
  b.V_el = ev * (ev - 1) * Q / M_PI;
  b.V_ion = inst.ion_charge_pairs() * Qt / M_PI;
  for (const auto& s : inst.census) {
    b.loc += s.count * lambda_tilde_loc_bound(s.params);
    b.NL += s.count * lambda_tilde_nl_bound(s.params);
  }
  b.loc *= ev;
  b.NL *= ev;
  return b;
}

RescalingReport compute_rescaling(const InstanceSpec& inst, Exec exec) {
  RescalingReport r;
  std::tie(r.exact.T_el, r.exact.T_ion) = lambda_kinetic(inst);
  auto sp = census_species(inst);
  const double omega = inst.electron.volume;
  double coul = 0.0;
  auto ls = local_sums(sp, inst.electron, &coul, exec);
  auto ns = nonlocal_sums(sp, inst.electron, exec);
  double ev = static_cast<double>(inst.eta_val);
  r.exact.V_el = inst.eta_val > 1 ? 2 * M_PI / omega * ev * (ev - 1) * coul : 0.0;
  r.exact.V_ion = ion_coulomb(inst, exec);
  for (std::size_t i = 0; i < sp.size(); ++i) {
    PairRescaling pr;
    pr.label = sp[i]->label;
    pr.loc = pair_loc_from_sums(*sp[i], ls[i], omega);
    pr.nl = pair_nl_from_sums(*sp[i], ns[i], omega);
    pr.loc_bound = lambda_tilde_loc_bound(*sp[i]);
    pr.nl_bound = lambda_tilde_nl_bound(*sp[i]);
    r.exact.loc += inst.census[i].count * pr.loc;
    r.exact.NL += inst.census[i].count * pr.nl;
    r.per_ion.push_back(pr);
  }
  r.exact.loc *= ev;
  r.exact.NL *= ev;
  r.bound = lambda_bounds(inst);
  return r;
}

}  // namespace qdyn
