#include "qdyn/toffoli_model.hpp"

#include <algorithm>
#include <stdexcept>

namespace qdyn {

void BitConfig::validate() const {
  const int widths[] = {b_P, b_T, eps_T_exp, b, b_bar, b_k, b_g, b_kappa, b_Z, b_I, b_eta_el,
                        b_s, b_keep, b_M, b_alpha_l, b_pl, b_exp, b_rot, b_Mt, log_M};
  for (int w : widths)
    if (w < 4) throw std::invalid_argument("bit widths must be at least 4");
  if (R < 0 || R > 3) throw std::invalid_argument("amplification rounds R must lie in 0..3");
}

#define QDYN_BIT_FIELDS(X)                                                                          \
  X(b_P) X(b_T) X(eps_T_exp) X(b) X(b_bar) X(b_k) X(b_g) X(b_kappa) X(b_Z) X(b_I) X(b_eta_el) X(b_s) \
      X(b_keep) X(b_M) X(b_alpha_l) X(b_pl) X(b_exp) X(b_rot) X(b_Mt) X(log_M) X(R)

void to_json(nlohmann::json& j, const BitConfig& c) {
  j = nlohmann::json::object();
#define X(f) j[#f] = c.f;
  QDYN_BIT_FIELDS(X)
#undef X
}

void apply_bits_json(const nlohmann::json& j, BitConfig& c) {
  if (!j.is_object()) throw std::invalid_argument("bit config must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
#define X(f)                                 \
  if (it.key() == #f) {                      \
    c.f = it.value().get<int>();             \
    known = true;                            \
  }
    QDYN_BIT_FIELDS(X)
#undef X
    if (!known) throw std::invalid_argument("unknown bit-width key " + it.key());
  }
  c.validate();
}

std::string to_string(Term t) {
  switch (t) {
    case Term::Shared: return "shared";
    case Term::Kinetic: return "kinetic";
    case Term::Coulomb: return "coulomb";
    case Term::Local: return "local";
    case Term::NonLocal: return "nonlocal";
  }
  return "?";
}

int clog2(std::int64_t x) {
  if (x < 1) throw std::invalid_argument("clog2 of non-positive value");
  int r = 0;
  while ((std::int64_t{1} << r) < x) ++r;
  return r;
}

namespace {

using i64 = std::int64_t;

struct Dims {
  i64 n, nt, nmax;  // sum, sum of squares, max
};

Dims dims(const int* v) {
  Dims d{0, 0, 0};
  for (int a = 0; a < 3; ++a) {
    d.n += v[a];
    d.nt += i64{v[a]} * v[a];
    d.nmax = std::max<i64>(d.nmax, v[a]);
  }
  return d;
}

// Rows are tallied in quarter-Toffolis so the 5/2, 51/4, 21/4, 13/2 coefficients stay exact;
// the integer row is the ceiling.
CostRow row(const std::string& name, i64 quarters, i64 anc, Term t) {
  if (quarters < 0) throw std::domain_error("cost row " + name + " evaluates negative");
  return {name, (quarters + 3) / 4, anc, t};
}

i64 log_eta(const CostInputs& in) { return clog2(in.eta_val + in.eta_ion); }

}  // namespace

std::vector<CostRow> cost_shared(const CostInputs& in, const BitConfig& c) {
  Dims e = dims(in.n), I = dims(in.n_bar);
  const Term T = Term::Shared;
  i64 prep = 4 * (3 * i64{c.b_P} + 3);
  i64 swel = in.eta_val > 0 ? 4 * (2 * e.n * in.eta_val + 2 * in.eta_val - 4) : 0;
  i64 swion = in.eta_ion > 0 ? 4 * (2 * I.n * in.eta_ion + 2 * in.eta_ion - 4) : 0;
  return {row("PREP_terms", prep, 2, T),       row("SWUP_el", swel, 0, T),
          row("SWUP_el^dag", swel, 0, T),      row("SWUP_ion", swion, 0, T),
          row("SWUP_ion^dag", swion, 0, T),    row("PREP_terms^dag", prep, 2, T)};
}

std::vector<CostRow> cost_kinetic(const CostInputs& in, const BitConfig& c) {
  Dims I = dims(in.n_bar);
  const Term T = Term::Kinetic;
  i64 le = log_eta(in);
  i64 leps = c.eps_T_exp + 1;  // ceil(log2(2 / eps_T))
  i64 prep0 = 4 * (6 * leps + 13 * le + 8 * i64{c.b_T} - 30);
  i64 prep0_anc = std::max({leps, le, i64{c.b_T}});
  i64 ref = 4 * (le + 7 * i64{c.b} + 7 * i64{c.b_bar} + 4 * i64{c.b_k} - 12);
  i64 ref_anc = std::max<i64>(c.b_bar + 1, c.b_k);
  i64 kk = 10 * I.nt + 8 * I.n * I.n + 16 * i64{c.b_bar} * I.n - 8 * I.nmax * (I.nmax + c.b_bar);
  i64 ineq = 4 * (i64{c.b_bar} + c.b);
  return {row("PREP_0", prep0, prep0_anc, T),
          row("ref_state_k2", ref, ref_anc, T),
          row("compute_K2", kk, c.b_bar, T),
          row("ineq_test_T", ineq, i64{c.b_bar} + c.b, T),
          row("uncompute_K2", kk, c.b_bar, T),
          row("ref_state_k2^dag", ref, ref_anc, T),
          row("PREP_0^dag", prep0, prep0_anc, T)};
}

std::vector<CostRow> cost_coulomb(const CostInputs& in, const BitConfig& c) {
  Dims e = dims(in.n), I = dims(in.n_bar);
  const Term T = Term::Coulomb;
  i64 ev = in.eta_val;
  i64 bracket = ev + 5 * log_eta(in) + 2 * clog2(std::max<i64>(2 * ev, 1)) + 2 * i64{c.b_kappa} - 8;
  i64 anc1 = clog2(std::max<i64>(2 * ev, 1));
  auto prep_c = [&](const Dims& d) { return 4 * (5 * d.nt + 4 * d.n * d.n + 8 * i64{c.b_g} * d.n); };
  auto prep_c_dag = [&](const Dims& d) { return 10 * d.nt + 8 * d.n * d.n + 16 * i64{c.b_g} * d.n; };
  return {row("PREP_1", 4 * 6 * bracket, anc1, T),
          row("PREP_coul_el", prep_c(e), e.nt, T),
          row("PREP_coul_ion", prep_c(I), I.nt, T),
          row("SEL_coul_el", 4 * 8 * e.n, e.nmax, T),
          row("SEL_coul_ion", 4 * 8 * I.n, I.nmax, T),
          row("PREP_coul_ion^dag", prep_c_dag(I), 0, T),
          row("PREP_coul_el^dag", prep_c_dag(e), 0, T),
          row("PREP_1^dag", 4 * 2 * bracket, anc1, T)};
}

std::vector<CostRow> cost_local(const CostInputs& in, const BitConfig& c) {
  Dims I = dims(in.n_bar);
  const Term T = Term::Local;
  i64 Z = in.Z;
  i64 lz = clog2(std::max<i64>(Z, 1));
  i64 lev = clog2(std::max<i64>(in.eta_val, 1));
  i64 lei = clog2(std::max<i64>(in.eta_ion, 1));
  i64 p2el = 4 * (7 * lev + 2 * i64{c.b_eta_el} - 6);
  i64 p2el_anc = std::max<i64>(c.b_Z, lev);
  i64 p2ion = 4 * (6 * Z + lz * (c.b_Z - 3) + 7 * lei + 2 * i64{c.b_I} - 6);
  i64 p2ion_anc = c.b_Z + std::max<i64>(c.b_I, lei);
  i64 ploc1 = 4 * Z * (2 * i64{c.b_s} + c.b_keep + 25);
  return {row("PREP_2_el", p2el, p2el_anc, T),
          row("PREP_2_ion", p2ion, p2ion_anc, T),
          row("PREP_loc_1", ploc1, 2 * i64{c.b_keep} + 3, T),
          row("PREP_loc_2", 0, 0, T),
          row("SEL_loc", 4 * 8 * I.n, I.n, T),
          row("PREP_loc_2^dag", 0, 0, T),
          row("PREP_loc_1^dag", ploc1, 0, T),
          row("PREP_2_ion^dag", p2ion, p2ion_anc, T),
          row("PREP_2_el^dag", p2el, p2el_anc, T)};
}

std::vector<CostRow> cost_nonlocal(const CostInputs& in, const BitConfig& c) {
  Dims e = dims(in.n), I = dims(in.n_bar);
  const Term T = Term::NonLocal;
  i64 Z = in.Z, R = c.R, b = c.b;
  i64 lz = clog2(std::max<i64>(Z, 1));
  i64 l9z = clog2(std::max<i64>(9 * Z, 1));
  i64 p3ion = 4 * (4 * Z + lz * (c.b_Z - 3) - 2);
  i64 pnl1 = 4 * (11 * Z + 3 * l9z + 2 * i64{c.b_alpha_l} + c.b_keep - 8);
  i64 ref = 4 * (1 + 2 * R) *
            (12 * e.nt + 74 * e.n + 4 * e.n * e.n + 6 * e.n * c.b_pl + 6 * e.n * c.b_exp + 3 * i64{c.b_rot} + 8);
  i64 gbar = (1 + R) * (16 * e.nt + 8 * e.n * e.n + 28 * b * e.n + 51 * b * b + 128 * b + 464 -
                        8 * e.nmax * (e.nmax + b));
  i64 ineq = 4 * (1 + R) * (b + c.b_Mt);
  i64 arith = 20 * e.nt + 20 * e.n * e.n + 32 * b * e.n + 21 * b * b + 26 * b - 8 * e.nmax * (e.nmax + b) - 24;
  i64 mm = std::max<i64>(b, c.log_M);
  return {row("load_zeta", 4 * in.eta_ion, 5 + i64{c.b_M}, T),
          row("PREP_3_el", 0, 0, T),
          row("PREP_3_ion", p3ion, c.b_Z, T),
          row("PREP_NL_1", pnl1, 2 * i64{c.b_keep} + l9z, T),
          row("ref_state_G", ref, 2 * e.n + std::max(c.b_exp, c.b_pl), T),
          row("prepare_Gbar", gbar, 65 * b, T),
          row("USP_M", 0, 0, T),
          row("ineq_test_NL", ineq, b + 2 * i64{c.b_Mt}, T),
          row("legendre_USP_M", 0, 0, T),
          row("legendre_arith", arith, 0, T),
          row("legendre_ineq_test", 4 * (2 * mm * mm + mm), 2 * mm + 1, T),
          row("legendre_arith^dag", arith, 0, T),
          row("legendre_USP_M^dag", 0, 0, T),
          row("SWAP_p1_p2", 0, 0, T),
          row("nuclear_momentum", 4 * 2 * I.n, I.n, T),
          row("flag_in_G", 0, 0, T),
          row("ineq_test_NL^dag", ineq, 0, T),
          row("USP_M^dag", 0, 0, T),
          row("prepare_Gbar^dag", gbar, 0, T),
          row("ref_state_G^dag", ref, 0, T),
          row("PREP_NL_1^dag", pnl1, 0, T),
          row("PREP_3_ion^dag", p3ion, 0, T),
          row("PREP_3_el^dag", 0, 0, T)};
}

std::int64_t CostReport::term_total(Term t) const {
  i64 s = 0;
  for (const auto& r : rows)
    if (r.term == t) s += r.toffolis;
  return s;
}

double CostReport::fraction(Term t) const {
  return total > 0 ? static_cast<double>(term_total(t)) / static_cast<double>(total) : 0.0;
}

std::int64_t CostReport::swup_total() const {
  i64 s = 0;
  for (const auto& r : rows)
    if (r.name.rfind("SWUP", 0) == 0) s += r.toffolis;
  return s;
}

CostReport block_encoding_cost(const CostInputs& in, const BitConfig& cfg) {
  cfg.validate();
  CostReport rep;
  rep.rows = cost_shared(in, cfg);
  // Without particles no Hamiltonian term acts; only term selection remains.
  if (in.eta_val + in.eta_ion == 0) {
    for (auto& r : rep.rows)
      if (r.name.rfind("SWUP", 0) == 0) r.toffolis = r.ancillae = 0;
  } else {
    for (auto* f : {&cost_kinetic, &cost_coulomb, &cost_local, &cost_nonlocal}) {
      auto rows = (*f)(in, cfg);
      rep.rows.insert(rep.rows.end(), rows.begin(), rows.end());
    }
  }
  for (const auto& r : rep.rows) {
    rep.total += r.toffolis;
    rep.peak_ancillae = std::max(rep.peak_ancillae, r.ancillae);
  }
  return rep;
}

}  // namespace qdyn
