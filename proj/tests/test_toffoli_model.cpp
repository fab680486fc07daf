#include <map>
#include <random>

#include "doctest.h"
#include "qdyn/instance.hpp"
#include "qdyn/toffoli_model.hpp"

using namespace qdyn;

namespace {

// n = (6,6,7), n_bar = (8,8,9), eta = (32, 8), four species.
CostInputs nh3bf3() {
  CostInputs in;
  in.eta_val = 32;
  in.eta_ion = 8;
  in.Z = 4;
  in.n[0] = 6, in.n[1] = 6, in.n[2] = 7;
  in.n_bar[0] = 8, in.n_bar[1] = 8, in.n_bar[2] = 9;
  return in;
}

std::map<std::string, std::int64_t> by_name(const CostReport& r) {
  std::map<std::string, std::int64_t> m;
  for (const auto& row : r.rows) m[row.name] = row.toffolis;
  return m;
}

}  // namespace

TEST_CASE("hand-instantiated rows at default widths") {
  auto m = by_name(block_encoding_cost(nh3bf3(), BitConfig{}));
  CHECK(m["SWUP_el"] == 1276);
  CHECK(m["SWUP_ion"] == 412);
  CHECK(m["PREP_terms"] == 51);
  CHECK(m["SEL_coul_el"] == 152);
  CHECK(m["SEL_coul_ion"] == 200);
  CHECK(m["SEL_loc"] == 200);
  CHECK(m["ineq_test_T"] == 64);
  CHECK(m["ref_state_k2"] == 506);
  CHECK(m["PREP_1"] == 588);
  CHECK(m["PREP_1^dag"] == 196);
  CHECK(m["PREP_coul_el"] == 4481);
  CHECK(m["PREP_coul_el^dag"] == 2241);
  CHECK(m["PREP_coul_ion"] == 6745);
  CHECK(m["compute_K2"] == 4235);
  CHECK(m["PREP_2_el"] == 61);
  CHECK(m["PREP_2_ion"] == 97);
  CHECK(m["load_zeta"] == 8);
  CHECK(m["PREP_3_ion"] == 40);
  CHECK(m["PREP_NL_1"] == 102);
  CHECK(m["ref_state_G"] == 40030);
  CHECK(m["prepare_Gbar"] == 57336);
  CHECK(m["ineq_test_NL"] == 144);
  CHECK(m["legendre_arith"] == 12306);
  CHECK(m["legendre_ineq_test"] == 2080);
  CHECK(m["nuclear_momentum"] == 50);
  CHECK(m["PREP_loc_2"] == 0);
  CHECK(m["USP_M"] == 0);
}

TEST_CASE("rows at non-default widths") {
  BitConfig c;
  c.eps_T_exp = 14;
  c.b_T = 15;
  c.b_s = c.b_keep = 8;
  c.b_pl = c.b_exp = c.b_rot = 8;
  auto m = by_name(block_encoding_cost(nh3bf3(), c));
  CHECK(m["PREP_0"] == 258);
  CHECK(m["PREP_loc_1"] == 196);
  CHECK(m["ref_state_G"] == 30790);
  CostInputs tiny;
  tiny.eta_val = 2;
  tiny.eta_ion = 1;
  tiny.Z = 1;
  tiny.n[0] = tiny.n[1] = tiny.n[2] = 1;
  tiny.n_bar[0] = tiny.n_bar[1] = tiny.n_bar[2] = 1;
  CHECK(by_name(block_encoding_cost(tiny, BitConfig{}))["SWUP_el"] == 12);
}

TEST_CASE("daggers mirror their forward rows") {
  auto m = by_name(block_encoding_cost(nh3bf3(), BitConfig{}));
  for (const auto& [name, v] : m) {
    if (name.size() < 5 || name.substr(name.size() - 4) != "^dag") continue;
    std::string fwd = name.substr(0, name.size() - 4);
    if (fwd == "PREP_1" || fwd.rfind("PREP_coul", 0) == 0) continue;  // half-cost uncompute
    CHECK_MESSAGE(v == m[fwd], name);
  }
}

TEST_CASE("report totals are row sums and term fractions sum to one") {
  auto r = block_encoding_cost(nh3bf3(), BitConfig{});
  std::int64_t s = 0;
  for (const auto& row : r.rows) {
    CHECK(row.toffolis >= 0);
    s += row.toffolis;
  }
  CHECK(r.total == s);
  double f = 0.0;
  std::int64_t t = 0;
  for (Term term : {Term::Shared, Term::Kinetic, Term::Coulomb, Term::Local, Term::NonLocal}) {
    f += r.fraction(term);
    t += r.term_total(term);
  }
  CHECK(f == doctest::Approx(1.0));
  CHECK(t == r.total);
  CHECK(r.swup_total() == 2 * 1276 + 2 * 412);
  auto again = block_encoding_cost(nh3bf3(), BitConfig{});
  nlohmann::json a, b;
  CHECK(again.total == r.total);
  CHECK(again.rows.size() == r.rows.size());
}

TEST_CASE("zero-particle instance keeps only term selection") {
  CostInputs in;
  in.n[0] = in.n[1] = in.n[2] = 5;
  auto r = block_encoding_cost(in, BitConfig{});
  for (const auto& row : r.rows) {
    if (row.name.rfind("PREP_terms", 0) == 0)
      CHECK(row.toffolis > 0);
    else
      CHECK(row.toffolis == 0);
  }
}

TEST_CASE("every row is monotone in widths and sizes") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> w(4, 40), nn(1, 10), eta(1, 500), z(1, 8), rr(0, 3);
  auto rows_of = [](const CostInputs& in, const BitConfig& c) {
    auto r = block_encoding_cost(in, c);
    std::vector<std::int64_t> v;
    for (const auto& row : r.rows) v.push_back(row.toffolis);
    v.push_back(r.total);
    return v;
  };
  for (int trial = 0; trial < 200; ++trial) {
    BitConfig c;
    int* fields[] = {&c.b_P, &c.b_T, &c.eps_T_exp, &c.b, &c.b_bar, &c.b_k, &c.b_g, &c.b_kappa, &c.b_Z, &c.b_I,
                     &c.b_eta_el, &c.b_s, &c.b_keep, &c.b_M, &c.b_alpha_l, &c.b_pl, &c.b_exp, &c.b_rot, &c.b_Mt, &c.log_M};
    for (int* f : fields) *f = w(rng);
    c.R = rr(rng);
    CostInputs in;
    in.eta_val = eta(rng);
    in.eta_ion = eta(rng) / 4 + 1;
    in.Z = z(rng);
    for (int a = 0; a < 3; ++a) {
      in.n[a] = nn(rng);
      in.n_bar[a] = nn(rng);
    }
    auto base = rows_of(in, c);
    int which = static_cast<int>(rng() % 20);
    BitConfig c2 = c;
    int* f2[] = {&c2.b_P, &c2.b_T, &c2.eps_T_exp, &c2.b, &c2.b_bar, &c2.b_k, &c2.b_g, &c2.b_kappa, &c2.b_Z, &c2.b_I,
                 &c2.b_eta_el, &c2.b_s, &c2.b_keep, &c2.b_M, &c2.b_alpha_l, &c2.b_pl, &c2.b_exp, &c2.b_rot, &c2.b_Mt, &c2.log_M};
    ++*f2[which];
    auto up = rows_of(in, c2);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(up[i] >= base[i]);
    CostInputs in2 = in;
    switch (rng() % 5) {
      case 0: ++in2.eta_val; break;
      case 1: ++in2.eta_ion; break;
      case 2: ++in2.n[rng() % 3]; break;
      case 3: ++in2.n_bar[rng() % 3]; break;
      default: for (auto& v : in2.n) ++v;
    }
    auto up2 = rows_of(in2, c);
    for (std::size_t i = 0; i < base.size(); ++i) CHECK(up2[i] >= base[i]);
  }
}

TEST_CASE("bit config validation and JSON overrides") {
  BitConfig c;
  CHECK_NOTHROW(c.validate());
  c.b = 3;
  CHECK_THROWS(c.validate());
  c = BitConfig{};
  c.R = 4;
  CHECK_THROWS(c.validate());
  BitConfig d;
  apply_bits_json(nlohmann::json{{"b", 24}, {"R", 1}}, d);
  CHECK(d.b == 24);
  CHECK(d.R == 1);
  CHECK(d.b_bar == 32);
  CHECK_THROWS(apply_bits_json(nlohmann::json{{"bogus", 5}}, d));
  nlohmann::json j;
  to_json(j, d);
  BitConfig e;
  apply_bits_json(j, e);
  CHECK(e.b == 24);
}

TEST_CASE("ceil log2") {
  CHECK(clog2(1) == 0);
  CHECK(clog2(2) == 1);
  CHECK(clog2(40) == 6);
  CHECK(clog2(64) == 6);
  CHECK(clog2(65) == 7);
  CHECK_THROWS(clog2(0));
}

TEST_CASE("shipped instances feed the cost model") {
  for (const auto& name : shipped_instance_names()) {
    auto inst = load_instance(shipped_instance_path(name));
    auto r = block_encoding_cost(cost_inputs(inst), inst.bits);
    CHECK(r.total > 0);
  }
}
