#pragma once

#include <functional>
#include <string>
#include <vector>

#include "relcalc/poincare.hpp"
#include "relcalc/pontryagin.hpp"

namespace relcalc {

// One verification bundle result. `anchor` names the identity being checked
// in words; status is pass, fail or recorded (informational, never fails).
struct Check {
  std::string id, anchor, status, detail;
};

struct SuiteReport {
  std::string suite;
  nlohmann::json config;
  std::vector<Check> checks;

  bool ok() const {
    for (auto& c : checks)
      if (c.status == "fail") return false;
    return true;
  }
  void add(std::string id, std::string anchor, bool ok, std::string detail = "") {
    checks.push_back({std::move(id), std::move(anchor), ok ? "pass" : "fail", std::move(detail)});
  }
  void record(std::string id, std::string anchor, std::string detail) {
    checks.push_back({std::move(id), std::move(anchor), "recorded", std::move(detail)});
  }
  // Exceptions become failed checks carrying the message.
  void guarded(const std::string& id, const std::string& anchor, const std::function<void()>& body) {
    try {
      body();
    } catch (const std::exception& e) {
      add(id, anchor, false, std::string("exception: ") + e.what());
    }
  }
  nlohmann::json to_json() const {
    nlohmann::json a = nlohmann::json::array();
    for (auto& c : checks) a.push_back({{"id", c.id}, {"paper_ref", c.anchor}, {"status", c.status}, {"detail", c.detail}});
    return {{"suite", suite}, {"config", config}, {"checks", a}};
  }
};

inline void run_chern_checks(SuiteReport& rep, const ModuliConfig& c) {
  const int hi = c.n <= 3 ? 8 : 5;
  rep.guarded("chern.split_form", "Chern series of the pushforward: integral form vs split-root form", [&] {
    auto d1 = TruncatedSeries::first_difference(chern_pushforward(c, hi), chern_pushforward_split(c, hi));
    auto d2 = TruncatedSeries::first_difference(chern_pushforward_dual(c, hi), chern_pushforward_dual_split(c, hi));
    rep.add("chern.split_form", "Chern series of the pushforward: integral form vs split-root form", !d1 && !d2,
            d1 ? "mumford mismatch at t^" + std::to_string(*d1)
               : d2 ? "dual mismatch at t^" + std::to_string(*d2) : "agree to t^" + std::to_string(hi));
  });
  rep.guarded("chern.logderiv", "log-derivative of Psi has a bounded-degree numerator over Omega~", [&] {
    auto r = verify_logderiv_recurrence(c, -6);
    rep.add("chern.logderiv", "log-derivative of Psi has a bounded-degree numerator over Omega~", r.ok, r.detail);
  });
  rep.guarded("chern.minimal_degree", "minimal relation degrees 2(delta+(n-1)gbar) and 2(n-delta+(n-1)gbar)", [&] {
    auto m = mumford_relations(c, -1), t = dual_mumford_relations(c, -1);
    const int em = 2 * (c.delta + (c.n - 1) * c.gbar), ed = 2 * (c.n - c.delta + (c.n - 1) * c.gbar);
    bool ok = m.minimal_degree() == em && t.minimal_degree() == ed;
    rep.add("chern.minimal_degree", "minimal relation degrees 2(delta+(n-1)gbar) and 2(n-delta+(n-1)gbar)", ok,
            "mumford " + std::to_string(m.minimal_degree().value_or(-1)) + " (expected " + std::to_string(em) +
                "), dual " + std::to_string(t.minimal_degree().value_or(-1)) + " (expected " + std::to_string(ed) + ")");
    bool clean = true;
    for (auto* rs : {&m, &t})
      for (auto& e : rs->entries) {
        for (unsigned s = 1; s <= 2 * unsigned(c.g); ++s) clean = clean && !e.element.contains(gen_b(1, s));
        clean = clean && (e.element.is_zero() || e.element.is_homogeneous(e.degree));
      }
    rep.add("chern.relations_homogeneous", "relations are free of b_1 and homogeneous of the closed-form degree", clean);
  });
  rep.guarded("chern.normalization", "normalization u n + v (d - n gbar) = 1", [&] {
    auto w = normalization_relation(c);
    rep.add("chern.normalization", "normalization u n + v (d - n gbar) = 1", w.u * c.n + w.v * c.rank_push() == 1,
            "u=" + std::to_string(w.u) + " v=" + std::to_string(w.v));
  });
}

inline void run_strata_checks(SuiteReport& rep, const ModuliConfig& c) {
  const unsigned g = unsigned(c.g);
  const long gbar = c.gbar;
  auto types = enumerate_types(c.n, c.d, g, 40);
  rep.guarded("strata.min_codim", "minimal stratum codimension dichotomy", [&] {
    long best = -1;
    for (auto& t : types)
      if (best < 0 || codim(t, g) < best) best = codim(t, g);
    long expect = 2 * c.delta < c.n ? c.delta + (c.n - 1) * gbar : c.n - c.delta + (c.n - 1) * gbar;
    rep.add("strata.min_codim", "minimal stratum codimension dichotomy", best == expect,
            "real codimension " + std::to_string(2 * best) + ", expected " + std::to_string(2 * expect));
  });
  rep.guarded("strata.additivity", "codimension additivity when the last part has rank one", [&] {
    bool ok = true;
    size_t count = 0;
    for (auto& mu : types) {
      if (mu.part(mu.size()).n != 1 || mu.size() < 2) continue;
      StratumType prime;
      prime.parts.assign(mu.parts.begin(), mu.parts.end() - 1);
      const long dP = mu.part(mu.size()).d;
      ok = ok && codim(prime, g) + c.d - c.n * dP + (c.n - 1) * gbar == codim(mu, g);
      ++count;
    }
    rep.add("strata.additivity", "codimension additivity when the last part has rank one", ok,
            std::to_string(count) + " types");
  });
  std::vector<StratumType> delta_types;
  for (auto& t : types)
    if (t.is_delta()) delta_types.push_back(t);
  std::sort(delta_types.begin(), delta_types.end(),
            [&](auto& x, auto& y) { return std::make_pair(codim(x, g), x.str()) < std::make_pair(codim(y, g), y.str()); });
  if (delta_types.size() > 4) delta_types.resize(4);
  for (auto& mu : delta_types)
    for (Flavor fl : {Flavor::Mumford, Flavor::Dual}) {
      std::string id = std::string("strata.vanishing.") + flavor_name(fl) + "." + mu.str();
      const char* anchor = "restricted relations vanish below the slope bound on Delta strata";
      rep.guarded(id, anchor, [&] {
        auto v = verify_vanishing(mu, g, fl);
        rep.add(id, anchor, v.ok, "levels " + std::to_string(v.r_min) + ".." + std::to_string(v.bound));
      });
    }
  if (!types.empty()) {
    auto mu = *std::min_element(types.begin(), types.end(), [&](auto& x, auto& y) { return codim(x, g) < codim(y, g); });
    rep.guarded("strata.euler_degree", "Euler class of the normal bundle has degree twice the codimension", [&] {
      auto e = euler_class(mu, g);
      rep.add("strata.euler_degree", "Euler class of the normal bundle has degree twice the codimension",
              e.is_homogeneous(int(2 * codim(mu, g))), mu.str());
      const int dm = int(codim(mu, g));
      auto c = normal_chern(mu, g, dm + 1);
      rep.record("strata.normal_chern_above_top", "normal Chern series past the codimension",
                 "t^" + std::to_string(dm + 1) + " carries " + std::to_string(c.coeff(dm + 1).size()) +
                     " terms in the free algebra");
    });
  }
  // Theta identity on the lowest-codimension two-part type ending in rank one.
  std::optional<StratumType> theta_mu;
  for (auto& t : types)
    if (t.size() == 2 && t.part(2).n == 1 && (!theta_mu || codim(t, g) < codim(*theta_mu, g))) theta_mu = t;
  if (theta_mu) {
    for (unsigned K = 1; K <= unsigned(c.n); ++K) {
      std::string id = "strata.theta." + theta_mu->str() + ".K" + std::to_string(K);
      const char* anchor = "Theta identity for the top coefficient at level -D";
      rep.guarded(id, anchor, [&] {
        auto r = theta_identity(*theta_mu, g, K);
        rep.add(id, anchor, r.ok(), r.residual_zero ? "residual zero" : "residual reported, " +
                                                                            std::to_string(r.residual_terms) + " terms");
      });
    }
  }
}

inline void run_pontryagin_checks(SuiteReport& rep, const ModuliConfig& c) {
  const unsigned n = unsigned(c.n), g = unsigned(c.g);
  rep.guarded("pontryagin.symmetric", "Pontryagin classes are symmetric in the roots", [&] {
    auto p = total_pontryagin(n, g, 2);
    bool ok = p.coeff(1).is_homogeneous(4);
    if (n == 2) ok = ok && p.coeff(1) == (gen(gen_a(1)) * gen(gen_a(1)) - gen(gen_a(2)) * Q(4)) * Q(2 * long(c.gbar));
    rep.add("pontryagin.symmetric", "Pontryagin classes are symmetric in the roots", ok);
  });
  std::optional<RhoSolution> sol;
  rep.guarded("pontryagin.rho_system", "rho system at the nodes -delta_i", [&] {
    sol = solve_rho(n, g);
    rep.add("pontryagin.rho_system", "rho system at the nodes -delta_i", sol->back_substitution && sol->closed_form);
    rep.record("pontryagin.rho_transposed_variant", "rho sum with S_i^k in place of S_i^{n-1-k}",
               sol->transposed_variant ? "also solves the system" : "does not solve the system");
  });
  if (n <= 3 && sol) {
    rep.guarded("pontryagin.phi_restriction", "restriction of Phi to a Delta stratum", [&] {
      auto ph = phi_relations(c);
      bool same = true;
      for (unsigned k = 0; k < n; ++k) same = same && ph.rho[k] == sol->base[k];
      rep.record("pontryagin.phi_unrestricted", "rho from Phi compared with the rho system before restriction",
                 same ? "equal" : "differ");
      auto deltas = enumerate_types(c.n, c.d, g, 40);
      std::optional<StratumType> mu;
      for (auto& t : deltas)
        if (t.is_delta() && (!mu || codim(t, g) < codim(*mu, g))) mu = t;
      if (!mu) throw std::runtime_error("no Delta stratum within the codimension cap");
      auto r = phi_restriction_check(*mu, g, &ph);
      rep.add("pontryagin.phi_restriction", "restriction of Phi to a Delta stratum", r.ok(), r.to_json().dump());
    });
  }
  if (n == 3) {
    rep.guarded("pontryagin.rank3_identities", "rank-three root identities", [&] {
      auto r = rank3_identities(g, &*sol);
      std::string failed;
      for (auto& ch : r.checks)
        if (ch.asserted && !ch.ok) failed += ch.id + " ";
      rep.add("pontryagin.rank3_identities", "rank-three root identities", r.ok(), failed);
      auto lit = r.find("shifted_k2_literal_combination");
      rep.record("pontryagin.k2_literal_combination", "c2 + a1 c1 - a2 c0 as the k = 2 step",
                 lit->ok ? "yields the shifted relation" : lit->detail);
    });
    if (g <= 3) {
      rep.guarded("pontryagin.vanishing", "Pontryagin ring of rank three vanishes from real degree 12g-8", [&] {
        auto v = pontryagin_vanishing_suite(3, g, int(12 * g + 4));
        rep.add("pontryagin.vanishing", "Pontryagin ring of rank three vanishes from real degree 12g-8", v.ok(),
                std::to_string(v.verdicts.size()) + " monomials in real degrees [" + std::to_string(v.real_lo) +
                    ", " + std::to_string(v.real_hi) + "]");
      });
    }
  } else if (n == 2) {
    rep.guarded("pontryagin.vanishing", "Pontryagin ring of rank two vanishes from real degree 4g", [&] {
      auto v = pontryagin_vanishing_suite(2, g, int(4 * g + 8));
      rep.add("pontryagin.vanishing", "Pontryagin ring of rank two vanishes from real degree 4g", v.ok());
    });
  } else {
    rep.guarded("pontryagin.witness", "rho relations vanish on a subspace where no p_r does", [&] {
      auto w = nonnilpotence_witness(n, g, 6);
      rep.add("pontryagin.witness", "rho relations vanish on a subspace where no p_r does", w.ok(), w.to_json().dump());
    });
  }
}

inline void run_poincare_checks(SuiteReport& rep, unsigned g) {
  for (unsigned rank : {2u, 3u}) {
    auto spec = rank == 2 ? RationalSeriesSpec::rank2(g) : RationalSeriesSpec::rank3(g);
    auto e = expand_poincare(spec, int(6 * g));
    int low = lowest_nonzero_degree(e), expect = rank == 2 ? int(2 * g) : int(4 * g - 2);
    bool nonneg = std::all_of(e.begin(), e.end(), [](auto& x) { return x >= 0; });
    rep.add("poincare.rank" + std::to_string(rank), "Poincare series of the relation ideal",
            low == expect && nonneg,
            "lowest degree " + std::to_string(low) + " (expected " + std::to_string(expect) + ")" +
                (nonneg ? "" : ", negative coefficient"));
  }
}

// name in {chern, strata, pontryagin, all}.
inline SuiteReport run_suite(const std::string& name, const ModuliConfig& c) {
  SuiteReport rep;
  rep.suite = name;
  rep.config = c.to_json();
  if (name == "chern" || name == "all") run_chern_checks(rep, c);
  if (name == "strata" || name == "all") run_strata_checks(rep, c);
  if (name == "pontryagin" || name == "all") run_pontryagin_checks(rep, c);
  if (name == "all") run_poincare_checks(rep, unsigned(c.g));
  if (name != "chern" && name != "strata" && name != "pontryagin" && name != "all")
    throw std::invalid_argument("unknown suite " + name);
  return rep;
}

}  // namespace relcalc
