#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "relcalc/verify.hpp"

using namespace relcalc;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kIdentityFailure = 1, kUsage = 2;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Everything that affects the mathematics arrives on the command line.
struct RunConfig {
  int n = 0, d = 0, g = 0;
  int r_min = -2;
  long codim_max = 8;
  int degree_cap = 20;
  int trunc = 12;
  int r_max = 6;
  int rank = 2;
  std::string flavor = "mumford";
  std::string format = "json";
  std::string out;
  std::string mu;
  std::string relations_file;
  std::string certificates_file;
  std::string suite;

  ModuliConfig moduli() const { return ModuliConfig::make(n, d, g); }

  Flavor flavor_value() const {
    if (flavor == "mumford") return Flavor::Mumford;
    if (flavor == "dual") return Flavor::Dual;
    throw UsageError("--flavor must be mumford or dual");
  }

  void require_format(std::initializer_list<const char*> allowed) const {
    for (auto* f : allowed)
      if (format == f) return;
    throw UsageError("unsupported --format " + format);
  }

  StratumType stratum() const {
    auto t = StratumType::parse(mu);
    t.validate();
    return t;
  }
};

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(rc.out, std::ios::binary);
  if (!f) throw UsageError("cannot write " + rc.out);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

std::string mask_str(unsigned mask) {
  std::string s = "{";
  for (unsigned x : subset_members(mask)) s += (s.size() > 1 ? "," : "") + std::to_string(x);
  return s + "}";
}

int cmd_relations(const RunConfig& rc) {
  rc.require_format({"json", "text"});
  auto c = rc.moduli();
  auto rs = relations(c, rc.r_min, rc.flavor_value());
  if (rc.format == "json") {
    emit(rc, dump(rs.to_json()));
  } else {
    std::ostringstream os;
    os << flavor_name(rs.flavor) << " n=" << c.n << " d=" << c.d << " g=" << c.g << " delta=" << c.delta << "\n";
    for (auto& e : rs.entries)
      os << "r=" << e.r << " k=" << e.k << " S=" << mask_str(e.mask) << " degree=" << e.degree << " : "
         << e.element.str() << "\n";
    emit(rc, os.str());
  }
  return kOk;
}

std::string dot_id(const StratumType& t) { return "\"" + t.str() + "\""; }

int cmd_strata_list(const RunConfig& rc) {
  rc.require_format({"json", "text", "dot"});
  auto c = rc.moduli();
  const unsigned g = unsigned(c.g);
  auto types = enumerate_types(c.n, c.d, g, rc.codim_max, true);
  // canonical order: the total order, semistable stratum first
  std::sort(types.begin(), types.end(), total_order_prec);
  std::ostringstream os;
  if (rc.format == "json") {
    json a = json::array();
    for (auto& t : types)
      a.push_back({{"type", t.str()}, {"parts", t.to_json()}, {"codim", codim(t, g)}, {"delta", t.is_delta()}});
    os << dump({{"config", c.to_json()}, {"codim_max", rc.codim_max}, {"types", a}});
  } else if (rc.format == "text") {
    for (auto& t : types) os << t.str() << " codim=" << codim(t, g) << (t.is_delta() ? " delta" : "") << "\n";
  } else {
    os << "digraph strata {\n  rankdir=TB;\n";
    for (auto& t : types) os << "  " << dot_id(t) << " [label=\"" << t.str() << "\\ncodim " << codim(t, g) << "\"];\n";
    for (size_t i = 0; i + 1 < types.size(); ++i)
      os << "  " << dot_id(types[i]) << " -> " << dot_id(types[i + 1]) << " [style=dashed, label=\"prec\"];\n";
    // Hasse diagram of dominance: sigma < tau with nothing strictly between.
    for (auto& s : types)
      for (auto& t : types) {
        if (s == t || !dominance_leq(s, t)) continue;
        bool cover = true;
        for (auto& m : types)
          if (m != s && m != t && dominance_leq(s, m) && dominance_leq(m, t)) {
            cover = false;
            break;
          }
        if (cover) os << "  " << dot_id(s) << " -> " << dot_id(t) << ";\n";
      }
    os << "}\n";
  }
  emit(rc, os.str());
  return kOk;
}

int cmd_strata_restrict(const RunConfig& rc) {
  rc.require_format({"json", "text"});
  json in = read_json(rc.relations_file);
  const auto& cj = in.at("config");
  auto c = ModuliConfig::make(cj.at("n").get<int>(), cj.at("d").get<int>(), cj.at("g").get<int>());
  const unsigned g = unsigned(c.g);
  auto mu = rc.stratum();
  if (int(mu.rank()) != c.n || mu.degree() != c.d)
    throw UsageError("stratum " + mu.str() + " does not have rank " + std::to_string(c.n) + " and degree " +
                     std::to_string(c.d));
  const std::string fl = in.at("flavor").get<std::string>();
  const Flavor flavor = fl == "dual" ? Flavor::Dual : Flavor::Mumford;
  const int bound = vanishing_bound(mu, g, flavor);
  json entries = json::array();
  std::ostringstream os;
  bool ok = true;
  for (const auto& e : in.at("entries")) {
    auto x = restrict(element_from_json(e.at("element")), mu, g);
    const int r = e.at("r").get<int>();
    // below the slope bound the restriction must vanish
    if (r <= bound && !x.is_zero()) ok = false;
    entries.push_back({{"r", r}, {"k", e.at("k")}, {"S", e.at("S")}, {"zero", x.is_zero()}, {"element", to_json(x)}});
    os << "r=" << r << " k=" << e.at("k").get<int>() << " S=" << e.at("S").dump() << " : "
       << (x.is_zero() ? "0" : x.str()) << "\n";
  }
  if (rc.format == "json")
    emit(rc, dump({{"mu", mu.str()}, {"config", c.to_json()}, {"flavor", fl}, {"vanishing_bound", bound},
                   {"ok", ok}, {"entries", entries}}));
  else
    emit(rc, os.str());
  return ok ? kOk : kIdentityFailure;
}

int cmd_strata_euler(const RunConfig& rc) {
  rc.require_format({"json", "text"});
  auto mu = rc.stratum();
  const unsigned g = unsigned(rc.g);
  if (rc.g < 2) throw UsageError("--g must be >= 2");
  if (codim(mu, g) <= 0) throw UsageError("no normal bundle for " + mu.str());
  auto e = euler_class(mu, g);
  // Coefficients past t^{codim} vanish only modulo stratum relations; listed, not asserted.
  const int dm = int(codim(mu, g));
  auto c = normal_chern(mu, g, dm + 2);
  nlohmann::json higher = nlohmann::json::array();
  for (int k = dm + 1; k <= dm + 2; ++k) higher.push_back({{"t", k}, {"terms", c.coeff(k).size()}});
  if (rc.format == "json")
    emit(rc, dump({{"mu", mu.str()}, {"g", rc.g}, {"codim", dm}, {"euler", to_json(e)}, {"above_top", higher}}));
  else
    emit(rc, e.str() + "\n");
  return kOk;
}

int cmd_rank3_vanishing(const RunConfig& rc) {
  rc.require_format({"json", "text"});
  if (rc.g < 2) throw UsageError("--g must be >= 2");
  auto rep = pontryagin_vanishing_suite(3, unsigned(rc.g), rc.degree_cap);
  if (!rc.certificates_file.empty()) {
    std::ofstream f(rc.certificates_file, std::ios::binary);
    if (!f) throw UsageError("cannot write " + rc.certificates_file);
    f << dump(rep.to_json(true));
  }
  if (rc.format == "json") {
    emit(rc, dump(rep.to_json(false)));
  } else {
    std::ostringstream os;
    for (auto& v : rep.verdicts)
      os << v.monomial << " real_degree=" << v.real_degree
         << " reduction=" << (v.by_reduction ? "zero" : "open") << " member=" << (v.by_membership ? "yes" : "no")
         << "\n";
    emit(rc, os.str());
  }
  return rep.ok() ? kOk : kIdentityFailure;
}

int cmd_witness(const RunConfig& rc) {
  rc.require_format({"json"});
  if (rc.g < 2 || rc.n < 4) throw UsageError("witness needs --n >= 4 and --g >= 2");
  auto w = nonnilpotence_witness(unsigned(rc.n), unsigned(rc.g), rc.r_max);
  emit(rc, dump(w.to_json()));
  return w.ok() ? kOk : kIdentityFailure;
}

int cmd_poincare(const RunConfig& rc) {
  rc.require_format({"json", "text"});
  if (rc.g < 2) throw UsageError("--g must be >= 2");
  if (rc.rank != 2 && rc.rank != 3) throw UsageError("--rank must be 2 or 3");
  auto spec = rc.rank == 2 ? RationalSeriesSpec::rank2(unsigned(rc.g)) : RationalSeriesSpec::rank3(unsigned(rc.g));
  auto e = expand_poincare(spec, rc.trunc);
  if (rc.format == "json") {
    json a = json::array();
    for (auto& x : e) a.push_back(x.get_str());
    emit(rc, dump({{"rank", rc.rank}, {"g", rc.g}, {"trunc", rc.trunc}, {"coefficients", a},
                   {"lowest_degree", lowest_nonzero_degree(e)}}));
  } else {
    std::ostringstream os;
    for (size_t k = 0; k < e.size(); ++k)
      if (e[k] != 0) os << k << " " << e[k].get_str() << "\n";
    emit(rc, os.str());
  }
  return kOk;
}

int cmd_verify(const RunConfig& rc) {
  rc.require_format({"json", "text"});
  auto rep = run_suite(rc.suite, rc.moduli());
  if (rc.format == "json") {
    emit(rc, dump(rep.to_json()));
  } else {
    std::ostringstream os;
    for (auto& ch : rep.checks)
      os << ch.status << " " << ch.id << " [" << ch.anchor << "]" << (ch.detail.empty() ? "" : " " + ch.detail)
         << "\n";
    emit(rc, os.str());
  }
  return rep.ok() ? kOk : kIdentityFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relcalc: tautological relations on moduli of stable bundles"};
  app.require_subcommand(1);
  RunConfig rc;
  std::function<int(const RunConfig&)> action;

  auto add_ndg = [&](CLI::App* s) {
    s->add_option("--n", rc.n, "rank")->required();
    s->add_option("--d", rc.d, "degree")->required();
    s->add_option("--g", rc.g, "genus")->required();
  };
  auto add_common = [&](CLI::App* s) {
    s->add_option("--format", rc.format, "json|text|dot");
    s->add_option("--out", rc.out, "output file (default stdout)");
  };

  auto* rel = app.add_subcommand("relations", "Mumford or dual Mumford relations");
  add_ndg(rel);
  add_common(rel);
  rel->add_option("--r-min", rc.r_min, "lowest level r");
  rel->add_option("--flavor", rc.flavor, "mumford|dual");
  rel->callback([&] { action = cmd_relations; });

  auto* strata = app.add_subcommand("strata", "Harder-Narasimhan strata");
  strata->require_subcommand(1);
  auto* list = strata->add_subcommand("list", "enumerate types up to a codimension");
  add_ndg(list);
  add_common(list);
  list->add_option("--codim-max", rc.codim_max, "complex codimension cap");
  list->add_flag_callback("--json", [&] { rc.format = "json"; }, "same as --format json");
  list->add_flag_callback("--dot", [&] { rc.format = "dot"; }, "same as --format dot");
  list->callback([&] { action = cmd_strata_list; });
  auto* restr = strata->add_subcommand("restrict", "restrict a relation file to a stratum");
  add_common(restr);
  restr->add_option("--relations", rc.relations_file, "relations JSON")->required();
  restr->add_option("--mu", rc.mu, "type as d/n,d/n,...")->required();
  restr->callback([&] { action = cmd_strata_restrict; });
  auto* euler = strata->add_subcommand("euler", "Euler class of the normal bundle");
  add_common(euler);
  euler->add_option("--mu", rc.mu, "type as d/n,d/n,...")->required();
  euler->add_option("--g", rc.g, "genus")->required();
  euler->callback([&] { action = cmd_strata_euler; });

  auto* pont = app.add_subcommand("pontryagin", "Pontryagin ring computations");
  pont->require_subcommand(1);
  auto* th2 = pont->add_subcommand("theorem2", "rank-three vanishing of Pontryagin monomials");
  add_common(th2);
  th2->add_option("--g", rc.g, "genus")->required();
  th2->add_option("--degree-cap", rc.degree_cap, "highest real degree");
  th2->add_option("--certificates", rc.certificates_file, "write membership certificates here");
  th2->callback([&] { action = cmd_rank3_vanishing; });
  auto* wit = pont->add_subcommand("witness", "non-nilpotence witness for rank >= 4");
  add_common(wit);
  wit->add_option("--n", rc.n, "rank")->required();
  wit->add_option("--g", rc.g, "genus")->required();
  wit->add_option("--r-max", rc.r_max, "largest Pontryagin index tested");
  wit->callback([&] { action = cmd_witness; });

  auto* poin = app.add_subcommand("poincare", "expand the Poincare series of the relation ideal");
  add_common(poin);
  poin->add_option("--rank", rc.rank, "2 or 3");
  poin->add_option("--g", rc.g, "genus")->required();
  poin->add_option("--trunc", rc.trunc, "highest power of t");
  poin->callback([&] { action = cmd_poincare; });

  auto* ver = app.add_subcommand("verify", "run a verification suite");
  ver->add_option("suite", rc.suite, "chern|strata|pontryagin|all")
      ->required()
      ->check(CLI::IsMember({"chern", "strata", "pontryagin", "all"}));
  add_ndg(ver);
  add_common(ver);
  ver->callback([&] { action = cmd_verify; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    return action(rc);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return kIdentityFailure;
  }
}
