#include "toeplitz/cli.hpp"

#include "toeplitz/blocks.hpp"
#include "toeplitz/language.hpp"
#include "toeplitz/odometer.hpp"
#include "toeplitz/pq_toeplitz.hpp"
#include "toeplitz/products.hpp"
#include "toeplitz/spec_io.hpp"
#include "toeplitz/verify.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace toeplitz::cli {

namespace {

using nlohmann::json;

// Raised for failed checks; carries the report already printed.
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(what + " is not valid JSON: " + e.what());
  }
}

std::uint64_t env_budget() {
  const char* v = std::getenv("TOEPLITZ_MEM_BUDGET");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const unsigned long long b = std::strtoull(v, &end, 10);
  if (*end != '\0' || b == 0) throw std::invalid_argument("TOEPLITZ_MEM_BUDGET must be a positive byte count");
  return b;
}

// Where a system comes from: a seed word or a spec file.
struct Source {
  std::string word;
  std::string spec;
  std::size_t depth = 8;

  void add(CLI::App* app) {
    auto* s = app->add_option("--spec", spec, "construction spec JSON file")->check(CLI::ExistingFile);
    app->add_option("--word", word, "seed word with holes, e.g. a?b?c")->excludes(s);
    app->add_option("--depth", depth, "structure depth for --word")->capture_default_str()->check(CLI::PositiveNumber);
  }

  std::shared_ptr<const ToeplitzSystem> system() const {
    if (!spec.empty()) return system_from_json(parse_json(slurp(spec), spec));
    if (word.empty()) throw std::invalid_argument("give --word or --spec");
    return std::make_shared<ConstantWordSystem>(HoleWord::parse(word), depth);
  }
};

odometer::Scale parse_scale(const std::string& text) {
  if (!text.empty() && (text.front() == '[' || text.front() == '{')) return odometer::scale_from_json(parse_json(text, "scale"));
  if (std::filesystem::exists(text)) return odometer::scale_from_json(parse_json(slurp(text), text));
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto num = [&](std::size_t i) { return parse_bigint(parts.at(i)); };
  auto depth = [&](std::size_t i) { return static_cast<std::size_t>(to_int64(num(i))); };
  try {
    if (parts.size() == 3 && parts[0] == "powers") return odometer::Scale::powers(num(1), depth(2));
    if (parts.size() == 2 && parts[0] == "factorial") return odometer::Scale::factorial(depth(1));
    if (parts.size() == 2 && parts[0] == "primorial") return odometer::Scale::primorial(depth(1));
    if (parts.size() == 4 && parts[0] == "times") return odometer::Scale::times_powers(num(1), num(2), depth(3));
  } catch (const std::out_of_range&) {
  }
  throw std::invalid_argument("scale must be a JSON array, a JSON file, or powers:B:N | factorial:N | primorial:N | times:F:B:N");
}

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

// ---------------------------------------------------------------------------

struct GenArgs {
  Source src;
  std::string range = "0:20";
  bool as_json = false;
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  const auto sys = a.src.system();
  const SequenceWindow w = sys->window(parse_range(a.range));
  if (a.as_json) emit(out, to_json(w));
  else out << w.symbols() << '\n';
  return kOk;
}

struct SkeletonArgs {
  Source src;
  std::size_t level = 1;
  std::string range = "0:25";
  std::int64_t horizon = 32;
};

int cmd_skeleton(const SkeletonArgs& a, std::ostream& out) {
  const auto sys = a.src.system();
  const Range r = parse_range(a.range);
  const SkeletonResult s = skeleton(*sys, a.level, r, a.horizon);
  json j{{"level", s.level}, {"period", sys->period(a.level)}, {"range", to_string(r)}, {"window", s.window.symbols()},
         {"certified", s.certified}};
  if (auto t = sys->structural_skeleton(a.level)) j["matches_structure"] = t->window(r) == s.window;
  emit(out, j);
  return kOk;
}

struct ComplexityArgs {
  Source src;
  std::size_t n_max = 100;
  std::string csv, plot, fit;
};

int cmd_complexity(const ComplexityArgs& a, const language::Options& lopts, std::ostream& out) {
  const auto sys = a.src.system();
  const auto table = language::complexity_table(*sys, a.n_max, lopts);
  if (!a.csv.empty()) {
    std::ostringstream s;
    language::write_csv(s, table);
    if (a.csv == "-") out << s.str();
    else write_file(a.csv, s.str());
  }
  if (!a.plot.empty()) {
    std::ostringstream s;
    language::write_plot_data(s, table);
    write_file(a.plot, s.str());
  }
  bool monotone = true;
  std::map<std::string, std::uint64_t> tiers;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (i && table.rows[i].count < table.rows[i - 1].count) monotone = false;
    ++tiers[language::to_string(table.rows[i].certification)];
  }
  json j{{"system", sys->describe()}, {"n_max", a.n_max}, {"monotone", monotone}, {"certification", tiers}};
  if (a.n_max < table.rows.size()) j["p_n_max"] = table.rows.back().count;
  if (table.exponent) j["exponent"] = *table.exponent;
  if (table.c1) j["c1"] = *table.c1;
  if (table.c2) j["c2"] = *table.c2;
  if (table.window_half) j["window_half"] = table.window_half;
  if (!a.fit.empty()) {
    const Range fr = parse_range(a.fit);
    j["fit"] = language::to_json(language::fit_exponent(table, static_cast<std::size_t>(fr.begin), static_cast<std::size_t>(fr.end)));
  }
  if (a.csv != "-") emit(out, j);
  if (!monotone) throw VerificationFailure("complexity is not monotone");
  return kOk;
}

struct PhiArgs {
  std::string word;
  std::optional<std::size_t> p, q;
  unsigned level = 1;
  bool verify = false;
};

HoleWord checked_word(const std::string& text, std::optional<std::size_t> p, std::optional<std::size_t> q) {
  const HoleWord w = HoleWord::parse(text);
  if (p && *p != w.length()) throw std::invalid_argument("--p " + std::to_string(*p) + " does not match |w| = " + std::to_string(w.length()));
  if (q && *q != w.hole_count())
    throw std::invalid_argument("--q " + std::to_string(*q) + " does not match the " + std::to_string(w.hole_count()) + " holes of w");
  return w;
}

int cmd_phi(const PhiArgs& a, const pq::PhiOptions& popts, std::ostream& out) {
  const HoleWord w = checked_word(a.word, a.p, a.q);
  const pq::Level level(w, a.level);
  const pq::WindowMap phi = pq::make_phi(w, a.level, popts);
  json j{{"word", w.str()},        {"level", a.level},         {"label", phi.label()},
         {"radius", phi.radius()}, {"p_n", level.period()},    {"q_n", level.holes()},
         {"identity", "phi^" + std::to_string(level.holes()) + " = sigma^" + std::to_string(level.period())}};
  bool holds = true;
  std::uint64_t tested = 0;
  if (a.verify) {
    const ConstantWordSystem sys(w, a.level + 2);
    holds = pq::extensional_equal(pq::power(phi, static_cast<std::uint64_t>(level.holes())), pq::shift(level.period()), sys,
                                  popts.language, &tested);
    j["identity_holds"] = holds;
  }
  j["identity_checked"] = a.verify;
  j["factors_tested"] = tested;
  emit(out, j);
  if (!holds) throw VerificationFailure("phi power identity fails");
  return kOk;
}

struct RootArgs {
  std::string word;
  unsigned level = 1;
};

int cmd_roots(const RootArgs& a, const pq::PhiOptions& popts, std::ostream& out) {
  const HoleWord w = HoleWord::parse(a.word);
  const pq::Root root = pq::root_of_shift(w, a.level, popts);
  const ConstantWordSystem sys(w, a.level + 2);
  std::uint64_t tested = 0;
  const bool ok = pq::extensional_equal(pq::power(root.map, static_cast<std::uint64_t>(root.order)), pq::shift(1), sys,
                                        popts.language, &tested);
  emit(out, {{"word", w.str()},
             {"level", a.level},
             {"a", root.a},
             {"b", root.b},
             {"order", root.order},
             {"label", root.map.label()},
             {"radius", root.map.radius()},
             {"certified", ok},
             {"factors_tested", tested}});
  if (!ok) throw VerificationFailure("root power differs from the shift");
  return kOk;
}

struct OdometerArgs {
  std::string scale;
  std::vector<std::string> minimal;
  std::vector<std::string> subgroup;
};

int cmd_odometer(const OdometerArgs& a, std::ostream& out) {
  auto scale = std::make_shared<const odometer::Scale>(parse_scale(a.scale));
  json j{{"scale", odometer::to_json(*scale)},
         {"multiplicity", odometer::to_json(odometer::multiplicity(*scale))},
         {"torsion", odometer::to_json(odometer::torsion_structure(*scale))}};
  if (!a.minimal.empty()) {
    json m = json::array();
    for (const auto& s : a.minimal) {
      const BigInt v = parse_bigint(s);
      m.push_back({{"m", v.str()}, {"minimal", odometer::is_minimal_translation(v, *scale)}});
    }
    j["minimal"] = m;
  }
  if (!a.subgroup.empty()) {
    std::vector<odometer::OdometerElement> gens;
    for (const auto& s : a.subgroup) gens.push_back(odometer::OdometerElement::from_integer(scale, parse_bigint(s)));
    json levels = json::array();
    for (const auto& l : odometer::subgroup_report(gens))
      levels.push_back({{"level", l.level}, {"index", l.index.str()}, {"order", l.order.str()}, {"contains_one", l.contains_one}});
    j["subgroup"] = levels;
  }
  emit(out, j);
  return kOk;
}

struct BlocksArgs {
  unsigned k1 = 4;
  std::int64_t d0 = 2;
  std::string scale = "[1,8,120,3720]";
  std::size_t levels = 3;
  std::string mode = "toy";
  bool relaxed_c2 = false;
  std::size_t entropy_depth = 0;
};

json blocks_report(const blocks::Construction& c, bool& all_ok) {
  const auto& spec = c.spec();
  json k = json::array(), d = json::array(), overlap = json::array(), conditions = json::array(), freq = json::array(),
       emp = json::array(), ext = json::array();
  const std::size_t stored = c.materialized_depth();
  for (const auto& lv : c.levels()) {
    k.push_back(lv.count ? lv.count->str() : "~e^" + std::to_string(lv.log_count));
    d.push_back({{"n", lv.n}, {"d", lv.d}, {"d_hat", lv.d_hat}});
    if (lv.count && lv.n > 1 && spec.mode == blocks::Mode::Toy &&
        *lv.count < BigInt(spec.k1) * (BigInt(1) << static_cast<unsigned>(lv.n - 1)))
      all_ok = false;
  }
  for (std::size_t n = 1; n <= stored; ++n) {
    const auto o = blocks::check_trivial_overlap(c, n);
    json oj = blocks::to_json(o);
    oj["level"] = n;
    overlap.push_back(oj);
    all_ok = all_ok && o.ok;
    if (n >= 2) {
      const auto cr = blocks::check_conditions(c, n);
      conditions.push_back({{"level", n}, {"ok", cr.ok}, {"blocks_checked", cr.blocks_checked}, {"detail", cr.detail}});
      all_ok = all_ok && cr.ok;
    }
    emp.push_back({{"level", n}, {"empirical", blocks::empirical_entropy(c, n)}, {"log_k_over_p", c.level(n).log_count / to_int64(c.level(n).length)}});
  }
  const std::int64_t dom = c.domain().size();
  for (std::size_t n = 1; n + 1 <= stored && !spec.relaxed_c2; ++n) {
    const std::int64_t p_next = to_int64(c.level(n + 1).length);
    if (dom < 10 * p_next) {
      freq.push_back({{"level", n}, {"skipped", "stored point shorter than 10 p_{i_" + std::to_string(n + 1) + "}"}});
      continue;
    }
    const auto t = blocks::frequencies(c, n, dom);
    all_ok = all_ok && t.all_exact;
    freq.push_back(blocks::to_json(t));
  }
  for (std::size_t n = 2; n + 1 <= stored; ++n) {
    const auto e = blocks::check_extensible(c, n);
    ext.push_back({{"level", n}, {"ok", e.ok}, {"occurrences", e.occurrences}});
    all_ok = all_ok && e.ok;
  }
  return {{"k_n", k}, {"d_n", d}, {"overlap", overlap}, {"conditions", conditions}, {"freq_table", freq},
          {"empirical_entropy", emp}, {"extensible", ext}, {"stored_levels", stored}};
}

int cmd_blocks(const BlocksArgs& a, std::uint64_t budget, std::ostream& out) {
  blocks::BlockSpec spec;
  spec.k1 = a.k1;
  spec.d0 = a.d0;
  spec.scale = parse_scale(a.scale);
  spec.levels = a.levels;
  spec.mode = blocks::parse_mode(a.mode);
  spec.relaxed_c2 = a.relaxed_c2;
  if (budget) spec.memory_budget = budget;
  const auto c = blocks::Construction::build(spec);
  bool ok = true;
  json j = blocks_report(c, ok);
  j["spec"] = blocks::to_json(spec);
  j["mode"] = blocks::to_string(spec.mode);
  if (spec.mode == blocks::Mode::Toy) j["note"] = "toy mode: combinatorial conditions enforced, entropy inequalities not";
  if (c.stop_reason()) j["stop_reason"] = *c.stop_reason();
  j["overlap_ok"] = std::all_of(j["overlap"].begin(), j["overlap"].end(), [](const json& o) { return o["ok"].get<bool>(); });
  j["entropy_bounds"] = blocks::to_json(blocks::entropy_lower_bound(c, a.entropy_depth ? a.entropy_depth : c.levels().size()));
  j["ok"] = ok;
  emit(out, j);
  if (!ok) throw VerificationFailure("block construction checks failed");
  return kOk;
}

struct RealizeArgs {
  std::size_t d = 1;
  std::uint64_t a = 1;
  std::string entropy = "zero";
  std::size_t depth = 6;
  std::string out_path;
  bool check = false;
};

int cmd_realize(const RealizeArgs& a, std::ostream& out) {
  const auto r = products::realize_group(a.d, a.a, products::parse_entropy_mode(a.entropy), a.depth);
  json j{{"report", products::to_json(r.report)}, {"system", r.system->describe()}, {"alphabet_size", r.system->alphabet().size()}};
  bool ok = true;
  if (a.check) {
    // Each generator alone: shift one component, identity elsewhere.
    json checks = json::array();
    for (std::size_t g = 0; g < r.system->arity(); ++g) {
      std::vector<pq::WindowMap> maps(r.system->arity(), pq::identity());
      maps[g] = pq::shift(1);
      const auto rep = products::product_factor_commutes(products::tuple_map(maps, r.system), *r.system);
      json c = products::to_json(rep);
      c["generator"] = r.report.generators.at(g);
      checks.push_back(c);
      ok = ok && rep.ok();
    }
    j["generator_checks"] = checks;
  }
  if (!a.out_path.empty()) {
    write_file(a.out_path, r.spec().dump(2) + "\n");
    j["spec_written"] = a.out_path;
  }
  emit(out, j);
  if (!ok) throw VerificationFailure("a generator failed the product check");
  return kOk;
}

struct VerifyArgs {
  Source src;
  std::size_t levels = 2;
  std::uint64_t trials = 100;
  std::uint64_t seed = verify::Options{}.seed;
  std::string out_path;
};

int cmd_verify_all(const VerifyArgs& a, std::uint64_t budget, std::ostream& out) {
  HoleWord w = HoleWord::parse("a?b");
  if (!a.src.spec.empty()) {
    const json spec = parse_json(slurp(a.src.spec), a.src.spec);
    if (spec.value("kind", "") != "pq") throw std::invalid_argument("verify-all takes a pq spec");
    w = HoleWord::parse(spec.at("word").get<std::string>());
  } else if (!a.src.word.empty()) {
    w = HoleWord::parse(a.src.word);
  } else {
    throw std::invalid_argument("give --word or --spec");
  }
  verify::Options opts;
  opts.trials = a.trials;
  opts.seed = a.seed;
  if (budget) opts.phi.language.memory_budget = budget;
  const auto rep = verify::verify_all(w, a.levels, opts);
  const std::string text = verify::to_json(rep).dump(2) + "\n";
  if (!a.out_path.empty()) write_file(a.out_path, text);
  out << text;
  if (!rep.ok()) throw VerificationFailure("verification suite reported failures");
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toeplitz subshifts: construction, complexity, automorphisms and verification", "toeplitz"};
  app.require_subcommand(1);
  app.footer(spec_schema_help());
  std::uint64_t budget = 0;
  app.add_option("--mem-budget", budget, "memory cap in bytes (default: $TOEPLITZ_MEM_BUDGET or built-in)");

  GenArgs gen;
  auto* c_gen = app.add_subcommand("gen", "print x on a coordinate range");
  gen.src.add(c_gen);
  c_gen->add_option("--range", gen.range, "half-open range a:b")->capture_default_str();
  c_gen->add_flag("--json", gen.as_json, "emit a JSON window");

  SkeletonArgs sk;
  auto* c_sk = app.add_subcommand("skeleton", "skeleton of x at a level");
  sk.src.add(c_sk);
  c_sk->add_option("--level", sk.level, "level n of T_n")->capture_default_str()->check(CLI::PositiveNumber);
  c_sk->add_option("--range", sk.range, "half-open range a:b")->capture_default_str();
  c_sk->add_option("--horizon", sk.horizon, "periods checked each way")->capture_default_str();

  ComplexityArgs cx;
  auto* c_cx = app.add_subcommand("complexity", "word complexity table and exponent fit");
  cx.src.add(c_cx);
  c_cx->add_option("--nmax", cx.n_max, "largest factor length")->capture_default_str();
  c_cx->add_option("--csv", cx.csv, "write n,p_X,certification rows ('-' for stdout)");
  c_cx->add_option("--plot", cx.plot, "write log n, log p_X columns");
  c_cx->add_option("--fit", cx.fit, "least-squares log-log fit over a:b");

  PhiArgs ph;
  auto* c_phi = app.add_subcommand("phi", "build phi_n and certify phi_n^{q^n} = sigma^{p^n}");
  c_phi->add_option("--word", ph.word, "coprime seed word")->required();
  c_phi->add_option("--p", ph.p, "expected |w|");
  c_phi->add_option("--q", ph.q, "expected hole count");
  c_phi->add_option("--level", ph.level, "level n")->capture_default_str()->check(CLI::PositiveNumber);
  c_phi->add_flag("--verify", ph.verify, "check the power identity on all factors");

  RootArgs rt;
  auto* c_rt = app.add_subcommand("roots", "q^n-th root of the shift");
  c_rt->add_option("--word", rt.word, "coprime seed word")->required();
  c_rt->add_option("--level", rt.level, "level n")->capture_default_str()->check(CLI::PositiveNumber);

  OdometerArgs od;
  auto* c_od = app.add_subcommand("odometer", "multiplicities, torsion and minimality for a scale");
  c_od->add_option("--scale", od.scale, "JSON array/file or powers:B:N | factorial:N | primorial:N | times:F:B:N")->required();
  c_od->add_option("--minimal", od.minimal, "test x -> x + m for minimality");
  c_od->add_option("--subgroup", od.subgroup, "integer generators of a subgroup");

  BlocksArgs bl;
  auto* c_bl = app.add_subcommand("blocks", "block construction with positive entropy");
  c_bl->add_option("--k1", bl.k1, "number of level-1 letters")->capture_default_str();
  c_bl->add_option("--d0", bl.d0, "integer D0 > 1")->capture_default_str();
  c_bl->add_option("--scale", bl.scale, "scale, same forms as odometer --scale")->capture_default_str();
  c_bl->add_option("--levels", bl.levels, "levels to build")->capture_default_str()->check(CLI::PositiveNumber);
  c_bl->add_option("--mode", bl.mode, "toy or faithful")->capture_default_str()->check(CLI::IsMember({"toy", "faithful"}));
  c_bl->add_flag("--relaxed-c2", bl.relaxed_c2, "drop the middle multiplicity constraints");
  c_bl->add_option("--entropy-depth", bl.entropy_depth, "levels used by the entropy bound (default: all built)");

  RealizeArgs rz;
  auto* c_rz = app.add_subcommand("realize", "product system with automorphism group Z^d + Z_a");
  c_rz->add_option("--d", rz.d, "rank of the free part")->capture_default_str()->check(CLI::PositiveNumber);
  c_rz->add_option("--a", rz.a, "order of the finite cyclic part")->capture_default_str()->check(CLI::PositiveNumber);
  c_rz->add_option("--entropy", rz.entropy, "zero or positive")->capture_default_str()->check(CLI::IsMember({"zero", "positive"}));
  c_rz->add_option("--depth", rz.depth, "structure depth of each component")->capture_default_str();
  c_rz->add_option("--out", rz.out_path, "write the composite construction spec");
  c_rz->add_flag("--check", rz.check, "check each generator on the product");

  VerifyArgs va;
  auto* c_va = app.add_subcommand("verify-all", "structural identities and phi_n invariants for a seed");
  va.src.add(c_va);
  c_va->add_option("--levels", va.levels, "check levels 1..N")->capture_default_str()->check(CLI::PositiveNumber);
  c_va->add_option("--trials", va.trials, "random windows per randomized check")->capture_default_str();
  c_va->add_option("--seed", va.seed, "RNG seed")->capture_default_str();
  c_va->add_option("--out", va.out_path, "also write the report here");

  std::vector<const char*> argv{"toeplitz"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << '\n' << spec_schema_help();
    return kUsage;
  }

  try {
    if (!budget) budget = env_budget();
    pq::PhiOptions popts;
    if (budget) popts.language.memory_budget = budget;
    if (*c_gen) return cmd_gen(gen, out);
    if (*c_sk) return cmd_skeleton(sk, out);
    if (*c_cx) return cmd_complexity(cx, popts.language, out);
    if (*c_phi) return cmd_phi(ph, popts, out);
    if (*c_rt) return cmd_roots(rt, popts, out);
    if (*c_od) return cmd_odometer(od, out);
    if (*c_bl) return cmd_blocks(bl, budget, out);
    if (*c_rz) return cmd_realize(rz, out);
    if (*c_va) return cmd_verify_all(va, budget, out);
  } catch (const VerificationFailure& e) {
    err << "verification failed: " << e.what() << '\n';
    return kVerificationFailed;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n\n" << spec_schema_help();
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace toeplitz::cli
