// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "toeplitz/blocks.hpp"
#include "toeplitz/cli.hpp"
#include "toeplitz/language.hpp"
#include "toeplitz/odometer.hpp"
#include "toeplitz/pq_toeplitz.hpp"
#include "toeplitz/verify.hpp"

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace toeplitz;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

const std::vector<std::string> kGrid{"a?b", "a?b?c", "ab?c?d"};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double peak_rss_mib() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return static_cast<double>(u.ru_maxrss) / 1024.0;
}

Outcome check_fixed_point() {
  Outcome o;
  std::uint64_t cases = 0;
  for (const auto& s : kGrid)
    for (unsigned n = 1; n <= 3; ++n) {
      const auto w = HoleWord::parse(s);
      const std::int64_t len = 4 * static_cast<std::int64_t>(std::pow(w.length(), n));
      const auto c = verify::fixed_point(w, n, len);
      cases += c.cases;
      o.require(c.ok, s + " n=" + std::to_string(n) + ": " + c.detail);
    }
  if (o.ok) o.detail = std::to_string(cases) + " coordinates over 9 (w,n)";
  return o;
}

Outcome check_commutation() {
  Outcome o;
  verify::Options opts;
  opts.trials = 100;
  std::uint64_t cases = 0;
  for (const auto& s : kGrid)
    for (unsigned n = 1; n <= 3; ++n) {
      const auto c = verify::commutation(HoleWord::parse(s), n, opts);
      cases += c.cases;
      o.require(c.ok, s + " n=" + std::to_string(n) + ": " + c.detail);
    }
  if (o.ok) o.detail = std::to_string(cases) + " windows";
  return o;
}

Outcome check_skeleton() {
  Outcome o;
  for (const auto& s : kGrid)
    for (unsigned n = 1; n <= 3; ++n) {
      const auto c = verify::skeleton_identity(HoleWord::parse(s), n);
      o.require(c.ok, s + " n=" + std::to_string(n) + ": " + c.detail);
    }
  if (o.ok) o.detail = "skeleton = T_n(w) on 9 (w,n)";
  return o;
}

Outcome check_automorphism() {
  Outcome o;
  const auto w = HoleWord::parse("a?b?c");
  const ConstantWordSystem sys(w, 10);
  std::uint64_t factors = 0;
  for (unsigned n = 1; n <= 2; ++n) {
    const std::int64_t p = n == 1 ? 5 : 25, q = n == 1 ? 2 : 4;
    const auto phi = pq::make_phi(w, n);
    std::uint64_t t = 0;
    o.require(pq::extensional_equal(pq::power(phi, static_cast<std::uint64_t>(q)), pq::shift(p), sys, {}, &t),
              "phi_" + std::to_string(n) + "^" + std::to_string(q) + " != sigma^" + std::to_string(p));
    factors += t;
    // phi^l = sigma^k would force k q = l p; every |k| <= p^n is tested anyway.
    for (std::int64_t l = 1; l < q; ++l) {
      const auto alive = pq::matching_shifts(pq::power(phi, static_cast<std::uint64_t>(l)), sys, p, {}, &t);
      factors += t;
      o.require(alive.empty(), "phi_" + std::to_string(n) + "^" + std::to_string(l) + " is a shift");
    }
  }
  if (o.ok) o.detail = std::to_string(factors) + " factors compared";
  return o;
}

Outcome check_roots() {
  Outcome o;
  const auto w = HoleWord::parse("a?b?c");
  const ConstantWordSystem sys(w, 10);
  const auto psi1 = pq::compose(pq::make_phi(w, 1), pq::shift(-2));
  o.require(pq::extensional_equal(pq::power(psi1, 2), pq::shift(1), sys), "(phi_1 sigma^-2)^2 != sigma");
  const auto r2 = pq::root_of_shift(w, 2);
  o.require(r2.order == 4, "n=2 root order " + std::to_string(r2.order));
  o.require(pq::extensional_equal(pq::power(r2.map, 4), pq::shift(1), sys), "n=2 root^4 != sigma");
  if (o.ok) o.detail = "n=1 a=1 b=2; n=2 a=" + std::to_string(r2.a) + " b=" + std::to_string(r2.b);
  return o;
}

Outcome check_exponent() {
  Outcome o;
  const ConstantWordSystem sys(HoleWord::parse("a?b?c"), 10);
  const auto table = language::complexity_table(sys, 600);
  for (std::size_t n = 50; n <= 600; ++n)
    o.require(table.rows[n].certification != language::Certification::DomainLimited, "uncertified row " + std::to_string(n));
  const auto fit = language::fit_exponent(table, 50, 600);
  o.require(fit.slope >= 1.55 && fit.slope <= 1.95, "slope " + fmt(fit.slope) + " outside [1.55, 1.95]");
  o.require(table.c1 && table.c2 && *table.c1 <= *table.c2 && std::isfinite(*table.c2), "C1 <= C2 witnesses missing");
  o.require(peak_rss_mib() < 1024.0, "peak RSS " + fmt(peak_rss_mib(), 0) + " MiB");
  if (o.ok)
    o.detail = "r=" + fmt(fit.slope) + " (asymptote " + fmt(*table.exponent) + "), C1=" + fmt(*table.c1) + ", C2=" + fmt(*table.c2) +
               ", peak " + fmt(peak_rss_mib(), 0) + " MiB";
  return o;
}

Outcome check_non_superlinear() {
  Outcome o;
  language::StructuralLanguage lang(single_hole_word(3));
  std::uint64_t pn = 1;
  std::string counts;
  for (int k = 1; k <= 6; ++k) {
    pn *= 3;
    const auto c = lang.count(pn);
    o.require(c <= 2 * pn, "p_X(" + std::to_string(pn) + ") = " + std::to_string(c));
    counts += (counts.empty() ? "" : ",") + std::to_string(c);
  }
  if (o.ok) o.detail = "p_X(3^k) = " + counts;
  return o;
}

std::uint64_t brute_orbit(std::uint64_t m, std::uint64_t p) {
  std::uint64_t x = 0, n = 0;
  do {
    x = (x + m) % p;
    ++n;
  } while (x != 0);
  return n;
}

Outcome check_odometer() {
  Outcome o;
  using namespace odometer;
  const auto two = torsion_structure(Scale::powers(2, 8));
  o.require(two.resolved.empty(), "2^n has torsion");
  const auto prim = torsion_structure(Scale::primorial(6));
  bool prim_ok = prim.resolved.size() == 3;
  for (const auto& t : prim.resolved) prim_ok = prim_ok && t.order == t.prime;
  o.require(prim_ok, "primorial torsion");
  const auto three = torsion_structure(Scale::times_powers(3, 2, 8));
  o.require(three.resolved.size() == 1 && three.resolved[0].prime == 3 && three.resolved[0].order == 3, "3*2^n torsion");

  // Every strictly increasing divisibility chain with top <= 64.
  std::uint64_t scales = 0, tests = 0;
  std::vector<std::uint64_t> cur;
  std::function<void()> walk = [&] {
    if (!cur.empty()) {
      ++scales;
      const Scale s(std::vector<BigInt>(cur.begin(), cur.end()));
      for (std::uint64_t m = 1; m <= cur.back(); ++m) {
        bool brute = true;
        for (auto p : cur) brute = brute && brute_orbit(m % p, p) == p;
        ++tests;
        o.require(is_minimal_translation(m, s) == brute, "minimality mismatch at m=" + std::to_string(m));
      }
    }
    const std::uint64_t base = cur.empty() ? 1 : cur.back();
    for (std::uint64_t k = 2; base * k <= 64; ++k) {
      cur.push_back(base * k);
      walk();
      cur.pop_back();
    }
  };
  walk();
  if (o.ok) o.detail = "torsion examples; " + std::to_string(tests) + " minimality cases over " + std::to_string(scales) + " scales";
  return o;
}

blocks::BlockSpec toy(unsigned k1, std::size_t levels) {
  blocks::BlockSpec s;
  s.k1 = k1;
  s.d0 = 2;
  s.scale = odometer::Scale({1, 8, 120, 3720, 230640});
  s.levels = levels;
  return s;
}

Outcome check_block_construction() {
  Outcome o;
  using namespace blocks;
  // Level 4 is stored so that levels 1-3 have a level above them.
  const auto c = Construction::build(toy(4, 4));
  o.require(c.materialized_depth() == 4, "toy levels not stored");
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto& lv = c.level(n);
    o.require(lv.blocks.size() >= (std::size_t{1} << (n - 1)) * 4, "k_" + std::to_string(n) + " too small");
    o.require(check_trivial_overlap(c, n).ok, "overlap at level " + std::to_string(n));
    if (n >= 2) o.require(check_conditions(c, n).ok, "C1/C2 at level " + std::to_string(n) + ": " + check_conditions(c, n).detail);
    const double bound = std::log(static_cast<double>(lv.blocks.size())) / lv.length.convert_to<double>();
    o.require(empirical_entropy(c, n) >= bound, "empirical entropy below log k/p at level " + std::to_string(n));
  }
  for (std::size_t n = 1; n <= 2; ++n) {
    const auto window = 10 * c.level(n + 1).length.convert_to<std::int64_t>();
    o.require(frequencies(c, n, window).all_exact, "frequencies at level " + std::to_string(n));
  }
  double last = 0;
  std::string sweep;
  for (unsigned k1 = 4; k1 <= 10; ++k1) {
    const double b = entropy_lower_bound(Construction::build(toy(k1, 3)), 3).product_bound;
    o.require(b > last, "entropy bound not increasing at k1=" + std::to_string(k1));
    last = b;
    sweep += (sweep.empty() ? "" : ",") + fmt(b, 3);
  }
  if (o.ok) o.detail = "k=4,8,16; frequencies exact n=1,2; bound sweep k1=4..10: " + sweep;
  return o;
}

Outcome check_determinism() {
  Outcome o;
  const auto dir = std::filesystem::temp_directory_path() / "toeplitz_acceptance";
  std::filesystem::create_directories(dir);
  const auto spec = dir / "spec.json";
  std::ofstream(spec) << R"({"kind":"pq","word":"a?b?c","depth":8})";
  std::string first;
  for (int i = 0; i < 2; ++i) {
    std::ostringstream out, err;
    const int code = cli::run({"verify-all", "--spec", spec.string(), "--levels", "2"}, out, err);
    o.require(code == cli::kOk, "verify-all exit " + std::to_string(code) + ": " + err.str());
    if (i == 0)
      first = out.str();
    else
      o.require(out.str() == first, "reports differ");
  }
  std::filesystem::remove_all(dir);
  if (o.ok) o.detail = std::to_string(first.size()) + " identical bytes";
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "fixed-point identity", 1, check_fixed_point},
      {2, "commutation", 1, check_commutation},
      {3, "skeleton identity", 1, check_skeleton},
      {4, "automorphism certificate", 60, check_automorphism},
      {5, "root certificate", 120, check_roots},
      {6, "complexity exponent", 300, check_exponent},
      {7, "non-superlinear family", 30, check_non_superlinear},
      {8, "odometer torsion and minimality", 1, check_odometer},
      {9, "block construction", 120, check_block_construction},
      {10, "determinism", 600, check_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (o.ok && secs >= c.limit_s) {
      o.ok = false;
      o.detail = "took " + fmt(secs, 2) + " s, limit " + fmt(c.limit_s, 0) + " s";
    }
    if (!o.ok) ++failed;
    std::printf("criterion %2d %s: %s (%s; %.2f s)\n", c.id, c.name, o.ok ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
