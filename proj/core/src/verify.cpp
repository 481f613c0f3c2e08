#include "toeplitz/verify.hpp"

#include "toeplitz/language.hpp"

#include <nlohmann/json.hpp>

#include <random>

namespace toeplitz::verify {

namespace {

std::int64_t ipow(std::int64_t b, unsigned e) {
  std::int64_t v = 1;
  for (unsigned i = 0; i < e; ++i) v *= b;
  return v;
}

// Portable draws: std::mt19937_64 output is fixed by the standard, distributions are not.
struct Rng {
  explicit Rng(std::uint64_t seed) : g(seed) {}
  std::uint64_t below(std::uint64_t n) { return g() % n; }
  std::int64_t between(std::int64_t lo, std::int64_t hi) { return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo + 1))); }
  std::mt19937_64 g;
};

SequenceWindow random_window(Rng& rng, const Range& r, const std::string& symbols) {
  std::string s(static_cast<std::size_t>(r.size()), ' ');
  for (auto& c : s) c = symbols[rng.below(symbols.size())];
  return {r.begin, std::move(s)};
}

Range hull(const Range& a, const Range& b) { return {std::min(a.begin, b.begin), std::max(a.end, b.end)}; }

Check make(std::string name, unsigned level) {
  Check c;
  c.name = std::move(name);
  c.level = level;
  return c;
}

void fail(Check& c, std::string detail) {
  if (!c.ok) return;
  c.ok = false;
  c.detail = std::move(detail);
}

Check skip(std::string name, unsigned level, std::string why) {
  Check c = make(std::move(name), level);
  c.skipped = true;
  c.detail = std::move(why);
  return c;
}

}  // namespace

Check fixed_point(const HoleWord& w, unsigned n, std::int64_t length) {
  Check c = make("fixed_point", n);
  const PeriodicSequence t = iterate(w, n);
  const ConstantWordSystem sys(w, n + 1);
  const std::int64_t len = length > 0 ? length : 4 * t.period();
  const Range r{-len / 2, len - len / 2};
  const SequenceWindow y = sys.window(hole_rank_range(t, r));
  const SequenceWindow x = sys.window(r);
  if (fill(t, y, r) != x) fail(c, "F_{T_n}(x) differs from x on " + to_string(r));
  c.cases = static_cast<std::uint64_t>(r.size());
  return c;
}

Check commutation(const HoleWord& w, unsigned n, const Options& opts) {
  Check c = make("commutation", n);
  const PeriodicSequence t = iterate(w, n);
  const std::int64_t p = t.period(), q = t.holes_per_period();
  const std::string symbols = w.alphabet().symbols() + "xyz";
  Rng rng(opts.seed ^ (0x9e37ULL * n));
  for (std::uint64_t k = 0; k < opts.trials; ++k) {
    const std::int64_t o = rng.between(-4 * p, 4 * p);
    const Range r{o, o + 2 * p};
    const Range ranks = hull(hole_rank_range(t, r), hole_rank_range(t, r.shifted(p)));
    const SequenceWindow y = random_window(rng, {ranks.begin - q - 1, ranks.end + q + 1}, symbols);
    const SequenceWindow lhs = fill(t, y.shifted(q), r);
    const SequenceWindow rhs = fill(t, y, r.shifted(p)).shifted(p);
    ++c.cases;
    if (lhs != rhs) fail(c, "mismatch on " + to_string(r));
  }
  return c;
}

Check skeleton_identity(const HoleWord& w, unsigned n) {
  Check c = make("skeleton", n);
  const PeriodicSequence t = iterate(w, n);
  const ConstantWordSystem sys(w, n + 1);
  const Range r{-2 * t.period(), 2 * t.period()};
  const SkeletonResult s = skeleton(sys, n, r);
  c.cases = static_cast<std::uint64_t>(r.size());
  if (!w.is_coprime()) {
    // The identity needs gcd(p, q) = 1; otherwise Per_{p^n} can be larger.
    std::int64_t extra = 0;
    for (std::int64_t i = r.begin; i < r.end; ++i) extra += s.window.at(i) != t.at(i);
    c.detail = "not coprime, reported only: " + std::to_string(extra) + " extra periodic coordinates";
    return c;
  }
  if (s.window != t.window(r)) fail(c, "skeleton differs from T_n on " + to_string(r));
  else if (!s.certified) fail(c, "skeleton matches but is not certified");
  return c;
}

Check hole_count(const HoleWord& w, unsigned n) {
  Check c = make("hole_count", n);
  const PeriodicSequence t = iterate(w, n);
  const auto p = static_cast<std::int64_t>(w.length()), q = static_cast<std::int64_t>(w.hole_count());
  c.cases = 1;
  if (t.period() != ipow(p, n) || t.holes_per_period() != ipow(q, n))
    fail(c, "period " + std::to_string(t.period()) + " with " + std::to_string(t.holes_per_period()) + " holes");
  return c;
}

Check evaluate_agrees(const HoleWord& w, unsigned n) {
  Check c = make("evaluate", n);
  const PeriodicSequence t = iterate(w, n);
  const ConstantWordSystem sys(w, n + 1);
  const Range r{-2 * t.period(), 2 * t.period()};
  for (std::int64_t i = r.begin; i < r.end; ++i) {
    const char xi = sys.evaluate(i);
    ++c.cases;
    if (w.is_generator() && xi == kHole) fail(c, "hole at " + std::to_string(i));
    if (!t.is_hole(i) && t.at(i) != xi) fail(c, "x_" + std::to_string(i) + " differs from T_n");
  }
  return c;
}

Check semigroup(const HoleWord& w, unsigned n, const Options& opts) {
  Check c = make("semigroup", n);
  const PeriodicSequence base(w.str());
  const PeriodicSequence tn = iterate(w, n), tn1 = iterate(w, n + 1);
  const std::string symbols = w.alphabet().symbols() + "xyz";
  Rng rng(opts.seed ^ (0x51f1ULL * n));
  for (std::uint64_t k = 0; k < opts.trials; ++k) {
    const std::int64_t span = tn1.period();
    const std::int64_t o = rng.between(-2 * span, 2 * span);
    const Range r{o, o + span};
    const Range inner = hole_rank_range(base, r);
    const Range ranks = hull(hole_rank_range(tn1, r), hole_rank_range(tn, inner));
    const SequenceWindow y = random_window(rng, ranks, symbols);
    ++c.cases;
    if (fill(tn1, y, r) != fill(base, fill(tn, y, inner), r)) fail(c, "T_{n+1} composition fails on " + to_string(r));
  }
  // Random periodic hole words a, b and filler c.
  const std::string letters = "ab?";
  for (std::uint64_t k = 0; k < opts.trials; ++k) {
    auto word = [&] {
      std::string s(static_cast<std::size_t>(rng.between(2, 6)), ' ');
      for (auto& ch : s) ch = letters[rng.below(3)];
      s[rng.below(s.size())] = kHole;
      return PeriodicSequence(s);
    };
    const PeriodicSequence a = word(), b = word();
    const std::int64_t o = rng.between(-40, 40);
    const Range r{o, o + 30};
    const Range h = hull(r, {0, 1});
    const SequenceWindow z = fill(a, b.window(hole_rank_range(a, h)), h);
    const Range inner = hole_rank_range(a, r);
    const SequenceWindow cw = random_window(rng, {-200, 200}, "xyz");
    ++c.cases;
    if (fill(z, cw, r) != fill(a, fill(b, cw, inner), r))
      fail(c, "F_{F_a(b)} differs from F_a o F_b for a = " + a.period_word() + ", b = " + b.period_word());
  }
  return c;
}

Check essential(const HoleWord& w, std::size_t levels) {
  Check c = make("essential_periods", 0);
  const ConstantWordSystem sys(w, levels + 1);
  const auto ps = essential_periods(sys, levels);
  const auto p = static_cast<std::int64_t>(w.length());
  // With gcd(p, q) > 1 the level periods p^n need not be minimal; report only.
  const bool coprime = w.is_coprime();
  std::string seen;
  for (const auto& e : ps) {
    ++c.cases;
    seen += (seen.empty() ? "" : ", ") + std::to_string(e.period);
    if (!e.essential) seen += " (matches " + std::to_string(e.matching_period.value_or(0)) + ")";
    if (coprime && (!e.essential || e.period != ipow(p, static_cast<unsigned>(e.level))))
      fail(c, "level " + std::to_string(e.level) + " period " + std::to_string(e.period) + " not certified essential");
  }
  if (c.ok) c.detail = (coprime ? "" : "not coprime, reported only: ") + seen;
  return c;
}

std::vector<Check> phi_checks(const HoleWord& w, unsigned n, const Options& opts) {
  if (!language::StructuralLanguage::applies(w)) return {skip("phi", n, "seed is not a coprime generator")};
  std::vector<Check> out;
  const ConstantWordSystem sys(w, n + 2);
  const pq::Level level(w, n);
  const std::int64_t p = level.period(), q = level.holes();
  const auto& lopts = opts.phi.language;

  pq::WindowMap phi = pq::identity();
  try {
    phi = pq::make_phi(w, n, opts.phi);
  } catch (const BudgetExceeded& e) {
    out.push_back(skip("phi_radius", n, e.what()));
    return out;
  }
  const std::int64_t r = phi.radius();
  Check rad = make("phi_radius", n);
  rad.cases = static_cast<std::uint64_t>(r);
  rad.detail = "radius " + std::to_string(r);
  out.push_back(rad);

  Check orient = make("phi_orientation", n);
  for (std::int64_t k = -8; k < 8; ++k) {
    const std::int64_t o = k * p + k * 7;
    const SequenceWindow z = sys.window({o - 2 * p - 3 * r, o + 2 * p + 3 * r});
    const SequenceWindow f = pq::phi_by_formula(z, level);
    const SequenceWindow s = phi.apply(z);
    for (std::int64_t i = std::max(f.start(), s.start()); i < std::min(f.end(), s.end()); ++i) {
      ++orient.cases;
      if (f.at(i) != s.at(i)) fail(orient, "sliding rule and defining formula differ at " + std::to_string(i));
    }
  }
  out.push_back(orient);

  Check comm = make("phi_commutes_with_shift", n);
  if (!pq::extensional_equal(pq::compose(phi, pq::shift(1)), pq::compose(pq::shift(1), phi), sys, lopts, &comm.cases))
    fail(comm, "phi o sigma differs from sigma o phi");
  out.push_back(comm);

  Check fac = make("phi_maps_factors", n);
  {
    const auto m = static_cast<std::size_t>(2 * r + 1);
    const auto inputs = language::factors(sys, m + static_cast<std::size_t>(2 * r), lopts);
    const auto targets = language::factors(sys, m, lopts);
    for (const auto& z : inputs.words) {
      ++fac.cases;
      if (!targets.contains(phi.apply(z))) fail(fac, "image of " + z + " is not a factor");
    }
  }
  out.push_back(fac);

  if (q * r > opts.max_power_radius) {
    out.push_back(skip("phi_power_identity", n, "phi^" + std::to_string(q) + " radius beyond budget"));
    out.push_back(skip("phi_power_minimal", n, "phi powers beyond budget"));
  } else {
    Check pw = make("phi_power_identity", n);
    if (!pq::extensional_equal(pq::power(phi, static_cast<std::uint64_t>(q)), pq::shift(p), sys, lopts, &pw.cases))
      fail(pw, "phi^" + std::to_string(q) + " differs from sigma^" + std::to_string(p));
    out.push_back(pw);

    Check mn = make("phi_power_minimal", n);
    for (std::int64_t l = 1; l < q; ++l) {
      const pq::WindowMap f = pq::power(phi, static_cast<std::uint64_t>(l));
      const std::int64_t bound = l * p / q + 1;
      std::uint64_t tested = 0;
      const auto alive = pq::matching_shifts(f, sys, bound, lopts, &tested);
      mn.cases += tested;
      if (!alive.empty()) fail(mn, "phi^" + std::to_string(l) + " equals sigma^" + std::to_string(alive.front()));
    }
    out.push_back(mn);
  }

  try {
    const pq::Root root = pq::root_of_shift(w, n, opts.phi);
    if (root.map.radius() * root.order > opts.max_power_radius * 4) {
      out.push_back(skip("root_of_shift", n, "root power beyond budget"));
    } else {
      Check rt = make("root_of_shift", n);
      rt.detail = "a = " + std::to_string(root.a) + ", b = " + std::to_string(root.b);
      if (!pq::extensional_equal(pq::power(root.map, static_cast<std::uint64_t>(root.order)), pq::shift(1), sys, lopts, &rt.cases))
        fail(rt, "root^" + std::to_string(root.order) + " differs from sigma (" + rt.detail + ")");
      out.push_back(rt);
    }
  } catch (const BudgetExceeded& e) {
    out.push_back(skip("root_of_shift", n, e.what()));
  }
  return out;
}

bool Report::ok() const {
  for (const auto& c : checks)
    if (!c.ok) return false;
  return true;
}

Report verify_all(const HoleWord& w, std::size_t levels, const Options& opts) {
  if (levels < 1) throw std::invalid_argument("verify-all needs at least one level");
  if (!w.is_generator()) throw std::invalid_argument("verify-all needs a generator seed");
  Report rep;
  rep.word = w.str();
  rep.levels = levels;
  for (unsigned n = 1; n <= levels; ++n) {
    rep.checks.push_back(hole_count(w, n));
    rep.checks.push_back(fixed_point(w, n));
    rep.checks.push_back(commutation(w, n, opts));
    rep.checks.push_back(skeleton_identity(w, n));
    rep.checks.push_back(evaluate_agrees(w, n));
    rep.checks.push_back(semigroup(w, n, opts));
  }
  rep.checks.push_back(essential(w, levels));
  for (unsigned n = 1; n <= levels; ++n)
    for (auto& c : phi_checks(w, n, opts)) rep.checks.push_back(std::move(c));
  return rep;
}

nlohmann::json to_json(const Check& c) {
  nlohmann::json j{{"name", c.name}, {"ok", c.ok}, {"cases", c.cases}};
  if (c.level) j["level"] = c.level;
  if (c.skipped) j["skipped"] = true;
  if (!c.detail.empty()) j["detail"] = c.detail;
  return j;
}

nlohmann::json to_json(const Report& r) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  return {{"word", r.word}, {"levels", r.levels}, {"ok", r.ok()}, {"checks", checks}};
}

}  // namespace toeplitz::verify
