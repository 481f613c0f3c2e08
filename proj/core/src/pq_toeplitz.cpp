#include "toeplitz/pq_toeplitz.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>

namespace toeplitz::pq {

WindowMap::WindowMap(std::int64_t radius, Rule rule, std::string label, Batch batch)
    : radius_(radius), rule_(std::move(rule)), batch_(std::move(batch)), label_(std::move(label)) {
  if (radius_ < 0) throw std::invalid_argument("radius must be nonnegative");
  if (!rule_) throw std::invalid_argument("window map needs a rule");
}

char WindowMap::rule(std::string_view window) const {
  if (static_cast<std::int64_t>(window.size()) != 2 * radius_ + 1)
    throw std::invalid_argument("rule of " + label_ + " needs a window of length " + std::to_string(2 * radius_ + 1));
  return rule_(window);
}

std::string WindowMap::apply(std::string_view input) const {
  const auto len = static_cast<std::int64_t>(input.size());
  if (len < 2 * radius_ + 1) return {};
  if (batch_) return batch_(input);
  std::string out(static_cast<std::size_t>(len - 2 * radius_), ' ');
  for (std::int64_t k = 0; k < len - 2 * radius_; ++k)
    out[static_cast<std::size_t>(k)] = rule_(input.substr(static_cast<std::size_t>(k), static_cast<std::size_t>(2 * radius_ + 1)));
  return out;
}

SequenceWindow WindowMap::apply(const SequenceWindow& input) const {
  return {input.start() + radius_, apply(std::string_view(input.symbols()))};
}

WindowMap identity() {
  return WindowMap(
      0, [](std::string_view w) { return w[0]; }, "id", [](std::string_view in) { return std::string(in); });
}

WindowMap shift(std::int64_t k) {
  const std::int64_t r = std::llabs(k);
  return WindowMap(
      r, [r, k](std::string_view w) { return w[static_cast<std::size_t>(r + k)]; }, "sigma^" + std::to_string(k),
      [r, k](std::string_view in) {
        return std::string(in.substr(static_cast<std::size_t>(r + k), in.size() - static_cast<std::size_t>(2 * r)));
      });
}

WindowMap compose(const WindowMap& f, const WindowMap& g) {
  auto ff = std::make_shared<const WindowMap>(f);
  auto gg = std::make_shared<const WindowMap>(g);
  return WindowMap(
      f.radius() + g.radius(), [ff, gg](std::string_view w) { return ff->rule(gg->apply(w)); },
      "(" + f.label() + " o " + g.label() + ")", [ff, gg](std::string_view in) { return ff->apply(gg->apply(in)); });
}

WindowMap power(const WindowMap& f, std::uint64_t l) {
  if (l == 0) return identity();
  WindowMap acc = f;
  for (std::uint64_t i = 1; i < l; ++i) acc = compose(f, acc);
  auto body = std::make_shared<const WindowMap>(acc);
  return WindowMap(
      acc.radius(), [body](std::string_view w) { return body->rule(w); }, f.label() + "^" + std::to_string(l),
      [body](std::string_view in) { return body->apply(in); });
}

// ---------------------------------------------------------------------------

namespace {

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size() && i < 16; ++i) s += (i ? ", " : "") + std::to_string(v[i]);
  if (v.size() > 16) s += ", ...";
  return s;
}

}  // namespace

AmbiguousPhase::AmbiguousPhase(std::vector<std::int64_t> phases)
    : std::runtime_error("ambiguous phase: window admits {" + join(phases) + "}"), phases_(std::move(phases)) {}

Level::Level(const HoleWord& w, unsigned n) : word_(w), n_(n), skeleton_(iterate(w, n)) {
  if (w.hole_count() == 0) throw std::invalid_argument("phase arithmetic needs a seed with holes");
  const std::int64_t p = skeleton_.period();
  next_hole_.resize(static_cast<std::size_t>(p));
  for (std::int64_t c = 0; c < p; ++c) next_hole_[static_cast<std::size_t>(c)] = skeleton_.hole_coordinate(skeleton_.holes_before(c + 1)) - c;
}

std::int64_t Level::next_hole_distance(std::int64_t c) const {
  return next_hole_[static_cast<std::size_t>(floor_mod(c, period()))];
}

std::vector<std::int64_t> consistent_phases(const SequenceWindow& window, const Level& level) {
  const std::string& t = level.skeleton().period_word();
  const std::string& z = window.symbols();
  const std::int64_t p = level.period();
  std::vector<std::int64_t> out;
  for (std::int64_t m = 0; m < p; ++m) {
    auto idx = static_cast<std::size_t>(floor_mod(window.start() + m, p));
    bool ok = true;
    for (std::size_t i = 0; i < z.size() && ok; ++i) {
      const char c = t[idx];
      ok = c == kHole || c == z[i];
      if (++idx == t.size()) idx = 0;
    }
    if (ok) out.push_back(m);
  }
  return out;
}

PhaseResult phase(const SequenceWindow& window, const Level& level) {
  auto m = consistent_phases(window, level);
  if (m.empty()) throw InconsistentPhase("window " + to_string(window.range()) + " matches no phase at level " + std::to_string(level.n()));
  if (m.size() > 1) throw AmbiguousPhase(std::move(m));
  return {level.n(), m.front(), static_cast<std::int64_t>(window.size()), true};
}

SequenceWindow hole_contents(const SequenceWindow& window, const Level& level) {
  const std::int64_t m = phase(window, level).phase;
  const auto& t = level.skeleton();
  const Range ranks = hole_rank_range(t, window.range().shifted(m));
  std::string h(static_cast<std::size_t>(ranks.size()), ' ');
  for (std::int64_t j = ranks.begin; j < ranks.end; ++j) h[static_cast<std::size_t>(j - ranks.begin)] = window.at(t.hole_coordinate(j) - m);
  return {ranks.begin, std::move(h)};
}

SequenceWindow phi_by_formula(const SequenceWindow& window, const Level& level) {
  const std::int64_t m = phase(window, level).phase;
  const auto& t = level.skeleton();
  const SequenceWindow h = hole_contents(window, level);
  const SequenceWindow sh = h.shifted(1);  // (σH)_j = H_{j+1}
  // Coordinates of T_n(w) whose holes all receive ranks that σH covers.
  const Range r = window.range().shifted(m);
  const Range out{r.begin, std::max(r.begin, std::min(r.end, t.hole_coordinate(h.end() - 1)))};
  return fill(t, sh, out).shifted(m);
}

namespace {

constexpr char kUndefined = '\0';

// Output of φ_n at the centre of `z` (coordinates [-r, r]) under phase m, or
// kUndefined when the next hole falls outside the window.
char phi_output(std::string_view z, std::int64_t r, std::int64_t m, const Level& level) {
  if (!level.skeleton().is_hole(m)) return z[static_cast<std::size_t>(r)];
  const std::int64_t d = level.next_hole_distance(m);
  return d <= r ? z[static_cast<std::size_t>(r + d)] : kUndefined;
}

// Every factor of length 2r+1 must give one defined output across its phases.
bool radius_works(language::StructuralLanguage& lang, const Level& level, std::int64_t r, std::uint64_t budget) {
  const auto len = static_cast<std::size_t>(2 * r + 1);
  if (BigInt(lang.count(len)) * len > BigInt(budget))
    throw BudgetExceeded("phi_" + std::to_string(level.n()) + ": factors of length " + std::to_string(len) + " exceed the memory budget");
  for (const auto& z : lang.factors(len)) {
    const auto phases = consistent_phases(SequenceWindow(-r, z), level);
    if (phases.empty()) throw std::logic_error("factor without phase: " + z);
    const char first = phi_output(z, r, phases.front(), level);
    if (first == kUndefined) return false;
    for (std::size_t i = 1; i < phases.size(); ++i)
      if (phi_output(z, r, phases[i], level) != first) return false;
  }
  return true;
}

}  // namespace

WindowMap make_phi(const HoleWord& w, unsigned n, const PhiOptions& opts) {
  if (!language::StructuralLanguage::applies(w)) throw std::invalid_argument("phi needs a coprime generator seed");
  auto level = std::make_shared<const Level>(w, n);
  language::StructuralLanguage lang(w, opts.language.memory_budget);

  std::int64_t hi = 3 * level->period() / 2 + level->skeleton().max_hole_gap();
  while (!radius_works(lang, *level, hi, opts.language.memory_budget)) {
    hi *= 2;
    if (hi > opts.max_radius) throw BudgetExceeded("phi_" + std::to_string(n) + " radius exceeds " + std::to_string(opts.max_radius));
  }
  std::int64_t lo = 0;
  while (lo < hi) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (radius_works(lang, *level, mid, opts.language.memory_budget))
      hi = mid;
    else
      lo = mid + 1;
  }
  const std::int64_t r = hi;
  if (r > opts.max_radius) throw BudgetExceeded("phi_" + std::to_string(n) + " radius exceeds " + std::to_string(opts.max_radius));

  auto rule = [level, r](std::string_view z) {
    const auto phases = consistent_phases(SequenceWindow(-r, std::string(z)), *level);
    if (phases.empty()) return z[static_cast<std::size_t>(r)];
    const char c = phi_output(z, r, phases.front(), *level);
    return c == kUndefined ? z[static_cast<std::size_t>(r)] : c;
  };
  auto batch = [level, r, rule](std::string_view in) {
    const auto len = static_cast<std::int64_t>(in.size());
    std::string out(static_cast<std::size_t>(len - 2 * r), ' ');
    const auto phases = consistent_phases(SequenceWindow(0, std::string(in)), *level);
    for (std::int64_t i = r; i < len - r; ++i) {
      const auto window = in.substr(static_cast<std::size_t>(i - r), static_cast<std::size_t>(2 * r + 1));
      char c = kUndefined;
      if (!phases.empty()) c = phi_output(window, r, phases.front() + i, *level);
      out[static_cast<std::size_t>(i - r)] = c == kUndefined ? rule(window) : c;
    }
    return out;
  };
  return WindowMap(r, rule, "phi_" + std::to_string(n), batch);
}

bool extensional_equal(const WindowMap& f, const WindowMap& g, const ToeplitzSystem& sys, const language::Options& opts,
                       std::uint64_t* factors_tested) {
  const std::int64_t r = std::max(f.radius(), g.radius());
  const auto set = language::factors(sys, static_cast<std::size_t>(2 * r + 1), opts);
  std::uint64_t tested = 0;
  bool equal = true;
  for (const auto& z : set.words) {
    ++tested;
    const std::string a = f.apply(z), b = g.apply(z);
    if (a[static_cast<std::size_t>(r - f.radius())] != b[static_cast<std::size_t>(r - g.radius())]) {
      equal = false;
      break;
    }
  }
  if (factors_tested) *factors_tested = tested;
  return equal;
}

std::vector<std::int64_t> matching_shifts(const WindowMap& f, const ToeplitzSystem& sys, std::int64_t bound,
                                          const language::Options& opts, std::uint64_t* factors_tested) {
  if (bound < 0) throw std::invalid_argument("shift bound must be nonnegative");
  const std::int64_t big = std::max(f.radius(), bound);
  std::vector<std::int64_t> alive;
  for (std::int64_t k = -bound; k <= bound; ++k) alive.push_back(k);
  std::uint64_t tested = 0;
  for (const auto& z : language::factors(sys, static_cast<std::size_t>(2 * big + 1), opts).words) {
    ++tested;
    const auto inner = std::string_view(z).substr(static_cast<std::size_t>(big - f.radius()), static_cast<std::size_t>(2 * f.radius() + 1));
    const char c = f.apply(inner)[0];
    std::erase_if(alive, [&](std::int64_t k) { return z[static_cast<std::size_t>(big + k)] != c; });
    if (alive.empty()) break;
  }
  if (factors_tested) *factors_tested = tested;
  return alive;
}

Root root_of_shift(const HoleWord& w, unsigned n, const PhiOptions& opts) {
  const Level level(w, n);
  const std::int64_t p = level.period(), q = level.holes();
  std::int64_t a = 1, b = p - 1;
  if (q > 1) {
    a = to_int64(mod_inverse(BigInt(p), BigInt(q)));
    b = (a * p - 1) / q;
  }
  const WindowMap phi = make_phi(w, n, opts);
  const std::int64_t root_radius = a * phi.radius() + std::llabs(b);
  if (root_radius * q > opts.max_radius)
    throw BudgetExceeded("root certificate at level " + std::to_string(n) + " needs radius " + std::to_string(root_radius * q));
  WindowMap psi = compose(power(phi, static_cast<std::uint64_t>(a)), shift(-b));
  return {psi, a, b, q};
}

nlohmann::json to_json(const PhaseResult& r) {
  return {{"level", r.level}, {"phase", r.phase}, {"window_length", r.window_length}, {"unique", r.unique}};
}

}  // namespace toeplitz::pq
