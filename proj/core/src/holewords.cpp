#include "toeplitz/holewords.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <set>

namespace toeplitz {

std::string to_string(const Range& r) { return "[" + std::to_string(r.begin) + ", " + std::to_string(r.end) + ")"; }

Range parse_range(std::string_view text) {
  const auto colon = text.find(':', text.empty() ? 0 : 1);
  if (colon == std::string_view::npos) throw std::invalid_argument("range must look like a:b, got '" + std::string(text) + "'");
  const auto a = parse_bigint(text.substr(0, colon));
  const auto b = parse_bigint(text.substr(colon + 1));
  Range r{to_int64(a), to_int64(b)};
  if (r.end < r.begin) throw std::invalid_argument("range end precedes begin: " + std::string(text));
  return r;
}

// ---------------------------------------------------------------------------

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  if (symbols_.empty()) throw std::invalid_argument("alphabet must be nonempty");
  std::string sorted = symbols_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("alphabet symbols must be distinct");
  if (symbols_.find(kHole) != std::string::npos) throw std::invalid_argument("'?' is reserved for holes");
}

Alphabet Alphabet::of(std::string_view word) {
  std::string s;
  for (char c : word)
    if (c != kHole && s.find(c) == std::string::npos) s.push_back(c);
  std::sort(s.begin(), s.end());
  return Alphabet(std::move(s));
}

// ---------------------------------------------------------------------------

HoleWord::HoleWord(std::string symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i)
    if (symbols_[i] == kHole) holes_.push_back(i);
}

HoleWord HoleWord::parse(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("hole word must be nonempty");
  HoleWord w{std::string(text)};
  if (w.holes_.size() == w.symbols_.size()) throw std::invalid_argument("hole word needs at least one letter");
  return w;
}

bool HoleWord::is_generator() const {
  return !holes_.empty() && symbols_.front() != kHole && symbols_.back() != kHole;
}

std::uint64_t HoleWord::pq_gcd() const { return std::gcd<std::uint64_t, std::uint64_t>(length(), hole_count()); }

// ---------------------------------------------------------------------------

char SequenceWindow::at(std::int64_t i) const {
  if (i < start_ || i >= end())
    throw std::out_of_range("coordinate " + std::to_string(i) + " outside window " + to_string(range()));
  return symbols_[static_cast<std::size_t>(i - start_)];
}

SequenceWindow SequenceWindow::slice(const Range& r) const {
  if (!covers(r)) throw InsufficientWindow("window", r);
  return {r.begin, symbols_.substr(static_cast<std::size_t>(r.begin - start_), static_cast<std::size_t>(r.size()))};
}

std::size_t SequenceWindow::hole_count() const {
  return static_cast<std::size_t>(std::count(symbols_.begin(), symbols_.end(), kHole));
}

nlohmann::json to_json(const SequenceWindow& w) {
  return {{"start", w.start()}, {"end", w.end()}, {"symbols", w.symbols()}};
}

InsufficientWindow::InsufficientWindow(std::string which, Range missing)
    : std::runtime_error("insufficient " + which + " window: missing " + to_string(missing)),
      which_(std::move(which)),
      missing_(missing) {}

// ---------------------------------------------------------------------------

PeriodicSequence::PeriodicSequence(std::string period) : period_(std::move(period)) {
  if (period_.empty()) throw std::invalid_argument("periodic sequence needs a nonempty period");
  prefix_.assign(period_.size() + 1, 0);
  for (std::size_t i = 0; i < period_.size(); ++i) {
    prefix_[i + 1] = prefix_[i];
    if (period_[i] == kHole) {
      hole_offsets_.push_back(static_cast<std::int64_t>(i));
      ++prefix_[i + 1];
    }
  }
}

std::int64_t PeriodicSequence::holes_before(std::int64_t c) const {
  const std::int64_t p = period();
  return floor_div(c, p) * holes_per_period() + prefix_[static_cast<std::size_t>(floor_mod(c, p))];
}

std::int64_t PeriodicSequence::hole_coordinate(std::int64_t rank) const {
  const std::int64_t h = holes_per_period();
  if (h == 0) throw std::logic_error("sequence has no holes");
  return floor_div(rank, h) * period() + hole_offsets_[static_cast<std::size_t>(floor_mod(rank, h))];
}

std::int64_t PeriodicSequence::max_hole_gap() const {
  const std::int64_t h = holes_per_period();
  if (h == 0) return 0;
  std::int64_t gap = 0;
  for (std::int64_t j = 0; j < h; ++j) gap = std::max(gap, hole_coordinate(j + 1) - hole_coordinate(j));
  return gap;
}

SequenceWindow PeriodicSequence::window(const Range& r) const {
  std::string s(static_cast<std::size_t>(r.size()), ' ');
  for (std::int64_t i = r.begin; i < r.end; ++i) s[static_cast<std::size_t>(i - r.begin)] = at(i);
  return {r.begin, std::move(s)};
}

Range hole_rank_range(const PeriodicSequence& x, const Range& r) {
  return {x.holes_before(r.begin), x.holes_before(r.end)};
}

namespace {

Range uncovered_part(const Range& have, const Range& need) {
  if (need.begin < have.begin) return {need.begin, std::min(have.begin, need.end)};
  return {std::max(have.end, need.begin), need.end};
}

}  // namespace

SequenceWindow fill(const SequenceWindow& x, const SequenceWindow& y, const Range& out) {
  if (out.empty()) return {out.begin, {}};
  const Range hull{std::min<std::int64_t>(out.begin, 0), std::max<std::int64_t>(out.end, 0)};
  if (!x.covers(hull)) throw InsufficientWindow("x", uncovered_part(x.range(), hull));

  // Signed rank of the first hole at or after out.begin.
  std::int64_t rank = 0;
  if (out.begin >= 0) {
    for (std::int64_t c = 0; c < out.begin; ++c) rank += x.at(c) == kHole;
  } else {
    for (std::int64_t c = out.begin; c < 0; ++c) rank -= x.at(c) == kHole;
  }
  std::string s(static_cast<std::size_t>(out.size()), ' ');
  std::int64_t first_rank = rank;
  for (std::int64_t c = out.begin; c < out.end; ++c) {
    const char xc = x.at(c);
    if (xc != kHole) {
      s[static_cast<std::size_t>(c - out.begin)] = xc;
      continue;
    }
    if (!y.range().contains(rank)) {
      std::int64_t last = rank;
      for (std::int64_t d = c + 1; d < out.end; ++d) last += x.at(d) == kHole;
      throw InsufficientWindow("y", uncovered_part(y.range(), {first_rank, last + 1}));
    }
    s[static_cast<std::size_t>(c - out.begin)] = y.at(rank);
    ++rank;
  }
  return {out.begin, std::move(s)};
}

SequenceWindow fill(const PeriodicSequence& x, const SequenceWindow& y, const Range& out) {
  if (out.empty()) return {out.begin, {}};
  const Range ranks = hole_rank_range(x, out);
  if (!y.covers(ranks)) throw InsufficientWindow("y", uncovered_part(y.range(), ranks));
  std::string s(static_cast<std::size_t>(out.size()), ' ');
  std::int64_t rank = ranks.begin;
  for (std::int64_t c = out.begin; c < out.end; ++c) {
    const char xc = x.at(c);
    s[static_cast<std::size_t>(c - out.begin)] = xc != kHole ? xc : y.at(rank++);
  }
  return {out.begin, std::move(s)};
}

PeriodicSequence iterate(const HoleWord& w, unsigned n, std::int64_t max_length) {
  if (n < 1) throw std::invalid_argument("iterate needs level n >= 1");
  const auto p = static_cast<std::int64_t>(w.length());
  std::int64_t len = p;
  for (unsigned k = 1; k < n; ++k) {
    if (len > max_length / p) throw BudgetExceeded("T_" + std::to_string(n) + " period exceeds materialisation budget");
    len *= p;
  }
  if (len > max_length) throw BudgetExceeded("T_" + std::to_string(n) + " period exceeds materialisation budget");

  const PeriodicSequence base(w.str());
  std::string u = w.str();
  for (unsigned k = 1; k < n; ++k) {
    const auto prev_len = static_cast<std::int64_t>(u.size());
    std::string next(static_cast<std::size_t>(prev_len * p), ' ');
    for (std::int64_t c = 0; c < prev_len * p; ++c) {
      const char b = base.at(c);
      next[static_cast<std::size_t>(c)] =
          b != kHole ? b : u[static_cast<std::size_t>(floor_mod(base.holes_before(c), prev_len))];
    }
    u = std::move(next);
  }
  return PeriodicSequence(std::move(u));
}

// ---------------------------------------------------------------------------

std::string to_string(ToeplitzSystem::Kind kind) {
  switch (kind) {
    case ToeplitzSystem::Kind::ConstantWord: return "pq";
    case ToeplitzSystem::Kind::PerLevel: return "perlevel";
    case ToeplitzSystem::Kind::Blocks: return "blocks";
    case ToeplitzSystem::Kind::Product: return "product";
  }
  return "unknown";
}

SequenceWindow ToeplitzSystem::window(const Range& r) const {
  if (auto d = domain(); d && !d->contains(r)) throw InsufficientWindow("system domain", r);
  std::string s(static_cast<std::size_t>(r.size()), ' ');
  for (std::int64_t i = r.begin; i < r.end; ++i) s[static_cast<std::size_t>(i - r.begin)] = evaluate(i);
  return {r.begin, std::move(s)};
}

ConstantWordSystem::ConstantWordSystem(HoleWord w, std::size_t depth, EvaluationLimits limits)
    : word_(std::move(w)), alphabet_(word_.alphabet()), depth_(depth), limits_(limits), base_(word_.str()) {
  if (depth_ < 1) throw std::invalid_argument("depth must be >= 1");
}

char ConstantWordSystem::evaluate(std::int64_t i) const {
  const auto p = static_cast<std::int64_t>(word_.length());
  const auto q = static_cast<std::int64_t>(word_.hole_count());
  const bool generator = is_generator();
  for (std::size_t step = 0; step < limits_.max_recursion; ++step) {
    const std::int64_t r = floor_mod(i, p);
    const char c = word_[static_cast<std::size_t>(r)];
    if (c != kHole) return c;
    // Non-generators are read at level `depth`: T_depth(w) needs depth-1 descents.
    if (!generator && step + 1 >= depth_) return kHole;
    i = floor_div(i, p) * q + base_.holes_before(r);
  }
  throw std::runtime_error("evaluation recursion cap exceeded for " + describe());
}

std::int64_t ConstantWordSystem::period(std::size_t level) const {
  if (level < 1) throw std::out_of_range("levels start at 1");
  const auto p = static_cast<std::int64_t>(word_.length());
  std::int64_t v = 1;
  for (std::size_t k = 0; k < level; ++k) {
    if (v > std::numeric_limits<std::int64_t>::max() / p) throw std::overflow_error("period overflows 64 bits");
    v *= p;
  }
  return v;
}

std::optional<PeriodicSequence> ConstantWordSystem::structural_skeleton(std::size_t level) const {
  try {
    return iterate(word_, static_cast<unsigned>(level), std::int64_t{1} << 26);
  } catch (const BudgetExceeded&) {
    return std::nullopt;
  }
}

nlohmann::json ConstantWordSystem::to_json() const {
  return {{"kind", "pq"}, {"word", word_.str()}, {"alphabet", alphabet_.symbols()}, {"depth", depth_}};
}

std::string ConstantWordSystem::describe() const {
  return "(" + std::to_string(word_.length()) + "," + std::to_string(word_.hole_count()) + ")-Toeplitz of " + word_.str();
}

PerLevelSystem::PerLevelSystem(std::vector<HoleWord> words, std::size_t depth, EvaluationLimits limits)
    : words_(std::move(words)), alphabet_(Alphabet::of("x")), depth_(depth), limits_(limits) {
  if (words_.empty()) throw std::invalid_argument("per-level system needs at least one word");
  if (depth_ < 1) throw std::invalid_argument("depth must be >= 1");
  std::string letters;
  for (const auto& w : words_) {
    letters += w.str();
    bases_.emplace_back(w.str());
  }
  alphabet_ = Alphabet::of(letters);
}

const HoleWord& PerLevelSystem::word_at(std::size_t level) const {
  if (level < 1) throw std::out_of_range("levels start at 1");
  return words_[std::min(level, words_.size()) - 1];
}

bool PerLevelSystem::is_generator() const {
  return std::all_of(words_.begin(), words_.end(), [](const HoleWord& w) { return w.is_generator(); });
}

char PerLevelSystem::evaluate(std::int64_t i) const {
  const bool generator = is_generator();
  for (std::size_t level = 1; level <= limits_.max_recursion; ++level) {
    const auto& base = bases_[std::min(level, bases_.size()) - 1];
    const std::int64_t len = base.period();
    const std::int64_t r = floor_mod(i, len);
    const char c = base.period_word()[static_cast<std::size_t>(r)];
    if (c != kHole) return c;
    if (!generator && level >= depth_) return kHole;
    i = floor_div(i, len) * base.holes_per_period() + base.holes_before(r);
  }
  throw std::runtime_error("evaluation recursion cap exceeded for " + describe());
}

std::int64_t PerLevelSystem::period(std::size_t level) const {
  if (level < 1) throw std::out_of_range("levels start at 1");
  std::int64_t v = 1;
  for (std::size_t k = 1; k <= level; ++k) {
    const auto len = static_cast<std::int64_t>(word_at(k).length());
    if (v > std::numeric_limits<std::int64_t>::max() / len) throw std::overflow_error("period overflows 64 bits");
    v *= len;
  }
  return v;
}

std::optional<PeriodicSequence> PerLevelSystem::structural_skeleton(std::size_t level) const {
  if (level < 1) return std::nullopt;
  std::int64_t total = 0;
  try {
    total = period(level);
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
  if (total > (std::int64_t{1} << 26)) return std::nullopt;
  PeriodicSequence cur(word_at(1).str());
  for (std::size_t k = 2; k <= level; ++k) {
    const PeriodicSequence next_word(word_at(k).str());
    const std::int64_t len = cur.period() * next_word.period();
    std::string s(static_cast<std::size_t>(len), ' ');
    for (std::int64_t c = 0; c < len; ++c) {
      const char b = cur.at(c);
      s[static_cast<std::size_t>(c)] = b != kHole ? b : next_word.at(cur.holes_before(c));
    }
    cur = PeriodicSequence(std::move(s));
  }
  return cur;
}

nlohmann::json PerLevelSystem::to_json() const {
  auto words = nlohmann::json::array();
  for (const auto& w : words_) words.push_back(w.str());
  return {{"kind", "perlevel"}, {"words", words}, {"alphabet", alphabet_.symbols()}, {"depth", depth_}};
}

std::string PerLevelSystem::describe() const {
  std::string s = "per-level Toeplitz of";
  for (const auto& w : words_) s += " " + w.str();
  return s;
}

HoleWord single_hole_word(std::size_t length, char a, char b) {
  if (length < 3) throw std::invalid_argument("single-hole words need length >= 3");
  std::string s(1, a);
  s.push_back(kHole);
  s.append(length - 2, b);
  return HoleWord::parse(s);
}

// ---------------------------------------------------------------------------

namespace {

bool periodic_at(const SequenceWindow& data, std::int64_t i, std::int64_t p, std::int64_t horizon) {
  const char c = data.at(i);
  for (std::int64_t k = 1; k <= horizon; ++k) {
    const std::int64_t right = i + k * p, left = i - k * p;
    const bool has_right = right < data.end(), has_left = left >= data.start();
    if (!has_right && !has_left) break;
    if (has_right && data.at(right) != c) return false;
    if (has_left && data.at(left) != c) return false;
  }
  return true;
}

std::optional<std::size_t> level_of_period(const ToeplitzSystem& sys, std::int64_t p) {
  for (std::size_t n = 1; n <= sys.structure_depth(); ++n) {
    std::int64_t pn;
    try {
      pn = sys.period(n);
    } catch (const std::exception&) {
      return std::nullopt;
    }
    if (pn == p) return n;
    if (pn > p) break;
  }
  return std::nullopt;
}

}  // namespace

PerSet per_set(const ToeplitzSystem& sys, std::int64_t p, const Range& range, std::int64_t horizon) {
  if (p < 1) throw std::invalid_argument("period must be >= 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  PerSet result{p, range, {}, false, horizon};
  Range data_range{range.begin - horizon * p, range.end + horizon * p};
  if (auto d = sys.domain()) {
    data_range = {std::max(data_range.begin, d->begin), std::min(data_range.end, d->end)};
    if (!data_range.contains(range)) throw InsufficientWindow("system domain", range);
  }
  const SequenceWindow data = sys.window(data_range);
  for (std::int64_t i = range.begin; i < range.end; ++i)
    if (periodic_at(data, i, p, horizon)) result.coordinates.push_back(i);

  // Non-holes of the structural skeleton are p-periodic for certain, so if the
  // horizon test found nothing more, the set is exact.
  if (auto level = level_of_period(sys, p)) {
    if (auto skel = sys.structural_skeleton(*level); skel && skel->period() == p) {
      std::vector<std::int64_t> lower;
      for (std::int64_t i = range.begin; i < range.end; ++i)
        if (!skel->is_hole(i)) lower.push_back(i);
      result.certified = lower == result.coordinates;
    }
  }
  return result;
}

SkeletonResult skeleton(const ToeplitzSystem& sys, std::size_t level, const Range& range, std::int64_t horizon) {
  const std::int64_t p = sys.period(level);
  const PerSet per = per_set(sys, p, range, horizon);
  const SequenceWindow x = sys.window(range);
  std::string s(static_cast<std::size_t>(range.size()), kHole);
  for (std::int64_t i : per.coordinates) s[static_cast<std::size_t>(i - range.begin)] = x.at(i);
  return {level, {range.begin, std::move(s)}, per.certified};
}

bool is_essential_on_window(const SequenceWindow& data, std::int64_t period, const Range& test,
                            std::optional<std::int64_t>* matching) {
  if (!data.covers(test)) throw InsufficientWindow("essential-period data", test);
  const std::int64_t unbounded = static_cast<std::int64_t>(data.size()) + 1;
  std::vector<char> reference;
  reference.reserve(static_cast<std::size_t>(test.size()));
  for (std::int64_t i = test.begin; i < test.end; ++i) reference.push_back(periodic_at(data, i, period, unbounded));
  for (std::int64_t p = 1; p < period; ++p) {
    bool differs = false;
    for (std::int64_t i = test.begin; i < test.end && !differs; ++i)
      differs = periodic_at(data, i, p, unbounded) != static_cast<bool>(reference[static_cast<std::size_t>(i - test.begin)]);
    if (!differs) {
      if (matching) *matching = p;
      return false;
    }
  }
  return true;
}

std::vector<EssentialPeriod> essential_periods(const ToeplitzSystem& sys, std::size_t depth) {
  std::vector<EssentialPeriod> out;
  for (std::size_t n = 1; n <= depth; ++n) {
    const std::int64_t p = sys.period(n);
    std::int64_t next = 2 * p;
    if (n < sys.structure_depth()) next = sys.period(n + 1);
    const std::int64_t test_len = 2 * next;
    Range test{0, test_len};
    Range data_range{-test_len, 2 * test_len};
    if (auto d = sys.domain()) {
      data_range = {std::max(data_range.begin, d->begin), std::min(data_range.end, d->end)};
      test = {std::max<std::int64_t>(0, data_range.begin), std::min(test.end, data_range.end)};
    }
    const SequenceWindow data = sys.window(data_range);
    EssentialPeriod e{n, p, false, std::nullopt};
    e.essential = is_essential_on_window(data, p, test, &e.matching_period);
    out.push_back(e);
  }
  return out;
}

std::optional<std::int64_t> find_period(const ToeplitzSystem& sys, std::int64_t max_period, std::int64_t window_length) {
  const SequenceWindow x = sys.window({0, window_length});
  const std::string& s = x.symbols();
  for (std::int64_t p = 1; p <= max_period && p < window_length; ++p) {
    bool ok = true;
    for (std::int64_t i = 0; i + p < window_length && ok; ++i)
      ok = s[static_cast<std::size_t>(i)] == s[static_cast<std::size_t>(i + p)];
    if (ok) return p;
  }
  return std::nullopt;
}

}  // namespace toeplitz
