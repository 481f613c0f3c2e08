#include "toeplitz/products.hpp"

#include "toeplitz/blocks.hpp"
#include "toeplitz/language.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <set>

namespace toeplitz::products {

std::string to_string(EntropyMode m) { return m == EntropyMode::Zero ? "zero" : "positive"; }

EntropyMode parse_entropy_mode(std::string_view text) {
  if (text == "zero") return EntropyMode::Zero;
  if (text == "positive") return EntropyMode::Positive;
  throw std::invalid_argument("entropy mode must be zero or positive, got '" + std::string(text) + "'");
}

std::vector<BigInt> structure_primes(const ToeplitzSystem& sys) {
  std::set<BigInt> primes;
  for (std::size_t n = 1; n <= sys.structure_depth(); ++n)
    for (const auto& [p, e] : factorize(BigInt(sys.period(n)))) primes.insert(p);
  return {primes.begin(), primes.end()};
}

namespace {

// Byte codes for tuples, printable ones first, '?' never used.
std::string code_symbols() {
  std::string s;
  for (int c = 33; c < 127; ++c)
    if (c != kHole) s.push_back(static_cast<char>(c));
  for (int c = 128; c < 256; ++c) s.push_back(static_cast<char>(c));
  for (int c = 1; c < 33; ++c) s.push_back(static_cast<char>(c));
  s.push_back(static_cast<char>(127));
  return s;
}

}  // namespace

ProductSystem::ProductSystem(std::vector<std::shared_ptr<const ToeplitzSystem>> components)
    : components_(std::move(components)), alphabet_("x") {
  if (components_.empty()) throw std::invalid_argument("product needs at least one component");
  std::vector<std::vector<BigInt>> primes;
  for (const auto& c : components_) primes.push_back(structure_primes(*c));
  for (std::size_t i = 0; i < primes.size(); ++i)
    for (std::size_t j = i + 1; j < primes.size(); ++j)
      for (const auto& p : primes[i])
        if (std::find(primes[j].begin(), primes[j].end(), p) != primes[j].end())
          throw std::invalid_argument("components " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " share the prime " + p.str());

  std::uint64_t size = 1;
  for (const auto& c : components_) size *= c->alphabet().size();
  const std::string codes = code_symbols();
  if (size > codes.size()) throw std::invalid_argument("tuple alphabet of size " + std::to_string(size) + " exceeds " + std::to_string(codes.size()));

  std::string tuple(components_.size(), ' ');
  std::size_t next = 0;
  // Lexicographic over the component alphabets, first component most significant.
  auto rec = [&](auto&& self, std::size_t j) -> void {
    if (j == components_.size()) {
      code_[tuple] = codes[next];
      tuples_[codes[next]] = tuple;
      ++next;
      return;
    }
    for (char ch : components_[j]->alphabet().symbols()) {
      tuple[j] = ch;
      self(self, j + 1);
    }
  };
  rec(rec, 0);
  alphabet_ = Alphabet(codes.substr(0, next));
}

char ProductSystem::encode(std::string_view tuple) const {
  auto it = code_.find(std::string(tuple));
  if (it == code_.end()) throw std::invalid_argument("tuple outside the product alphabet");
  return it->second;
}

std::string ProductSystem::decode(char symbol) const {
  auto it = tuples_.find(symbol);
  if (it == tuples_.end()) throw std::invalid_argument("symbol outside the product alphabet");
  return it->second;
}

std::vector<std::string> ProductSystem::split(std::string_view encoded) const {
  std::vector<std::string> parts(components_.size(), std::string(encoded.size(), ' '));
  for (std::size_t i = 0; i < encoded.size(); ++i) {
    const std::string& t = tuples_.at(encoded[i]);
    for (std::size_t j = 0; j < t.size(); ++j) parts[j][i] = t[j];
  }
  return parts;
}

std::string ProductSystem::join(const std::vector<std::string>& parts) const {
  if (parts.size() != components_.size()) throw std::invalid_argument("wrong number of component windows");
  const std::size_t len = parts.front().size();
  std::string out(len, ' '), tuple(parts.size(), ' ');
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < parts.size(); ++j) tuple[j] = parts[j].at(i);
    out[i] = encode(tuple);
  }
  return out;
}

char ProductSystem::evaluate(std::int64_t i) const {
  std::string tuple;
  for (const auto& c : components_) tuple.push_back(c->evaluate(i));
  return encode(tuple);
}

SequenceWindow ProductSystem::window(const Range& r) const {
  if (auto d = domain(); d && !d->contains(r)) throw InsufficientWindow("product domain", r);
  std::vector<std::string> parts;
  for (const auto& c : components_) parts.push_back(c->window(r).symbols());
  return {r.begin, join(parts)};
}

std::optional<Range> ProductSystem::domain() const {
  std::optional<Range> d;
  for (const auto& c : components_) {
    if (auto cd = c->domain()) d = d ? Range{std::max(d->begin, cd->begin), std::min(d->end, cd->end)} : *cd;
  }
  return d;
}

std::size_t ProductSystem::structure_depth() const {
  std::size_t d = components_.front()->structure_depth();
  for (const auto& c : components_) d = std::min(d, c->structure_depth());
  return d;
}

std::int64_t ProductSystem::period(std::size_t level) const {
  BigInt v = 1;
  for (const auto& c : components_) v *= c->period(level);
  return to_int64(v);
}

nlohmann::json ProductSystem::to_json() const {
  nlohmann::json comps = nlohmann::json::array();
  for (const auto& c : components_) comps.push_back(c->to_json());
  return {{"kind", "product"}, {"components", comps}};
}

std::string ProductSystem::describe() const {
  std::string s = "product of";
  for (std::size_t j = 0; j < components_.size(); ++j) s += (j ? " x " : " ") + components_[j]->describe();
  return s;
}

// ---------------------------------------------------------------------------

std::vector<std::uint64_t> select_primes(std::size_t d, std::uint64_t a) {
  if (a == 0) throw std::invalid_argument("a must be positive");
  std::vector<std::uint64_t> out;
  for (std::uint64_t r = 3; out.size() < d; r += 2)
    if (is_probable_prime(BigInt(r)) && a % r != 0) out.push_back(r);
  return out;
}

std::shared_ptr<const ToeplitzSystem> cyclic_component(std::uint64_t a, std::size_t depth) {
  if (a < 2) throw std::invalid_argument("cyclic component needs a >= 2");
  const std::string digits = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
  const std::string symbols = a <= digits.size() ? digits.substr(0, a) : blocks::block_alphabet(static_cast<unsigned>(a));
  return std::make_shared<ConstantWordSystem>(HoleWord::parse(symbols), depth);
}

Realization realize_group(std::size_t d, std::uint64_t a, EntropyMode mode, std::size_t depth) {
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  if (a < 1) throw std::invalid_argument("a must be at least 1");
  if (depth < 2) throw std::invalid_argument("depth must be at least 2");
  Realization out;
  out.report.d = d;
  out.report.a = a;
  out.report.entropy = mode;
  out.report.primes = select_primes(d, a);

  unsigned k1 = 0;
  if (mode == EntropyMode::Positive) {
    for (unsigned k : {4u, 3u}) {
      std::uint64_t size = a;
      for (std::size_t j = 0; j < d; ++j) size *= k;
      if (size <= 254) {
        k1 = k;
        break;
      }
    }
    if (k1 == 0) throw std::invalid_argument("positive-entropy product alphabet too large for d = " + std::to_string(d));
  }

  std::vector<std::shared_ptr<const ToeplitzSystem>> comps;
  for (std::size_t j = 0; j < d; ++j) {
    const std::uint64_t r = out.report.primes[j];
    if (mode == EntropyMode::Zero) {
      comps.push_back(std::make_shared<ConstantWordSystem>(single_hole_word(r), depth));
    } else {
      blocks::BlockSpec spec;
      spec.k1 = k1;
      spec.scale = odometer::Scale::powers(r, depth);
      spec.levels = 3;
      spec.mode = blocks::Mode::Toy;
      comps.push_back(std::make_shared<blocks::BlocksSystem>(std::make_shared<const blocks::Construction>(blocks::Construction::build(spec))));
    }
    out.report.generators.push_back("shift on component " + std::to_string(j + 1));
  }
  if (a > 1) {
    comps.push_back(cyclic_component(a, depth));
    out.report.generators.push_back("+1 on Z_" + std::to_string(a));
  }
  out.report.expected_group = (d == 1 ? "Z" : "Z^" + std::to_string(d)) + (a > 1 ? " + Z_" + std::to_string(a) : "");
  out.system = std::make_shared<const ProductSystem>(std::move(comps));
  return out;
}

nlohmann::json Realization::spec() const {
  nlohmann::json j = system->to_json();
  j["d"] = report.d;
  j["a"] = report.a;
  j["entropy"] = to_string(report.entropy);
  return j;
}

// ---------------------------------------------------------------------------

pq::WindowMap tuple_map(const std::vector<pq::WindowMap>& maps, std::shared_ptr<const ProductSystem> sys) {
  if (maps.size() != sys->arity()) throw std::invalid_argument("one window map per component is required");
  std::int64_t r = 0;
  std::string label = "(";
  for (std::size_t j = 0; j < maps.size(); ++j) {
    r = std::max(r, maps[j].radius());
    label += (j ? " x " : "") + maps[j].label();
  }
  label += ")";
  auto ms = std::make_shared<const std::vector<pq::WindowMap>>(maps);
  auto batch = [ms, sys, r](std::string_view in) {
    auto parts = sys->split(in);
    for (std::size_t j = 0; j < parts.size(); ++j) {
      const std::int64_t pad = r - (*ms)[j].radius();
      parts[j] = (*ms)[j].apply(std::string_view(parts[j]).substr(static_cast<std::size_t>(pad), parts[j].size() - static_cast<std::size_t>(2 * pad)));
    }
    return sys->join(parts);
  };
  auto rule = [batch](std::string_view w) { return batch(w)[0]; };
  return pq::WindowMap(r, rule, label, batch);
}

CommutationReport product_factor_commutes(const pq::WindowMap& phi, const ProductSystem& sys, std::size_t samples) {
  CommutationReport rep;
  const std::int64_t r = phi.radius();
  const std::int64_t extra = std::max<std::int64_t>(8, r);
  const std::int64_t len = 2 * r + 1 + 2 * extra;
  Range span{-4096, 4096};
  if (auto d = sys.domain()) span = *d;
  const std::int64_t room = span.size() - len - 1;
  if (room <= 0) throw InsufficientWindow("product domain", {span.begin, span.begin + len + 1});
  auto offset = [&](std::size_t s) { return span.begin + static_cast<std::int64_t>((s * 7919u) % static_cast<std::uint64_t>(room)); };

  const std::size_t out_len = static_cast<std::size_t>(len - 2 * r);
  std::vector<language::FactorSet> factor_sets;
  for (const auto& c : sys.components()) factor_sets.push_back(language::factors(*c, out_len));

  for (std::size_t s = 0; s < samples; ++s) {
    const std::int64_t k = offset(s), k_other = offset(s + samples);
    const SequenceWindow w = sys.window({k, k + len});
    const std::string out = phi.apply(std::string_view(w.symbols()));
    const auto out_parts = sys.split(out);
    ++rep.windows_tested;

    const SequenceWindow next = sys.window({k + 1, k + 1 + len});
    const std::string out_next = phi.apply(std::string_view(next.symbols()));
    if (out.substr(1) != out_next.substr(0, out_next.size() - 1) && rep.commutes) {
      rep.commutes = false;
      rep.detail = "shift commutation fails near " + std::to_string(k);
    }

    const auto parts = sys.split(w.symbols());
    // Several consecutive partners, so a short periodic component cannot line up with every one.
    std::vector<std::vector<std::string>> others;
    for (std::int64_t t = 0; t < 4; ++t) {
      const std::int64_t at = span.begin + (k_other - span.begin + t) % room;
      others.push_back(sys.split(sys.window({at, at + len}).symbols()));
    }
    for (std::size_t j = 0; j < parts.size(); ++j) {
      for (const auto& other : others) {
        std::vector<std::string> mixed = other;
        mixed[j] = parts[j];
        const auto mixed_out = sys.split(phi.apply(std::string_view(sys.join(mixed))));
        if (mixed_out[j] != out_parts[j] && rep.coordinatewise) {
          rep.coordinatewise = false;
          rep.detail = "component " + std::to_string(j + 1) + " output depends on other components near " + std::to_string(k);
        }
      }
      if (!factor_sets[j].contains(out_parts[j]) && rep.factors) {
        rep.factors = false;
        rep.detail = "component " + std::to_string(j + 1) + " output is not a factor near " + std::to_string(k);
      }
    }
  }
  return rep;
}

nlohmann::json to_json(const GroupReport& r) {
  return {{"d", r.d},
          {"a", r.a},
          {"entropy", to_string(r.entropy)},
          {"primes", r.primes},
          {"expected_group", r.expected_group},
          {"generators", r.generators},
          {"converse", "every endomorphism of a product of disjoint minimal systems splits componentwise; asserted, not computed"}};
}

nlohmann::json to_json(const CommutationReport& r) {
  return {{"coordinatewise", r.coordinatewise}, {"commutes", r.commutes}, {"factors", r.factors},
          {"windows_tested", r.windows_tested}, {"ok", r.ok()}, {"detail", r.detail}};
}

}  // namespace toeplitz::products
