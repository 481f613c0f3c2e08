#include "toeplitz/spec_io.hpp"

#include "toeplitz/blocks.hpp"
#include "toeplitz/products.hpp"

#include <nlohmann/json.hpp>

namespace toeplitz {

namespace {

std::size_t depth_of(const nlohmann::json& spec, std::size_t fallback) {
  if (!spec.contains("depth")) return fallback;
  const auto& d = spec.at("depth");
  if (!d.is_number_integer() || d.get<std::int64_t>() < 1) throw std::invalid_argument("spec field 'depth' must be a positive integer");
  return d.get<std::size_t>();
}

HoleWord word_field(const nlohmann::json& v, const std::string& name) {
  if (!v.is_string()) throw std::invalid_argument("spec field '" + name + "' must be a string");
  return HoleWord::parse(v.get<std::string>());
}

void check_alphabet(const nlohmann::json& spec, const Alphabet& actual) {
  if (!spec.contains("alphabet")) return;
  const auto& a = spec.at("alphabet");
  if (!a.is_string()) throw std::invalid_argument("spec field 'alphabet' must be a string");
  const std::string declared = a.get<std::string>();
  for (char c : actual.symbols())
    if (declared.find(c) == std::string::npos)
      throw std::invalid_argument(std::string("letter '") + c + "' is missing from the declared alphabet");
}

}  // namespace

std::shared_ptr<const ToeplitzSystem> system_from_json(const nlohmann::json& spec) {
  if (!spec.is_object()) throw std::invalid_argument("construction spec must be a JSON object");
  if (!spec.contains("kind") || !spec.at("kind").is_string()) throw std::invalid_argument("spec needs a string field 'kind'");
  const std::string kind = spec.at("kind").get<std::string>();

  if (kind == "pq") {
    if (!spec.contains("word")) throw std::invalid_argument("pq spec needs 'word'");
    auto sys = std::make_shared<ConstantWordSystem>(word_field(spec.at("word"), "word"), depth_of(spec, 8));
    check_alphabet(spec, sys->alphabet());
    return sys;
  }
  if (kind == "perlevel") {
    if (!spec.contains("words") || !spec.at("words").is_array() || spec.at("words").empty())
      throw std::invalid_argument("perlevel spec needs a nonempty array 'words'");
    std::vector<HoleWord> words;
    for (const auto& w : spec.at("words")) words.push_back(word_field(w, "words[]"));
    auto sys = std::make_shared<PerLevelSystem>(std::move(words), depth_of(spec, 6));
    check_alphabet(spec, sys->alphabet());
    return sys;
  }
  if (kind == "blocks") {
    auto c = std::make_shared<const blocks::Construction>(blocks::Construction::build(blocks::block_spec_from_json(spec)));
    return std::make_shared<blocks::BlocksSystem>(std::move(c));
  }
  if (kind == "product") {
    if (spec.contains("components")) {
      std::vector<std::shared_ptr<const ToeplitzSystem>> comps;
      for (const auto& c : spec.at("components")) comps.push_back(system_from_json(c));
      return std::make_shared<products::ProductSystem>(std::move(comps));
    }
    const auto d = spec.value("d", std::size_t{1});
    const auto a = spec.value("a", std::uint64_t{1});
    const auto mode = products::parse_entropy_mode(spec.value("entropy", std::string("zero")));
    return products::realize_group(d, a, mode, depth_of(spec, 6)).system;
  }
  throw std::invalid_argument("unknown spec kind '" + kind + "' (expected pq, perlevel, blocks or product)");
}

std::string spec_schema_help() {
  return "construction spec (JSON object):\n"
         "  {\"kind\": \"pq\", \"word\": \"a?b?c\", \"depth\": 8}\n"
         "  {\"kind\": \"perlevel\", \"words\": [\"a?b\", \"a?bbb\"], \"depth\": 6}\n"
         "  {\"kind\": \"blocks\", \"k1\": 4, \"d0\": 2, \"scale\": [\"1\", \"8\", \"120\"], \"levels\": 3,\n"
         "   \"mode\": \"toy\" | \"faithful\", \"relaxed_c2\": false}\n"
         "  {\"kind\": \"product\", \"components\": [<spec>, ...]}\n"
         "  {\"kind\": \"product\", \"d\": 2, \"a\": 6, \"entropy\": \"zero\" | \"positive\", \"depth\": 6}\n";
}

}  // namespace toeplitz
