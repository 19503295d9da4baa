#include "rdual/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rdual/martingale.hpp"

namespace rdual {

namespace {

struct Value {
  enum class Kind { kNumber, kString, kBool, kList } kind = Kind::kNumber;
  double number = 0.0;
  std::string text;
  bool flag = false;
  std::vector<Value> items;
  int line = 0;
};

struct Entry {
  Value value;
  int line = 0;
};

struct Section {
  int line = 0;
  std::map<std::string, Entry> entries;
};

using Document = std::map<std::string, Section>;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"space", {"weights"}},
      {"tree", {"levels"}},
      {"market", {"assets", "prices"}},
      {"claim", {"payoff"}},
      {"claims", {}},  // free-form names
      {"priors", {"vertices"}},
      {"utility", {"name", "risk_aversion", "coefficients", "numeric"}},
      {"solver", {"tol", "max_iter", "seed"}},
  };
  return keys;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Document run() {
    Document doc;
    Section* current = nullptr;
    std::string current_name;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        const int header_line = line_;
        ++pos_;
        const std::string name = read_key();
        expect(']');
        finish_line();
        if (!known_keys().count(name)) fail_at(header_line, "unknown section [" + name + "]");
        if (doc.count(name)) fail_at(header_line, "duplicate section [" + name + "]");
        current = &doc[name];
        current->line = header_line;
        current_name = name;
        continue;
      }
      const int key_line = line_;
      const std::string key = read_key();
      if (!current) fail("key '" + key + "' outside of any section");
      const auto& allowed = known_keys().at(current_name);
      if (current_name != "claims" && !allowed.count(key))
        fail("unknown key '" + key + "' in [" + current_name + "]");
      skip_inline_space();
      expect('=');
      skip_inline_space();
      Value v = read_value();
      finish_line();
      if (current->entries.count(key)) fail_at(key_line, "duplicate key '" + key + "'");
      current->entries[key] = Entry{std::move(v), key_line};
    }
    return doc;
  }

 private:
  bool at_end() const { return pos_ >= s_.size(); }
  char peek() const { return at_end() ? '\0' : s_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, msg); }
  [[noreturn]] void fail_at(int line, const std::string& msg) const { throw ParseError(line, msg); }

  void advance() {
    if (s_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_inline_space() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }

  // Whitespace, newlines and comments (used inside lists and between entries).
  void skip_blank_lines() {
    while (!at_end()) {
      skip_inline_space();
      skip_comment();
      if (peek() == '\n') {
        advance();
        continue;
      }
      break;
    }
  }

  void finish_line() {
    skip_inline_space();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "'");
    advance();
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_key() {
    skip_inline_space();
    std::string k;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
      k += s_[pos_++];
    if (k.empty()) fail("expected a key");
    return k;
  }

  Value read_value() {
    Value v;
    v.line = line_;
    const char c = peek();
    if (c == '[') {
      v.kind = Value::Kind::kList;
      ++pos_;
      while (true) {
        skip_blank_lines();
        if (at_end()) fail_at(v.line, "unterminated list");
        if (peek() == ']') {
          ++pos_;
          break;
        }
        v.items.push_back(read_value());
        skip_blank_lines();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        if (peek() == ']') {
          ++pos_;
          break;
        }
        if (at_end()) fail_at(v.line, "unterminated list");
        fail("expected ',' or ']' in list");
      }
      return v;
    }
    if (c == '"') {
      v.kind = Value::Kind::kString;
      ++pos_;
      while (!at_end() && peek() != '"') {
        if (peek() == '\n') fail("unterminated string");
        if (peek() == '\\') {
          ++pos_;
          if (at_end()) fail("unterminated string");
        }
        v.text += s_[pos_++];
      }
      expect('"');
      return v;
    }
    std::string word;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '-' ||
                         peek() == '+' || peek() == '_'))
      word += s_[pos_++];
    if (word == "true" || word == "false") {
      v.kind = Value::Kind::kBool;
      v.flag = word == "true";
      return v;
    }
    if (word.empty()) fail("expected a value");
    std::string digits;
    for (char ch : word)
      if (ch != '_') digits += ch;
    std::size_t used = 0;
    try {
      v.number = std::stod(digits, &used);
    } catch (const std::exception&) {
      fail("malformed number '" + word + "'");
    }
    if (used != digits.size()) fail("malformed number '" + word + "'");
    return v;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

double as_number(const Value& v) {
  if (v.kind != Value::Kind::kNumber) throw ParseError(v.line, "expected a number");
  return v.number;
}

std::int64_t as_integer(const Value& v) {
  const double x = as_number(v);
  if (x != std::floor(x) || std::abs(x) > 9.0e15) throw ParseError(v.line, "expected an integer");
  return static_cast<std::int64_t>(x);
}

const std::vector<Value>& as_list(const Value& v) {
  if (v.kind != Value::Kind::kList) throw ParseError(v.line, "expected a list");
  return v.items;
}

Vector as_vector(const Value& v) {
  Vector out;
  for (const Value& x : as_list(v)) out.push_back(as_number(x));
  return out;
}

std::vector<Vector> as_matrix(const Value& v) {
  std::vector<Vector> out;
  for (const Value& x : as_list(v)) out.push_back(as_vector(x));
  return out;
}

const Section& section(const Document& doc, const std::string& name) {
  auto it = doc.find(name);
  if (it == doc.end()) throw ParseError(0, "missing section [" + name + "]");
  return it->second;
}

const Entry& entry(const Section& s, const std::string& section_name, const std::string& key) {
  auto it = s.entries.find(key);
  if (it == s.entries.end()) throw ParseError(s.line, "missing key '" + key + "' in [" + section_name + "]");
  return it->second;
}

const Entry* optional_entry(const Document& doc, const std::string& sec, const std::string& key) {
  auto it = doc.find(sec);
  if (it == doc.end()) return nullptr;
  auto e = it->second.entries.find(key);
  return e == it->second.entries.end() ? nullptr : &e->second;
}

// Runs `f`, re-anchoring ValidationError and invalid_argument at `line`.
template <class F>
auto anchored(int line, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    throw ValidationError(e.assumption(), "line " + std::to_string(line) + ": " + e.what());
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(line, e.what());
  }
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".einn") == std::string::npos) s += ".0";
  return s;
}

void emit_vector(std::ostringstream& out, const Vector& v) {
  out << '[';
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? ", " : "") << format_number(v[i]);
  out << ']';
}

}  // namespace

bool operator==(const UtilityConfig& a, const UtilityConfig& b) {
  if (a.name != b.name || a.risk_aversion != b.risk_aversion || a.numeric != b.numeric) return false;
  if (a.coefficients.size() != b.coefficients.size()) return false;
  for (std::size_t i = 0; i < a.coefficients.size(); ++i)
    if (a.coefficients[i].weight != b.coefficients[i].weight || a.coefficients[i].rate != b.coefficients[i].rate)
      return false;
  return true;
}

UtilitySpec make_utility(const UtilityConfig& config) {
  std::optional<UtilitySpec> u;
  if (config.name == "EXP") {
    u = exponential_utility(config.risk_aversion);
  } else if (config.name == "GLUED") {
    u = glued_utility();
  } else if (config.name == "custom-table") {
    if (config.coefficients.empty()) throw std::invalid_argument("custom-table utility needs coefficients");
    u = exponential_mixture_utility(config.coefficients);
  } else {
    throw std::invalid_argument("unknown utility '" + config.name + "'");
  }
  validate_utility(*u);
  if (config.numeric && u->mode() == ConjugateMode::kAnalytic) return u->numeric();
  return *u;
}

ScenarioBundle ScenarioBundle::with_named_claim(const std::string& name) const {
  auto it = named_claims.find(name);
  if (it == named_claims.end()) throw std::out_of_range("unknown claim '" + name + "'");
  ScenarioBundle b = *this;
  b.model = model.with_claim(Claim(it->second));
  return b;
}

ScenarioBundle parse_scenario_text(const std::string& text) {
  const Document doc = Parser(text).run();

  const Section& space_sec = section(doc, "space");
  const Entry& weights = entry(space_sec, "space", "weights");
  ScenarioSpace space = anchored(weights.line, [&] { return ScenarioSpace(as_vector(weights.value)); });
  const std::size_t n = space.size();

  const Section& tree_sec = section(doc, "tree");
  const Entry& levels_entry = entry(tree_sec, "tree", "levels");
  FiltrationTree tree = anchored(levels_entry.line, [&] {
    std::vector<Partition> levels;
    for (const Value& lv : as_list(levels_entry.value)) {
      Partition part;
      for (const Value& cv : as_list(lv)) {
        Cell cell;
        for (const Value& iv : as_list(cv)) {
          const std::int64_t i = as_integer(iv);
          if (i < 0) throw ParseError(iv.line, "scenario index must be nonnegative");
          cell.push_back(static_cast<std::size_t>(i));
        }
        part.push_back(std::move(cell));
      }
      levels.push_back(std::move(part));
    }
    return FiltrationTree(std::move(levels));
  });
  if (tree.scenario_count() != n) throw ParseError(levels_entry.line, "tree and [space] disagree on scenario count");

  const Section& market_sec = section(doc, "market");
  const Entry& assets = entry(market_sec, "market", "assets");
  const Entry& prices_entry = entry(market_sec, "market", "prices");
  const std::int64_t d = as_integer(assets.value);
  if (d < 1) throw ParseError(assets.line, "assets must be at least 1");
  Market market = anchored(prices_entry.line, [&] {
    std::vector<std::vector<Vector>> prices;
    for (const Value& t : as_list(prices_entry.value)) prices.push_back(as_matrix(t));
    return Market(tree, static_cast<std::size_t>(d), std::move(prices));
  });

  Claim claim = Claim::zero(n);
  if (const Entry* payoff = optional_entry(doc, "claim", "payoff")) {
    claim = anchored(payoff->line, [&] { return Claim(as_vector(payoff->value)); });
    if (claim.size() != n) throw ParseError(payoff->line, "claim payoff has the wrong length");
  }
  std::map<std::string, Vector> named;
  if (auto it = doc.find("claims"); it != doc.end()) {
    for (const auto& [name, e] : it->second.entries) {
      Vector v = as_vector(e.value);
      anchored(e.line, [&] { return Claim(v); });
      if (v.size() != n) throw ParseError(e.line, "claim '" + name + "' has the wrong length");
      named[name] = std::move(v);
    }
  }

  const Section& priors_sec = section(doc, "priors");
  const Entry& vertices = entry(priors_sec, "priors", "vertices");
  PriorSet priors = anchored(vertices.line, [&] { return PriorSet(as_matrix(vertices.value)); });
  if (priors.scenario_count() != n) throw ParseError(vertices.line, "prior vertices have the wrong length");

  UtilityConfig ucfg;
  const Section& util_sec = section(doc, "utility");
  if (const Entry* e = optional_entry(doc, "utility", "name")) {
    if (e->value.kind != Value::Kind::kString) throw ParseError(e->line, "utility name must be a string");
    ucfg.name = e->value.text;
  }
  if (const Entry* e = optional_entry(doc, "utility", "risk_aversion")) ucfg.risk_aversion = as_number(e->value);
  if (const Entry* e = optional_entry(doc, "utility", "numeric")) {
    if (e->value.kind != Value::Kind::kBool) throw ParseError(e->line, "numeric must be true or false");
    ucfg.numeric = e->value.flag;
  }
  if (const Entry* e = optional_entry(doc, "utility", "coefficients")) {
    for (const Vector& row : as_matrix(e->value)) {
      if (row.size() != 2) throw ParseError(e->line, "coefficients rows are [weight, rate]");
      ucfg.coefficients.push_back({row[0], row[1]});
    }
  }
  UtilitySpec utility = anchored(util_sec.line, [&] { return make_utility(ucfg); });

  SolverConfig scfg;
  if (const Entry* e = optional_entry(doc, "solver", "tol")) {
    scfg.tol = as_number(e->value);
    if (!(scfg.tol > 0.0)) throw ParseError(e->line, "tol must be positive");
  }
  if (const Entry* e = optional_entry(doc, "solver", "max_iter")) {
    const std::int64_t m = as_integer(e->value);
    if (m < 1 || m > 100000000) throw ParseError(e->line, "max_iter out of range");
    scfg.max_iter = static_cast<int>(m);
  }
  if (const Entry* e = optional_entry(doc, "solver", "seed")) {
    const std::int64_t s = as_integer(e->value);
    if (s < 0) throw ParseError(e->line, "seed must be nonnegative");
    scfg.seed = static_cast<std::uint64_t>(s);
  }

  ScenarioModel model(std::move(space), std::move(market), std::move(claim));
  Vector q = anchored(market_sec.line, [&] { return require_equivalent_mm(model.market, priors, utility); });
  return ScenarioBundle{std::move(model), std::move(priors), std::move(ucfg), std::move(utility), scfg,
                        std::move(named), std::move(q)};
}

ScenarioBundle parse_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str());
}

std::string emit_scenario(const ScenarioBundle& b) {
  std::ostringstream out;
  out << "[space]\nweights = ";
  emit_vector(out, b.model.space.weights());
  out << "\n\n[tree]\nlevels = [\n";
  const FiltrationTree& tree = b.model.market.tree();
  for (const Partition& level : tree.levels()) {
    out << "  [";
    for (std::size_t c = 0; c < level.size(); ++c) {
      out << (c ? ", " : "") << '[';
      for (std::size_t i = 0; i < level[c].size(); ++i) out << (i ? ", " : "") << level[c][i];
      out << ']';
    }
    out << "],\n";
  }
  out << "]\n\n[market]\nassets = " << b.model.market.asset_count() << "\nprices = [\n";
  for (const auto& level : b.model.market.prices()) {
    out << "  [";
    for (std::size_t c = 0; c < level.size(); ++c) {
      out << (c ? ", " : "");
      emit_vector(out, level[c]);
    }
    out << "],\n";
  }
  out << "]\n\n[claim]\npayoff = ";
  emit_vector(out, b.model.claim.payoff());
  out << "\n";
  if (!b.named_claims.empty()) {
    out << "\n[claims]\n";
    for (const auto& [name, v] : b.named_claims) {
      out << name << " = ";
      emit_vector(out, v);
      out << "\n";
    }
  }
  out << "\n[priors]\nvertices = [\n";
  for (const Vector& v : b.priors.vertices()) {
    out << "  ";
    emit_vector(out, v);
    out << ",\n";
  }
  out << "]\n\n[utility]\nname = \"" << b.utility_config.name << "\"\n";
  out << "risk_aversion = " << format_number(b.utility_config.risk_aversion) << "\n";
  if (!b.utility_config.coefficients.empty()) {
    out << "coefficients = [";
    for (std::size_t i = 0; i < b.utility_config.coefficients.size(); ++i) {
      out << (i ? ", " : "") << '[' << format_number(b.utility_config.coefficients[i].weight) << ", "
          << format_number(b.utility_config.coefficients[i].rate) << ']';
    }
    out << "]\n";
  }
  out << "numeric = " << (b.utility_config.numeric ? "true" : "false") << "\n";
  out << "\n[solver]\ntol = " << format_number(b.solver.tol) << "\nmax_iter = " << b.solver.max_iter
      << "\nseed = " << b.solver.seed << "\n";
  return out.str();
}

bool bundles_equal(const ScenarioBundle& a, const ScenarioBundle& b) {
  const Market& ma = a.model.market;
  const Market& mb = b.model.market;
  return a.model.space.weights() == b.model.space.weights() && ma.tree().levels() == mb.tree().levels() &&
         ma.asset_count() == mb.asset_count() && ma.prices() == mb.prices() &&
         a.model.claim.payoff() == b.model.claim.payoff() && a.priors.vertices() == b.priors.vertices() &&
         a.utility_config == b.utility_config && a.solver == b.solver && a.named_claims == b.named_claims;
}

}  // namespace rdual
