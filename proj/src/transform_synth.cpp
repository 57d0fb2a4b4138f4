#include "rpmine/transform_synth.hpp"

#include <algorithm>
#include <cassert>
#include <cctype>
#include <deque>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "rpmine/error.hpp"

namespace rpmine {

// --- Tokenization ------------------------------------------------------------

namespace {

Token::Kind char_kind(unsigned char c) {
  if (std::isdigit(c)) return Token::Kind::Digits;
  if (std::isalpha(c)) return Token::Kind::Letters;
  return Token::Kind::Symbol;
}

}  // namespace

std::vector<Token> token_stream(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    Token::Kind kind = char_kind(static_cast<unsigned char>(s[i]));
    std::size_t j = i + 1;
    if (kind != Token::Kind::Symbol) {
      while (j < s.size() && char_kind(static_cast<unsigned char>(s[j])) == kind) ++j;
    }
    out.push_back(Token{kind, s.substr(i, j - i)});
    i = j;
  }
  return out;
}

TokenPattern tokenize(const std::string& s) {
  TokenPattern p;
  for (const Token& t : token_stream(s)) {
    TokenPattern::Element e;
    e.kind = t.kind;
    if (t.kind == Token::Kind::Symbol) e.literal = t.text;
    p.elements.push_back(std::move(e));
  }
  return p;
}

std::string TokenPattern::to_string() const {
  std::string out;
  for (const auto& e : elements) {
    switch (e.kind) {
      case Token::Kind::Digits: out += "<d>+"; break;
      case Token::Kind::Letters: out += "<a>+"; break;
      case Token::Kind::Symbol: out += e.literal; break;
    }
  }
  return out;
}

// --- DSL ----------------------------------------------------------------------

namespace {

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out += "\"";
  return out;
}

std::string render(const std::vector<Token>& tokens) {
  std::string out;
  for (const Token& t : tokens) out += t.text;
  return out;
}

Token retyped(std::string text) {
  Token t;
  t.text = std::move(text);
  if (!t.text.empty()) {
    t.kind = char_kind(static_cast<unsigned char>(t.text.front()));
  }
  return t;
}

std::vector<Token> apply_op(const DslOp& op, const std::vector<Token>& tokens) {
  using K = DslOp::Kind;
  std::vector<Token> out;
  switch (op.kind) {
    case K::Constant:
      return token_stream(op.a);
    case K::SelectToken:
      if (op.index < tokens.size()) out.push_back(tokens[op.index]);
      return out;
    case K::DropToken:
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i != op.index) out.push_back(tokens[i]);
      }
      return out;
    case K::Concat:
      for (std::size_t i : op.order) {
        if (i < tokens.size()) out.push_back(tokens[i]);
      }
      return out;
    case K::ReplaceLiteral:
      for (const Token& t : tokens) {
        if (t.text == op.a) {
          if (!op.b.empty()) out.push_back(retyped(op.b));
        } else {
          out.push_back(t);
        }
      }
      return out;
    case K::Reorder:
      out = tokens;
      for (std::size_t i = 0; i < op.order.size() && i < tokens.size(); ++i) {
        if (op.order[i] < tokens.size()) out[i] = tokens[op.order[i]];
      }
      return out;
    case K::Lowercase:
    case K::Uppercase:
      for (Token t : tokens) {
        std::transform(t.text.begin(), t.text.end(), t.text.begin(), [&op](unsigned char c) {
          return static_cast<char>(op.kind == K::Lowercase ? std::tolower(c) : std::toupper(c));
        });
        out.push_back(std::move(t));
      }
      return out;
    case K::Trim: {
      auto is_space = [](const Token& t) {
        return t.kind == Token::Kind::Symbol && !t.text.empty() &&
               std::isspace(static_cast<unsigned char>(t.text.front()));
      };
      std::size_t begin = 0;
      std::size_t end = tokens.size();
      while (begin < end && is_space(tokens[begin])) ++begin;
      while (end > begin && is_space(tokens[end - 1])) --end;
      out.assign(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                 tokens.begin() + static_cast<std::ptrdiff_t>(end));
      return out;
    }
    case K::SubstringOfToken:
      out = tokens;
      if (op.index < out.size()) {
        const std::string& text = out[op.index].text;
        std::size_t from = std::min(op.from, text.size());
        std::size_t to = std::min(op.to, text.size());
        out[op.index] = retyped(text.substr(from, to > from ? to - from : 0));
        if (out[op.index].text.empty()) out.erase(out.begin() + static_cast<std::ptrdiff_t>(op.index));
      }
      return out;
  }
  return tokens;
}

}  // namespace

std::string DslOp::to_string() const {
  using K = DslOp::Kind;
  switch (kind) {
    case K::Constant: return "constant(" + quoted(a) + ")";
    case K::SelectToken: return "selectToken(" + std::to_string(index) + ")";
    case K::DropToken: return "dropToken(" + std::to_string(index) + ")";
    case K::Concat: {
      std::string out = "concat(";
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(order[i]);
      }
      return out + ")";
    }
    case K::ReplaceLiteral: return "replaceLiteral(" + quoted(a) + " -> " + quoted(b) + ")";
    case K::Reorder: {
      std::string out = "reorder(";
      for (std::size_t i = 0; i < order.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(order[i]);
      }
      return out + ")";
    }
    case K::Lowercase: return "lowercase";
    case K::Uppercase: return "uppercase";
    case K::Trim: return "trim";
    case K::SubstringOfToken:
      return "substringOfToken(" + std::to_string(index) + "," + std::to_string(from) + "," +
             std::to_string(to) + ")";
  }
  return "?";
}

std::string TransformProgram::to_string() const {
  if (ops.empty()) return "identity";
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) out += " ; ";
    out += ops[i].to_string();
  }
  return out;
}

namespace {

std::string class_signature(const std::vector<std::string>& inputs) {
  std::string key;
  for (const auto& input : inputs) {
    key += tokenize(input).to_string();
    key.push_back('\x1f');
  }
  return key;
}

std::vector<Token> initial_stream(const std::vector<std::string>& inputs) {
  std::vector<Token> tokens;
  for (const auto& input : inputs) {
    auto t = token_stream(input);
    tokens.insert(tokens.end(), t.begin(), t.end());
  }
  return tokens;
}

}  // namespace

std::string apply(const TransformProgram& program, const std::vector<std::string>& inputs) {
  if (inputs.size() != program.input_patterns.size()) {
    throw Error(ErrorCode::PatternMismatch, "expected " +
                                                std::to_string(program.input_patterns.size()) +
                                                " inputs, got " + std::to_string(inputs.size()));
  }
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (!(tokenize(inputs[i]) == program.input_patterns[i])) {
      throw Error(ErrorCode::PatternMismatch,
                  "input '" + inputs[i] + "' is outside the program's class");
    }
  }
  std::vector<Token> state = initial_stream(inputs);
  for (const DslOp& op : program.ops) state = apply_op(op, state);
  return render(state);
}

// --- Program search -------------------------------------------------------------

namespace {

struct SearchState {
  std::vector<Token> tokens;
  int parent = -1;
  DslOp op;  // op that produced this state
};

std::string state_signature(const std::vector<Token>& tokens) {
  std::string sig;
  for (const Token& t : tokens) {
    sig.push_back(static_cast<char>('0' + static_cast<int>(t.kind)));
    sig += t.text;
    sig.push_back('\x1f');
  }
  return sig;
}

// Goal-directed proposals: only rewrites that move the state's token multiset
// toward the target's are enumerated.
std::vector<DslOp> propose_ops(const std::vector<Token>& state, const std::string& target,
                               const std::vector<Token>& target_tokens) {
  std::vector<DslOp> ops;
  std::unordered_map<std::string, int> state_count;
  std::unordered_map<std::string, int> target_count;
  for (const Token& t : state) state_count[t.text] += 1;
  for (const Token& t : target_tokens) target_count[t.text] += 1;
  auto in_target = [&target_count](const std::string& text) {
    return target_count.count(text) > 0;
  };
  (void)target;

  // Drop tokens that are over-represented relative to the target.
  for (std::size_t i = 0; i < state.size(); ++i) {
    auto it = target_count.find(state[i].text);
    int wanted = it == target_count.end() ? 0 : it->second;
    if (state_count[state[i].text] > wanted) {
      DslOp op;
      op.kind = DslOp::Kind::DropToken;
      op.index = i;
      ops.push_back(op);
    }
  }
  // Keep a single token the target consists of.
  if (target_tokens.size() == 1) {
    for (std::size_t i = 0; i < state.size(); ++i) {
      if (state[i].text == target_tokens.front().text) {
        DslOp op;
        op.kind = DslOp::Kind::SelectToken;
        op.index = i;
        ops.push_back(op);
      }
    }
  }
  // Rewrite literals the target lacks into ones the state lacks (or delete).
  {
    std::set<std::string> from;
    for (const Token& t : state) {
      if (!in_target(t.text)) from.insert(t.text);
    }
    std::set<std::string> to;
    to.insert("");
    for (const Token& t : target_tokens) {
      if (!state_count.count(t.text)) to.insert(t.text);
    }
    for (const auto& a : from) {
      for (const auto& b : to) {
        DslOp op;
        op.kind = DslOp::Kind::ReplaceLiteral;
        op.a = a;
        op.b = b;
        ops.push_back(op);
      }
    }
  }
  // Transpositions, once only the order differs.
  if (state_count == target_count && state.size() == target_tokens.size()) {
    for (std::size_t i = 0; i < state.size(); ++i) {
      for (std::size_t j = i + 1; j < state.size(); ++j) {
        if (state[i].text == state[j].text) continue;
        DslOp op;
        op.kind = DslOp::Kind::Reorder;
        op.order.resize(state.size());
        for (std::size_t k = 0; k < state.size(); ++k) op.order[k] = k;
        std::swap(op.order[i], op.order[j]);
        ops.push_back(op);
      }
    }
  }
  {
    DslOp op;
    op.kind = DslOp::Kind::Lowercase;
    ops.push_back(op);
    op.kind = DslOp::Kind::Uppercase;
    ops.push_back(op);
  }
  {
    auto is_space = [](const Token& t) {
      return t.kind == Token::Kind::Symbol && !t.text.empty() &&
             std::isspace(static_cast<unsigned char>(t.text.front()));
    };
    if (!state.empty() && (is_space(state.front()) || is_space(state.back()))) {
      DslOp op;
      op.kind = DslOp::Kind::Trim;
      ops.push_back(op);
    }
  }
  // Carve a needed target token out of a longer state token.
  for (std::size_t i = 0; i < state.size(); ++i) {
    const std::string& text = state[i].text;
    if (in_target(text)) continue;
    std::set<std::pair<std::size_t, std::size_t>> spans;
    for (const Token& t : target_tokens) {
      if (t.text.empty() || t.text.size() >= text.size()) continue;
      for (std::size_t at = text.find(t.text); at != std::string::npos;
           at = text.find(t.text, at + 1)) {
        spans.emplace(at, at + t.text.size());
      }
    }
    for (const auto& [from, to] : spans) {
      DslOp op;
      op.kind = DslOp::Kind::SubstringOfToken;
      op.index = i;
      op.from = from;
      op.to = to;
      ops.push_back(op);
    }
  }
  return ops;
}

constexpr std::size_t kSearchBudget = 200000;

}  // namespace

std::optional<TransformProgram> synthesize(
    const TransformationExample& example, std::size_t max_ops,
    const std::function<bool(const TransformProgram&)>& accept) {
  TransformProgram program;
  for (const auto& input : example.inputs) program.input_patterns.push_back(tokenize(input));

  auto acceptable = [&accept](const TransformProgram& candidate) {
    return !accept || accept(candidate);
  };

  const std::vector<Token> target_tokens = token_stream(example.output);
  std::vector<SearchState> states;
  states.push_back({initial_stream(example.inputs), -1, DslOp{}});
  if (render(states.front().tokens) == example.output && acceptable(program)) {
    return program;  // identity
  }

  std::unordered_set<std::string> seen{state_signature(states.front().tokens)};
  std::size_t level_begin = 0;
  std::size_t level_end = states.size();
  for (std::size_t depth = 1; depth <= max_ops; ++depth) {
    for (std::size_t s = level_begin; s < level_end; ++s) {
      auto tokens = states[s].tokens;  // copy: states may reallocate below
      for (DslOp& op : propose_ops(tokens, example.output, target_tokens)) {
        std::vector<Token> next = apply_op(op, tokens);
        if (render(next) == example.output) {
          TransformProgram candidate = program;
          for (int at = static_cast<int>(s); at > 0; at = states[static_cast<std::size_t>(at)].parent) {
            candidate.ops.push_back(states[static_cast<std::size_t>(at)].op);
          }
          std::reverse(candidate.ops.begin(), candidate.ops.end());
          candidate.ops.push_back(op);
          if (acceptable(candidate)) return candidate;
          // A rejected goal state stays unmarked so other derivations of the
          // same stream can still be proposed.
          continue;
        }
        std::string sig = state_signature(next);
        if (!seen.insert(sig).second) continue;
        states.push_back({std::move(next), static_cast<int>(s), std::move(op)});
        if (states.size() > kSearchBudget) return std::nullopt;
      }
    }
    level_begin = level_end;
    level_end = states.size();
    if (level_begin == level_end) break;  // nothing new reachable
  }

  // A literal constant is the last resort, so derivations that generalize
  // beyond the seen value always win when one exists.
  if (max_ops >= 1) {
    TransformProgram constant = program;
    DslOp op;
    op.kind = DslOp::Kind::Constant;
    op.a = example.output;
    constant.ops.push_back(op);
    if (acceptable(constant)) return constant;
  }
  return std::nullopt;
}

std::map<std::string, std::vector<TransformationExample>> partition_examples(
    const std::vector<TransformationExample>& examples) {
  std::map<std::string, std::vector<TransformationExample>> classes;
  for (const auto& ex : examples) {
    classes[class_signature(ex.inputs)].push_back(ex);
  }
  return classes;
}

std::optional<ClassedTransform> synthesize_all(const std::vector<TransformationExample>& examples,
                                               std::size_t max_ops) {
  if (examples.empty()) return std::nullopt;
  for (const auto& ex : examples) {
    if (ex.inputs.empty()) return std::nullopt;  // nothing to synthesize from
  }
  ClassedTransform result;
  for (const auto& [signature, members] : partition_examples(examples)) {
    auto replays_class = [&group = members](const TransformProgram& candidate) {
      for (const auto& ex : group) {
        if (rpmine::apply(candidate, ex.inputs) != ex.output) return false;
      }
      return true;
    };
    std::optional<TransformProgram> program;
    // The first member usually suffices; later ones are fallback seeds in
    // case no program reachable from it covers the whole class.
    for (const auto& seed : members) {
      program = synthesize(seed, max_ops, replays_class);
      if (program) break;
    }
    if (!program) return std::nullopt;
    result.programs.emplace(signature, std::move(*program));
  }
  return result;
}

std::string apply(const ClassedTransform& transform, const std::vector<std::string>& inputs) {
  auto it = transform.programs.find(class_signature(inputs));
  if (it == transform.programs.end()) {
    throw Error(ErrorCode::PatternMismatch, "no program for this input shape");
  }
  return rpmine::apply(it->second, inputs);
}

// --- Functional dependencies -----------------------------------------------------

namespace {

// Partition of row indices by the value tuple over `columns`; blocks are
// keyed by their first row.
std::vector<std::vector<std::size_t>> partition_rows(const DependencyTable& table,
                                                     const std::vector<std::size_t>& columns) {
  std::map<std::vector<std::string>, std::vector<std::size_t>> blocks;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    std::vector<std::string> tuple;
    tuple.reserve(columns.size());
    for (std::size_t c : columns) tuple.push_back(table.rows[r][c]);
    blocks[tuple].push_back(r);
  }
  std::vector<std::vector<std::size_t>> out;
  out.reserve(blocks.size());
  for (auto& [tuple, rows] : blocks) {
    (void)tuple;
    out.push_back(std::move(rows));
  }
  return out;
}

bool determinant_holds(const DependencyTable& table, const std::vector<std::size_t>& columns) {
  const std::size_t output = table.column_names.size() - 1;
  bool witnessed = false;
  for (const auto& block : partition_rows(table, columns)) {
    if (block.size() >= 2) witnessed = true;
    const std::string& first = table.rows[block.front()][output];
    for (std::size_t r : block) {
      if (table.rows[r][output] != first) return false;
    }
  }
  return witnessed;
}

}  // namespace

std::vector<FunctionalDependency> discover_fd(const DependencyTable& table) {
  std::vector<FunctionalDependency> result;
  if (table.rows.size() < 2 || table.column_names.size() < 1) return result;
  const std::size_t inputs = table.column_names.size() - 1;
  const std::size_t output = inputs;

  std::vector<std::vector<std::size_t>> valid;
  std::vector<std::vector<std::size_t>> candidates;
  candidates.push_back({});
  for (std::size_t c = 0; c < inputs; ++c) candidates.push_back({c});
  for (std::size_t c = 0; c < inputs; ++c) {
    for (std::size_t d = c + 1; d < inputs; ++d) candidates.push_back({c, d});
  }

  for (const auto& det : candidates) {
    bool minimal = true;
    for (const auto& smaller : valid) {
      if (std::includes(det.begin(), det.end(), smaller.begin(), smaller.end())) {
        minimal = false;
        break;
      }
    }
    if (!minimal) continue;
    if (!determinant_holds(table, det)) continue;
    valid.push_back(det);

    FunctionalDependency fd;
    fd.determinant = det;
    for (const auto& row : table.rows) {
      std::vector<std::string> tuple;
      tuple.reserve(det.size());
      for (std::size_t c : det) tuple.push_back(row[c]);
      fd.mapping.emplace(std::move(tuple), row[output]);
    }
    result.push_back(std::move(fd));
  }
  return result;
}

std::string apply(const FunctionalDependency& fd, const std::vector<std::string>& inputs) {
  if (inputs.size() != fd.determinant.size()) {
    throw Error(ErrorCode::LengthMismatch, "determinant arity mismatch");
  }
  auto it = fd.mapping.find(inputs);
  if (it == fd.mapping.end()) {
    std::string key;
    for (const auto& v : inputs) key += v + ";";
    throw Error(ErrorCode::UnseenDeterminantValue, "no mapping for (" + key + ")");
  }
  return it->second;
}

}  // namespace rpmine
