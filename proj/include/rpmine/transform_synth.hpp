#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rpmine {

// --- Tokenization ------------------------------------------------------------

struct Token {
  enum class Kind { Digits, Letters, Symbol };
  Kind kind = Kind::Symbol;
  std::string text;

  bool operator==(const Token&) const = default;
};

/// Splits a string into maximal digit runs, maximal letter runs and single
/// other characters.
std::vector<Token> token_stream(const std::string& s);

/// The structural shape of a string: digit and letter runs collapse to
/// placeholder tokens, any other character stays verbatim.
struct TokenPattern {
  struct Element {
    Token::Kind kind = Token::Kind::Symbol;
    std::string literal;  // set for Kind::Symbol only

    bool operator==(const Element&) const = default;
    auto operator<=>(const Element&) const = default;
  };
  std::vector<Element> elements;

  std::string to_string() const;  // e.g. "<d>+/<d>+/<d>+"

  bool operator==(const TokenPattern&) const = default;
  auto operator<=>(const TokenPattern&) const = default;
};

TokenPattern tokenize(const std::string& s);

// --- Syntactic transformation programs ----------------------------------------

struct TransformationExample {
  std::vector<std::string> inputs;
  std::string output;

  bool operator==(const TransformationExample&) const = default;
};

/// One rewriting step over a token stream.
struct DslOp {
  enum class Kind {
    Constant,        // replace the whole stream with a literal
    SelectToken,     // keep token i only
    DropToken,       // remove token i
    Concat,          // keep the listed tokens in the given order
    ReplaceLiteral,  // rewrite every token equal to a into b ("" deletes)
    Reorder,         // permute tokens
    Lowercase,
    Uppercase,
    Trim,            // strip leading/trailing whitespace tokens
    SubstringOfToken // token i := its [from, to) substring
  };
  Kind kind = Kind::Constant;
  std::string a;
  std::string b;
  std::size_t index = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<std::size_t> order;  // Concat / Reorder

  std::string to_string() const;
  bool operator==(const DslOp&) const = default;
};

/// A sequence of rewriting ops valid for one structural class of inputs.
/// An empty op list is the identity.
struct TransformProgram {
  std::vector<TokenPattern> input_patterns;  // the class this program serves
  std::vector<DslOp> ops;

  std::string to_string() const;
};

std::string apply(const TransformProgram& program, const std::vector<std::string>& inputs);

/// Shortest-first search for a program mapping the example inputs to its
/// output, at most `max_ops` rewriting steps. When given, `accept` filters
/// candidate programs (e.g. replay on further examples); search continues
/// past rejected ones.
std::optional<TransformProgram> synthesize(
    const TransformationExample& example, std::size_t max_ops = 4,
    const std::function<bool(const TransformProgram&)>& accept = {});

std::map<std::string, std::vector<TransformationExample>> partition_examples(
    const std::vector<TransformationExample>& examples);

/// Per-class programs covering a whole example set. Discovery succeeds only
/// if every class yields a program that replays all examples of the class.
struct ClassedTransform {
  std::map<std::string, TransformProgram> programs;  // key: class signature
};

std::optional<ClassedTransform> synthesize_all(const std::vector<TransformationExample>& examples,
                                               std::size_t max_ops = 4);

std::string apply(const ClassedTransform& transform, const std::vector<std::string>& inputs);

// --- Functional dependencies ---------------------------------------------------

/// Observation table: one row per routine instance, n-1 input columns and
/// the output value in column n.
struct DependencyTable {
  std::vector<std::string> column_names;           // size n
  std::vector<std::vector<std::string>> rows;      // each of size n
};

struct FunctionalDependency {
  std::vector<std::size_t> determinant;                   // input column indices
  std::map<std::vector<std::string>, std::string> mapping;  // value tuple -> output
};

/// All minimal determinants of at most two columns whose values decide the
/// output column. A determinant needs witnessing repetition: some value
/// tuple must occur in at least two rows, otherwise any all-distinct column
/// would vacuously qualify.
std::vector<FunctionalDependency> discover_fd(const DependencyTable& table);

std::string apply(const FunctionalDependency& fd, const std::vector<std::string>& inputs);

}  // namespace rpmine
