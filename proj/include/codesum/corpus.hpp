#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace codesum {

// Marker subtokens. They contain '%' so no split identifier can collide with them.
inline constexpr std::string_view kSelfMarker = "%self%";
inline constexpr std::string_view kStringLiteralMarker = "%unkstring%";
inline constexpr std::string_view kCharLiteralMarker = "%unkchar%";

// "getInputStream" -> {"get", "input", "stream"}; "HTMLParser" -> {"html", "parser"}.
std::vector<std::string> split_identifier(std::string_view token);

enum class JavaTokenKind { kIdentifier, kKeyword, kNumber, kString, kChar, kOperator, kAnnotation };

struct JavaToken {
  JavaTokenKind kind;
  std::string text;
};

// Tolerant lexer: comments and whitespace are dropped, unterminated literals end at EOL.
std::vector<JavaToken> lex_java(std::string_view source);

struct RawMethod {
  std::string name;
  std::vector<JavaToken> body_tokens;  // '{' ... '}' inclusive, signature excluded
  std::set<std::string> modifiers;
  std::set<std::string> annotations;
  std::string file_path;
  std::string project;
};

struct ExtractionStats {
  std::size_t kept = 0;
  std::size_t overridden = 0;
  std::size_t abstract_methods = 0;
  std::size_t constructors = 0;

  std::size_t excluded() const { return overridden + abstract_methods + constructors; }
  ExtractionStats& operator+=(const ExtractionStats& other);
};

// Throws Error(kUnbalancedBraces) when the file's braces do not balance.
std::vector<RawMethod> extract_methods(std::string_view source_text, const std::string& file_path,
                                       const std::string& project,
                                       ExtractionStats* stats = nullptr);

struct MethodExample {
  std::vector<std::string> name;
  std::vector<std::string> body;
  std::string file_path;
  std::string project;

  friend bool operator==(const MethodExample&, const MethodExample&) = default;
};

// Converts lexical tokens into body subtokens. Tokens equal to self_name become
// the SELF marker; pass an empty self_name for free-standing snippets.
std::vector<std::string> subtokenize(const std::vector<JavaToken>& tokens,
                                     std::string_view self_name = {});

MethodExample tokenize_method(const RawMethod& raw);

// Tokenizes a bare snippet of Java code (no signature, no SELF replacement).
std::vector<std::string> tokenize_snippet(std::string_view java_code);

struct CorpusBuildResult {
  std::vector<MethodExample> examples;
  ExtractionStats stats;
  std::size_t files = 0;
  std::vector<std::string> diagnostics;  // skipped files
};

// Walks dir recursively for *.java files in sorted path order.
CorpusBuildResult build_corpus(const std::filesystem::path& dir, const std::string& project);

void write_dataset(std::ostream& out, const std::vector<MethodExample>& examples);
std::vector<MethodExample> read_dataset(std::istream& in);
std::vector<MethodExample> read_dataset_file(const std::filesystem::path& path);

struct DatasetSplit {
  std::vector<MethodExample> train, valid, test;
};

// Split sizes for n items in 65/5/30 proportions by largest remainder.
std::array<std::size_t, 3> split_sizes(std::size_t n);

// Files are shuffled with the seed and assigned to train/valid/test; every
// method of a file lands in the same split. Files are grouped by file_path in
// first-appearance order.
DatasetSplit split_dataset(const std::vector<MethodExample>& examples, std::uint64_t seed);

// Group-level variant: returns the split index (0 train, 1 valid, 2 test) per group.
std::vector<int> assign_groups(std::size_t group_count, std::uint64_t seed);

}  // namespace codesum
