#include "codesum/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "json.hpp"

#include "codesum/errors.hpp"
#include "codesum/random.hpp"

namespace codesum {

namespace {

enum class CharClass { kSeparator, kLower, kUpper, kDigit };

CharClass classify(unsigned char c) {
  if (std::isupper(c)) return CharClass::kUpper;
  if (std::islower(c) || c >= 0x80) return CharClass::kLower;
  if (std::isdigit(c)) return CharClass::kDigit;
  return CharClass::kSeparator;
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

std::vector<std::string> split_identifier(std::string_view token) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) out.push_back(lowercase(current));
    current.clear();
  };
  for (std::size_t i = 0; i < token.size(); ++i) {
    const auto c = static_cast<unsigned char>(token[i]);
    const CharClass cls = classify(c);
    if (cls == CharClass::kSeparator) {
      flush();
      continue;
    }
    if (cls == CharClass::kUpper && !current.empty()) {
      const auto prev = classify(static_cast<unsigned char>(current.back()));
      const bool next_lower =
          i + 1 < token.size() &&
          classify(static_cast<unsigned char>(token[i + 1])) == CharClass::kLower;
      // camelCase boundary, or the last capital of an acronym run ("HTMLParser").
      if (prev == CharClass::kLower || prev == CharClass::kDigit ||
          (prev == CharClass::kUpper && next_lower)) {
        flush();
      }
    }
    current.push_back(static_cast<char>(c));
  }
  flush();
  if (out.empty() && !token.empty()) out.push_back(lowercase(token));
  return out;
}

std::vector<std::string> subtokenize(const std::vector<JavaToken>& tokens,
                                     std::string_view self_name) {
  std::vector<std::string> out;
  out.reserve(tokens.size() * 2);
  for (const JavaToken& t : tokens) {
    switch (t.kind) {
      case JavaTokenKind::kIdentifier:
      case JavaTokenKind::kKeyword:
        if (!self_name.empty() && t.text == self_name) {
          out.emplace_back(kSelfMarker);
        } else {
          for (auto& s : split_identifier(t.text)) out.push_back(std::move(s));
        }
        break;
      case JavaTokenKind::kAnnotation:
        out.emplace_back("@");
        for (auto& s : split_identifier(t.text)) out.push_back(std::move(s));
        break;
      case JavaTokenKind::kNumber:
        out.push_back(lowercase(t.text));
        break;
      case JavaTokenKind::kString:
        out.emplace_back(kStringLiteralMarker);
        break;
      case JavaTokenKind::kChar:
        out.emplace_back(kCharLiteralMarker);
        break;
      case JavaTokenKind::kOperator:
        out.push_back(t.text);
        break;
    }
  }
  return out;
}

MethodExample tokenize_method(const RawMethod& raw) {
  MethodExample ex;
  ex.name = split_identifier(raw.name);
  ex.body = subtokenize(raw.body_tokens, raw.name);
  ex.file_path = raw.file_path;
  ex.project = raw.project;
  return ex;
}

std::vector<std::string> tokenize_snippet(std::string_view java_code) {
  return subtokenize(lex_java(java_code));
}

CorpusBuildResult build_corpus(const std::filesystem::path& dir, const std::string& project) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "not a readable directory: " + dir.string());
  }
  std::vector<fs::path> files;
  for (fs::recursive_directory_iterator it(dir, ec), end; it != end; it.increment(ec)) {
    if (ec) throw Error(ErrorCode::kIo, "cannot walk " + dir.string() + ": " + ec.message());
    if (it->is_regular_file() && it->path().extension() == ".java") files.push_back(it->path());
  }
  if (ec) throw Error(ErrorCode::kIo, "cannot walk " + dir.string() + ": " + ec.message());
  std::ranges::sort(files);

  CorpusBuildResult result;
  result.files = files.size();
  for (const fs::path& path : files) {
    const std::string rel = fs::relative(path, dir).generic_string();
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      result.diagnostics.push_back(rel + ": unreadable");
      continue;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      ExtractionStats stats;
      auto methods = extract_methods(buf.str(), rel, project, &stats);
      result.stats += stats;
      for (const RawMethod& m : methods) result.examples.push_back(tokenize_method(m));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kUnbalancedBraces) throw;
      result.diagnostics.push_back(std::string(e.what()));
    }
  }
  return result;
}

void write_dataset(std::ostream& out, const std::vector<MethodExample>& examples) {
  for (const MethodExample& ex : examples) {
    nlohmann::json j = {
        {"name", ex.name}, {"body", ex.body}, {"file", ex.file_path}, {"project", ex.project}};
    out << j.dump() << '\n';
  }
}

std::vector<MethodExample> read_dataset(std::istream& in) {
  std::vector<MethodExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      MethodExample ex;
      ex.name = j.at("name").get<std::vector<std::string>>();
      ex.body = j.at("body").get<std::vector<std::string>>();
      ex.file_path = j.value("file", "");
      ex.project = j.value("project", "");
      out.push_back(std::move(ex));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "dataset line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<MethodExample> read_dataset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open dataset " + path.string());
  return read_dataset(in);
}

std::array<std::size_t, 3> split_sizes(std::size_t n) {
  constexpr std::array<std::size_t, 3> kPercent = {65, 5, 30};
  std::array<std::size_t, 3> sizes{};
  std::array<std::size_t, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    sizes[s] = n * kPercent[s] / 100;
    remainder[s] = n * kPercent[s] % 100;
    assigned += sizes[s];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) {
    return remainder[a] > remainder[b];
  });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k]];
  return sizes;
}

std::vector<int> assign_groups(std::size_t group_count, std::uint64_t seed) {
  std::vector<std::size_t> order(group_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  const auto sizes = split_sizes(group_count);
  std::vector<int> out(group_count, 0);
  for (std::size_t rank = 0; rank < group_count; ++rank) {
    out[order[rank]] = rank < sizes[0] ? 0 : rank < sizes[0] + sizes[1] ? 1 : 2;
  }
  return out;
}

DatasetSplit split_dataset(const std::vector<MethodExample>& examples, std::uint64_t seed) {
  std::map<std::string, std::size_t> group_of;
  std::vector<std::size_t> example_group(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto [it, inserted] = group_of.emplace(examples[i].file_path, group_of.size());
    example_group[i] = it->second;
  }
  const std::vector<int> assignment = assign_groups(group_of.size(), seed);
  DatasetSplit split;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    switch (assignment[example_group[i]]) {
      case 0: split.train.push_back(examples[i]); break;
      case 1: split.valid.push_back(examples[i]); break;
      default: split.test.push_back(examples[i]); break;
    }
  }
  return split;
}

}  // namespace codesum
