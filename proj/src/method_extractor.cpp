#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "codesum/corpus.hpp"
#include "codesum/errors.hpp"

namespace codesum {

namespace {

const std::unordered_set<std::string_view>& modifier_keywords() {
  static const std::unordered_set<std::string_view> mods = {
      "public", "protected", "private",  "static",       "final",    "abstract",
      "native", "strictfp",  "default",  "synchronized", "transient", "volatile",
      "sealed",
  };
  return mods;
}

bool is_op(const JavaToken& t, std::string_view text) {
  return t.kind == JavaTokenKind::kOperator && t.text == text;
}

bool is_type_keyword(const JavaToken& t) {
  return t.kind == JavaTokenKind::kKeyword &&
         (t.text == "class" || t.text == "interface" || t.text == "enum" || t.text == "record" ||
          t.text == "@interface");
}

// Index of the '}' matching the '{' at open, or nullopt.
std::optional<std::size_t> matching_brace(const std::vector<JavaToken>& toks, std::size_t open) {
  int depth = 0;
  for (std::size_t i = open; i < toks.size(); ++i) {
    if (is_op(toks[i], "{")) {
      ++depth;
    } else if (is_op(toks[i], "}")) {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

struct Signature {
  std::string name;
  std::size_t arity;
  auto operator<=>(const Signature&) const = default;
};

struct TypeInfo {
  std::vector<std::string> supertypes;
  std::set<Signature> methods;
};

struct Candidate {
  RawMethod method;
  std::string owner;
  Signature signature;
  bool constructor = false;
};

// A member declaration between two boundaries inside a type body.
struct Declaration {
  std::set<std::string> annotations;
  std::set<std::string> modifiers;
  std::optional<std::string> name;  // token before the parameter list
  std::size_t arity = 0;
  bool has_params = false;
  bool assignment_before_params = false;
};

Declaration analyze(const std::vector<JavaToken>& toks, std::size_t begin, std::size_t end) {
  Declaration d;
  std::size_t i = begin;
  while (i < end) {
    const JavaToken& t = toks[i];
    if (t.kind == JavaTokenKind::kAnnotation) {
      const auto dot = t.text.rfind('.');
      d.annotations.insert(dot == std::string::npos ? t.text : t.text.substr(dot + 1));
      ++i;
      if (i < end && is_op(toks[i], "(")) {
        int depth = 0;
        for (; i < end; ++i) {
          if (is_op(toks[i], "(")) ++depth;
          if (is_op(toks[i], ")") && --depth == 0) {
            ++i;
            break;
          }
        }
      }
      continue;
    }
    if (t.kind == JavaTokenKind::kKeyword && modifier_keywords().contains(t.text)) {
      d.modifiers.insert(t.text);
    }
    if (is_op(t, "=")) {
      d.assignment_before_params = true;
      return d;
    }
    if (is_op(t, "(")) {
      if (i > begin && (toks[i - 1].kind == JavaTokenKind::kIdentifier)) {
        d.name = toks[i - 1].text;
      }
      d.has_params = true;
      int parens = 0;
      int angles = 0;
      bool any = false;
      std::size_t commas = 0;
      for (; i < end; ++i) {
        const JavaToken& p = toks[i];
        if (is_op(p, "(")) {
          ++parens;
          if (parens == 1) continue;
        } else if (is_op(p, ")")) {
          if (--parens == 0) break;
        } else if (is_op(p, "<")) {
          ++angles;
        } else if (is_op(p, ">")) {
          --angles;
        } else if (is_op(p, ">>")) {
          angles -= 2;
        } else if (is_op(p, ">>>")) {
          angles -= 3;
        } else if (is_op(p, ",") && parens == 1 && angles <= 0) {
          ++commas;
        }
        any = true;
      }
      d.arity = any ? commas + 1 : 0;
      return d;
    }
    ++i;
  }
  return d;
}

struct Frame {
  std::string type_name;
  bool is_enum = false;
  bool enum_constants_done = false;
};

}  // namespace

ExtractionStats& ExtractionStats::operator+=(const ExtractionStats& other) {
  kept += other.kept;
  overridden += other.overridden;
  abstract_methods += other.abstract_methods;
  constructors += other.constructors;
  return *this;
}

std::vector<RawMethod> extract_methods(std::string_view source_text, const std::string& file_path,
                                       const std::string& project, ExtractionStats* stats) {
  const std::vector<JavaToken> toks = lex_java(source_text);

  std::map<std::string, TypeInfo> types;
  std::vector<Candidate> candidates;
  ExtractionStats local;

  std::vector<Frame> frames{Frame{}};  // file scope behaves like a type body without a name
  std::size_t decl_begin = 0;

  for (std::size_t i = 0; i < toks.size(); ++i) {
    const JavaToken& t = toks[i];
    Frame& top = frames.back();

    if (is_op(t, "}")) {
      if (frames.size() == 1) {
        throw Error(ErrorCode::kUnbalancedBraces, file_path + ": unexpected '}'");
      }
      frames.pop_back();
      decl_begin = i + 1;
      continue;
    }

    if (is_op(t, ";")) {
      if (top.is_enum && !top.enum_constants_done) {
        top.enum_constants_done = true;
      } else {
        const Declaration d = analyze(toks, decl_begin, i);
        if (d.has_params && !d.assignment_before_params && d.name) {
          types[top.type_name].methods.insert({*d.name, d.arity});
          ++local.abstract_methods;
        }
      }
      decl_begin = i + 1;
      continue;
    }

    if (!is_op(t, "{")) continue;

    const auto close = matching_brace(toks, i);
    if (!close) throw Error(ErrorCode::kUnbalancedBraces, file_path + ": unclosed '{'");

    // Type declaration?
    std::optional<std::size_t> type_kw;
    for (std::size_t j = decl_begin; j < i; ++j) {
      if (is_type_keyword(toks[j])) {
        type_kw = j;
        break;
      }
    }
    if (type_kw && *type_kw + 1 < i && toks[*type_kw + 1].kind == JavaTokenKind::kIdentifier) {
      Frame frame;
      frame.type_name = toks[*type_kw + 1].text;
      frame.is_enum = toks[*type_kw].text == "enum";
      TypeInfo& info = types[frame.type_name];
      bool in_supers = false;
      int angles = 0;
      for (std::size_t j = *type_kw + 2; j < i; ++j) {
        const JavaToken& s = toks[j];
        if (s.kind == JavaTokenKind::kKeyword && (s.text == "extends" || s.text == "implements")) {
          in_supers = true;
        } else if (s.kind == JavaTokenKind::kKeyword && s.text == "permits") {
          in_supers = false;
        } else if (is_op(s, "<")) {
          ++angles;
        } else if (is_op(s, ">")) {
          --angles;
        } else if (is_op(s, ">>")) {
          angles -= 2;
        } else if (in_supers && angles <= 0 && s.kind == JavaTokenKind::kIdentifier) {
          info.supertypes.push_back(s.text);
        }
      }
      frames.push_back(std::move(frame));
      decl_begin = i + 1;
      continue;
    }

    const bool in_enum_constants = top.is_enum && !top.enum_constants_done;
    const Declaration d = analyze(toks, decl_begin, i);
    if (!in_enum_constants && d.has_params && !d.assignment_before_params && d.name) {
      Candidate cand;
      cand.owner = top.type_name;
      cand.signature = {*d.name, d.arity};
      cand.constructor = !top.type_name.empty() && *d.name == top.type_name;
      cand.method.name = *d.name;
      cand.method.body_tokens.assign(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                     toks.begin() + static_cast<std::ptrdiff_t>(*close) + 1);
      cand.method.modifiers = d.modifiers;
      cand.method.annotations = d.annotations;
      cand.method.file_path = file_path;
      cand.method.project = project;
      if (!cand.constructor) types[top.type_name].methods.insert(cand.signature);
      candidates.push_back(std::move(cand));
    }
    // Method bodies, initializers, enum constant bodies and array initializers
    // are all skipped wholesale.
    i = *close;
    decl_begin = i + 1;
  }
  if (frames.size() != 1) {
    throw Error(ErrorCode::kUnbalancedBraces, file_path + ": unclosed type body");
  }

  // True if some same-file supertype of `owner` (transitively) declares sig.
  auto declared_in_supertype = [&](const std::string& owner, const Signature& sig) {
    std::vector<std::string> pending;
    std::set<std::string> seen{owner};
    if (auto it = types.find(owner); it != types.end()) pending = it->second.supertypes;
    while (!pending.empty()) {
      std::string next = std::move(pending.back());
      pending.pop_back();
      if (!seen.insert(next).second) continue;
      const auto it = types.find(next);
      if (it == types.end()) continue;
      if (it->second.methods.contains(sig)) return true;
      pending.insert(pending.end(), it->second.supertypes.begin(), it->second.supertypes.end());
    }
    return false;
  };

  std::vector<RawMethod> out;
  for (Candidate& cand : candidates) {
    if (cand.constructor) {
      ++local.constructors;
    } else if (cand.method.modifiers.contains("abstract")) {
      ++local.abstract_methods;
    } else if (cand.method.annotations.contains("Override") ||
               declared_in_supertype(cand.owner, cand.signature)) {
      ++local.overridden;
    } else {
      ++local.kept;
      out.push_back(std::move(cand.method));
    }
  }
  if (stats) *stats += local;
  return out;
}

}  // namespace codesum
