#include "codesum/visualize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace codesum {

namespace {

struct Rgb {
  int r, g, b;
};

constexpr Rgb kAlphaColor{33, 102, 172};  // blue
constexpr Rgb kKappaColor{178, 24, 43};   // red

std::string shade(Rgb color, double weight) {
  weight = std::clamp(weight, 0.0, 1.0);
  auto mix = [weight](int c) {
    return static_cast<int>(std::lround(255.0 + (c - 255.0) * weight));
  };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", mix(color.r), mix(color.g), mix(color.b));
  return buf;
}

void emit_row(std::ostringstream& out, const char* kind, const std::string& label, double lambda,
              const EncodedSnippet& c, const std::vector<bool>& oov, const Vec& weights,
              double scale, Rgb color) {
  out << "<tr class=\"" << kind << "\"><th>" << html_escape(label) << "</th><td class=\"head\">"
      << kind << "</td><td class=\"lambda\">";
  char lam[32];
  std::snprintf(lam, sizeof(lam), "%.3f", lambda);
  out << lam << "</td><td>";
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double w = i < weights.size() ? weights[i] * scale : 0.0;
    out << "<span style=\"background:" << shade(color, w) << "\"";
    if (oov[i]) out << " class=\"oov\"";
    out << " title=\"" << (i < weights.size() ? weights[i] : 0.0) << "\">"
        << html_escape(c.surface[i]) << "</span> ";
  }
  out << "</td></tr>\n";
}

}  // namespace

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string attention_html(const EncodedSnippet& c, const Vocabulary& vocab,
                           const Suggestion& suggestion) {
  std::vector<bool> oov(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) oov[i] = !vocab.contains(c.surface[i]);

  std::string title;
  for (const auto& s : suggestion.name) title += (title.empty() ? "" : " ") + s;

  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>" << html_escape(title)
      << "</title>\n<style>\n"
      << "body{font-family:monospace}table{border-collapse:collapse}"
      << "td,th{padding:2px 6px;vertical-align:top;text-align:left}"
      << "span{padding:0 1px}.oov{text-decoration:underline}"
      << "tr.kappa td{border-bottom:1px solid #ccc}\n"
      << "</style></head><body>\n<h1>" << html_escape(title) << "</h1>\n<table>\n"
      << "<tr><th>subtoken</th><th>head</th><th>&lambda;</th><th>snippet</th></tr>\n";
  for (const StepRecord& step : suggestion.steps) {
    const std::string label = step.token == Vocabulary::kSpecialTokens[Vocabulary::kNameEnd]
                                  ? std::string("End")
                                  : step.token;
    double peak = 0.0;
    for (double a : step.alpha) peak = std::max(peak, a);
    emit_row(out, "alpha", label, step.lambda, c, oov, step.alpha, peak > 0.0 ? 1.0 / peak : 0.0,
             kAlphaColor);
    emit_row(out, "kappa", label, step.lambda, c, oov, step.kappa, 1.0, kKappaColor);
  }
  out << "</table>\n</body></html>\n";
  return out.str();
}

}  // namespace codesum
