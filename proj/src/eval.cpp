#include "codesum/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "codesum/errors.hpp"
#include "codesum/random.hpp"

namespace codesum {

PrecisionRecall subtoken_prf(const Name& predicted, const Name& target) {
  std::map<std::string_view, long> counts;
  for (const auto& s : target) ++counts[s];
  std::size_t overlap = 0;
  for (const auto& s : predicted) {
    auto it = counts.find(s);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  PrecisionRecall out;
  out.precision = predicted.empty() ? 0.0 : static_cast<double>(overlap) / predicted.size();
  out.recall = target.empty() ? 0.0 : static_cast<double>(overlap) / target.size();
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

bool exact_match(const Name& predicted, const Name& target) { return predicted == target; }

RankScore score_at_rank(const std::vector<Name>& suggestions, const Name& target, std::size_t k) {
  RankScore best;
  const std::size_t n = std::min(k, suggestions.size());
  for (std::size_t i = 0; i < n; ++i) {
    const PrecisionRecall prf = subtoken_prf(suggestions[i], target);
    best.f1 = std::max(best.f1, prf.f1);
    best.precision = std::max(best.precision, prf.precision);
    best.recall = std::max(best.recall, prf.recall);
    best.exact = best.exact || exact_match(suggestions[i], target);
  }
  return best;
}

std::optional<double> oov_accuracy(const std::vector<Name>& suggestions, const Name& target,
                                   const Vocabulary& train_vocab, std::size_t k,
                                   OovReading reading) {
  std::vector<std::size_t> oov_positions;
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (!train_vocab.contains(target[i])) oov_positions.push_back(i);
  }
  if (oov_positions.empty()) return std::nullopt;
  const std::size_t n = std::min(k, suggestions.size());
  if (n == 0) return 0.0;

  std::size_t hits = 0;
  if (reading == OovReading::kTopPositional) {
    const Name& first = suggestions.front();
    for (std::size_t pos : oov_positions) {
      if (pos < first.size() && first[pos] == target[pos]) ++hits;
    }
  } else {
    std::size_t best = 0;
    double best_f1 = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double f1 = subtoken_prf(suggestions[i], target).f1;
      if (f1 > best_f1) {
        best_f1 = f1;
        best = i;
      }
    }
    std::map<std::string_view, long> available;
    for (const auto& s : suggestions[best]) ++available[s];
    for (std::size_t pos : oov_positions) {
      auto it = available.find(target[pos]);
      if (it != available.end() && it->second > 0) {
        --it->second;
        ++hits;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(oov_positions.size());
}

ExampleScore score_example(const std::vector<Name>& suggestions, const Name& target,
                           const Vocabulary& train_vocab, OovReading reading) {
  ExampleScore s;
  s.at1 = score_at_rank(suggestions, target, 1);
  s.at5 = score_at_rank(suggestions, target, 5);
  s.oov1 = oov_accuracy(suggestions, target, train_vocab, 1, reading);
  s.oov5 = oov_accuracy(suggestions, target, train_vocab, 5, reading);
  return s;
}

EvalReport aggregate(const std::vector<ExampleScore>& scores) {
  EvalReport r;
  r.n_examples = scores.size();
  for (const ExampleScore& s : scores) {
    r.f1_at_1 += s.at1.f1;
    r.f1_at_5 += s.at5.f1;
    r.exact_at_1 += s.at1.exact ? 1.0 : 0.0;
    r.exact_at_5 += s.at5.exact ? 1.0 : 0.0;
    r.precision_at_1 += s.at1.precision;
    r.precision_at_5 += s.at5.precision;
    r.recall_at_1 += s.at1.recall;
    r.recall_at_5 += s.at5.recall;
    if (s.oov1) {
      r.oov_acc_at_1 += *s.oov1;
      r.oov_acc_at_5 += s.oov5.value_or(0.0);
      ++r.n_oov_examples;
    }
  }
  if (r.n_examples > 0) {
    const double n = static_cast<double>(r.n_examples);
    for (double* v : {&r.f1_at_1, &r.f1_at_5, &r.exact_at_1, &r.exact_at_5, &r.precision_at_1,
                      &r.precision_at_5, &r.recall_at_1, &r.recall_at_5}) {
      *v /= n;
    }
  }
  if (r.n_oov_examples > 0) {
    r.oov_acc_at_1 /= static_cast<double>(r.n_oov_examples);
    r.oov_acc_at_5 /= static_cast<double>(r.n_oov_examples);
  }
  return r;
}

nlohmann::json EvalReport::to_json() const {
  return {{"f1_at_1", f1_at_1},
          {"f1_at_5", f1_at_5},
          {"exact_at_1", exact_at_1},
          {"exact_at_5", exact_at_5},
          {"precision_at_1", precision_at_1},
          {"precision_at_5", precision_at_5},
          {"recall_at_1", recall_at_1},
          {"recall_at_5", recall_at_5},
          {"oov_acc_at_1", oov_acc_at_1},
          {"oov_acc_at_5", oov_acc_at_5},
          {"n_examples", n_examples},
          {"n_oov_examples", n_oov_examples}};
}

TfidfIndex::TfidfIndex(const std::vector<MethodExample>& examples) {
  if (examples.empty()) throw Error(ErrorCode::kEmptyIndex, "tf-idf index needs training examples");
  // Terms are indexed in lexicographic order so every sum below is independent
  // of token order inside the bodies.
  std::set<std::string> terms;
  for (const auto& ex : examples) terms.insert(ex.body.begin(), ex.body.end());
  for (const auto& t : terms) term_index_.emplace(t, term_index_.size());
  std::vector<std::size_t> df(terms.size(), 0);
  std::vector<std::map<std::size_t, double>> raw_tf(examples.size());
  for (std::size_t e = 0; e < examples.size(); ++e) {
    for (const auto& s : examples[e].body) {
      const std::size_t term = term_index_.at(s);
      if (raw_tf[e][term]++ == 0) ++df[term];
    }
    names_.push_back(examples[e].name);
  }
  const double n = static_cast<double>(examples.size());
  idf_.resize(df.size());
  for (std::size_t t = 0; t < df.size(); ++t) idf_[t] = std::log(n / static_cast<double>(df[t]));

  for (const auto& tf : raw_tf) {
    SparseVector doc;
    double norm = 0.0;
    for (const auto& [term, count] : tf) {
      const double w = count * idf_[term];
      doc.emplace_back(term, w);
      norm += w * w;
    }
    docs_.push_back(std::move(doc));
    doc_norms_.push_back(std::sqrt(norm));
  }

  // Fallback list: distinct names by descending frequency, first appearance breaking ties.
  std::map<Name, std::pair<std::size_t, std::size_t>> freq;  // name -> (count, first index)
  for (std::size_t e = 0; e < names_.size(); ++e) {
    auto [it, inserted] = freq.emplace(names_[e], std::pair{0, e});
    ++it->second.first;
  }
  std::vector<std::pair<Name, std::pair<std::size_t, std::size_t>>> ranked(freq.begin(), freq.end());
  std::ranges::sort(ranked, [](const auto& a, const auto& b) {
    return a.second.first != b.second.first ? a.second.first > b.second.first
                                            : a.second.second < b.second.second;
  });
  for (auto& [name, stats] : ranked) names_by_frequency_.push_back(name);
}

TfidfIndex::SparseVector TfidfIndex::vectorize(const std::vector<std::string>& body) const {
  std::map<std::size_t, double> tf;
  for (const auto& s : body) {
    const auto it = term_index_.find(s);
    if (it != term_index_.end()) tf[it->second] += 1.0;
  }
  SparseVector v;
  for (const auto& [term, count] : tf) v.emplace_back(term, count * idf_[term]);
  return v;
}

namespace {

double dot(const std::vector<std::pair<std::size_t, double>>& a,
           const std::vector<std::pair<std::size_t, double>>& b) {
  double sum = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i].first < b[j].first) {
      ++i;
    } else if (a[i].first > b[j].first) {
      ++j;
    } else {
      sum += a[i++].second * b[j++].second;
    }
  }
  return sum;
}

}  // namespace

double TfidfIndex::similarity(const std::vector<std::string>& body, std::size_t example) const {
  const SparseVector q = vectorize(body);
  double qn = 0.0;
  for (const auto& [term, w] : q) qn += w * w;
  const double denom = std::sqrt(qn) * doc_norms_.at(example);
  return denom > 0.0 ? dot(q, docs_[example]) / denom : 0.0;
}

std::vector<Name> TfidfIndex::suggest(const std::vector<std::string>& body, std::size_t k) const {
  const SparseVector q = vectorize(body);
  double qn = 0.0;
  for (const auto& [term, w] : q) qn += w * w;
  qn = std::sqrt(qn);

  std::vector<std::pair<double, std::size_t>> scored;
  if (qn > 0.0) {
    for (std::size_t e = 0; e < docs_.size(); ++e) {
      const double denom = qn * doc_norms_[e];
      if (denom <= 0.0) continue;
      const double sim = dot(q, docs_[e]) / denom;
      if (sim > 0.0) scored.emplace_back(sim, e);
    }
  }
  std::ranges::sort(scored, [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });

  std::vector<Name> out;
  std::set<Name> seen;
  for (const auto& [sim, e] : scored) {
    if (out.size() >= k) break;
    if (seen.insert(names_[e]).second) out.push_back(names_[e]);
  }
  for (const Name& name : names_by_frequency_) {
    if (out.size() >= k) break;
    if (seen.insert(name).second) out.push_back(name);
  }
  return out;
}

std::vector<MethodExample> shuffle_ablation(std::vector<MethodExample> examples,
                                            std::uint64_t seed) {
  Rng rng(seed);
  for (MethodExample& ex : examples) rng.shuffle(ex.body);
  return examples;
}

}  // namespace codesum
