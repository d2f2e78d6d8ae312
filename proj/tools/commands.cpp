#include "commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "codesum/checkpoint.hpp"
#include "codesum/corpus.hpp"
#include "codesum/decoder.hpp"
#include "codesum/errors.hpp"
#include "codesum/eval.hpp"
#include "codesum/trainer.hpp"
#include "codesum/visualize.hpp"

namespace codesum::cli {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

std::vector<MethodExample> pick_split(const DatasetSplit& split, const std::string& name,
                                      const std::vector<MethodExample>& all) {
  if (name == "train") return split.train;
  if (name == "valid") return split.valid;
  if (name == "test") return split.test;
  if (name == "all") return all;
  throw UsageError("unknown split '" + name + "' (train, valid, test, all)");
}

std::string read_all(std::istream& in) {
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::size_t worker_threads() {
  if (const char* env = std::getenv("CODESUM_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int build_corpus(const BuildCorpusOptions& opt, std::ostream& out) {
  const CorpusBuildResult result = codesum::build_corpus(opt.src, opt.project);
  if (result.files == 0) throw UsageError("no Java files under " + opt.src);
  for (const auto& d : result.diagnostics) std::cerr << "warning: skipped " << d << "\n";
  std::ofstream file(opt.out, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot write " + opt.out);
  write_dataset(file, result.examples);
  out << "files: " << result.files << "\n"
      << "methods kept: " << result.stats.kept << "\n"
      << "methods excluded: " << result.stats.excluded()
      << " (overridden " << result.stats.overridden << ", abstract "
      << result.stats.abstract_methods << ", constructors " << result.stats.constructors << ")\n";
  if (!result.diagnostics.empty()) out << "files skipped: " << result.diagnostics.size() << "\n";
  return kExitOk;
}

int train(const TrainOptions& opt, std::ostream& out) {
  const ModelKind kind = parse_model_kind(opt.model);
  TrainConfig cfg;
  if (opt.preset == "paper") {
    cfg = paper_preset(kind);
  } else if (!opt.preset.empty()) {
    throw UsageError("unknown preset '" + opt.preset + "'");
  }
  cfg.model_kind = kind;
  cfg.state_kind = parse_state_kind(opt.state);
  cfg.seed = opt.seed;
  if (opt.embedding) cfg.dims.embedding = *opt.embedding;
  if (opt.k1) cfg.dims.k1 = *opt.k1;
  if (opt.k2) cfg.dims.k2 = *opt.k2;
  if (opt.w1) cfg.dims.w1 = *opt.w1;
  if (opt.w2) cfg.dims.w2 = *opt.w2;
  if (opt.w3) cfg.dims.w3 = *opt.w3;
  if (opt.epochs) cfg.epochs = *opt.epochs;
  if (opt.patience) cfg.patience = *opt.patience;
  if (opt.minibatch) cfg.minibatch = *opt.minibatch;
  if (opt.min_count) cfg.min_count = *opt.min_count;
  if (opt.max_valid) cfg.max_valid_examples = *opt.max_valid;
  if (opt.dropout) cfg.dropout_rate = *opt.dropout;
  if (opt.learning_rate) cfg.learning_rate = *opt.learning_rate;
  if (opt.clip_norm) cfg.clip_norm = *opt.clip_norm;
  if (opt.init_std) cfg.init_std = *opt.init_std;
  if (opt.dropout_mode) cfg.dropout_mode = parse_dropout_mode(*opt.dropout_mode);
  cfg.validate();
  if (opt.dtype != "f32" && opt.dtype != "f64") throw UsageError("dtype must be f32 or f64");

  out << "config: " << to_json(cfg).dump() << "\n";

  const std::vector<MethodExample> all = read_dataset_file(opt.data);
  const DatasetSplit split = split_dataset(all, cfg.seed);
  out << "split: train " << split.train.size() << ", valid " << split.valid.size() << ", test "
      << split.test.size() << "\n";
  if (split.train.empty()) throw Error(ErrorCode::kEmptyTrainingSet, "training split is empty");
  const Vocabulary vocab = build_vocabulary(split.train, cfg.min_count);
  out << "vocabulary: " << vocab.size() << " subtokens\n";

  std::ofstream log_file;
  if (!opt.log.empty()) {
    log_file.open(opt.log, std::ios::trunc);
    if (!log_file) throw UsageError("cannot write " + opt.log);
  }
  const TrainResult result = codesum::train(split.train, split.valid, vocab, cfg, [&](const EpochLog& e) {
    const std::string line = e.to_json().dump();
    out << line << "\n" << std::flush;
    if (log_file) log_file << line << "\n" << std::flush;
    return true;
  });
  checkpoint::save(result.params, vocab, cfg, opt.out,
                   opt.dtype == "f32" ? checkpoint::DType::kF32 : checkpoint::DType::kF64);
  out << "best epoch: " << result.best_epoch << "\n";
  if (result.skipped_updates) out << "skipped updates: " << result.skipped_updates << "\n";
  out << "checkpoint: " << opt.out << "\n";
  return kExitOk;
}

int evaluate(const EvaluateOptions& opt, std::ostream& out) {
  OovReading reading;
  if (opt.oov_reading == "best-f1") {
    reading = OovReading::kBestF1Membership;
  } else if (opt.oov_reading == "top-positional") {
    reading = OovReading::kTopPositional;
  } else {
    throw UsageError("oov reading must be best-f1 or top-positional");
  }
  if (!opt.baseline.empty() && opt.baseline != "tfidf") {
    throw UsageError("unknown baseline '" + opt.baseline + "'");
  }

  const checkpoint::Checkpoint ck = checkpoint::load(opt.ckpt);
  const std::vector<MethodExample> all = read_dataset_file(opt.data);
  const DatasetSplit split = split_dataset(all, ck.config.seed);
  std::vector<MethodExample> examples = pick_split(split, opt.split, all);
  if (examples.empty()) throw UsageError("split '" + opt.split + "' is empty");
  if (opt.shuffle_seed) examples = shuffle_ablation(std::move(examples), *opt.shuffle_seed);

  std::vector<std::vector<Name>> suggestions(examples.size());
  if (opt.baseline == "tfidf") {
    if (split.train.empty()) throw Error(ErrorCode::kEmptyIndex, "training split is empty");
    const TfidfIndex index(split.train);
    for (std::size_t i = 0; i < examples.size(); ++i) suggestions[i] = index.suggest(examples[i].body, 5);
  } else {
    std::vector<std::vector<Suggestion>> decoded;
    evaluate_model(ck.params, ck.vocab, examples, {}, worker_threads(), &decoded);
    for (std::size_t i = 0; i < examples.size(); ++i) {
      for (const Suggestion& s : decoded[i]) suggestions[i].push_back(s.name);
    }
  }

  std::vector<ExampleScore> scores;
  scores.reserve(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    scores.push_back(score_example(suggestions[i], examples[i].name, ck.vocab, reading));
  }
  const EvalReport report = aggregate(scores);
  const std::string text = report.to_json().dump(2);
  out << text << "\n";
  if (!opt.out.empty()) {
    std::ofstream file(opt.out, std::ios::trunc);
    if (!file) throw UsageError("cannot write " + opt.out);
    file << text << "\n";
  }
  if (!opt.per_example.empty()) {
    std::ofstream csv(opt.per_example, std::ios::trunc);
    if (!csv) throw UsageError("cannot write " + opt.per_example);
    csv << "example,target,f1_at_1,f1_at_5,exact_at_1,exact_at_5,suggestions\n";
    for (std::size_t i = 0; i < examples.size(); ++i) {
      std::string names;
      for (const Name& n : suggestions[i]) names += (names.empty() ? "" : "|") + join(n);
      csv << i << ",\"" << join(examples[i].name) << "\"," << scores[i].at1.f1 << ","
          << scores[i].at5.f1 << "," << scores[i].at1.exact << "," << scores[i].at5.exact << ",\""
          << names << "\"\n";
    }
  }
  return kExitOk;
}

int suggest(const SuggestOptions& opt, std::istream& in, std::ostream& out) {
  if (opt.k == 0) throw UsageError("-k must be at least 1");
  const checkpoint::Checkpoint ck = checkpoint::load(opt.ckpt);
  std::string code;
  if (opt.snippet == "-") {
    code = read_all(in);
  } else {
    std::ifstream file(opt.snippet, std::ios::binary);
    if (!file) throw UsageError("cannot read snippet " + opt.snippet);
    code = read_all(file);
  }
  const std::vector<std::string> body = tokenize_snippet(code);
  if (body.empty()) throw UsageError("snippet has no tokens");
  const EncodedSnippet c = encode_snippet(body, ck.vocab);
  const std::vector<Suggestion> ranked = codesum::suggest(ck.params, ck.vocab, c, opt.k);
  if (ranked.empty()) {
    std::cerr << "warning: no suggestion completed within the search limits\n";
    return kExitOk;
  }
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    char pct[32];
    std::snprintf(pct, sizeof(pct), "%.1f%%", 100.0 * ranked[i].probability());
    out << i + 1 << ". " << join(ranked[i].name) << " (" << pct << ")\n";
  }
  if (!opt.viz.empty()) {
    std::ofstream html(opt.viz, std::ios::trunc);
    if (!html) throw UsageError("cannot write " + opt.viz);
    html << attention_html(c, ck.vocab, ranked.front());
  }
  return kExitOk;
}

}  // namespace codesum::cli
