#include <iostream>

#include "CLI11.hpp"

#include "codesum/errors.hpp"
#include "commands.hpp"

using namespace codesum::cli;

int main(int argc, char** argv) {
  CLI::App app{"Method name suggestion with convolutional attention networks"};
  app.require_subcommand(1);

  BuildCorpusOptions corpus;
  auto* build = app.add_subcommand("build-corpus", "Extract methods from Java sources into a dataset");
  build->add_option("--src", corpus.src, "Directory searched recursively for .java files")->required();
  build->add_option("--out", corpus.out, "Output JSON-lines dataset")->required();
  build->add_option("--project", corpus.project, "Project name recorded per example")->required();

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train a model on the training split of a dataset");
  train->add_option("--data", tr.data, "JSON-lines dataset")->required();
  train->add_option("--out", tr.out, "Checkpoint path")->required();
  train->add_option("--model", tr.model, "conv or copy")->check(CLI::IsMember({"conv", "copy"}));
  train->add_option("--state", tr.state, "gru or simple")->check(CLI::IsMember({"gru", "simple"}));
  train->add_option("--preset", tr.preset, "Load tuned hyperparameters")->check(CLI::IsMember({"paper"}));
  train->add_option("--seed", tr.seed, "Seed for the split, initialization and sampling");
  train->add_option("--log", tr.log, "Per-epoch JSON-lines log");
  train->add_option("--dtype", tr.dtype, "Checkpoint precision")->check(CLI::IsMember({"f32", "f64"}));
  train->add_option("--D", tr.embedding, "Embedding width");
  train->add_option("--k1", tr.k1);
  train->add_option("--k2", tr.k2);
  train->add_option("--w1", tr.w1);
  train->add_option("--w2", tr.w2);
  train->add_option("--w3", tr.w3);
  train->add_option("--epochs", tr.epochs);
  train->add_option("--patience", tr.patience);
  train->add_option("--minibatch", tr.minibatch);
  train->add_option("--min-count", tr.min_count);
  train->add_option("--max-valid", tr.max_valid, "Cap on validation examples decoded per epoch");
  train->add_option("--dropout", tr.dropout);
  train->add_option("--dropout-mode", tr.dropout_mode, "parameter or activation")
      ->check(CLI::IsMember({"parameter", "activation"}));
  train->add_option("--lr", tr.learning_rate);
  train->add_option("--clip", tr.clip_norm);
  train->add_option("--init-std", tr.init_std);

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Score a checkpoint or the tf-idf baseline");
  evaluate->add_option("--ckpt", ev.ckpt, "Checkpoint (its seed fixes the split)")->required();
  evaluate->add_option("--data", ev.data, "JSON-lines dataset")->required();
  evaluate->add_option("--split", ev.split, "train, valid, test or all");
  evaluate->add_option("--baseline", ev.baseline, "Score a baseline instead of the model")
      ->check(CLI::IsMember({"tfidf"}));
  evaluate->add_option("--shuffle-bodies", ev.shuffle_seed, "Shuffle body subtokens with this seed");
  evaluate->add_option("--oov-reading", ev.oov_reading, "best-f1 or top-positional")
      ->check(CLI::IsMember({"best-f1", "top-positional"}));
  evaluate->add_option("--out", ev.out, "Also write the report here");
  evaluate->add_option("--per-example", ev.per_example, "Per-example CSV");

  SuggestOptions sg;
  auto* suggest = app.add_subcommand("suggest", "Suggest names for a Java method body");
  suggest->add_option("--ckpt", sg.ckpt, "Checkpoint")->required();
  suggest->add_option("--snippet", sg.snippet, "File with the body, or - for stdin");
  suggest->add_option("-k", sg.k, "Number of suggestions");
  suggest->add_option("--viz", sg.viz, "Write an attention HTML page for the top suggestion");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*build) return build_corpus(corpus, std::cout);
    if (*train) return codesum::cli::train(tr, std::cout);
    if (*evaluate) return codesum::cli::evaluate(ev, std::cout);
    if (*suggest) return codesum::cli::suggest(sg, std::cin, std::cout);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const codesum::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
