#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "codesum/checkpoint.hpp"
#include "codesum/corpus.hpp"
#include "codesum/errors.hpp"
#include "codesum/eval.hpp"
#include "codesum/trainer.hpp"
#include "codesum/visualize.hpp"

namespace py = pybind11;
using namespace codesum;

namespace {

struct Model {
  ModelParams params;
  Vocabulary vocab;
  TrainConfig config;

  std::vector<Suggestion> suggest(const std::vector<std::string>& body, std::size_t k) const {
    return codesum::suggest(params, vocab, encode_snippet(body, vocab), k);
  }
};

py::dict example_to_dict(const MethodExample& ex) {
  py::dict d;
  d["name"] = ex.name;
  d["body"] = ex.body;
  d["file"] = ex.file_path;
  d["project"] = ex.project;
  return d;
}

MethodExample example_from_dict(const py::dict& d) {
  MethodExample ex;
  ex.name = d["name"].cast<std::vector<std::string>>();
  ex.body = d["body"].cast<std::vector<std::string>>();
  if (d.contains("file")) ex.file_path = d["file"].cast<std::string>();
  if (d.contains("project")) ex.project = d["project"].cast<std::string>();
  return ex;
}

std::vector<MethodExample> examples_from_list(const py::list& items) {
  std::vector<MethodExample> out;
  for (const auto& item : items) out.push_back(example_from_dict(item.cast<py::dict>()));
  return out;
}

}  // namespace

PYBIND11_MODULE(_codesum, m) {
  m.doc() = "Convolutional attention models for method name suggestion";

  py::register_exception<Error>(m, "CodesumError", PyExc_RuntimeError);

  m.def("split_identifier", &split_identifier, py::arg("token"),
        "Lowercased subtokens of a camelCase or snake_case identifier.");
  m.def("tokenize_snippet", [](const std::string& code) { return tokenize_snippet(code); },
        py::arg("code"));

  m.def("build_corpus", [](const std::filesystem::path& dir, const std::string& project) {
          const CorpusBuildResult r = build_corpus(dir, project);
          py::list examples;
          for (const auto& ex : r.examples) examples.append(example_to_dict(ex));
          py::dict stats;
          stats["files"] = r.files;
          stats["kept"] = r.stats.kept;
          stats["overridden"] = r.stats.overridden;
          stats["abstract"] = r.stats.abstract_methods;
          stats["constructors"] = r.stats.constructors;
          return py::make_tuple(examples, stats);
        },
        py::arg("directory"), py::arg("project"));

  m.def("split_dataset", [](const py::list& examples, std::uint64_t seed) {
          const DatasetSplit s = split_dataset(examples_from_list(examples), seed);
          auto to_list = [](const std::vector<MethodExample>& xs) {
            py::list out;
            for (const auto& ex : xs) out.append(example_to_dict(ex));
            return out;
          };
          return py::make_tuple(to_list(s.train), to_list(s.valid), to_list(s.test));
        },
        py::arg("examples"), py::arg("seed"));

  m.def("subtoken_prf", [](const Name& pred, const Name& target) {
          const PrecisionRecall r = subtoken_prf(pred, target);
          return py::make_tuple(r.precision, r.recall, r.f1);
        },
        py::arg("predicted"), py::arg("target"));
  m.def("exact_match", &exact_match, py::arg("predicted"), py::arg("target"));

  py::class_<Suggestion>(m, "Suggestion")
      .def_readonly("name", &Suggestion::name)
      .def_readonly("log_prob", &Suggestion::log_prob)
      .def_property_readonly("probability", &Suggestion::probability)
      .def("__repr__", [](const Suggestion& s) {
        std::string joined;
        for (const auto& t : s.name) joined += (joined.empty() ? "" : " ") + t;
        return "<Suggestion '" + joined + "' p=" + std::to_string(s.probability()) + ">";
      });

  py::class_<Model>(m, "Model")
      .def_static("load", [](const std::filesystem::path& path) {
        checkpoint::Checkpoint ck = checkpoint::load(path);
        return Model{std::move(ck.params), std::move(ck.vocab), std::move(ck.config)};
      }, py::arg("path"))
      .def("save", [](const Model& self, const std::filesystem::path& path, const std::string& dtype) {
        checkpoint::save(self.params, self.vocab, self.config, path,
                         dtype == "f32" ? checkpoint::DType::kF32 : checkpoint::DType::kF64);
      }, py::arg("path"), py::arg("dtype") = "f64")
      .def("suggest", &Model::suggest, py::arg("body"), py::arg("k") = 5,
           "Ranked names for a list of body subtokens.")
      .def("suggest_code", [](const Model& self, const std::string& code, std::size_t k) {
        return self.suggest(tokenize_snippet(code), k);
      }, py::arg("code"), py::arg("k") = 5)
      .def("attention_html", [](const Model& self, const std::vector<std::string>& body) {
        const EncodedSnippet c = encode_snippet(body, self.vocab);
        const auto s = codesum::suggest(self.params, self.vocab, c, 1);
        if (s.empty()) throw py::value_error("no suggestion for this body");
        return attention_html(c, self.vocab, s.front());
      }, py::arg("body"))
      .def("evaluate", [](const Model& self, const py::list& examples) {
        const EvalReport r = evaluate_model(self.params, self.vocab, examples_from_list(examples));
        return r.to_json().dump();
      }, py::arg("examples"))
      .def_property_readonly("vocab_size", [](const Model& self) { return self.vocab.size(); })
      .def_property_readonly("config", [](const Model& self) { return to_json(self.config).dump(); });

  m.def("train", [](const py::list& train_set, const py::list& valid_set, const std::string& config_json,
                    const std::function<bool(const std::string&)>& on_epoch) {
          const TrainConfig cfg = config_from_json(nlohmann::json::parse(config_json));
          const auto train_examples = examples_from_list(train_set);
          const auto valid_examples = examples_from_list(valid_set);
          Vocabulary vocab = build_vocabulary(train_examples, cfg.min_count);
          EpochCallback cb;
          if (on_epoch) cb = [&](const EpochLog& log) { return on_epoch(log.to_json().dump()); };
          TrainResult r;
          {
            py::gil_scoped_release release;
            // The callback re-acquires the GIL before calling back into Python.
            EpochCallback locked = cb ? EpochCallback([&](const EpochLog& log) {
              py::gil_scoped_acquire acquire;
              return cb(log);
            }) : EpochCallback{};
            r = train(train_examples, valid_examples, vocab, cfg, locked);
          }
          return Model{std::move(r.params), std::move(vocab), cfg};
        },
        py::arg("train"), py::arg("valid"), py::arg("config"), py::arg("on_epoch") = nullptr);

  m.def("default_config", [](const std::string& preset, const std::string& model) {
          const ModelKind kind = model == "conv" ? ModelKind::kConvAttention : ModelKind::kCopyAttention;
          TrainConfig cfg = preset == "paper" ? paper_preset(kind) : TrainConfig{};
          cfg.model_kind = kind;
          return to_json(cfg).dump();
        },
        py::arg("preset") = "", py::arg("model") = "copy");
}
