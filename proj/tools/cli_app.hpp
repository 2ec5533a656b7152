#pragma once

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "keygraph/keygraph.hpp"

namespace keygraph::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct RunConfig {
  std::vector<std::string> corpora;
  std::string features;  // training-set file instead of corpora
  std::string stoplist;  // empty: built-in English list
  std::string model;
  std::string output = "-";
  std::string tsv;
  std::string scores;
  std::uint64_t seed = 42;
  unsigned jobs = 1;
  std::size_t k = 10;
  bool words = false;
  int smote_percentage = 200;
  int extract_smote = 0;
  std::size_t smote_k = 5;
  std::string classifier = "gbdt";
  std::string scoring = "mean";
  std::string counting = "type";
  std::string positions = "filtered";
  std::size_t short_doc = 100;
  ModelParams params;
  RankConfig rank;
  int folds = 10;
  std::optional<double> baseline;
  std::optional<double> delta;
  std::size_t samples = 1000000;
};

namespace detail {

namespace fs = std::filesystem;

// Shortest text that reads back to the same double.
inline std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string join(const std::vector<std::string>& xs, char sep = ',') {
  std::string out;
  for (const auto& x : xs) {
    if (!out.empty()) out += sep;
    out += x;
  }
  return out;
}

// Provenance line shared by every artifact. Worker count is left out because
// it never changes results.
inline std::string header(const std::string& command, const RunConfig& c) {
  std::ostringstream os;
  os << "keygraph " << command << " seed=" << c.seed;
  if (!c.corpora.empty()) os << " corpora=" << join(c.corpora);
  if (!c.features.empty()) os << " features=" << c.features;
  if (!c.model.empty() && command != "train") os << " model=" << c.model;
  os << " stoplist=" << (c.stoplist.empty() ? "english" : c.stoplist);
  os << " counting=" << c.counting << " positions=" << c.positions << " short-doc=" << c.short_doc;
  os << " damping=" << shortest(c.rank.damping) << " alpha=" << shortest(c.rank.alpha)
     << " tolerance=" << shortest(c.rank.tolerance) << " max-iterations=" << c.rank.max_iterations;
  if (command == "train" || command == "crossval") {
    os << " classifier=" << c.classifier << " smote=" << c.smote_percentage << " smote-k=" << c.smote_k;
    os << " bagging-members=" << c.params.bagging_members << " adaboost-rounds=" << c.params.adaboost_rounds;
    os << " trees=" << c.params.gbdt.trees << " depth=" << c.params.gbdt.max_depth
       << " learning-rate=" << shortest(c.params.gbdt.learning_rate)
       << " lambda=" << shortest(c.params.gbdt.lambda);
  }
  if (command == "extract") os << " smote=" << c.extract_smote << " smote-k=" << c.smote_k;
  if (command == "crossval") os << " folds=" << c.folds;
  if (command == "keyphrases" || command == "evaluate") {
    os << " level=" << (c.words ? std::string("words") : "k" + std::to_string(c.k)) << " scoring=" << c.scoring;
  }
  if (command == "significance") {
    os << " scores=" << c.scores << " samples=" << c.samples;
    if (c.baseline) os << " baseline=" << shortest(*c.baseline);
    if (c.delta) os << " delta=" << shortest(*c.delta);
  }
  return os.str();
}

inline PipelineConfig pipeline(const RunConfig& c) {
  PipelineConfig p;
  p.candidates.short_doc_unique_words = c.short_doc;
  p.candidates.stream = c.positions == "raw" ? PositionStream::raw : PositionStream::filtered;
  p.counting = c.counting == "instance" ? CooccurrenceCounting::token_instance : CooccurrenceCounting::word_type;
  p.rank = c.rank;
  p.rank.validate();
  return p;
}

inline Stoplist stoplist(const RunConfig& c) {
  return c.stoplist.empty() ? english_stoplist() : load_stoplist(c.stoplist);
}

inline void require_file(const std::string& path, const char* what) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) throw DataError(std::string(what) + " not found: " + path);
}

inline void require_dir(const std::string& path) {
  std::error_code ec;
  if (!fs::is_directory(path, ec)) throw DataError("corpus directory not found: " + path);
}

inline void require_output(const std::string& path) {
  if (path.empty() || path == "-") return;
  const auto parent = fs::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty() && !fs::is_directory(parent, ec)) throw DataError("output directory not found: " + parent.string());
}

inline void validate_paths(const RunConfig& c) {
  if (!c.features.empty() && !c.corpora.empty()) throw ConfigError("give either --corpus or --features, not both");
  for (const auto& d : c.corpora) require_dir(d);
  if (!c.features.empty()) require_file(c.features, "feature file");
  if (!c.stoplist.empty()) require_file(c.stoplist, "stoplist");
  require_output(c.output);
  require_output(c.tsv);
}

inline std::vector<Corpus> load_corpora(const RunConfig& c, const Stoplist& stop) {
  std::vector<Corpus> out;
  for (const auto& root : c.corpora) {
    out.push_back(load_corpus(root, stop, {}, c.stoplist.empty() ? "english" : c.stoplist, c.jobs));
  }
  return out;
}

inline Corpus load_single(const RunConfig& c, const Stoplist& stop) {
  if (c.corpora.size() != 1) throw ConfigError("this command takes exactly one --corpus");
  return load_corpora(c, stop).front();
}

inline TrainingSet training_set(const RunConfig& c) {
  if (!c.features.empty()) {
    if (!c.corpora.empty()) throw ConfigError("give either --corpus or --features, not both");
    std::ifstream in(c.features, std::ios::binary);
    return read_training_set(in);
  }
  if (c.corpora.empty()) throw ConfigError("no training data: give --corpus or --features");
  const auto stop = stoplist(c);
  const auto corpora = load_corpora(c, stop);
  return assemble_training_set(corpora, pipeline(c), c.jobs);
}

inline std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError("cannot write " + path);
  f << text;
  if (!f.flush()) throw DataError("write failed: " + path);
}

inline ModelKind model_kind(const RunConfig& c) {
  auto k = parse_model_kind(c.classifier);
  if (!k) throw ConfigError("unknown classifier: " + c.classifier);
  return *k;
}

inline PhraseScoring phrase_scoring(const RunConfig& c) {
  if (c.scoring == "sum") return PhraseScoring::sum;
  if (c.scoring == "max") return PhraseScoring::max;
  return PhraseScoring::mean;
}

inline TrainedModel load_model_file(const RunConfig& c) {
  if (c.model.empty()) throw ConfigError("--model is required");
  require_file(c.model, "model file");
  return load_model(read_all(c.model));
}

// --- commands ---------------------------------------------------------------

inline void cmd_extract(const RunConfig& c, std::ostream& out) {
  auto ts = training_set(c);
  if (c.extract_smote > 0) ts = smote(ts, {c.extract_smote, c.smote_k, c.seed}, c.jobs);
  std::ostringstream os;
  os << "# " << header("extract", c) << '\n';
  write_training_set(os, ts);
  emit(c.output, os.str(), out);
}

inline void cmd_train(const RunConfig& c, std::ostream& out) {
  if (c.output.empty() || c.output == "-") {
    if (c.model.empty()) throw ConfigError("train needs --model (output path) or --output");
  }
  auto ts = training_set(c);
  if (std::any_of(ts.records.begin(), ts.records.end(), [](const auto& r) { return r.synthetic; })) {
    log::warn("feature file already contains synthetic rows; training on it as given");
  } else if (c.smote_percentage > 0) {
    ts = smote(ts, {c.smote_percentage, c.smote_k, c.seed}, c.jobs);
  }
  auto model = train_model(ts, model_kind(c), c.params, c.seed);
  for (const auto& p : c.corpora) model.metadata.corpora.push_back(corpus_name(p));
  // feature files carry corpus-prefixed doc ids
  auto& names = model.metadata.corpora;
  for (const auto& r : ts.records) {
    const auto slash = r.doc_id.find('/');
    if (c.features.empty() || slash == std::string::npos) continue;
    auto name = r.doc_id.substr(0, slash);
    if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(std::move(name));
  }
  model.metadata.config = header("train", c);
  emit(c.model.empty() ? c.output : c.model, save_model(model), out);
}

inline void cmd_predict(const RunConfig& c, std::ostream& out) {
  const auto model = load_model_file(c);
  const auto stop = stoplist(c);
  const auto corpus = load_single(c, stop);
  const auto cfg = pipeline(c);
  std::vector<std::string> rows(corpus.documents.size());
  parallel_for(corpus.documents.size(), c.jobs, [&](std::size_t i) {
    const auto& doc = corpus.documents[i];
    std::ostringstream os;
    for (const auto& p : predict_document(doc, model, cfg).predictions) {
      if (p.label == Label::positive) os << doc.id << '\t' << p.word << '\t' << format_double(p.score) << '\n';
    }
    rows[i] = os.str();
  });
  std::ostringstream os;
  os << "# " << header("predict", c) << '\n' << "doc_id\tword\tscore\n";
  for (const auto& r : rows) os << r;
  emit(c.output, os.str(), out);
}

inline void cmd_keyphrases(const RunConfig& c, std::ostream& out) {
  if (c.k < 1) throw ConfigError("--k must be at least 1");
  const auto model = load_model_file(c);
  const auto stop = stoplist(c);
  const auto corpus = load_single(c, stop);
  const auto cfg = pipeline(c);
  std::vector<std::string> rows(corpus.documents.size());
  parallel_for(corpus.documents.size(), c.jobs, [&](std::size_t i) {
    const auto& doc = corpus.documents[i];
    std::ostringstream os;
    std::size_t rank = 0;
    for (const auto& p : top_k(extract_keyphrases(doc, model, cfg, phrase_scoring(c)), c.k)) {
      os << doc.id << '\t' << ++rank << '\t' << p.text() << '\t' << format_double(p.score) << '\n';
    }
    rows[i] = os.str();
  });
  std::ostringstream os;
  os << "# " << header("keyphrases", c) << '\n' << "doc_id\trank\tphrase\tscore\n";
  for (const auto& r : rows) os << r;
  emit(c.output, os.str(), out);
}

inline void cmd_evaluate(const RunConfig& c, std::ostream& out) {
  if (!c.words && c.k < 1) throw ConfigError("--k must be at least 1");
  const auto model = load_model_file(c);
  const auto stop = stoplist(c);
  const auto corpus = load_single(c, stop);
  EvalOptions opt{pipeline(c), phrase_scoring(c), c.jobs};
  const auto report =
      c.words ? evaluate_keywords(corpus, model, stop, opt) : evaluate_keyphrases(corpus, model, stop, c.k, opt);
  const std::string head = "# " + header("evaluate", c) + '\n';
  std::ostringstream table;
  table << head;
  write_report_table(table, report);
  emit(c.output, table.str(), out);
  if (!c.tsv.empty()) {
    std::ostringstream tsv;
    tsv << head;
    write_report_tsv(tsv, report);
    emit(c.tsv, tsv.str(), out);
  }
}

inline void cmd_crossval(const RunConfig& c, std::ostream& out) {
  const auto ts = training_set(c);
  CrossValConfig cv;
  cv.folds = c.folds;
  cv.kind = model_kind(c);
  cv.params = c.params;
  cv.seed = c.seed;
  cv.smote_percentage = c.smote_percentage;
  cv.smote_k = c.smote_k;
  cv.jobs = c.jobs;
  const auto r = cross_validate(ts, cv);
  std::ostringstream os;
  os << "# " << header("crossval", c) << '\n';
  os << "classifier\t" << c.classifier << '\n';
  os << "records\t" << ts.size() << " (positive " << ts.positives() << ")\n";
  os << "tp\t" << r.true_positives << "\nfp\t" << r.false_positives << "\nfn\t" << r.false_negatives << "\ntn\t"
     << r.true_negatives << '\n';
  os << "precision\t" << percent(r.metrics.precision) << "\nrecall\t" << percent(r.metrics.recall) << "\nf1\t"
     << percent(r.metrics.f1) << '\n';
  emit(c.output, os.str(), out);
}

inline void cmd_significance(const RunConfig& c, std::ostream& out) {
  if (c.scores.empty()) throw ConfigError("--scores is required");
  if (c.baseline.has_value() == c.delta.has_value()) throw ConfigError("give exactly one of --baseline or --delta");
  require_file(c.scores, "score file");
  std::istringstream in(read_all(c.scores));
  const auto f1 = read_document_f1(in);
  if (f1.empty()) throw DataError("score file has no document rows: " + c.scores);
  double mean = 0.0;
  for (double v : f1) mean += v;
  mean /= static_cast<double>(f1.size());
  const double delta = c.delta ? *c.delta : mean - *c.baseline;
  const auto r = bootstrap_pvalue(f1, delta, c.samples, c.seed, c.jobs);
  std::ostringstream os;
  os << "# " << header("significance", c) << '\n';
  os << "documents\t" << f1.size() << '\n';
  os << "observed_mean\t" << format_double(r.observed_mean) << '\n';
  os << "delta\t" << format_double(r.delta) << '\n';
  os << "samples\t" << r.samples << '\n';
  os << "exceed\t" << r.exceed_count << '\n';
  os << "p_value\t" << format_double(r.p_value) << '\n';
  os << "bootstrap_mean\t" << format_double(r.bootstrap_mean) << '\n';
  os << "bootstrap_sd\t" << format_double(r.bootstrap_sd) << '\n';
  os << "reject_h0_at_0.05\t" << (r.p_value < 0.05 ? "yes" : "no") << '\n';
  emit(c.output, os.str(), out);
}

inline void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
  sub->add_option("-j,--jobs", c.jobs, "worker threads (0: all cores)")->capture_default_str();
  sub->add_option("-o,--output", c.output, "output file ('-' for stdout)")->capture_default_str();
  sub->add_option("--stoplist", c.stoplist, "stopword file, one word per line (default: built-in English)");
}

inline void add_pipeline(CLI::App* sub, RunConfig& c) {
  sub->add_option("--counting", c.counting, "co-occurrence counting")
      ->check(CLI::IsMember({"type", "instance"}))
      ->capture_default_str();
  sub->add_option("--positions", c.positions, "token stream for the sigma-index: stopwords removed or raw text")
      ->check(CLI::IsMember({"filtered", "raw"}))
      ->capture_default_str();
  sub->add_option("--short-doc", c.short_doc, "documents with fewer unique words keep every word")
      ->capture_default_str();
  sub->add_option("--damping", c.rank.damping, "PageRank damping")->capture_default_str();
  sub->add_option("--alpha", c.rank.alpha, "PositionRank damping")->capture_default_str();
  sub->add_option("--tolerance", c.rank.tolerance, "power iteration tolerance")->capture_default_str();
  sub->add_option("--max-iterations", c.rank.max_iterations, "power iteration cap")->capture_default_str();
}

inline void add_training(CLI::App* sub, RunConfig& c) {
  sub->add_option("--classifier", c.classifier, "nb | nb_bagging | nb_adaboost | gbdt")
      ->check(CLI::IsMember({"nb", "nb_bagging", "nb_adaboost", "gbdt"}))
      ->capture_default_str();
  sub->add_option("--smote", c.smote_percentage, "SMOTE percentage (0 disables)")->capture_default_str();
  sub->add_option("--smote-k", c.smote_k, "SMOTE neighbours")->capture_default_str();
  sub->add_option("--bagging-members", c.params.bagging_members)->capture_default_str();
  sub->add_option("--adaboost-rounds", c.params.adaboost_rounds)->capture_default_str();
  sub->add_option("--trees", c.params.gbdt.trees)->capture_default_str();
  sub->add_option("--depth", c.params.gbdt.max_depth)->capture_default_str();
  sub->add_option("--learning-rate", c.params.gbdt.learning_rate)->capture_default_str();
  sub->add_option("--lambda", c.params.gbdt.lambda)->capture_default_str();
}

}  // namespace detail

// Runs one command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Supervised graph-based keyword and keyphrase extraction", "keygraph"};
  app.set_config("--config", "", "read options from a TOML/INI file; command-line flags win");
  app.require_subcommand(1);

  auto* extract = app.add_subcommand("extract", "dump labeled candidate features");
  auto* train = app.add_subcommand("train", "train a classifier and write a model file");
  auto* predict = app.add_subcommand("predict", "emit predicted keywords per document");
  auto* keyphrases = app.add_subcommand("keyphrases", "emit the top-k keyphrases per document");
  auto* evaluate = app.add_subcommand("evaluate", "macro P/R/F1 against gold keyphrases");
  auto* crossval = app.add_subcommand("crossval", "k-fold cross-validation on the training set");
  auto* significance = app.add_subcommand("significance", "bootstrap p-value over per-document F1");

  for (auto* sub : {extract, train, predict, keyphrases, evaluate, crossval, significance}) detail::add_common(sub, c);
  for (auto* sub : {extract, train, predict, keyphrases, evaluate, crossval}) detail::add_pipeline(sub, c);
  for (auto* sub : {train, crossval}) detail::add_training(sub, c);

  for (auto* sub : {extract, train, crossval}) {
    sub->add_option("-c,--corpus", c.corpora, "corpus directory (*.txt with optional *.key)");
    sub->add_option("--features", c.features, "feature file written by extract");
  }
  for (auto* sub : {predict, keyphrases, evaluate}) {
    sub->add_option("-c,--corpus", c.corpora, "corpus directory")->required();
    sub->add_option("-m,--model", c.model, "model file")->required();
  }
  extract->add_option("--smote", c.extract_smote, "SMOTE percentage (0: unbalanced)")->capture_default_str();
  extract->add_option("--smote-k", c.smote_k, "SMOTE neighbours")->capture_default_str();
  train->add_option("-m,--model", c.model, "model output path");
  crossval->add_option("--folds", c.folds, "number of folds")->capture_default_str();
  for (auto* sub : {keyphrases, evaluate}) {
    sub->add_option("-k,--k", c.k, "phrases per document")->capture_default_str();
    sub->add_option("--scoring", c.scoring, "phrase score from member scores")
        ->check(CLI::IsMember({"mean", "sum", "max"}))
        ->capture_default_str();
  }
  evaluate->add_flag("--words", c.words, "word-level evaluation instead of keyphrases@k");
  evaluate->add_option("--tsv", c.tsv, "also write per-document scores as TSV");
  significance->add_option("--scores", c.scores, "per-document TSV written by evaluate --tsv")->required();
  significance->add_option("--baseline", c.baseline, "baseline macro F1 in [0, 1]");
  significance->add_option("--delta", c.delta, "our macro F1 minus baseline macro F1");
  significance->add_option("-R,--samples", c.samples, "bootstrap resamples")->capture_default_str();

  // Only the first line of any diagnostic reaches the error stream.
  auto diagnose = [&](const std::string& what) {
    err << "keygraph: error: " << what.substr(0, what.find('\n')) << '\n';
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    diagnose(e.what());
    return kUsage;
  }

  log::ScopedSink sink([&](std::string_view msg) { err << "keygraph: warning: " << msg << '\n'; });
  try {
    detail::validate_paths(c);
    auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "extract") detail::cmd_extract(c, out);
    if (name == "train") detail::cmd_train(c, out);
    if (name == "predict") detail::cmd_predict(c, out);
    if (name == "keyphrases") detail::cmd_keyphrases(c, out);
    if (name == "evaluate") detail::cmd_evaluate(c, out);
    if (name == "crossval") detail::cmd_crossval(c, out);
    if (name == "significance") detail::cmd_significance(c, out);
  } catch (const ConfigError& e) {
    diagnose(e.what());
    return kUsage;
  } catch (const Error& e) {
    diagnose(e.what());
    return kData;
  } catch (const std::exception& e) {
    diagnose(std::string("internal: ") + e.what());
    return kInternal;
  }
  return kOk;
}

}  // namespace keygraph::cli
