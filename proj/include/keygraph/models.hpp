#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "keygraph/error.hpp"
#include "keygraph/features.hpp"
#include "keygraph/gbdt.hpp"
#include "keygraph/log.hpp"
#include "keygraph/naive_bayes.hpp"
#include "keygraph/training.hpp"

namespace keygraph {

enum class ModelKind { nb, nb_bagging, nb_adaboost, gbdt };

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::nb: return "nb";
    case ModelKind::nb_bagging: return "nb_bagging";
    case ModelKind::nb_adaboost: return "nb_adaboost";
    case ModelKind::gbdt: return "gbdt";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::nb, ModelKind::nb_bagging, ModelKind::nb_adaboost, ModelKind::gbdt}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct ModelParams {
  int bagging_members = 10;
  int adaboost_rounds = 10;
  GbdtParams gbdt;
};

struct ModelMetadata {
  std::uint64_t seed = 42;
  std::string date = "unspecified";
  std::vector<std::string> corpora;
  std::string config;  // free-form single line describing the run

  friend bool operator==(const ModelMetadata&, const ModelMetadata&) = default;
};

using ModelParameters = std::variant<GaussianNaiveBayes, BaggedNaiveBayes, AdaBoostNaiveBayes, GradientBoostedTrees>;

struct TrainedModel {
  ModelParameters parameters;
  ModelMetadata metadata;

  ModelKind kind() const { return static_cast<ModelKind>(parameters.index()); }

  double positive_probability(const FeatureVector& x) const {
    return std::visit([&](const auto& m) { return m.positive_probability(x); }, parameters);
  }

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

inline TrainedModel train_model(const TrainingSet& ts, ModelKind kind, const ModelParams& params = {},
                                std::uint64_t seed = 42) {
  TrainedModel m;
  m.metadata.seed = seed;
  switch (kind) {
    case ModelKind::nb:
      m.parameters = train_nb(ts);
      break;
    case ModelKind::nb_bagging:
      m.parameters = train_bagged_nb(ts, params.bagging_members, seed);
      break;
    case ModelKind::nb_adaboost:
      m.parameters = train_adaboost_nb(ts, params.adaboost_rounds, seed);
      break;
    case ModelKind::gbdt:
      m.parameters = train_gbdt(ts, params.gbdt);
      break;
  }
  return m;
}

struct Prediction {
  std::string word;
  double score = 0.0;  // probability of the positive class
  Label label = Label::negative;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

inline constexpr double kDecisionThreshold = 0.5;

// Out-of-range features are clamped into [0, 1] with a warning.
inline Prediction predict(const TrainedModel& m, const FeatureVector& fv, std::string word = {}) {
  FeatureVector x = fv;
  bool clamped = false;
  for (double& v : x.values) {
    const double c = std::clamp(v, 0.0, 1.0);
    clamped |= c != v || v != v;
    v = v != v ? 0.0 : c;
  }
  if (clamped) log::warn("feature vector outside [0, 1] clamped before prediction");
  const double score = std::clamp(m.positive_probability(x), 0.0, 1.0);
  return {std::move(word), score, score >= kDecisionThreshold ? Label::positive : Label::negative};
}

// --- serialization ---------------------------------------------------------
//
// Text envelope, one `key value` per line:
//
//   keygraph-model
//   version 1
//   kind <nb|nb_bagging|nb_adaboost|gbdt>
//   features strength eigen pr posr core cc
//   seed <u64>
//   date <string>
//   corpora <name> ...
//   config <string>
//   payload-lines <count>
//   payload-fnv1a64 <16 hex digits>
//   payload
//   <payload lines>
//   end
//
// Payload numbers are C99 hex floats, so values round-trip bit-exactly.

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string hex(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline void write_nb(std::ostream& os, const GaussianNaiveBayes& nb) {
  os << "prior " << hex(nb.prior[0]) << ' ' << hex(nb.prior[1]) << '\n';
  for (std::size_t c = 0; c < 2; ++c) {
    os << "mean " << c;
    for (double v : nb.mean[c].values) os << ' ' << hex(v);
    os << "\nvariance " << c;
    for (double v : nb.variance[c].values) os << ' ' << hex(v);
    os << '\n';
  }
}

inline std::string single_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  return s.empty() ? "-" : s;
}

class PayloadReader {
 public:
  explicit PayloadReader(std::string_view text) : in_(std::string(text)) {}

  std::istringstream& line(std::string_view expected_key) {
    std::string l;
    if (!std::getline(in_, l)) throw ModelFormatError("model payload ended early");
    current_.str(l);
    current_.clear();
    std::string key;
    current_ >> key;
    if (key != expected_key) {
      throw ModelFormatError("expected '" + std::string(expected_key) + "' but found '" + key + "'");
    }
    return current_;
  }

  double number(std::istringstream& s) {
    std::string tok;
    if (!(s >> tok)) throw ModelFormatError("missing number in model payload");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0') throw ModelFormatError("bad number '" + tok + "' in model payload");
    return v;
  }

  long integer(std::istringstream& s) {
    long v = 0;
    if (!(s >> v)) throw ModelFormatError("missing integer in model payload");
    return v;
  }

  GaussianNaiveBayes nb() {
    GaussianNaiveBayes m;
    auto& p = line("prior");
    m.prior = {number(p), number(p)};
    for (std::size_t c = 0; c < 2; ++c) {
      auto& ms = line("mean");
      if (integer(ms) != static_cast<long>(c)) throw ModelFormatError("class index out of order");
      for (double& v : m.mean[c].values) v = number(ms);
      auto& vs = line("variance");
      if (integer(vs) != static_cast<long>(c)) throw ModelFormatError("class index out of order");
      for (double& v : m.variance[c].values) {
        v = number(vs);
        if (!(v > 0.0)) throw ModelFormatError("non-positive variance");
      }
    }
    return m;
  }

 private:
  std::istringstream in_;
  std::istringstream current_;
};

}  // namespace detail

inline std::string save_model(const TrainedModel& m) {
  std::ostringstream payload;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianNaiveBayes>) {
          detail::write_nb(payload, p);
        } else if constexpr (std::is_same_v<T, BaggedNaiveBayes>) {
          payload << "members " << p.members.size() << '\n';
          for (const auto& nb : p.members) detail::write_nb(payload, nb);
        } else if constexpr (std::is_same_v<T, AdaBoostNaiveBayes>) {
          payload << "stages " << p.stages.size() << '\n';
          for (const auto& s : p.stages) {
            payload << "alpha " << detail::hex(s.alpha) << '\n';
            detail::write_nb(payload, s.learner);
          }
        } else {
          payload << "initial " << detail::hex(p.initial_score) << '\n';
          payload << "learning-rate " << detail::hex(p.learning_rate) << '\n';
          payload << "lambda " << detail::hex(p.lambda) << '\n';
          payload << "max-depth " << p.max_depth << '\n';
          payload << "trees " << p.trees.size() << '\n';
          for (const auto& t : p.trees) {
            payload << "tree " << t.nodes.size() << '\n';
            for (const auto& n : t.nodes) {
              payload << "node " << n.feature << ' ' << detail::hex(n.threshold) << ' ' << n.left << ' ' << n.right
                      << ' ' << detail::hex(n.value) << '\n';
            }
          }
        }
      },
      m.parameters);
  const std::string body = payload.str();
  const auto lines = static_cast<std::size_t>(std::count(body.begin(), body.end(), '\n'));

  std::ostringstream os;
  os << "keygraph-model\n";
  os << "version " << kModelFormatVersion << '\n';
  os << "kind " << to_string(m.kind()) << '\n';
  os << "features";
  for (auto name : kFeatureNames) os << ' ' << name;
  os << '\n';
  os << "seed " << m.metadata.seed << '\n';
  os << "date " << detail::single_line(m.metadata.date) << '\n';
  os << "corpora";
  for (const auto& c : m.metadata.corpora) os << ' ' << detail::single_line(c);
  os << '\n';
  os << "config " << detail::single_line(m.metadata.config) << '\n';
  os << "payload-lines " << lines << '\n';
  char digest[24];
  std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(detail::fnv1a(body)));
  os << "payload-fnv1a64 " << digest << '\n';
  os << "payload\n" << body << "end\n";
  return os.str();
}

inline TrainedModel load_model(std::string_view bytes) {
  std::istringstream in{std::string(bytes)};
  std::string line;
  auto next = [&](std::string_view key) -> std::string {
    if (!std::getline(in, line)) throw ModelFormatError("model header truncated");
    if (key.empty()) return line;
    if (line.rfind(std::string(key) + " ", 0) != 0 && line != key) {
      throw ModelFormatError("expected model header field '" + std::string(key) + "'");
    }
    return line.size() > key.size() ? line.substr(key.size() + 1) : std::string();
  };
  if (next("") != "keygraph-model") throw ModelFormatError("not a keygraph model file");
  if (next("version") != std::to_string(kModelFormatVersion)) throw ModelFormatError("unsupported model version");
  const auto kind = parse_model_kind(next("kind"));
  if (!kind) throw ModelFormatError("unknown model kind");
  std::string expected_features;
  for (auto name : kFeatureNames) expected_features += (expected_features.empty() ? "" : " ") + std::string(name);
  if (next("features") != expected_features) throw ModelFormatError("model feature list does not match");

  TrainedModel m;
  try {
    m.metadata.seed = std::stoull(next("seed"));
  } catch (const std::logic_error&) {
    throw ModelFormatError("bad seed in model header");
  }
  m.metadata.date = next("date");
  {
    std::istringstream names(next("corpora"));
    std::string n;
    while (names >> n) m.metadata.corpora.push_back(n);
  }
  m.metadata.config = next("config");
  if (m.metadata.config == "-") m.metadata.config.clear();
  std::size_t lines = 0;
  try {
    lines = std::stoul(next("payload-lines"));
  } catch (const std::logic_error&) {
    throw ModelFormatError("bad payload length");
  }
  const std::string digest = next("payload-fnv1a64");
  next("payload");

  std::string body;
  for (std::size_t i = 0; i < lines; ++i) {
    if (!std::getline(in, line)) throw ModelFormatError("model payload truncated");
    body += line;
    body += '\n';
  }
  if (!std::getline(in, line) || line != "end") throw ModelFormatError("model payload truncated");
  char actual[24];
  std::snprintf(actual, sizeof actual, "%016llx", static_cast<unsigned long long>(detail::fnv1a(body)));
  if (digest != actual) throw ModelFormatError("model payload checksum mismatch");

  detail::PayloadReader r(body);
  switch (*kind) {
    case ModelKind::nb:
      m.parameters = r.nb();
      break;
    case ModelKind::nb_bagging: {
      BaggedNaiveBayes b;
      auto& s = r.line("members");
      const long count = r.integer(s);
      if (count < 1) throw ModelFormatError("bagged model without members");
      for (long i = 0; i < count; ++i) b.members.push_back(r.nb());
      m.parameters = std::move(b);
      break;
    }
    case ModelKind::nb_adaboost: {
      AdaBoostNaiveBayes a;
      auto& s = r.line("stages");
      const long count = r.integer(s);
      if (count < 1) throw ModelFormatError("boosted model without stages");
      for (long i = 0; i < count; ++i) {
        auto& al = r.line("alpha");
        const double alpha = r.number(al);
        if (!std::isfinite(alpha)) throw ModelFormatError("non-finite stage weight");
        a.stages.push_back({r.nb(), alpha});
      }
      m.parameters = std::move(a);
      break;
    }
    case ModelKind::gbdt: {
      GradientBoostedTrees g;
      g.initial_score = r.number(r.line("initial"));
      g.learning_rate = r.number(r.line("learning-rate"));
      g.lambda = r.number(r.line("lambda"));
      g.max_depth = static_cast<int>(r.integer(r.line("max-depth")));
      const long trees = r.integer(r.line("trees"));
      if (trees < 0) throw ModelFormatError("negative tree count");
      for (long t = 0; t < trees; ++t) {
        RegressionTree tree;
        const long nodes = r.integer(r.line("tree"));
        if (nodes < 1) throw ModelFormatError("empty tree");
        for (long k = 0; k < nodes; ++k) {
          auto& s = r.line("node");
          TreeNode n;
          n.feature = static_cast<int>(r.integer(s));
          n.threshold = r.number(s);
          n.left = static_cast<int>(r.integer(s));
          n.right = static_cast<int>(r.integer(s));
          n.value = r.number(s);
          const bool leaf = n.feature < 0;
          if (!leaf && (n.feature >= static_cast<int>(kFeatureCount) || n.left <= k || n.right <= k ||
                        n.left >= nodes || n.right >= nodes)) {
            throw ModelFormatError("malformed tree node");
          }
          tree.nodes.push_back(n);
        }
        if (tree.depth() > g.max_depth) throw ModelFormatError("tree deeper than max-depth");
        g.trees.push_back(std::move(tree));
      }
      m.parameters = std::move(g);
      break;
    }
  }
  return m;
}

}  // namespace keygraph
