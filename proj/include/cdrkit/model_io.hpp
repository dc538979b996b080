#ifndef CDRKIT_MODEL_IO_HPP
#define CDRKIT_MODEL_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cdrkit/model.hpp"
#include "cdrkit/rng.hpp"
#include "cdrkit/text.hpp"

namespace cdrkit {

namespace io_detail {

using nlohmann::json;

inline json to_json(const Mat& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

inline Mat mat_from(const json& j) {
  Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.a = j.at("data").get<Vec>();
  if (m.a.size() != m.rows * m.cols) throw FormatError("model document: matrix size mismatch");
  return m;
}

inline json to_json(const LstmParams& p) {
  return json{{"input_size", p.input_size}, {"hidden_size", p.hidden_size},
              {"wi", to_json(p.wi)},        {"wf", to_json(p.wf)},
              {"wg", to_json(p.wg)},        {"wo", to_json(p.wo)},
              {"ui", to_json(p.ui)},        {"uf", to_json(p.uf)},
              {"ug", to_json(p.ug)},        {"uo", to_json(p.uo)},
              {"bi", p.bi},                 {"bf", p.bf},
              {"bg", p.bg},                 {"bo", p.bo}};
}

inline LstmParams lstm_from(const json& j) {
  LstmParams p(j.at("input_size").get<std::size_t>(), j.at("hidden_size").get<std::size_t>());
  p.wi = mat_from(j.at("wi"));
  p.wf = mat_from(j.at("wf"));
  p.wg = mat_from(j.at("wg"));
  p.wo = mat_from(j.at("wo"));
  p.ui = mat_from(j.at("ui"));
  p.uf = mat_from(j.at("uf"));
  p.ug = mat_from(j.at("ug"));
  p.uo = mat_from(j.at("uo"));
  p.bi = j.at("bi").get<Vec>();
  p.bf = j.at("bf").get<Vec>();
  p.bg = j.at("bg").get<Vec>();
  p.bo = j.at("bo").get<Vec>();
  return p;
}

inline json to_json(const DenseParams& d) {
  return json{{"w", to_json(d.w)}, {"b", d.b}, {"act", to_string(d.act)}};
}

inline DenseParams dense_from(const json& j) {
  DenseParams d;
  d.w = mat_from(j.at("w"));
  d.b = j.at("b").get<Vec>();
  const std::string act = j.at("act").get<std::string>();
  if (act == "softmax")
    d.act = Activation::Softmax;
  else if (act == "relu")
    d.act = Activation::Relu;
  else if (act == "linear")
    d.act = Activation::Linear;
  else
    throw FormatError("model document: unknown activation " + act);
  return d;
}

inline json to_json(const NextCounts& counts) {
  json arr = json::array();
  for (const auto& [label, stat] : counts)
    arr.push_back(json{{"next", label}, {"count", stat.count}, {"last_pos", stat.last_pos}});
  return arr;
}

inline NextCounts next_counts_from(const json& arr) {
  NextCounts out;
  for (const auto& e : arr)
    out[e.at("next").get<std::string>()] = {e.at("count").get<std::uint64_t>(),
                                            e.at("last_pos").get<std::uint64_t>()};
  return out;
}

inline json to_json(const PrepConfig& p) {
  return json{{"method", to_string(p.method)}, {"w", p.w},        {"t", p.t},
              {"t_settle", p.t_settle},        {"t_gap", p.t_gap}};
}

inline PrepConfig prep_from(const json& j) {
  PrepConfig p;
  const std::string m = j.at("method").get<std::string>();
  if (m == "m1") p.method = PrepMethod::M1;
  else if (m == "m2") p.method = PrepMethod::M2;
  else if (m == "m3") p.method = PrepMethod::M3;
  else if (m == "m4") p.method = PrepMethod::M4;
  else throw FormatError("model document: unknown prep method " + m);
  p.w = j.at("w").get<int>();
  p.t = j.at("t").get<std::int64_t>();
  p.t_settle = j.at("t_settle").get<std::int64_t>();
  p.t_gap = j.at("t_gap").get<std::int64_t>();
  return p;
}

inline json to_json(const TrainingConfig& c) {
  return json{{"prep", to_json(c.prep)},
              {"normalizer", to_string(c.normalizer)},
              {"std_divisor", c.std_divisor},
              {"optimizer",
               json{{"kind", to_string(c.opt.kind)},
                    {"lr", c.opt.lr},
                    {"beta1", c.opt.beta1},
                    {"beta2", c.opt.beta2},
                    {"eps", c.opt.eps},
                    {"rho", c.opt.rho}}},
              {"loss", to_string(c.loss)},
              {"batch_size", c.batch_size},
              {"epochs", c.epochs},
              {"stateful", c.stateful},
              {"seed", c.seed},
              {"split", c.split},
              {"markov_order", c.markov_order},
              {"embed_dim", c.embed_dim},
              {"cls_hidden", c.cls_hidden},
              {"reg_hidden1", c.reg_hidden1},
              {"reg_hidden2", c.reg_hidden2},
              {"patience", c.patience},
              {"min_delta", c.min_delta}};
}

inline TrainingConfig config_from(const json& j) {
  TrainingConfig c;
  c.prep = prep_from(j.at("prep"));
  const std::string nk = j.at("normalizer").get<std::string>();
  if (nk == "minmax") c.normalizer = NormKind::MinMax;
  else if (nk == "variance") c.normalizer = NormKind::Variance;
  else throw FormatError("model document: unknown normalizer " + nk);
  c.std_divisor = j.at("std_divisor").get<bool>();
  const json& o = j.at("optimizer");
  const std::string ok = o.at("kind").get<std::string>();
  if (ok == "sgd") c.opt.kind = OptKind::Sgd;
  else if (ok == "adagrad") c.opt.kind = OptKind::AdaGrad;
  else if (ok == "rmsprop") c.opt.kind = OptKind::RmsProp;
  else if (ok == "adam") c.opt.kind = OptKind::Adam;
  else throw FormatError("model document: unknown optimizer " + ok);
  c.opt.lr = o.at("lr").get<double>();
  c.opt.beta1 = o.at("beta1").get<double>();
  c.opt.beta2 = o.at("beta2").get<double>();
  c.opt.eps = o.at("eps").get<double>();
  c.opt.rho = o.at("rho").get<double>();
  const std::string lk = j.at("loss").get<std::string>();
  c.loss = lk == "mse" ? LossKind::Mse : LossKind::Mae;
  c.batch_size = j.at("batch_size").get<int>();
  c.epochs = j.at("epochs").get<int>();
  c.stateful = j.at("stateful").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.split = j.at("split").get<double>();
  c.markov_order = j.at("markov_order").get<int>();
  c.embed_dim = j.at("embed_dim").get<int>();
  c.cls_hidden = j.at("cls_hidden").get<int>();
  c.reg_hidden1 = j.at("reg_hidden1").get<int>();
  c.reg_hidden2 = j.at("reg_hidden2").get<int>();
  c.patience = j.at("patience").get<int>();
  c.min_delta = j.at("min_delta").get<double>();
  return c;
}

inline json to_json(const AxisNorm& a) {
  return json{{"min", a.min}, {"max", a.max}, {"mean", a.mean},
              {"var", a.var}, {"degenerate", a.degenerate}};
}

inline AxisNorm axis_from(const json& j) {
  AxisNorm a;
  a.min = j.at("min").get<double>();
  a.max = j.at("max").get<double>();
  a.mean = j.at("mean").get<double>();
  a.var = j.at("var").get<double>();
  a.degenerate = j.at("degenerate").get<bool>();
  return a;
}

}  // namespace io_detail

/// The model document without its checksum field.
inline nlohmann::json model_to_json_unchecked(const PersistedModel& m) {
  using io_detail::to_json;
  nlohmann::json j;
  j["format_version"] = m.format_version;
  j["model_kind"] = to_string(m.kind);
  j["source_user"] = m.source_user;
  j["config"] = to_json(m.config);
  j["summary"] = nlohmann::json{{"initial_loss", m.summary.initial_loss},
                                {"final_loss", m.summary.final_loss},
                                {"epochs_run", m.summary.epochs_run},
                                {"train_samples", m.summary.train_samples},
                                {"degenerate_axis", m.summary.degenerate_axis}};
  nlohmann::json coords = nlohmann::json::object();
  for (const auto& [label, ll] : m.label_coords)
    coords[label] = nlohmann::json::array({ll.first, ll.second});
  j["label_coords"] = std::move(coords);
  j["vocabulary"] = m.vocabulary;

  switch (m.kind) {
    case ModelKind::Mfnv: {
      nlohmann::json table = nlohmann::json::array();
      for (const auto& [cur, counts] : m.mfnv->table)
        table.push_back(nlohmann::json{{"current", cur}, {"next", to_json(counts)}});
      j["params"] = nlohmann::json{{"table", std::move(table)},
                                   {"global", to_json(m.mfnv->global)},
                                   {"transitions", m.mfnv->transitions}};
      break;
    }
    case ModelKind::Markov: {
      nlohmann::json orders = nlohmann::json::array();
      for (const auto& states : m.markov->by_order) {
        nlohmann::json level = nlohmann::json::array();
        for (const auto& [key, counts] : states)
          level.push_back(nlohmann::json{{"state", key}, {"next", to_json(counts)}});
        orders.push_back(std::move(level));
      }
      j["params"] = nlohmann::json{{"order", m.markov->order},
                                   {"orders", std::move(orders)},
                                   {"global", to_json(m.markov->global)},
                                   {"transitions", m.markov->transitions}};
      break;
    }
    case ModelKind::ClassifierRnn:
      j["params"] = nlohmann::json{{"embedding", to_json(m.classifier->emb.table)},
                                   {"lstm", to_json(m.classifier->lstm)},
                                   {"dense", to_json(m.classifier->out)}};
      break;
    case ModelKind::RegressorRnn:
      j["params"] = nlohmann::json{{"lstm1", to_json(m.regressor->l1)},
                                   {"lstm2", to_json(m.regressor->l2)},
                                   {"dense", to_json(m.regressor->out)}};
      j["normalizer"] = nlohmann::json{{"kind", to_string(m.normalizer.kind)},
                                       {"std_divisor", m.normalizer.std_divisor},
                                       {"lat", to_json(m.normalizer.lat)},
                                       {"lon", to_json(m.normalizer.lon)}};
      break;
  }
  return j;
}

/// Serialized model document: self-describing JSON with a format version and
/// an fnv1a64 content checksum over the checksum-less serialization.
inline std::string model_document(const PersistedModel& m) {
  nlohmann::json j = model_to_json_unchecked(m);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a64(j.dump())));
  j["checksum"] = std::string("fnv1a64:") + hex;
  return j.dump(1) + "\n";
}

inline PersistedModel model_from_document(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model document: ") + e.what());
  }
  try {
    const int version = j.at("format_version").get<int>();
    if (version != 1)
      throw FormatError("model document: unsupported format_version " + std::to_string(version));
    const std::string stored = j.at("checksum").get<std::string>();
    j.erase("checksum");
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(j.dump())));
    if (stored != std::string("fnv1a64:") + hex)
      throw ChecksumError("model document: checksum mismatch");

    PersistedModel m;
    m.format_version = version;
    m.kind = model_kind_from(j.at("model_kind").get<std::string>());
    m.source_user = j.at("source_user").get<std::string>();
    m.config = io_detail::config_from(j.at("config"));
    const auto& s = j.at("summary");
    m.summary.initial_loss = s.at("initial_loss").get<double>();
    m.summary.final_loss = s.at("final_loss").get<double>();
    m.summary.epochs_run = s.at("epochs_run").get<int>();
    m.summary.train_samples = s.at("train_samples").get<std::size_t>();
    m.summary.degenerate_axis = s.at("degenerate_axis").get<bool>();
    for (const auto& [label, arr] : j.at("label_coords").items())
      m.label_coords[label] = {arr.at(0).get<double>(), arr.at(1).get<double>()};
    m.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();

    const auto& p = j.at("params");
    switch (m.kind) {
      case ModelKind::Mfnv: {
        FrequencyTable ft;
        for (const auto& e : p.at("table"))
          ft.table[e.at("current").get<std::string>()] =
              io_detail::next_counts_from(e.at("next"));
        ft.global = io_detail::next_counts_from(p.at("global"));
        ft.transitions = p.at("transitions").get<std::uint64_t>();
        m.mfnv = std::move(ft);
        break;
      }
      case ModelKind::Markov: {
        MarkovModel mk;
        mk.order = p.at("order").get<int>();
        for (const auto& level : p.at("orders")) {
          std::map<std::string, NextCounts> states;
          for (const auto& e : level)
            states[e.at("state").get<std::string>()] = io_detail::next_counts_from(e.at("next"));
          mk.by_order.push_back(std::move(states));
        }
        mk.global = io_detail::next_counts_from(p.at("global"));
        mk.transitions = p.at("transitions").get<std::uint64_t>();
        m.markov = std::move(mk);
        break;
      }
      case ModelKind::ClassifierRnn: {
        ClassifierNet net;
        net.emb.table = io_detail::mat_from(p.at("embedding"));
        net.lstm = io_detail::lstm_from(p.at("lstm"));
        net.out = io_detail::dense_from(p.at("dense"));
        m.classifier = std::move(net);
        break;
      }
      case ModelKind::RegressorRnn: {
        RegressorNet net;
        net.l1 = io_detail::lstm_from(p.at("lstm1"));
        net.l2 = io_detail::lstm_from(p.at("lstm2"));
        net.out = io_detail::dense_from(p.at("dense"));
        m.regressor = std::move(net);
        const auto& n = j.at("normalizer");
        const std::string nk = n.at("kind").get<std::string>();
        m.normalizer.kind = nk == "minmax" ? NormKind::MinMax : NormKind::Variance;
        m.normalizer.std_divisor = n.at("std_divisor").get<bool>();
        m.normalizer.lat = io_detail::axis_from(n.at("lat"));
        m.normalizer.lon = io_detail::axis_from(n.at("lon"));
        break;
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("model document: ") + e.what());
  }
}

inline void save_model(const std::string& path, const PersistedModel& m) {
  write_file_atomic(path, model_document(m));
}

inline PersistedModel load_model(const std::string& path) {
  return model_from_document(read_file(path));
}

}  // namespace cdrkit

#endif  // CDRKIT_MODEL_IO_HPP
