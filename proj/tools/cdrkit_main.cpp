// cdrkit command-line interface: synth, ingest, prepare, train, predict,
// evaluate, gridsearch, compare. Every run writes its artifacts plus a
// manifest (resolved configuration, input digests, seed, outputs, duration)
// into the --out directory; rerunning with the same manifest inputs
// reproduces the outputs bit for bit.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <cdrkit/cdrkit.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string cdr, cells, out, user;
  std::string delimiter = ",";
  std::string tz = "UTC";
  std::string country_code = "98";
  std::uint64_t seed = 42;
};

struct TrainOpts {
  std::string method = "m3";
  int w = 0;
  std::int64_t t_seconds = 3600;
  std::int64_t t_settle = 0;
  std::int64_t t_gap = 0;
  std::string model = "reg-rnn";
  int markov_order = 2;
  std::string normalizer = "minmax";
  bool std_divisor = false;
  std::string optimizer = "adam";
  double lr = 1e-3;
  int epochs = 200;
  int batch = 1;
  bool stateful = true;
  double split = 0.5;
  int embed_dim = 16;
  int cls_hidden = 64;
  int hidden1 = 32;
  int hidden2 = 32;
  int patience = 20;
  double min_delta = 1e-6;
};

class Manifest {
 public:
  Manifest(std::string command, std::string out_dir)
      : command_(std::move(command)), out_dir_(std::move(out_dir)), start_(clock::now()) {
    fs::create_directories(out_dir_);
  }

  void input(const std::string& path) {
    inputs_[path] = digest(path);
  }
  void config(const std::string& key, const json& value) { config_[key] = value; }
  void seed(std::uint64_t s) { seed_ = s; }

  std::string emit(const std::string& name, const std::string& content) {
    const std::string path = (fs::path(out_dir_) / name).string();
    cdrkit::write_file_atomic(path, content);
    outputs_.push_back(name);
    return path;
  }

  void finish() {
    const auto ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - start_).count();
    json j;
    j["format_version"] = 1;
    j["command"] = command_;
    j["config"] = config_;
    j["inputs"] = inputs_;
    j["seed"] = seed_;
    j["outputs"] = outputs_;
    j["duration_ms"] = ms;
    cdrkit::write_file_atomic((fs::path(out_dir_) / "manifest.json").string(), j.dump(1) + "\n");
  }

  const std::string& dir() const { return out_dir_; }

 private:
  using clock = std::chrono::steady_clock;

  static std::string digest(const std::string& path) {
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx",
                  static_cast<unsigned long long>(cdrkit::fnv1a64(cdrkit::read_file(path))));
    return std::string("fnv1a64:") + hex;
  }

  std::string command_;
  std::string out_dir_;
  clock::time_point start_;
  json config_ = json::object();
  std::map<std::string, std::string> inputs_;
  std::vector<std::string> outputs_;
  std::uint64_t seed_ = 0;
};

cdrkit::PrepMethod parse_method(const std::string& m) {
  if (m == "m1") return cdrkit::PrepMethod::M1;
  if (m == "m2") return cdrkit::PrepMethod::M2;
  if (m == "m3") return cdrkit::PrepMethod::M3;
  if (m == "m4") return cdrkit::PrepMethod::M4;
  throw CLI::ValidationError("--method", "must be one of m1,m2,m3,m4");
}

cdrkit::TrainingConfig to_training_config(const TrainOpts& t, std::uint64_t seed) {
  cdrkit::TrainingConfig cfg;
  cfg.prep.method = parse_method(t.method);
  cfg.prep.w = t.w;
  cfg.prep.t = t.t_seconds;
  cfg.prep.t_settle = t.t_settle;
  cfg.prep.t_gap = t.t_gap;
  cfg.normalizer = t.normalizer == "variance" ? cdrkit::NormKind::Variance
                                              : cdrkit::NormKind::MinMax;
  cfg.std_divisor = t.std_divisor;
  if (t.optimizer == "sgd") cfg.opt.kind = cdrkit::OptKind::Sgd;
  else if (t.optimizer == "adagrad") cfg.opt.kind = cdrkit::OptKind::AdaGrad;
  else if (t.optimizer == "rmsprop") cfg.opt.kind = cdrkit::OptKind::RmsProp;
  else cfg.opt.kind = cdrkit::OptKind::Adam;
  cfg.opt.lr = t.lr;
  cfg.epochs = t.epochs;
  cfg.batch_size = t.batch;
  cfg.stateful = t.stateful;
  cfg.split = t.split;
  cfg.seed = seed;
  cfg.markov_order = t.markov_order;
  cfg.embed_dim = t.embed_dim;
  cfg.cls_hidden = t.cls_hidden;
  cfg.reg_hidden1 = t.hidden1;
  cfg.reg_hidden2 = t.hidden2;
  cfg.patience = t.patience;
  cfg.min_delta = t.min_delta;
  return cfg;
}

json training_config_json(const cdrkit::TrainingConfig& cfg) {
  return cdrkit::io_detail::to_json(cfg);
}

/// The needed --w / --t flags must accompany the chosen method.
void check_method_flags(const cdrkit::TrainingConfig& cfg, bool classifier_needs_w) {
  const bool needs_w = classifier_needs_w || cfg.prep.uses_w();
  if (needs_w && cfg.prep.w < 2)
    throw CLI::ValidationError("--w", "window length (events) >= 2 required for this run");
  if (cfg.prep.uses_t() && cfg.prep.settle_timespan() <= 0)
    throw CLI::ValidationError("--t-seconds", "settlement/gap timespan (seconds) > 0 required");
}

char delim_of(const CommonOpts& common) {
  if (common.delimiter.size() != 1)
    throw CLI::ValidationError("--delimiter", "must be a single character");
  return common.delimiter[0];
}

cdrkit::UserProfile load_profile(const CommonOpts& common, Manifest& manifest) {
  manifest.input(common.cdr);
  manifest.input(common.cells);
  auto res = cdrkit::ingest(common.cdr, common.cells, common.country_code, delim_of(common),
                            cdrkit::parse_utc_offset(common.tz));
  if (res.profiles.empty()) throw cdrkit::InsufficientDataError("no complete user profiles in input");
  if (common.user.empty()) {
    if (res.profiles.size() > 1)
      throw cdrkit::Error("input holds " + std::to_string(res.profiles.size()) +
                          " users; pick one with --user");
    return res.profiles[0];
  }
  const auto canon = cdrkit::canonical_user_id(common.user, common.country_code);
  for (auto& p : res.profiles)
    if (p.user_id == common.user || (canon && p.user_id == *canon)) return std::move(p);
  throw cdrkit::Error("user not found in input: " + common.user);
}

std::vector<double> parse_double_list(const std::string& csv, const char* flag) {
  std::vector<double> out;
  for (const auto& field : cdrkit::split_fields(csv, ',')) {
    auto v = cdrkit::parse_double(field);
    if (!v) throw CLI::ValidationError(flag, "bad number: " + field);
    out.push_back(*v);
  }
  return out;
}

void add_common_flags(CLI::App* cmd, CommonOpts& common, bool needs_input = true) {
  cmd->add_option("--cdr", common.cdr, "CDR input file (delimited text)")->required(needs_input);
  cmd->add_option("--cells", common.cells, "cell-site table: mcc,mnc,lac,cell,lat,lon")
      ->required(needs_input);
  cmd->add_option("--out", common.out, "run directory for outputs and manifest")->required();
  cmd->add_option("--user", common.user, "user ID to work on (any raw format)");
  cmd->add_option("--delimiter", common.delimiter, "input field delimiter (default ,)");
  cmd->add_option("--tz", common.tz, "input timezone as +HH:MM/-HH:MM (default UTC)");
  cmd->add_option("--country-code", common.country_code,
                  "default country code digits for ID canonicalization");
  cmd->add_option("--seed", common.seed, "seed for all randomness (recorded in the manifest)");
}

void add_train_flags(CLI::App* cmd, TrainOpts& t) {
  cmd->add_option("--method", t.method, "preparation method: m1,m2,m3,m4")
      ->check(CLI::IsMember({"m1", "m2", "m3", "m4"}));
  cmd->add_option("--w", t.w, "window length in events (m2/m4, classifier)");
  cmd->add_option("--t-seconds", t.t_seconds, "settlement/gap timespan in seconds (m3/m4)");
  cmd->add_option("--t-settle", t.t_settle, "override settlement timespan in seconds");
  cmd->add_option("--t-gap", t.t_gap, "override slicing gap in seconds");
  cmd->add_option("--model", t.model, "model kind")
      ->check(CLI::IsMember({"mfnv", "markov", "cls-rnn", "reg-rnn"}));
  cmd->add_option("--markov-order", t.markov_order, "markov history length k");
  cmd->add_option("--normalizer", t.normalizer, "coordinate normalizer")
      ->check(CLI::IsMember({"minmax", "variance"}));
  cmd->add_flag("--std-divisor", t.std_divisor,
                "variance scaling divides by sigma instead of sigma^2");
  cmd->add_option("--optimizer", t.optimizer, "gradient optimizer")
      ->check(CLI::IsMember({"sgd", "adagrad", "rmsprop", "adam"}));
  cmd->add_option("--lr", t.lr, "learning rate");
  cmd->add_option("--epochs", t.epochs, "training epochs (early stop on loss plateau)");
  cmd->add_option("--patience", t.patience, "epochs without improvement before stopping");
  cmd->add_option("--min-delta", t.min_delta, "smallest loss improvement that counts");
  cmd->add_option("--batch", t.batch, "mini-batch size (consecutive samples, never shuffled)");
  cmd->add_option("--stateful", t.stateful,
                  "carry recurrent state across batches within an epoch (true/false)");
  cmd->add_option("--split", t.split, "train fraction of the chronological split");
  cmd->add_option("--embed-dim", t.embed_dim, "classifier embedding width");
  cmd->add_option("--cls-hidden", t.cls_hidden, "classifier hidden size");
  cmd->add_option("--hidden1", t.hidden1, "regressor first hidden size");
  cmd->add_option("--hidden2", t.hidden2, "regressor second hidden size");
}

int run_synth(const CommonOpts& common, const cdrkit::CommuterSpec& spec) {
  Manifest manifest("synth", common.out);
  manifest.seed(spec.seed);
  manifest.config("days", spec.days);
  manifest.config("skip_probability", spec.skip_probability);
  manifest.config("route_policy", cdrkit::to_string(spec.policy));
  manifest.config("stationary_rate_per_hour", spec.stationary_rate_per_hour);
  manifest.config("work_serving_random", spec.work_serving_random);
  auto out = cdrkit::generate(spec);
  manifest.emit("cdr.csv", cdrkit::format_cdr_file(out.records));
  manifest.emit("cells.csv", cdrkit::format_cells_file(out.sites));
  manifest.finish();
  std::cout << "wrote " << out.records.size() << " records over " << spec.days << " days to "
            << manifest.dir() << "\n";
  return 0;
}

int run_ingest(const CommonOpts& common) {
  Manifest manifest("ingest", common.out);
  manifest.seed(common.seed);
  manifest.input(common.cdr);
  manifest.input(common.cells);
  auto res = cdrkit::ingest(common.cdr, common.cells, common.country_code, delim_of(common),
                            cdrkit::parse_utc_offset(common.tz));

  std::string rejects = "row_number,reason,raw\n";
  for (const auto& r : res.rejects)
    rejects += std::to_string(r.row_number) + "," + r.reason + "," + r.raw + "\n";
  manifest.emit("rejects.csv", rejects);

  const auto& s = res.summary;
  std::string summary = "key,value\n";
  summary += "parsed," + std::to_string(s.parsed) + "\n";
  summary += "parse_rejects," + std::to_string(s.parse_rejects) + "\n";
  summary += "duplicates_removed," + std::to_string(s.duplicates_removed) + "\n";
  summary += "incomplete_removed," + std::to_string(s.incomplete_removed) + "\n";
  summary += "unify_rejects," + std::to_string(s.unify_rejects) + "\n";
  summary += "unresolved," + std::to_string(s.unresolved) + "\n";
  summary += "events," + std::to_string(s.events) + "\n";
  summary += "users," + std::to_string(s.users) + "\n";
  manifest.emit("summary.csv", summary);

  for (const auto& p : res.profiles) {
    std::string body = "t,label,lat,lon\n";
    for (const auto& ev : p.events)
      body += std::to_string(ev.t) + "," + ev.label + "," + cdrkit::format_double(ev.lat) + "," +
              cdrkit::format_double(ev.lon) + "\n";
    manifest.emit("profile_" + p.user_id + ".csv", body);
  }
  manifest.finish();
  std::cout << "profiled " << s.users << " user(s), " << s.events << " events ("
            << s.parse_rejects + s.unify_rejects << " rejects, " << s.duplicates_removed
            << " duplicates, " << s.incomplete_removed << " incomplete, " << s.unresolved
            << " unresolved)\n";
  return 0;
}

int run_prepare(const CommonOpts& common, const TrainOpts& topts) {
  Manifest manifest("prepare", common.out);
  manifest.seed(common.seed);
  auto cfg = to_training_config(topts, common.seed);
  check_method_flags(cfg, false);
  manifest.config("training", training_config_json(cfg));
  const auto profile = load_profile(common, manifest);
  auto [train_events, test_events] = cdrkit::split_train_test(profile.events, cfg.split);

  const auto train = cdrkit::prepare(train_events, cfg.prep, profile.user_id);
  manifest.emit("train_samples.tsv", cdrkit::format_prepared(train));
  std::string test_note;
  try {
    const auto test = cdrkit::prepare(test_events, cfg.prep, profile.user_id);
    manifest.emit("test_samples.tsv", cdrkit::format_prepared(test));
    test_note = std::to_string(test.samples.size());
  } catch (const cdrkit::InsufficientDataError&) {
    test_note = "0 (insufficient data)";
  }
  manifest.finish();
  std::cout << "prepared " << train.samples.size() << " train samples (dropped "
            << train.dropped_singletons << " singletons), " << test_note << " test samples\n";
  return 0;
}

cdrkit::PersistedModel train_any(const cdrkit::UserProfile& profile,
                                 const cdrkit::TrainingConfig& cfg, const std::string& kind) {
  if (kind == "mfnv") return cdrkit::train_baseline(profile, cdrkit::ModelKind::Mfnv, cfg);
  if (kind == "markov") return cdrkit::train_baseline(profile, cdrkit::ModelKind::Markov, cfg);
  if (kind == "cls-rnn") return cdrkit::train_classifier(profile, cfg);
  return cdrkit::train_regressor(profile, cfg);
}

int run_train(const CommonOpts& common, const TrainOpts& topts) {
  Manifest manifest("train", common.out);
  manifest.seed(common.seed);
  auto cfg = to_training_config(topts, common.seed);
  check_method_flags(cfg, topts.model == "cls-rnn");
  manifest.config("model", topts.model);
  manifest.config("training", training_config_json(cfg));
  const auto profile = load_profile(common, manifest);

  const auto model = train_any(profile, cfg, topts.model);
  manifest.emit("model.json", cdrkit::model_document(model));
  if (!model.summary.loss_log.empty())
    manifest.emit("training_log.csv", cdrkit::format_loss_log(model.summary));
  manifest.finish();
  std::cout << "trained " << topts.model << " on " << model.summary.train_samples
            << " samples";
  if (!model.summary.loss_log.empty())
    std::cout << "; final loss " << cdrkit::format_double(model.summary.final_loss) << " after "
              << model.summary.epochs_run << " epochs";
  std::cout << "\n";
  return 0;
}

int run_predict(const std::string& model_file, const std::string& history_file,
                const std::string& out_dir) {
  const auto model = cdrkit::load_model(model_file);
  const auto lines = cdrkit::read_lines(history_file);
  if (lines.size() < 2) throw cdrkit::InsufficientDataError("history file has no events");
  std::vector<cdrkit::LocationEvent> history;
  const auto header = cdrkit::split_fields(lines[0], ',');
  if (header != std::vector<std::string>{"t", "label", "lat", "lon"})
    throw cdrkit::FormatError("history header must be: t,label,lat,lon");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = cdrkit::split_fields(lines[i], ',');
    if (f.size() != 4) throw cdrkit::FormatError("history row " + std::to_string(i));
    cdrkit::LocationEvent ev;
    ev.t = cdrkit::parse_int64(f[0]).value_or(0);
    ev.label = f[1];
    ev.lat = cdrkit::parse_double(f[2]).value_or(0.0);
    ev.lon = cdrkit::parse_double(f[3]).value_or(0.0);
    history.push_back(std::move(ev));
  }
  const auto [lat, lon] = cdrkit::predict_next(model, history);
  const std::string line = cdrkit::format_double(lat) + "," + cdrkit::format_double(lon);
  std::cout << line << "\n";
  if (!out_dir.empty()) {
    Manifest manifest("predict", out_dir);
    manifest.input(model_file);
    manifest.input(history_file);
    manifest.seed(model.config.seed);
    manifest.emit("prediction.csv", "lat,lon\n" + line + "\n");
    manifest.finish();
  }
  return 0;
}

int run_evaluate(const CommonOpts& common, const std::string& model_file,
                 const std::string& thresholds_csv) {
  Manifest manifest("evaluate", common.out);
  manifest.input(model_file);
  const auto model = cdrkit::load_model(model_file);
  manifest.seed(model.config.seed);
  CommonOpts selected = common;
  if (selected.user.empty()) selected.user = model.source_user;  // the user it was trained on
  const auto profile = load_profile(selected, manifest);

  const auto test = cdrkit::make_test_set(profile, model);
  const auto report = cdrkit::evaluate(model, test.data, test.removed_unknown);
  manifest.emit("report.csv", cdrkit::format_report(report));
  manifest.emit("trace.csv", cdrkit::format_trace(model, test.data));
  manifest.emit("lines.csv", cdrkit::format_lines(model, test.data));
  const auto curve = cdrkit::threshold_curve(report, parse_double_list(thresholds_csv, "--thresholds"));
  manifest.emit("threshold_curve.csv", cdrkit::format_curve(curve));
  manifest.finish();
  std::cout << "evaluated " << report.samples << " samples: mean "
            << cdrkit::format_double(report.mean_m) << " m, median "
            << cdrkit::format_double(report.median_m) << " m\n";
  return 0;
}

int run_gridsearch(const CommonOpts& common, const TrainOpts& topts,
                   const std::string& t_grid_csv, const std::string& w_grid_csv, int jobs) {
  Manifest manifest("gridsearch", common.out);
  manifest.seed(common.seed);
  auto cfg = to_training_config(topts, common.seed);
  manifest.config("training", training_config_json(cfg));
  manifest.config("t_grid", t_grid_csv);
  manifest.config("w_grid", w_grid_csv);
  manifest.config("jobs", jobs);
  const auto profile = load_profile(common, manifest);

  std::vector<std::int64_t> t_values;
  for (double v : parse_double_list(t_grid_csv, "--t-grid"))
    t_values.push_back(static_cast<std::int64_t>(v));
  std::vector<int> w_values;
  for (double v : parse_double_list(w_grid_csv, "--w-grid"))
    w_values.push_back(static_cast<int>(v));

  const auto grid = cdrkit::grid_search(profile, t_values, w_values, cfg, jobs);
  manifest.emit("grid.csv", cdrkit::format_grid(grid));
  std::string best = "key,value\n";
  if (grid.best()) {
    best += "t_seconds," + std::to_string(grid.best()->t) + "\n";
    best += "w," + std::to_string(grid.best()->w) + "\n";
    best += "mean_error_m," + cdrkit::format_double(grid.best()->mean_m) + "\n";
  } else {
    best += "note,no cell had enough data\n";
  }
  manifest.emit("best.csv", best);
  manifest.finish();
  if (grid.best())
    std::cout << "best cell: t=" << grid.best()->t << "s w=" << grid.best()->w << " mean "
              << cdrkit::format_double(grid.best()->mean_m) << " m\n";
  else
    std::cout << "no grid cell had enough data\n";
  return 0;
}

int run_compare(const CommonOpts& common, const TrainOpts& topts, int jobs) {
  Manifest manifest("compare", common.out);
  manifest.seed(common.seed);
  auto cfg = to_training_config(topts, common.seed);
  check_method_flags(cfg, true);  // the classifier row always needs w
  manifest.config("training", training_config_json(cfg));
  manifest.config("jobs", jobs);
  const auto profile = load_profile(common, manifest);

  const auto rows = cdrkit::compare_models(profile, cfg, jobs);
  manifest.emit("compare.csv", cdrkit::format_compare(rows));
  manifest.finish();
  for (const auto& r : rows) {
    std::cout << r.model << ": ";
    if (r.ok)
      std::cout << cdrkit::format_double(r.mean_m) << " m mean over " << r.samples << " samples\n";
    else
      std::cout << "failed: " << r.error << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "cdrkit: next-location prediction over call detail records.\n"
      "Pipeline: synth -> ingest -> train -> evaluate / gridsearch / compare."};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override it");

  CommonOpts common;
  TrainOpts topts;
  cdrkit::CommuterSpec spec;

  // synth
  auto* synth = app.add_subcommand("synth", "generate a reproducible synthetic CDR corpus");
  synth->add_option("--out", common.out, "output directory")->required();
  synth->add_option("--days", spec.days, "number of simulated days");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--skip-prob", spec.skip_probability,
                    "probability a tower passage goes unobserved");
  synth->add_option("--stationary-rate", spec.stationary_rate_per_hour,
                    "calls per hour while settled");
  synth->add_option("--moving-rate", spec.moving_extra_rate_per_hour,
                    "extra calls per hour while passing a tower");
  synth->add_option("--jitter", spec.jitter_seconds, "departure/return jitter in seconds");
  std::string policy = "alternate";
  synth->add_option("--route-policy", policy, "route choice per day")
      ->check(CLI::IsMember({"alternate", "random", "fixed"}));
  bool work_fixed = false;
  synth->add_flag("--work-fixed", work_fixed,
                  "serve every work call from one tower instead of the cluster");
  bool weekends_home = false;
  synth->add_flag("--weekends-home", weekends_home, "spend Saturday/Sunday at home");
  synth->callback([&] {
    spec.policy = policy == "random"
                      ? cdrkit::RoutePolicy::RandomPerDay
                      : (policy == "fixed" ? cdrkit::RoutePolicy::Fixed
                                           : cdrkit::RoutePolicy::Alternate);
    spec.work_serving_random = !work_fixed;
    spec.weekends_at_home = weekends_home;
  });

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "clean raw CDR files and build user profiles");
  add_common_flags(ingest_cmd, common);

  // prepare
  auto* prepare_cmd =
      app.add_subcommand("prepare", "turn one user's events into (input, target) samples");
  add_common_flags(prepare_cmd, common);
  add_train_flags(prepare_cmd, topts);

  // train
  auto* train_cmd = app.add_subcommand("train", "train a predictor and persist the model");
  add_common_flags(train_cmd, common);
  add_train_flags(train_cmd, topts);

  // predict
  auto* predict_cmd =
      app.add_subcommand("predict", "predict the next location for a history file");
  std::string model_file, history_file;
  predict_cmd->add_option("--model-file", model_file, "persisted model document")->required();
  predict_cmd->add_option("--history", history_file, "history file: t,label,lat,lon")->required();
  predict_cmd->add_option("--out", common.out, "optional run directory");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "score a trained model on the test split");
  add_common_flags(eval_cmd, common);
  eval_cmd->add_option("--model-file", model_file, "persisted model document")->required();
  std::string thresholds = "100,250,500,1000,2500,5000,10000";
  eval_cmd->add_option("--thresholds", thresholds,
                       "accuracy thresholds in meters, comma-separated ascending");

  // gridsearch
  auto* grid_cmd =
      app.add_subcommand("gridsearch", "train+evaluate the regressor over a (t, w) grid");
  add_common_flags(grid_cmd, common);
  add_train_flags(grid_cmd, topts);
  std::string t_grid = "900,1800,3600,7200,14400";  // 15..240 minutes
  std::string w_grid = "2,3,5,8,12";
  int jobs = 1;
  grid_cmd->add_option("--t-grid", t_grid, "settlement timespans in seconds, comma-separated");
  grid_cmd->add_option("--w-grid", w_grid, "window lengths in events, comma-separated");
  grid_cmd->add_option("--jobs", jobs, "parallel cells");

  // compare
  auto* compare_cmd =
      app.add_subcommand("compare", "meter-error table across all four model kinds");
  add_common_flags(compare_cmd, common);
  add_train_flags(compare_cmd, topts);
  compare_cmd->add_option("--jobs", jobs, "parallel model rows");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return run_synth(common, spec);
    if (ingest_cmd->parsed()) return run_ingest(common);
    if (prepare_cmd->parsed()) return run_prepare(common, topts);
    if (train_cmd->parsed()) return run_train(common, topts);
    if (predict_cmd->parsed()) return run_predict(model_file, history_file, common.out);
    if (eval_cmd->parsed()) return run_evaluate(common, model_file, thresholds);
    if (grid_cmd->parsed()) return run_gridsearch(common, topts, t_grid, w_grid, jobs);
    if (compare_cmd->parsed()) return run_compare(common, topts, jobs);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const cdrkit::InsufficientDataError& e) {
    std::cerr << "error: insufficient-data: " << e.what() << "\n";
    return 1;
  } catch (const cdrkit::ChecksumError& e) {
    std::cerr << "error: checksum: " << e.what() << "\n";
    return 1;
  } catch (const cdrkit::FormatError& e) {
    std::cerr << "error: format: " << e.what() << "\n";
    return 1;
  } catch (const cdrkit::DivergenceError& e) {
    std::cerr << "error: divergence: " << e.what() << "\n";
    return 1;
  } catch (const cdrkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
