// Copyright 2026 The SCMA-AUD Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scma/harness.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "scma/error.hpp"

namespace scma {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bump when a change alters cached datasets or models.
constexpr const char* kCacheVersion = "scma-aud-cache-1";

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_json(const json& j) { return tag_of(j.dump()); }

std::uint64_t hash_matrix(const CMatrix& m) {
  std::string bytes(reinterpret_cast<const char*>(m.data()),
                    static_cast<std::size_t>(m.size()) * sizeof(Complex));
  return tag_of(bytes) ^ derive_seed(static_cast<std::uint64_t>(m.rows()),
                                     {static_cast<std::uint64_t>(m.cols())});
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write " + path.string());
  out << text;
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

Eigen::MatrixXd stacked_inputs(std::span<const Frame> frames, int resources) {
  Eigen::MatrixXd x(2 * resources, static_cast<Eigen::Index>(frames.size()));
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const Eigen::VectorXd v = stack_real_imag(frames[i].received);
    // same float32 rounding as the stored training corpora
    for (Eigen::Index k = 0; k < v.size(); ++k) {
      x(k, static_cast<Eigen::Index>(i)) = static_cast<float>(v(k));
    }
  }
  return x;
}

std::string supplementary_row(const MetricRow& row, const std::string& policy) {
  const auto d = pd(row.confusion);
  const auto p = ppv(row.confusion);
  const double exact =
      row.frames ? static_cast<double>(row.exact_frames) / static_cast<double>(row.frames) : 0.0;
  char snr[32];
  std::snprintf(snr, sizeof snr, "%g", row.snr_db);
  return std::string(snr) + "," + std::to_string(row.m) + "," + row.method + "," + policy + "," +
         format_metric(d) + "," + format_metric(pm(row.confusion)) + "," + format_metric(p) + "," +
         format_metric(f1_paper(d, p)) + "," + format_metric(f1_standard(d, p)) + "," +
         format_metric(row.auc) + "," + format_metric(exact) + "," + std::to_string(row.frames);
}

}  // namespace

System build_system(const SystemConfig& config) {
  Codebook codebook = config.codebook_path
                          ? load_codebook(*config.codebook_path)
                          : build_codebook(build_factor_graph(config.resources, config.devices,
                                                              config.nonzeros));
  require(codebook.graph.num_resources == config.resources &&
              codebook.graph.num_devices == config.devices &&
              codebook.graph.nonzeros_per_codeword == config.nonzeros,
          ErrorKind::Config, "codebook file dimensions disagree with the system config");
  PilotAssignment pilots = assign_pilots(config.devices, config.pilot_seed);
  MeasurementMatrix phi = measurement_matrix(codebook, pilots);
  return System{std::move(codebook), std::move(pilots), std::move(phi)};
}

std::string Method::display_name() const {
  switch (kind) {
    case MethodKind::Dff: return "DFF-AUD";
    case MethodKind::ResNet: return "ResNet-AUD";
    case MethodKind::LsBomp: return "LS-BOMP";
    case MethodKind::CAmp: return kAmpLabel;
    case MethodKind::Genie: return "GENIE";
  }
  return "?";
}

MethodKind method_kind_from_string(const std::string& s) {
  if (s == "dff") return MethodKind::Dff;
  if (s == "resnet") return MethodKind::ResNet;
  if (s == "ls_bomp") return MethodKind::LsBomp;
  if (s == "c_amp") return MethodKind::CAmp;
  if (s == "genie") return MethodKind::Genie;
  fail(ErrorKind::InvalidArgument, "unknown method '" + s + "'");
}

std::vector<Frame> sample_test_frames(const MeasurementMatrix& phi, int m, double snr_db,
                                      std::size_t count, std::uint64_t seed) {
  Rng rng(derive_seed(seed, {tag_of("eval"), static_cast<std::uint64_t>(m),
                             std::bit_cast<std::uint64_t>(snr_db)}));
  std::vector<Frame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) frames.push_back(sample_frame(phi, m, snr_db, rng));
  return frames;
}

MetricRow evaluate_method(const Method& method, const MeasurementMatrix& phi,
                          std::span<const Frame> frames, const nn::SelectionPolicy& policy,
                          double snr_db, int m) {
  MetricRow row;
  row.snr_db = snr_db;
  row.m = m;
  row.method = method.display_name();
  row.frames = frames.size();
  ScoreLog scores;

  auto record = [&](const Frame& f, const std::vector<std::uint8_t>& est,
                    const std::vector<double>& s) {
    row.confusion = accumulate(row.confusion, f.activity, est);
    if (est == f.activity) ++row.exact_frames;
    scores.append(s, f.activity);
  };

  const int n = phi.devices();
  switch (method.kind) {
    case MethodKind::Dff:
    case MethodKind::ResNet: {
      require(method.model != nullptr, ErrorKind::Stage,
              row.method + ": no trained model available");
      const Eigen::MatrixXd probs = nn::predict(*method.model, stacked_inputs(frames, phi.resources()));
      std::vector<double> p(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < frames.size(); ++i) {
        for (int k = 0; k < n; ++k) p[k] = probs(k, static_cast<Eigen::Index>(i));
        record(frames[i], nn::select_support(p, policy), p);
      }
      break;
    }
    case MethodKind::LsBomp: {
      const int sparsity = policy.kind == nn::SelectionPolicy::Kind::TopM ? policy.m : m;
      for (const Frame& f : frames) {
        const BompResult r = ls_bomp(phi, f.received, BompConfig{sparsity, {}});
        std::vector<double> s(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) s[k] = std::abs(r.coefficients(k));
        record(f, r.support, s);
      }
      break;
    }
    case MethodKind::CAmp: {
      for (const Frame& f : frames) {
        const AmpResult r = c_amp(phi, f.received, method.amp);
        std::vector<double> s(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) s[k] = std::abs(r.estimate(k));
        record(f, r.support, s);
      }
      break;
    }
    case MethodKind::Genie: {
      for (const Frame& f : frames) {
        record(f, f.activity, std::vector<double>(f.activity.begin(), f.activity.end()));
      }
      break;
    }
  }
  row.auc = scores.auc();
  return row;
}

// --- plot data --------------------------------------------------------------

std::string to_string(FigureId id) {
  switch (id) {
    case FigureId::PdVsSnr: return "pd_vs_snr";
    case FigureId::PpvVsSnr: return "ppv_vs_snr";
    case FigureId::PdVsM: return "pd_vs_m";
    case FigureId::PmVsM: return "pm_vs_m";
  }
  return "?";
}

FigureId figure_from_string(const std::string& s) {
  for (FigureId id : kAllFigures) {
    if (to_string(id) == s) return id;
  }
  fail(ErrorKind::InvalidArgument, "unknown figure '" + s + "'");
}

std::string plot_data(const std::string& results_csv, FigureId id) {
  std::istringstream in(results_csv);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Format, "results CSV is empty");
  const auto header = split(line, ',');
  auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    require(it != header.end(), ErrorKind::Format, "results CSV lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  };

  const bool vs_snr = id == FigureId::PdVsSnr || id == FigureId::PpvVsSnr;
  const std::string x_name = vs_snr ? "snr_db" : "m";
  const std::string fixed_name = vs_snr ? "m" : "snr_db";
  const std::string y_name = id == FigureId::PpvVsSnr ? "ppv" : id == FigureId::PmVsM ? "pm" : "pd";
  const std::size_t xi = column(x_name), fi = column(fixed_name), yi = column(y_name),
                    mi = column("method");

  // method -> fixed value -> x -> y
  std::map<std::string, std::map<double, std::map<double, std::string>>> series;
  std::set<double> xs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    require(cells.size() == header.size(), ErrorKind::Format, "malformed results row: " + line);
    const double x = std::stod(cells[xi]);
    series[cells[mi]][std::stod(cells[fi])][x] = cells[yi];
    xs.insert(x);
  }
  require(xs.size() >= 2, ErrorKind::InvalidArgument,
          to_string(id) + " needs at least two distinct " + x_name + " values in the sweep");

  std::size_t count = 0;
  for (const auto& [method, by_fixed] : series) count += by_fixed.size();

  std::ostringstream out;
  out << "# figure: " << to_string(id) << '\n'
      << "# x: " << x_name << '\n'
      << "# y: " << y_name << '\n'
      << "# series: " << count << '\n';
  for (const auto& [method, by_fixed] : series) {
    for (const auto& [fixed, points] : by_fixed) {
      char fbuf[32];
      std::snprintf(fbuf, sizeof fbuf, "%g", fixed);
      out << "\n[series] method=" << method << ' ' << fixed_name << '=' << fbuf
          << " points=" << points.size() << '\n';
      out << x_name << ' ' << y_name << '\n';
      for (const auto& [x, y] : points) {
        char xbuf[32];
        std::snprintf(xbuf, sizeof xbuf, "%g", x);
        out << xbuf << ' ' << y << '\n';
      }
    }
  }
  return out.str();
}

void emit_plot_data(const std::string& results_csv, FigureId id, const std::string& path) {
  write_text(path, plot_data(results_csv, id));
}

std::vector<std::string> emit_all_plot_data(const std::string& out_dir,
                                            std::optional<FigureId> only) {
  const std::string csv = read_text(fs::path(out_dir) / "results.csv");
  std::vector<std::string> written;
  for (FigureId id : kAllFigures) {
    if (only && *only != id) continue;
    const fs::path path = fs::path(out_dir) / ("fig_" + to_string(id) + ".dat");
    if (only) {
      emit_plot_data(csv, id, path.string());
      written.push_back(path.string());
      continue;
    }
    try {
      emit_plot_data(csv, id, path.string());
      written.push_back(path.string());
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::InvalidArgument) throw;
    }
  }
  return written;
}

// --- pipeline ---------------------------------------------------------------

namespace {

struct Pipeline {
  ExperimentConfig cfg;
  RunOptions opt;
  RunReport report;
  fs::path out;
  fs::path cache;
  System sys;
  std::uint64_t phi_hash = 0;
  // Corpora already generated or loaded during this run.
  std::map<int, Dataset> corpora;

  void log(const std::string& msg) const {
    if (opt.verbose) std::clog << "[scma-aud] " << msg << '\n';
  }

  std::vector<int> train_ms() const {
    if (cfg.data.m_train) return {*cfg.data.m_train};
    std::set<int> ms(cfg.sweep.m.begin(), cfg.sweep.m.end());
    return {ms.begin(), ms.end()};
  }

  std::vector<MethodKind> dnn_methods() const {
    std::vector<MethodKind> out;
    for (const auto& name : cfg.methods) {
      const MethodKind k = method_kind_from_string(name);
      if (k == MethodKind::Dff || k == MethodKind::ResNet) out.push_back(k);
    }
    return out;
  }

  std::uint64_t dataset_seed(int m) const {
    return derive_seed(cfg.data.seed, {tag_of("dataset"), static_cast<std::uint64_t>(m)});
  }

  std::size_t corpus_size() const {
    return cfg.data.train_count + cfg.data.val_count + cfg.data.test_count;
  }

  json dataset_key_doc(int m) const {
    return {{"v", kCacheVersion},
            {"phi", phi_hash},
            {"m", m},
            {"snr", {cfg.data.snr_train.lo, cfg.data.snr_train.hi}},
            {"counts", {cfg.data.train_count, cfg.data.val_count, cfg.data.test_count}},
            {"seed", dataset_seed(m)}};
  }

  fs::path dataset_path(int m) const {
    return cache / ("dataset_m" + std::to_string(m) + "_" + hex(hash_json(dataset_key_doc(m))) + ".bin");
  }

  // Corpus layout: train block, validation block, test block.
  const Dataset& materialize_dataset(int m) {
    if (const auto it = corpora.find(m); it != corpora.end()) return it->second;
    const fs::path path = dataset_path(m);
    if (opt.use_cache && fs::exists(path)) {
      log("cache hit: dataset " + path.filename().string());
      report.cache_hits.push_back(path.filename().string());
      return corpora.emplace(m, load_dataset(path.string())).first->second;
    }
    log("generating " + std::to_string(corpus_size()) + " samples for m = " + std::to_string(m));
    Dataset data = generate_dataset(sys.phi, m, cfg.data.snr_train, corpus_size(), dataset_seed(m),
                                    opt.threads);
    save_dataset(data, path.string());
    return corpora.emplace(m, std::move(data)).first->second;
  }

  const nn::ModelConfig& model_config(MethodKind k) const {
    return k == MethodKind::Dff ? cfg.dff : cfg.resnet;
  }

  static std::string model_name(MethodKind k, int m) {
    return std::string(k == MethodKind::Dff ? "dff" : "resnet") + "_m" + std::to_string(m);
  }

  std::string model_key(MethodKind k, int m) const {
    const auto& mc = model_config(k);
    const json doc = {{"dataset", dataset_key_doc(m)},
                      {"arch", nn::to_string(mc.architecture)},
                      {"width", mc.hidden_width},
                      {"depth", mc.depth},
                      {"dropout", mc.dropout},
                      {"bn", {mc.batchnorm_epsilon, mc.batchnorm_momentum}},
                      {"train", config_to_json(cfg)["train"]},
                      {"seed", cfg.data.seed}};
    return hex(hash_json(doc));
  }

  nn::Model materialize_model(MethodKind k, int m) {
    const std::string name = model_name(k, m);
    const std::string key = model_key(k, m);
    const fs::path model_path = cache / ("model_" + name + "_" + key + ".bin");
    const fs::path history_path = cache / ("history_" + name + "_" + key + ".csv");
    const fs::path history_out = out / ("history_" + name + ".csv");

    if (opt.use_cache && fs::exists(model_path) && fs::exists(history_path)) {
      log("cache hit: model " + model_path.filename().string());
      report.cache_hits.push_back(model_path.filename().string());
      write_text(history_out, read_text(history_path));
      report.written_files.push_back(history_out.string());
      return nn::load_model(model_path.string());
    }

    const Dataset& corpus = materialize_dataset(m);
    const Dataset train_set = corpus.slice(0, cfg.data.train_count);
    const Dataset val_set = corpus.slice(cfg.data.train_count, cfg.data.train_count + cfg.data.val_count);
    const Dataset test_set = corpus.slice(cfg.data.train_count + cfg.data.val_count, corpus.size());

    const auto arch_tag = tag_of(nn::to_string(model_config(k).architecture));
    nn::Model model = nn::init_model(
        model_config(k), derive_seed(cfg.data.seed, {tag_of("init"), arch_tag, static_cast<std::uint64_t>(m)}));
    nn::TrainConfig tc = cfg.train;
    tc.seed = derive_seed(cfg.data.seed, {tag_of("train"), arch_tag, static_cast<std::uint64_t>(m)});
    log("training " + name + " on " + std::to_string(train_set.size()) + " samples");
    const nn::TrainHistory history = nn::train(model, train_set, val_set, tc);
    if (history.loss_increased) log("warning: " + name + " final training loss exceeds epoch 1");
    log(name + ": best epoch " + std::to_string(history.best_epoch) + ", val loss " +
        std::to_string(history.epochs[history.best_epoch - 1].val_loss));

    if (test_set.size() > 0) {
      const Eigen::MatrixXd probs = nn::predict(model, nn::dataset_inputs(test_set));
      Confusion conf;
      for (std::size_t i = 0; i < test_set.size(); ++i) {
        std::vector<double> p(probs.col(static_cast<Eigen::Index>(i)).data(),
                              probs.col(static_cast<Eigen::Index>(i)).data() + probs.rows());
        conf = accumulate(conf, test_set.label(i), nn::select_support(p, nn::SelectionPolicy::top_m(m)));
      }
      log(name + ": held-out test P_D " + format_metric(pd(conf)));
    }

    nn::save_model(model, model_path.string());
    const std::string csv = nn::history_csv(history);
    write_text(history_path, csv);
    write_text(history_out, csv);
    report.written_files.push_back(history_out.string());
    return model;
  }
};

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, Stage stage, const RunOptions& options) {
  Pipeline p{config, options, {}, {}, {}, {}, 0, {}};
  if (options.seed) p.cfg.data.seed = *options.seed;
  if (options.out_dir) p.cfg.output_dir = *options.out_dir;
  p.out = p.cfg.output_dir;
  p.cache = p.out / "cache";
  std::error_code ec;
  fs::create_directories(p.cache, ec);
  require(!ec, ErrorKind::Io, "cannot create output directory " + p.cache.string());

  const int in_dim = 2 * p.cfg.system.resources, out_dim = p.cfg.system.devices;
  for (const auto& [mc, arch] : {std::pair{&p.cfg.dff, nn::Architecture::DFF},
                                 std::pair{&p.cfg.resnet, nn::Architecture::ResNet}}) {
    require(mc->architecture == arch && mc->input_dim == in_dim && mc->output_dim == out_dim,
            ErrorKind::Config,
            "model config for " + nn::to_string(arch) + " does not match the system dimensions");
  }
  p.sys = build_system(p.cfg.system);
  p.phi_hash = hash_matrix(p.sys.phi.phi);
  const auto dnn = p.dnn_methods();

  if (stage == Stage::GenData) {
    for (int m : p.train_ms()) p.materialize_dataset(m);
    return p.report;
  }

  // (architecture, m) -> model
  std::map<std::pair<int, int>, nn::Model> models;
  for (MethodKind k : dnn) {
    for (int m : p.train_ms()) models[{static_cast<int>(k), m}] = p.materialize_model(k, m);
  }
  if (stage == Stage::Train) return p.report;

  struct Point {
    int m;
    double snr;
  };
  std::vector<Point> points;
  for (int m : p.cfg.sweep.m) {
    for (double snr : p.cfg.sweep.snr_db) points.push_back({m, snr});
  }

  std::vector<Method> methods;
  for (const auto& name : p.cfg.methods) {
    Method method;
    method.kind = method_kind_from_string(name);
    method.amp = p.cfg.amp;
    methods.push_back(method);
  }

  struct PointResult {
    std::vector<MetricRow> main;
    std::vector<std::pair<std::string, MetricRow>> extra;  // (policy, row)
  };
  std::vector<PointResult> results(points.size());

  auto run_point = [&](std::size_t i) {
    const Point& pt = points[i];
    const auto frames =
        sample_test_frames(p.sys.phi, pt.m, pt.snr, p.cfg.sweep.frames_per_point, p.cfg.data.seed);
    const int model_m = p.cfg.data.m_train ? *p.cfg.data.m_train : pt.m;
    for (Method method : methods) {
      if (method.kind == MethodKind::Dff || method.kind == MethodKind::ResNet) {
        method.model = &models.at({static_cast<int>(method.kind), model_m});
      }
      const auto top = nn::SelectionPolicy::top_m(pt.m);
      MetricRow row = evaluate_method(method, p.sys.phi, frames, top, pt.snr, pt.m);
      const bool native = method.kind == MethodKind::CAmp || method.kind == MethodKind::Genie;
      results[i].extra.emplace_back(native ? "native" : "top_m", row);
      results[i].main.push_back(row);
      if (method.kind == MethodKind::Dff || method.kind == MethodKind::ResNet) {
        results[i].extra.emplace_back(
            "threshold_0.5",
            evaluate_method(method, p.sys.phi, frames, nn::SelectionPolicy::above(0.5), pt.snr, pt.m));
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, options.threads));
  p.log("sweeping " + std::to_string(points.size()) + " points x " +
        std::to_string(methods.size()) + " methods");
  if (workers == 1) {
    for (std::size_t i = 0; i < points.size(); ++i) run_point(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, points.size()); ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < points.size(); i += workers) run_point(i);
      });
    }
  }

  std::string csv = metrics_csv_header() + "\n";
  std::string extra =
      "snr_db,m,method,policy,pd,pm,ppv,f1_paper,f1_standard,auc,exact_rate,frames\n";
  for (const auto& r : results) {
    for (const auto& row : r.main) {
      csv += metrics_csv_row(row) + "\n";
      p.report.rows.push_back(row);
    }
    for (const auto& [policy, row] : r.extra) extra += supplementary_row(row, policy) + "\n";
  }

  const fs::path results_path = p.out / "results.csv";
  write_text(results_path, csv);
  write_text(p.out / "results_supplementary.csv", extra);
  p.report.written_files.push_back(results_path.string());
  p.report.written_files.push_back((p.out / "results_supplementary.csv").string());
  for (const auto& f : emit_all_plot_data(p.out.string())) p.report.written_files.push_back(f);
  return p.report;
}

RunReport run_experiment(const std::string& config_path, Stage stage, const RunOptions& options) {
  return run_experiment(load_config(config_path), stage, options);
}

// --- self checks ------------------------------------------------------------

OracleCheckReport oracle_check(const MeasurementMatrix& phi, int m, std::size_t frames,
                               std::uint64_t seed) {
  Rng rng(derive_seed(seed, {tag_of("oracle-check"), static_cast<std::uint64_t>(m)}));
  OracleCheckReport r;
  r.m = m;
  r.frames = frames;
  for (std::size_t i = 0; i < frames; ++i) {
    const Frame f = sample_frame_at_noise_variance(phi, m, 0.0, rng);
    const auto oracle = exhaustive_oracle(phi, f.received, m);
    const auto bomp = ls_bomp(phi, f.received, BompConfig{m, {}});
    if (oracle.support == f.activity) ++r.oracle_exact;
    if (bomp.support == oracle.support) ++r.bomp_agrees;
    if (bomp.support == f.activity) ++r.bomp_exact;
  }
  return r;
}

std::vector<AmpTuningPoint> tune_amp_theta(const MeasurementMatrix& phi, const AmpConfig& base,
                                           std::span<const double> thetas,
                                           std::span<const int> ms,
                                           std::span<const double> snrs, std::size_t frames,
                                           std::uint64_t seed) {
  require(!thetas.empty() && !ms.empty() && !snrs.empty(), ErrorKind::InvalidArgument,
          "AMP tuning grid must be non-empty");
  const std::uint64_t val_seed = derive_seed(seed, {tag_of("amp-tuning")});
  std::vector<AmpTuningPoint> out;
  for (double theta : thetas) {
    Method method;
    method.kind = MethodKind::CAmp;
    method.amp = base;
    method.amp.theta = theta;
    double total = 0.0;
    for (int m : ms) {
      for (double snr : snrs) {
        const auto f = sample_test_frames(phi, m, snr, frames, val_seed);
        const MetricRow row = evaluate_method(method, phi, f, nn::SelectionPolicy::top_m(m), snr, m);
        const auto d = pd(row.confusion);
        total += f1_standard(d, ppv(row.confusion)).value_or(0.0);
      }
    }
    out.push_back({theta, total / static_cast<double>(ms.size() * snrs.size())});
  }
  return out;
}

}  // namespace scma
