// Copyright (c) 2026 The msvbx Authors
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

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "msvbx/error.hpp"
#include "msvbx/log.hpp"
#include "msvbx/pipeline.hpp"
#include "msvbx/scorer.hpp"
#include "msvbx/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

/// Signals a usage problem detected after CLI11 parsing (exit code 2).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_exists(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw UsageError(std::string(what) + " not found: " + p.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw msvbx::Error(msvbx::ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw msvbx::Error(msvbx::ErrorCode::kIo, "write failed: " + path.string());
}

// ---------------------------------------------------------------- train-backend

struct TrainArgs {
  std::string input;
  std::string output;
  std::size_t lda_dim = 32;
};

int run_train(const TrainArgs& a) {
  require_exists(a.input, "labeled embeddings");
  const auto data = msvbx::load_labeled_embeddings(a.input);
  const auto backend = msvbx::train_backend(data, a.lda_dim);
  msvbx::save_backend(backend, a.output);
  msvbx::log().info("wrote backend ({} -> {} dims) to {}", backend.input_dim, backend.lda_dim, a.output);
  return kExitOk;
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
  std::vector<std::string> recordings;
  std::string model;
  std::string out_dir = ".";
  std::string config;
  std::string mode = "msvbx";
  std::size_t jobs = 0;
  std::size_t init_clusters = 0;
  msvbx::PipelineConfig cfg;
};

msvbx::ClusterMode parse_mode(const std::string& s) {
  if (s == "msvbx") return msvbx::ClusterMode::kMsvbx;
  if (s == "vbx") return msvbx::ClusterMode::kVbx;
  throw UsageError("unknown mode '" + s + "' (expected msvbx or vbx)");
}

/// Keys mirror the long flag names with '-' or '_' accepted.
void apply_config_file(const fs::path& path, msvbx::PipelineConfig& cfg) {
  require_exists(path, "config file");
  std::ifstream in(path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError("invalid config file " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file must hold a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string key = it.key();
    std::replace(key.begin(), key.end(), '_', '-');
    const json& v = it.value();
    try {
      if (key == "fa") cfg.inference.fa = v.get<double>();
      else if (key == "fb") cfg.inference.fb = v.get<double>();
      else if (key == "p-loop") cfg.inference.p_loop = v.get<double>();
      else if (key == "tau") cfg.inference.tau = v.get<double>();
      else if (key == "max-iters") cfg.inference.max_iters = v.get<std::size_t>();
      else if (key == "elbo-tol") cfg.inference.elbo_rel_tol = v.get<double>();
      else if (key == "pi-drop-eps") cfg.inference.pi_drop_eps = v.get<double>();
      else if (key == "seed") cfg.inference.seed = v.get<std::uint64_t>();
      else if (key == "ahc-threshold") cfg.ahc_threshold = v.get<double>();
      else if (key == "lda-dim") cfg.lda_dim = v.get<std::size_t>();
      else if (key == "activity-threshold") cfg.activity_threshold = v.get<double>();
      else if (key == "median-window") cfg.median_window = v.get<double>();
      else if (key == "init-smoothing") cfg.init_smoothing = v.get<double>();
      else if (key == "init-clusters") {
        const auto n = v.get<std::size_t>();
        cfg.init_clusters = n == 0 ? std::nullopt : std::optional<std::size_t>(n);
      } else if (key == "mode") cfg.mode = parse_mode(v.get<std::string>());
      else throw UsageError("unknown config key '" + it.key() + "'");
    } catch (const json::exception& e) {
      throw UsageError("bad value for config key '" + it.key() + "': " + e.what());
    }
  }
}

int run_cluster(ClusterArgs& a, const CLI::App& cmd) {
  require_exists(a.model, "model");
  for (const auto& r : a.recordings) require_exists(r, "recording");

  // Precedence: flags > config file > defaults.
  msvbx::PipelineConfig cfg;
  if (!a.config.empty()) apply_config_file(a.config, cfg);
  auto given = [&](const char* name) { return cmd.get_option(name)->count() > 0; };
  if (given("--fa")) cfg.inference.fa = a.cfg.inference.fa;
  if (given("--fb")) cfg.inference.fb = a.cfg.inference.fb;
  if (given("--p-loop")) cfg.inference.p_loop = a.cfg.inference.p_loop;
  if (given("--tau")) cfg.inference.tau = a.cfg.inference.tau;
  if (given("--max-iters")) cfg.inference.max_iters = a.cfg.inference.max_iters;
  if (given("--elbo-tol")) cfg.inference.elbo_rel_tol = a.cfg.inference.elbo_rel_tol;
  if (given("--pi-drop-eps")) cfg.inference.pi_drop_eps = a.cfg.inference.pi_drop_eps;
  if (given("--ahc-threshold")) cfg.ahc_threshold = a.cfg.ahc_threshold;
  if (given("--activity-threshold")) cfg.activity_threshold = a.cfg.activity_threshold;
  if (given("--median-window")) cfg.median_window = a.cfg.median_window;
  if (given("--init-smoothing")) cfg.init_smoothing = a.cfg.init_smoothing;
  if (given("--init-clusters")) {
    cfg.init_clusters = a.init_clusters == 0 ? std::nullopt : std::optional<std::size_t>(a.init_clusters);
  }
  if (given("--mode")) cfg.mode = parse_mode(a.mode);
  try {
    cfg.inference.validate();
  } catch (const msvbx::Error& e) {
    throw UsageError(e.what());
  }

  const auto backend = msvbx::load_backend(a.model);
  fs::create_directories(a.out_dir);

  std::size_t jobs = a.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency()) : a.jobs;
  jobs = std::min(jobs, a.recordings.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failed{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < a.recordings.size(); i = next++) {
      const fs::path path = a.recordings[i];
      try {
        const auto rec = msvbx::read_recording(path);
        const auto outcome = msvbx::cluster_recording(rec, backend, cfg);
        const fs::path base = fs::path(a.out_dir) / rec.id();
        write_text(base.string() + ".rttm", msvbx::format_rttm(outcome.diarization));
        write_text(base.string() + ".diag.jsonl", msvbx::diagnostics_jsonl(outcome));
        msvbx::log().info("{}: {} speakers", rec.id(), outcome.diarization.speakers.size());
      } catch (const std::exception& e) {
        ++failed;
        msvbx::log().error("{}: {}", path.string(), e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  if (failed > 0) {
    msvbx::log().error("{} of {} recordings failed", failed.load(), a.recordings.size());
    return kExitRuntime;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string ref_dir;
  std::string hyp_dir;
  double collar = 0.25;
  std::string out;
};

std::map<std::string, std::vector<msvbx::Segment>> load_rttm_dir(const fs::path& dir) {
  std::map<std::string, std::vector<msvbx::Segment>> out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".rttm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto& segs = out[f.stem().string()];
    for (auto& [id, s] : msvbx::read_rttm(f)) segs.insert(segs.end(), s.begin(), s.end());
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

int run_score(const ScoreArgs& a) {
  require_exists(a.ref_dir, "reference directory");
  require_exists(a.hyp_dir, "hypothesis directory");
  const auto ref = load_rttm_dir(a.ref_dir);
  const auto hyp = load_rttm_dir(a.hyp_dir);

  std::vector<std::string> missing_hyp;
  std::vector<std::string> missing_ref;
  for (const auto& [id, _] : ref) {
    if (!hyp.count(id)) missing_hyp.push_back(id);
  }
  for (const auto& [id, _] : hyp) {
    if (!ref.count(id)) missing_ref.push_back(id);
  }
  if (!missing_hyp.empty() || !missing_ref.empty()) {
    std::string msg = "recording ids do not pair up;";
    if (!missing_hyp.empty()) msg += " missing hypothesis for: " + join(missing_hyp) + ";";
    if (!missing_ref.empty()) msg += " missing reference for: " + join(missing_ref) + ";";
    throw msvbx::Error(msvbx::ErrorCode::kInvalidArgument, msg);
  }
  if (ref.empty()) throw msvbx::Error(msvbx::ErrorCode::kInvalidArgument, "no .rttm files in " + a.ref_dir);

  std::vector<msvbx::ScoreReport> reports;
  for (const auto& [id, segs] : ref) {
    auto r = msvbx::score_der(segs, hyp.at(id), a.collar);
    r.recording_id = id;
    reports.push_back(std::move(r));
  }
  const std::string text = msvbx::to_json(msvbx::aggregate(std::move(reports))).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    write_text(a.out, text);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string out_dir = ".";
  std::vector<double> phi;
  std::vector<double> active_probs;
  std::string labeled_out;
  std::size_t labeled_speakers = 50;
  std::size_t per_speaker = 20;
  msvbx::SynthConfig cfg;
};

int run_synth(SynthArgs& a) {
  auto& cfg = a.cfg;
  if (a.phi.size() == 1) {
    cfg.phi = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(cfg.embed_dim), a.phi[0]);
  } else if (!a.phi.empty()) {
    cfg.phi = Eigen::Map<const Eigen::VectorXd>(a.phi.data(), static_cast<Eigen::Index>(a.phi.size()));
  }
  cfg.active_count_probs = a.active_probs;
  try {
    cfg.validate();
  } catch (const msvbx::Error& e) {
    throw UsageError(e.what());
  }

  const auto synth = msvbx::generate(cfg);
  fs::create_directories(a.out_dir);
  const fs::path base = fs::path(a.out_dir) / cfg.recording_id;
  msvbx::write_recording(synth.recording, fs::path(base.string() + ".msvb"));
  write_text(base.string() + ".truth.json",
             msvbx::truth_json(synth, cfg.max_streams).dump(2) + "\n");
  const auto reference = msvbx::stitch(synth.recording, synth.labels);
  write_text(base.string() + ".rttm", msvbx::format_rttm(reference));
  msvbx::save_backend(msvbx::PldaBackend::identity(cfg.resolved_phi()),
                      fs::path(base.string() + ".model.json"));
  if (!a.labeled_out.empty()) {
    const auto labeled =
        msvbx::generate_labeled(cfg.resolved_phi(), a.labeled_speakers, a.per_speaker, cfg.seed);
    msvbx::save_labeled_embeddings(labeled, a.labeled_out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-stream VBx clustering for chunk-wise speaker embeddings"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train-backend", "Train the LDA + PLDA backend");
  train_cmd->add_option("input", train.input, "Labeled embeddings (JSON)")->required();
  train_cmd->add_option("-o,--output", train.output, "Output model path")->required();
  train_cmd->add_option("--lda-dim", train.lda_dim, "LDA output dimension")
      ->capture_default_str()->check(CLI::PositiveNumber);

  ClusterArgs cl;
  auto* cl_cmd = app.add_subcommand("cluster", "Diarize chunked recordings");
  cl_cmd->add_option("recordings", cl.recordings, "Recording files (.msvb)")->required();
  cl_cmd->add_option("-m,--model", cl.model, "Backend model")->required();
  cl_cmd->add_option("-o,--out-dir", cl.out_dir, "Output directory")->capture_default_str();
  cl_cmd->add_option("--config", cl.config, "JSON config file");
  cl_cmd->add_option("--mode", cl.mode, "msvbx or vbx")->capture_default_str();
  cl_cmd->add_option("-j,--jobs", cl.jobs, "Worker threads (0 = available parallelism)")->capture_default_str();
  cl_cmd->add_option("--fa", cl.cfg.inference.fa, "Acoustic scaling factor")->capture_default_str();
  cl_cmd->add_option("--fb", cl.cfg.inference.fb, "Speaker regularization factor")->capture_default_str();
  cl_cmd->add_option("--p-loop", cl.cfg.inference.p_loop, "Self-loop probability")->capture_default_str();
  cl_cmd->add_option("--tau", cl.cfg.inference.tau, "Stream activity threshold")->capture_default_str();
  cl_cmd->add_option("--max-iters", cl.cfg.inference.max_iters, "VB iterations (0 = cAHC only)")
      ->capture_default_str();
  cl_cmd->add_option("--elbo-tol", cl.cfg.inference.elbo_rel_tol, "Relative ELBO convergence tolerance")
      ->capture_default_str();
  cl_cmd->add_option("--pi-drop-eps", cl.cfg.inference.pi_drop_eps, "Prior weight below which states drop")
      ->capture_default_str();
  cl_cmd->add_option("--ahc-threshold", cl.cfg.ahc_threshold, "cAHC distance threshold")->capture_default_str();
  cl_cmd->add_option("--init-clusters", cl.init_clusters, "Force cAHC down to this many clusters (0 = off)");
  cl_cmd->add_option("--init-smoothing", cl.cfg.init_smoothing, "Occupancy smoothing mass")->capture_default_str();
  cl_cmd->add_option("--activity-threshold", cl.cfg.activity_threshold, "Frame activity binarization threshold")
      ->capture_default_str();
  cl_cmd->add_option("--median-window", cl.cfg.median_window, "Median filter window in seconds (0 = off)")
      ->capture_default_str();

  ScoreArgs sc;
  auto* sc_cmd = app.add_subcommand("score", "Score hypothesis RTTMs against references");
  sc_cmd->add_option("--ref-dir", sc.ref_dir, "Reference RTTM directory")->required();
  sc_cmd->add_option("--hyp-dir", sc.hyp_dir, "Hypothesis RTTM directory")->required();
  sc_cmd->add_option("--collar", sc.collar, "Collar in seconds")->capture_default_str()->check(CLI::NonNegativeNumber);
  sc_cmd->add_option("-o,--out", sc.out, "JSON report path (default stdout)");

  SynthArgs sy;
  auto* sy_cmd = app.add_subcommand("synth", "Generate a synthetic recording with ground truth");
  sy_cmd->add_option("-o,--out-dir", sy.out_dir, "Output directory")->capture_default_str();
  sy_cmd->add_option("--id", sy.cfg.recording_id, "Recording id")->capture_default_str();
  sy_cmd->add_option("--seed", sy.cfg.seed, "Random seed")->capture_default_str();
  sy_cmd->add_option("--num-speakers", sy.cfg.num_speakers, "Speakers")->capture_default_str();
  sy_cmd->add_option("--num-chunks", sy.cfg.num_chunks, "Chunks")->capture_default_str();
  sy_cmd->add_option("--max-streams", sy.cfg.max_streams, "Streams per chunk")->capture_default_str();
  sy_cmd->add_option("--embed-dim", sy.cfg.embed_dim, "Embedding dimension")->capture_default_str();
  sy_cmd->add_option("--phi", sy.phi, "Between-speaker variances (one value broadcasts)");
  sy_cmd->add_option("--p-loop", sy.cfg.p_loop, "Self-loop probability")->capture_default_str();
  sy_cmd->add_option("--active-probs", sy.active_probs, "Distribution over active counts 0..C");
  sy_cmd->add_option("--frames-per-chunk", sy.cfg.frames_per_chunk, "Frames per chunk")->capture_default_str();
  sy_cmd->add_option("--frame-step", sy.cfg.frame_step, "Frame step in seconds")->capture_default_str();
  sy_cmd->add_option("--flip-prob", sy.cfg.flip_prob, "Activity bit flip probability")->capture_default_str();
  sy_cmd->add_option("--labeled-out", sy.labeled_out, "Also write a labeled training set here");
  sy_cmd->add_option("--labeled-speakers", sy.labeled_speakers, "Speakers in the labeled set")->capture_default_str();
  sy_cmd->add_option("--per-speaker", sy.per_speaker, "Samples per labeled speaker")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*cl_cmd) return run_cluster(cl, *cl_cmd);
    if (*sc_cmd) return run_score(sc);
    if (*sy_cmd) return run_synth(sy);
  } catch (const UsageError& e) {
    msvbx::log().error("{}", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    msvbx::log().error("{}", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
