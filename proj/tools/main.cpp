// Copyright 2026 cmaf authors
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
//
// Command-line front end. Subcommands: synth, features, train, eval,
// retrieve, temporal, export, sweep. A key=value config file provides the
// run configuration; command-line flags win over file values. Exit codes:
// 0 success, 1 runtime failure, 2 usage/config error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cmaf/config.hpp"
#include "cmaf/data.hpp"
#include "cmaf/error.hpp"
#include "cmaf/eval.hpp"
#include "cmaf/log.hpp"
#include "cmaf/model.hpp"
#include "cmaf/training.hpp"

namespace {

using cmaf::KvConfig;
using cmaf::data::Dataset;
using cmaf::data::Dimension;

std::string fixed6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

Dimension parse_dimension(const std::string& s) {
  if (s == "valence") return Dimension::kValence;
  if (s == "arousal") return Dimension::kArousal;
  cmaf::fail_config("--dimension must be valence or arousal, got '", s, "'");
}

std::ofstream open_out_file(const std::string& path) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream os(path, std::ios::trunc);
  cmaf::check(os.good(), "cannot open for writing: ", path);
  return os;
}

// ---- config resolution (flags already folded into the KvConfig) ----

cmaf::signal::FeatureOptions feature_options(KvConfig& cfg) {
  cmaf::signal::FeatureOptions opt;
  opt.per_window = cfg.get_bool("features.per_window", true);
  opt.window_s = cfg.get_double("features.window_s", 3.0);
  opt.hop_s = cfg.get_double("features.hop_s", 1.0);
  return opt;
}

cmaf::data::LoadOptions load_options(KvConfig& cfg) {
  cmaf::data::LoadOptions opt;
  opt.features = feature_options(cfg);
  opt.require_tag_consistency =
      cfg.get_bool("data.require_tag_consistency", false);
  return opt;
}

cmaf::model::Dims dims_from(KvConfig& cfg, const Dataset& ds) {
  cmaf::model::Dims d;
  d.channels = ds.channels;
  d.eeg_features = ds.feature_dim;
  d.music_dim = ds.music_dim;
  d.lstm_hidden = static_cast<std::size_t>(cfg.get_int("model.lstm_hidden", 32));
  d.attention_dim =
      static_cast<std::size_t>(cfg.get_int("model.attention_dim", 32));
  d.music_hidden =
      static_cast<std::size_t>(cfg.get_int("model.music_hidden", 128));
  d.music_layers =
      static_cast<std::size_t>(cfg.get_int("model.music_layers", 2));
  d.common_dim = static_cast<std::size_t>(cfg.get_int("model.common_dim", 64));
  d.disc_hidden =
      static_cast<std::size_t>(cfg.get_int("model.disc_hidden", 32));
  return d;
}

cmaf::train::TrainConfig train_from(KvConfig& cfg) {
  cmaf::train::TrainConfig t;
  t.learning_rate = cfg.get_double("training.learning_rate", 1e-4);
  t.patience = cfg.get_int("training.patience", 15);
  t.max_epochs = cfg.get_int("training.max_epochs", 300);
  t.batch_size = cfg.get_int("training.batch_size", 32);
  t.lambdas.l1 = cfg.get_double("training.lambda1", 1.0);
  t.lambdas.l2 = cfg.get_double("training.lambda2", 0.5);
  t.lambdas.l11 = cfg.get_double("training.lambda11", 1.0);
  t.lambdas.l12 = cfg.get_double("training.lambda12", 1.0);
  t.grl_lambda = cfg.get_double("training.grl_lambda", 1.0);
  t.music_supervision = cfg.get_bool("training.music_supervision", true);
  t.domain_discriminator = cfg.get_bool("training.domain_discriminator", true);
  const std::string mix = cfg.get_string("training.mix_mode", "modality_select");
  if (mix == "modality_select") {
    t.mix_mode = cmaf::train::MixMode::kModalitySelect;
  } else if (mix == "permute_pairs") {
    t.mix_mode = cmaf::train::MixMode::kPermutePairs;
  } else {
    cmaf::fail_config("training.mix_mode must be modality_select or "
                      "permute_pairs, got '",
                      mix, "'");
  }
  t.seed = cfg.get_u64("training.seed", 1);
  try {
    t.validate();
  } catch (const cmaf::Error& e) {
    cmaf::fail_config(e.what());
  }
  return t;
}

cmaf::eval::RetrievalOptions eval_from(KvConfig& cfg) {
  cmaf::eval::RetrievalOptions opt;
  const std::string mode = cfg.get_string("eval.mode", "aggregated");
  if (mode == "aggregated") {
    opt.mode = cmaf::eval::RetrievalMode::kAggregated;
  } else if (mode == "segment") {
    opt.mode = cmaf::eval::RetrievalMode::kSegment;
  } else {
    cmaf::fail_config("eval.mode must be aggregated or segment, got '", mode,
                      "'");
  }
  const std::string dist = cfg.get_string("eval.distance", "euclidean");
  if (dist == "euclidean") {
    opt.distance = cmaf::eval::DistanceKind::kEuclidean;
  } else if (dist == "cosine") {
    opt.distance = cmaf::eval::DistanceKind::kCosine;
  } else {
    cmaf::fail_config("eval.distance must be euclidean or cosine, got '", dist,
                      "'");
  }
  opt.k = static_cast<std::size_t>(cfg.get_int("eval.k", 10));
  opt.smooth_window = cfg.get_int("eval.smooth_window", 7);
  return opt;
}

// Consumes and validates every known configuration section, so one config
// file can drive all subcommands; leftover keys then fail loudly.
void validate_whole_config(KvConfig& cfg, const Dataset& ds) {
  (void)dims_from(cfg, ds);
  (void)train_from(cfg);
  (void)eval_from(cfg);
  cfg.reject_unknown();
}

// ---- shared train/eval plumbing ----

std::string ckpt_name(int subject, int fold, Dimension dim) {
  return "ckpt_s" + std::to_string(subject) + "_f" + std::to_string(fold) +
         "_" + cmaf::data::dimension_name(dim) + ".cmaf";
}

std::string folds_name(Dimension dim) {
  return std::string("folds_") + cmaf::data::dimension_name(dim) + ".csv";
}

void write_folds(const std::string& dir, Dimension dim,
                 const std::vector<cmaf::train::SubjectCv>& cvs) {
  auto os = open_out_file((std::filesystem::path(dir) / folds_name(dim)).string());
  os << "subject,trial,fold\n";
  for (const auto& cv : cvs)
    for (const auto& [trial, fold] : cv.split.assignments)
      os << cv.subject << ',' << trial << ',' << fold << "\n";
}

// subject -> trial -> fold
std::map<int, std::map<int, int>> read_folds(const std::string& dir,
                                             Dimension dim) {
  const auto path = (std::filesystem::path(dir) / folds_name(dim)).string();
  std::ifstream is(path);
  cmaf::check(is.good(), "fold table not found: ", path,
              " (run `cmaf train` first)");
  std::string line;
  cmaf::check(static_cast<bool>(std::getline(is, line)) &&
                  line == "subject,trial,fold",
              path, ": bad fold table header");
  std::map<int, std::map<int, int>> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    int subject = 0, trial = 0, fold = 0;
    cmaf::check(std::sscanf(line.c_str(), "%d,%d,%d", &subject, &trial,
                            &fold) == 3,
                path, ": unparseable row '", line, "'");
    out[subject][trial] = fold;
  }
  return out;
}

struct FoldEvalData {
  int subject = 0;
  int fold = 0;
  std::vector<cmaf::eval::TrialEmbeddings> test;
  std::vector<cmaf::eval::TrialEmbeddings> rest;  // remaining corpus tracks
};

// Embeds every held-out trial with its fold's checkpoint. With
// full_corpus, the subject's remaining tracks are embedded too.
std::vector<FoldEvalData> embed_folds(const Dataset& ds,
                                      const std::string& ckpt_dir,
                                      Dimension dim, bool full_corpus) {
  const auto folds = read_folds(ckpt_dir, dim);
  std::vector<FoldEvalData> out;
  for (int subject : ds.subjects()) {
    const auto it = folds.find(subject);
    cmaf::check(it != folds.end(), "fold table has no subject ", subject);
    std::set<int> fold_ids;
    for (const auto& [trial, fold] : it->second) fold_ids.insert(fold);
    for (int fold : fold_ids) {
      const auto path =
          (std::filesystem::path(ckpt_dir) / ckpt_name(subject, fold, dim))
              .string();
      auto ck = cmaf::model::load_checkpoint(path);
      cmaf::check(ck.params.dims.channels == ds.channels &&
                      ck.params.dims.eeg_features == ds.feature_dim &&
                      ck.params.dims.music_dim == ds.music_dim,
                  path, ": checkpoint dims (", ck.params.dims.channels, "ch x ",
                  ck.params.dims.eeg_features, " feats, music ",
                  ck.params.dims.music_dim, ") do not match the dataset (",
                  ds.channels, "ch x ", ds.feature_dim, " feats, music ",
                  ds.music_dim, ")");

      FoldEvalData fd;
      fd.subject = subject;
      fd.fold = fold;
      for (std::size_t ti : ds.trials_of(subject)) {
        const auto& trial = ds.trials[ti];
        const auto fit = it->second.find(trial.trial);
        cmaf::check(fit != it->second.end(), "trial ", trial.trial,
                    " missing from fold table");
        if (fit->second == fold) {
          fd.test.push_back(
              cmaf::eval::embed_trial(ck.params, ck.standardizer, trial, ti, dim));
        } else if (full_corpus) {
          fd.rest.push_back(
              cmaf::eval::embed_trial(ck.params, ck.standardizer, trial, ti, dim));
        }
      }
      out.push_back(std::move(fd));
    }
  }
  return out;
}

// ---- commands ----

struct CommonArgs {
  std::string manifest;
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;
};

KvConfig build_config(const CommonArgs& args) {
  KvConfig cfg = args.config_path.empty() ? KvConfig()
                                          : KvConfig::from_file(args.config_path);
  for (const auto& [k, v] : args.overrides) cfg.set(k, v);
  return cfg;
}

int cmd_synth(const cmaf::data::SynthSpec& spec, const std::string& out_dir) {
  try {
    spec.validate();
  } catch (const cmaf::Error& e) {
    cmaf::fail_config(e.what());
  }
  const auto manifest = cmaf::data::synth_dataset(spec, out_dir);
  std::cout << manifest << "\n";
  return 0;
}

int cmd_features(const CommonArgs& args, const std::string& out_path) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  validate_whole_config(cfg, ds);

  auto os = open_out_file(out_path);
  os << "subject,trial,track,segment,channel";
  for (std::size_t f = 0; f < ds.feature_dim; ++f) os << ",f" << f;
  os << "\n";
  for (const auto& trial : ds.trials) {
    for (const auto& fm : trial.eeg) {
      for (std::size_t ch = 0; ch < fm.channels; ++ch) {
        os << trial.subject << ',' << trial.trial << ',' << trial.track << ','
           << fm.segment_index << ',' << ch;
        const double* row = fm.row(ch);
        for (std::size_t f = 0; f < fm.feature_dim; ++f) os << ',' << num(row[f]);
        os << "\n";
      }
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

void write_train_outputs(const std::string& out_dir, Dimension dim,
                         std::vector<cmaf::train::SubjectCv>& cvs) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  write_folds(out_dir, dim, cvs);

  auto summary = open_out_file(
      (fs::path(out_dir) / (std::string("train_summary_") +
                            cmaf::data::dimension_name(dim) + ".csv"))
          .string());
  summary << "subject,fold,epochs,best_epoch,best_val_j\n";

  for (auto& cv : cvs) {
    for (auto& fo : cv.folds) {
      cmaf::model::save_checkpoint(
          (fs::path(out_dir) / ckpt_name(cv.subject, fo.fold, dim)).string(),
          fo.result.params, fo.result.standardizer);

      // machine-parseable per-epoch records
      auto log = open_out_file(
          (fs::path(out_dir) / ("log_s" + std::to_string(cv.subject) + "_f" +
                                std::to_string(fo.fold) + "_" +
                                cmaf::data::dimension_name(dim) + ".txt"))
              .string());
      for (const auto& e : fo.result.report.epochs) {
        log << "epoch=" << e.epoch << " ell_a=" << fixed6(e.ell_a)
            << " ell_b=" << fixed6(e.ell_b) << " ell_dd=" << fixed6(e.ell_dd)
            << " j=" << fixed6(e.j) << " val_j=" << fixed6(e.val_j) << "\n";
      }
      summary << cv.subject << ',' << fo.fold << ','
              << fo.result.report.stopping_epoch << ','
              << fo.result.report.best_epoch << ','
              << fixed6(fo.result.report.best_val_j) << "\n";
    }
  }
}

int cmd_train(const CommonArgs& args, const std::string& out_dir,
              Dimension dim, int jobs) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  const auto dims = dims_from(cfg, ds);
  const auto tc = train_from(cfg);
  validate_whole_config(cfg, ds);

  auto cvs = cmaf::train::cross_validate_all(ds, dim, dims, tc, 5, jobs);
  write_train_outputs(out_dir, dim, cvs);
  std::cout << "trained " << cvs.size() << " subject(s) x 5 folds ("
            << cmaf::data::dimension_name(dim) << ") -> " << out_dir << "\n";
  return 0;
}

int cmd_eval(const CommonArgs& args, const std::string& ckpt_dir,
             const std::string& out_dir, Dimension dim, bool full_corpus) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const auto opt = eval_from(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  validate_whole_config(cfg, ds);
  const auto folds = embed_folds(ds, ckpt_dir, dim, full_corpus);

  std::map<int, std::vector<cmaf::eval::FoldMetrics>> per_subject;
  for (const auto& fd : folds) {
    std::vector<const cmaf::eval::TrialEmbeddings*> extra;
    for (const auto& t : fd.rest) extra.push_back(&t);
    per_subject[fd.subject].push_back(
        cmaf::eval::evaluate_fold(fd.test, opt, extra));
  }

  std::vector<cmaf::eval::SubjectRow> rows;
  for (const auto& [subject, metrics] : per_subject)
    rows.push_back({subject, cmaf::eval::mean_metrics(metrics)});

  const auto path =
      (std::filesystem::path(out_dir) / (std::string("metrics_") +
                                         cmaf::data::dimension_name(dim) +
                                         ".csv"))
          .string();
  cmaf::eval::write_metrics_report(path, rows);

  const auto mean = cmaf::eval::mean_metrics([&] {
    std::vector<cmaf::eval::FoldMetrics> all;
    for (const auto& r : rows) all.push_back(r.metrics);
    return all;
  }());
  std::cout << "acc_seg_eeg=" << fixed6(mean.acc_seg_eeg)
            << " acc_agg_eeg=" << fixed6(mean.acc_agg_eeg)
            << " acc_seg_music=" << fixed6(mean.acc_seg_music)
            << " acc_agg_music=" << fixed6(mean.acc_agg_music)
            << " p_at_10=" << fixed6(mean.p_at_k) << " map=" << fixed6(mean.map)
            << " exact_at_1=" << fixed6(mean.exact_at_1) << "\n";
  std::cout << "wrote " << path << "\n";
  return 0;
}

int cmd_retrieve(const CommonArgs& args, const std::string& ckpt_dir,
                 const std::string& out_path, Dimension dim, bool full_corpus) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const auto opt = eval_from(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  validate_whole_config(cfg, ds);
  const auto folds = embed_folds(ds, ckpt_dir, dim, full_corpus);

  auto os = open_out_file(out_path);
  os << "subject,fold,query_trial,query_track,query_label,rank,track,score,"
        "relevant\n";
  for (const auto& fd : folds) {
    std::vector<const cmaf::eval::TrialEmbeddings*> corpus;
    for (const auto& t : fd.test) corpus.push_back(&t);
    for (const auto& t : fd.rest) corpus.push_back(&t);
    for (const auto& q : fd.test) {
      const auto ranking = cmaf::eval::retrieve(q, corpus, opt);
      for (std::size_t r = 0; r < ranking.size(); ++r) {
        os << fd.subject << ',' << fd.fold << ',' << q.trial << ',' << q.track
           << ',' << q.label << ',' << r + 1 << ',' << ranking[r].track_id
           << ',' << fixed6(ranking[r].score) << ',' << ranking[r].relevant
           << "\n";
      }
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_temporal(const CommonArgs& args, const std::string& ckpt_dir,
                 const std::string& out_path, Dimension dim) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const auto opt = eval_from(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  validate_whole_config(cfg, ds);
  const auto folds = embed_folds(ds, ckpt_dir, dim, /*full_corpus=*/false);

  // per track: one AP-over-time row per (subject) query of that track
  std::map<int, std::vector<std::vector<double>>> per_track;
  for (const auto& fd : folds) {
    std::vector<const cmaf::eval::TrialEmbeddings*> corpus;
    for (const auto& t : fd.test) corpus.push_back(&t);
    for (const auto& q : fd.test) {
      std::vector<double> curve;
      bool scoreable = true;
      for (std::size_t s = 0; s < q.eeg.size() && scoreable; ++s) {
        const auto ranking = cmaf::eval::retrieve_segment(q, s, corpus, opt);
        std::vector<int> rel(ranking.size());
        bool any = false;
        for (std::size_t i = 0; i < ranking.size(); ++i) {
          rel[i] = ranking[i].relevant;
          any = any || ranking[i].relevant;
        }
        if (!any) {
          scoreable = false;
          break;
        }
        curve.push_back(cmaf::eval::average_precision(rel));
      }
      if (scoreable) per_track[q.track].push_back(std::move(curve));
    }
  }
  cmaf::check(!per_track.empty(), "temporal: no scoreable queries");

  std::vector<std::pair<int, cmaf::eval::TemporalCurve>> curves;
  for (const auto& [track, rows] : per_track)
    curves.emplace_back(track,
                        cmaf::eval::temporal_map(rows, opt.smooth_window));
  cmaf::eval::write_temporal_report(out_path, curves);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_export(const CommonArgs& args, const std::string& ckpt_dir,
               const std::string& out_path, Dimension dim) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  validate_whole_config(cfg, ds);
  const auto folds = embed_folds(ds, ckpt_dir, dim, /*full_corpus=*/false);

  std::vector<cmaf::eval::TrialEmbeddings> all;
  for (const auto& fd : folds)
    for (const auto& t : fd.test) all.push_back(t);
  cmaf::check(!all.empty(), "export: nothing to export");
  cmaf::eval::export_embeddings(all, all.front().eeg.front().size(), out_path);
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

std::vector<double> parse_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      cmaf::fail_config(what, ": unparseable number '", item, "'");
    }
  }
  if (out.empty()) cmaf::fail_config(what, ": empty list");
  return out;
}

int cmd_sweep(const CommonArgs& args, const std::string& out_dir, Dimension dim,
              const std::string& l1s, const std::string& l2s,
              const std::string& l11s, const std::string& l12s, int jobs) {
  KvConfig cfg = build_config(args);
  const auto load = load_options(cfg);
  const Dataset ds = cmaf::data::load_dataset(args.manifest, load);
  const auto dims = dims_from(cfg, ds);
  const auto base = train_from(cfg);
  const auto opt = eval_from(cfg);
  validate_whole_config(cfg, ds);

  const auto grid1 = parse_list(l1s, "--lambda1-list");
  const auto grid2 = parse_list(l2s, "--lambda2-list");
  const auto grid11 = parse_list(l11s, "--lambda11-list");
  const auto grid12 = parse_list(l12s, "--lambda12-list");

  const auto path =
      (std::filesystem::path(out_dir) / (std::string("sweep_") +
                                         cmaf::data::dimension_name(dim) +
                                         ".csv"))
          .string();
  auto os = open_out_file(path);
  os << "lambda1,lambda2,lambda11,lambda12,acc_seg_eeg,acc_agg_eeg,"
        "acc_seg_music,acc_agg_music,p_at_10,map,exact_at_1\n";

  for (double l1 : grid1) {
    for (double l2 : grid2) {
      for (double l11 : grid11) {
        for (double l12 : grid12) {
          cmaf::train::TrainConfig tc = base;
          tc.lambdas = {l1, l2, l11, l12};
          auto cvs = cmaf::train::cross_validate_all(ds, dim, dims, tc, 5, jobs);

          std::vector<cmaf::eval::FoldMetrics> fold_metrics;
          for (auto& cv : cvs) {
            for (auto& fo : cv.folds) {
              std::vector<cmaf::eval::TrialEmbeddings> test;
              for (std::size_t ti : fo.test_trials)
                test.push_back(cmaf::eval::embed_trial(
                    fo.result.params, fo.result.standardizer, ds.trials[ti],
                    ti, dim));
              fold_metrics.push_back(cmaf::eval::evaluate_fold(test, opt));
            }
          }
          const auto mean = cmaf::eval::mean_metrics(fold_metrics);
          os << num(l1) << ',' << num(l2) << ',' << num(l11) << ',' << num(l12);
          for (double v : {mean.acc_seg_eeg, mean.acc_agg_eeg,
                           mean.acc_seg_music, mean.acc_agg_music, mean.p_at_k,
                           mean.map, mean.exact_at_1})
            os << ',' << fixed6(v);
          os << "\n";
          std::cerr << "[sweep] l1=" << l1 << " l2=" << l2 << " l11=" << l11
                    << " l12=" << l12 << " acc_agg_eeg=" << fixed6(mean.acc_agg_eeg)
                    << " map=" << fixed6(mean.map) << "\n";
        }
      }
    }
  }
  std::cout << "wrote " << path << "\n";
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"cross-modal EEG-music affect pipeline"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic paired dataset");
  cmaf::data::SynthSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--tracks", spec.tracks, "number of tracks (>= 10)");
  synth->add_option("--segments", spec.segments_per_track, "segments per track");
  synth->add_option("--channels", spec.channels, "EEG channels");
  synth->add_option("--subjects", spec.subjects, "subjects");
  synth->add_option("--music-dim", spec.music_dim, "music embedding dimension");
  synth->add_option("--separability", spec.separability, "class separation in [0,1]");
  synth->add_option("--domain-shift", spec.domain_shift, "music-space offset scale");
  synth->add_option("--tag-correlation", spec.tag_correlation,
                    "P(arousal tag == valence tag)");
  synth->add_option("--eeg-noise", spec.eeg_noise,
                    "EEG-side latent noise multiplier");
  synth->add_option("--seed", spec.seed, "generator seed");
  synth->add_option("--sample-rate", spec.sample_rate, "sample rate in Hz");

  // common options helper
  auto add_common = [](CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--manifest", args.manifest, "dataset manifest CSV")
        ->required();
    cmd->add_option("--config", args.config_path, "key=value config file");
  };
  auto add_override = [](CLI::App* cmd, CommonArgs& args, const char* flag,
                         const char* key, const char* help) {
    auto* opt = cmd->add_option_function<std::string>(
        flag,
        [&args, key](const std::string& v) { args.overrides.emplace_back(key, v); },
        help);
    return opt;
  };

  // features
  auto* features = app.add_subcommand("features", "dump DE feature matrices");
  CommonArgs fe_args;
  std::string fe_out;
  add_common(features, fe_args);
  features->add_option("--out", fe_out, "output CSV")->required();
  add_override(features, fe_args, "--per-window", "features.per_window",
               "true: 12 features per channel; false: 4 per-band means")
      ->expected(1);

  // train
  auto* train = app.add_subcommand("train", "train per-subject 5-fold models");
  CommonArgs tr_args;
  std::string tr_out, tr_dim;
  int tr_jobs = 1;
  bool no_music = false, no_grl = false;
  add_common(train, tr_args);
  train->add_option("--out", tr_out, "output directory")->required();
  train->add_option("--dimension", tr_dim, "valence or arousal")->required();
  train->add_option("--jobs", tr_jobs, "parallel (subject, fold) workers");
  train->add_flag("--no-music", no_music,
                  "ablation: EEG supervision only (drops music loss and GRL)");
  train->add_flag("--no-grl", no_grl, "ablation: no domain discriminator");
  add_override(train, tr_args, "--lr", "training.learning_rate", "learning rate");
  add_override(train, tr_args, "--batch-size", "training.batch_size", "batch size");
  add_override(train, tr_args, "--max-epochs", "training.max_epochs", "epoch cap");
  add_override(train, tr_args, "--patience", "training.patience", "early-stop patience");
  add_override(train, tr_args, "--seed", "training.seed", "training seed");
  add_override(train, tr_args, "--lambda1", "training.lambda1", "J1 weight");
  add_override(train, tr_args, "--lambda2", "training.lambda2", "J2 weight");
  add_override(train, tr_args, "--lambda11", "training.lambda11", "ell_a weight");
  add_override(train, tr_args, "--lambda12", "training.lambda12", "ell_b weight");
  add_override(train, tr_args, "--grl-lambda", "training.grl_lambda",
               "gradient reversal scale");
  add_override(train, tr_args, "--lstm-hidden", "model.lstm_hidden", "LSTM width");

  // eval / retrieve / temporal / export share inputs
  CommonArgs ev_args, rt_args, tp_args, ex_args;
  std::string ev_ckpt, ev_out, ev_dim, rt_ckpt, rt_out, rt_dim;
  std::string tp_ckpt, tp_out, tp_dim, ex_ckpt, ex_out, ex_dim;
  bool ev_full = false, rt_full = false;

  auto* eval_cmd = app.add_subcommand("eval", "evaluate trained checkpoints");
  add_common(eval_cmd, ev_args);
  eval_cmd->add_option("--checkpoints", ev_ckpt, "train output directory")->required();
  eval_cmd->add_option("--out", ev_out, "report directory")->required();
  eval_cmd->add_option("--dimension", ev_dim, "valence or arousal")->required();
  eval_cmd->add_flag("--full-corpus", ev_full, "rank against all subject tracks");
  add_override(eval_cmd, ev_args, "--mode", "eval.mode", "aggregated or segment");
  add_override(eval_cmd, ev_args, "--distance", "eval.distance",
               "euclidean or cosine");
  add_override(eval_cmd, ev_args, "--k", "eval.k", "precision cutoff");

  auto* retrieve_cmd = app.add_subcommand("retrieve", "dump per-query rankings");
  add_common(retrieve_cmd, rt_args);
  retrieve_cmd->add_option("--checkpoints", rt_ckpt, "train output directory")->required();
  retrieve_cmd->add_option("--out", rt_out, "output CSV")->required();
  retrieve_cmd->add_option("--dimension", rt_dim, "valence or arousal")->required();
  retrieve_cmd->add_flag("--full-corpus", rt_full, "rank against all subject tracks");
  add_override(retrieve_cmd, rt_args, "--distance", "eval.distance",
               "euclidean or cosine");

  auto* temporal_cmd =
      app.add_subcommand("temporal", "per-track mAP curves over segments");
  add_common(temporal_cmd, tp_args);
  temporal_cmd->add_option("--checkpoints", tp_ckpt, "train output directory")->required();
  temporal_cmd->add_option("--out", tp_out, "output CSV")->required();
  temporal_cmd->add_option("--dimension", tp_dim, "valence or arousal")->required();
  add_override(temporal_cmd, tp_args, "--smooth-window", "eval.smooth_window",
               "moving average width (odd)");

  auto* export_cmd =
      app.add_subcommand("export", "dump common-space embeddings");
  add_common(export_cmd, ex_args);
  export_cmd->add_option("--checkpoints", ex_ckpt, "train output directory")->required();
  export_cmd->add_option("--out", ex_out, "output CSV")->required();
  export_cmd->add_option("--dimension", ex_dim, "valence or arousal")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "grid over lambda weights");
  CommonArgs sw_args;
  std::string sw_out, sw_dim;
  std::string sw_l1 = "1", sw_l2 = "0,0.5,1", sw_l11 = "1", sw_l12 = "1";
  int sw_jobs = 1;
  add_common(sweep, sw_args);
  sweep->add_option("--out", sw_out, "output directory")->required();
  sweep->add_option("--dimension", sw_dim, "valence or arousal")->required();
  sweep->add_option("--lambda1-list", sw_l1, "comma-separated values");
  sweep->add_option("--lambda2-list", sw_l2, "comma-separated values");
  sweep->add_option("--lambda11-list", sw_l11, "comma-separated values");
  sweep->add_option("--lambda12-list", sw_l12, "comma-separated values");
  sweep->add_option("--jobs", sw_jobs, "parallel (subject, fold) workers");
  add_override(sweep, sw_args, "--max-epochs", "training.max_epochs", "epoch cap");
  add_override(sweep, sw_args, "--lr", "training.learning_rate", "learning rate");
  add_override(sweep, sw_args, "--seed", "training.seed", "training seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (synth->parsed()) return cmd_synth(spec, synth_out);
  if (features->parsed()) return cmd_features(fe_args, fe_out);
  if (train->parsed()) {
    if (no_music) {
      // Table-3 "ell_a only": sole-EEG training has nothing to discriminate
      tr_args.overrides.emplace_back("training.music_supervision", "false");
      tr_args.overrides.emplace_back("training.domain_discriminator", "false");
    }
    if (no_grl)
      tr_args.overrides.emplace_back("training.domain_discriminator", "false");
    return cmd_train(tr_args, tr_out, parse_dimension(tr_dim), tr_jobs);
  }
  if (eval_cmd->parsed())
    return cmd_eval(ev_args, ev_ckpt, ev_out, parse_dimension(ev_dim), ev_full);
  if (retrieve_cmd->parsed())
    return cmd_retrieve(rt_args, rt_ckpt, rt_out, parse_dimension(rt_dim),
                        rt_full);
  if (temporal_cmd->parsed())
    return cmd_temporal(tp_args, tp_ckpt, tp_out, parse_dimension(tp_dim));
  if (export_cmd->parsed())
    return cmd_export(ex_args, ex_ckpt, ex_out, parse_dimension(ex_dim));
  if (sweep->parsed())
    return cmd_sweep(sw_args, sw_out, parse_dimension(sw_dim), sw_l1, sw_l2,
                     sw_l11, sw_l12, sw_jobs);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cmaf::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
