// Copyright 2026 The AHDR Authors
// SPDX-License-Identifier: Apache-2.0

#include "ahdr/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "ahdr/checkpoint.hpp"
#include "ahdr/data_synth.hpp"
#include "ahdr/dataset_io.hpp"
#include "ahdr/file_util.hpp"
#include "ahdr/gradcheck_suite.hpp"
#include "ahdr/image_io.hpp"
#include "ahdr/inference.hpp"
#include "ahdr/metrics.hpp"
#include "ahdr/training.hpp"

namespace ahdr {

namespace fs = std::filesystem;

namespace {

struct GenDataArgs {
  std::size_t count = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string biases = "-2,0,2";
  std::size_t size = 64;
  double noise = 0.0;
};

struct TrainArgs {
  std::string data;
  std::string out;
  std::string resume;
  std::string log;
  std::string variant = "ahdr";
  std::string loss = "l1";
  std::size_t iters = 1000;
  std::size_t patch = 256;
  std::size_t batch = 8;
  double lr = 1e-5;
  std::uint64_t seed = 0;
  std::size_t base_channels = 64;
  std::size_t growth = 32;
  std::size_t blocks = 3;
  bool no_augment = false;
  std::size_t log_every = 10;
  std::size_t checkpoint_every = 0;
};

struct InferArgs {
  std::string ckpt, low, mid, high, out, tonemapped, attention_dir;
  std::string biases = "-2,0,2";
};

struct EvalArgs {
  std::string ckpt, data, report;
};

struct TonemapArgs {
  std::string in, out;
  double mu = 5000.0;
};

struct GradcheckArgs {
  std::vector<std::string> ops{"all"};
  std::uint64_t seed = 7;
};

void require_parent_dir(const std::string& path) {
  const fs::path parent = fs::absolute(fs::path(path)).parent_path();
  if (!fs::is_directory(parent)) throw ConfigError("output directory does not exist: " + parent.string());
}

std::string fingerprint(const NetConfig& net, const TrainConfig& train) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(configs_to_json(net, train))));
  return buf;
}

int run_gen_data(const GenDataArgs& a, std::ostream& out) {
  SynthOptions opts;
  opts.biases = parse_biases(a.biases);
  opts.width = opts.height = a.size;
  opts.noise_sigma = a.noise;
  if (a.count == 0) throw ConfigError("--count must be positive");
  if (a.size < 16) throw ConfigError("--size must be at least 16");
  if (a.noise < 0.0) throw ConfigError("--noise must be >= 0");
  dataset_generate(a.count, a.seed, a.out, opts);
  out << "wrote " << a.count << " samples to " << a.out << "\n";
  return kExitOk;
}

int run_train(const TrainArgs& a, std::ostream& out) {
  require_parent_dir(a.out);
  if (!a.log.empty()) require_parent_dir(a.log);
  std::vector<SampleTriplet> data = load_dataset(a.data);
  std::optional<Trainer> trainer;
  std::size_t until = a.iters;
  if (!a.resume.empty()) {
    const Checkpoint ckpt = load_checkpoint(a.resume);
    trainer.emplace(ckpt, std::move(data));
  } else {
    NetConfig sizes;
    sizes.base_channels = a.base_channels;
    sizes.growth_rate = a.growth;
    sizes.num_drdb = a.blocks;
    const NetConfig net = NetConfig::for_variant(parse_variant(a.variant), sizes);
    TrainConfig cfg;
    cfg.batch_size = a.batch;
    cfg.learning_rate = a.lr;
    cfg.patch_size = a.patch;
    cfg.loss = parse_loss(a.loss);
    cfg.max_iterations = a.iters;
    cfg.seed = a.seed;
    cfg.augment = !a.no_augment;
    cfg.log_every = a.log_every;
    cfg.checkpoint_every = a.checkpoint_every;
    trainer.emplace(net, cfg, std::move(data));
  }
  const fs::path ckpt_path = a.out;
  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log, a.resume.empty() ? std::ios::trunc : std::ios::app);
    if (!log) throw DataError(a.log + ": cannot open log file");
  }
  const auto emit = [&](const TrainRecord& r) {
    const std::string line = r.to_line();
    out << line << "\n" << std::flush;
    if (log.is_open()) log << line << "\n" << std::flush;
  };
  try {
    trainer->run(
        until, emit,
        [&](const Checkpoint& c) { save_checkpoint(ckpt_path, c); });
  } catch (const NumericError&) {
    // Keep the last good state on disk before reporting.
    save_checkpoint(ckpt_path, trainer->checkpoint());
    throw;
  }
  save_checkpoint(ckpt_path, trainer->checkpoint());
  return kExitOk;
}

Array<float> mean_map(const Array<float>& a) {
  const Shape& s = a.shape();
  Array<float> out(Shape{1, 3, s.h, s.w});
  for (std::size_t p = 0; p < s.plane(); ++p) {
    double acc = 0.0;
    for (std::size_t c = 0; c < s.c; ++c) acc += a.plane(0, c)[p];
    const float v = static_cast<float>(acc / static_cast<double>(s.c));
    for (std::size_t c = 0; c < 3; ++c) out.plane(0, c)[p] = v;
  }
  return out;
}

int run_infer(const InferArgs& a, std::ostream& out) {
  const std::array<int, 3> biases = parse_biases(a.biases);
  require_parent_dir(a.out);
  if (!a.tonemapped.empty()) require_parent_dir(a.tonemapped);
  if (!a.attention_dir.empty() && !fs::is_directory(a.attention_dir)) {
    throw ConfigError("attention directory does not exist: " + a.attention_dir);
  }
  const Checkpoint ckpt = load_checkpoint(a.ckpt);
  const NetworkParams<float> params = restore_params(ckpt.tensors, ckpt.net);
  const std::string paths[3] = {a.low, a.mid, a.high};
  std::array<ExposureImage, 3> ldrs;
  for (std::size_t f = 0; f < 3; ++f) ldrs[f] = ExposureImage::from_bias(read_ppm(paths[f]).pixels, biases[f]);
  for (std::size_t f = 1; f < 3; ++f) {
    if (ldrs[f].ldr.shape() != ldrs[0].ldr.shape()) {
      throw DataError(paths[f] + ": size " + ldrs[f].ldr.shape().str() + " differs from " + paths[0]);
    }
  }
  const Prediction p = predict(params, ckpt.net, ldrs, GammaParams{ckpt.train.gamma});
  if (!all_finite(p.hdr.radiance)) throw NumericError("non-finite values in the predicted image");
  write_pfm(a.out, p.hdr.radiance);
  if (!a.tonemapped.empty()) {
    write_ppm(a.tonemapped, mu_law_tonemap(clamp_values(p.hdr.radiance), TonemapParams{ckpt.train.mu}));
  }
  if (!a.attention_dir.empty()) {
    if (p.attention_low.size() == 0) throw ConfigError("checkpoint variant has no attention maps");
    write_pfm(fs::path(a.attention_dir) / "attention_low.pfm", mean_map(p.attention_low));
    write_pfm(fs::path(a.attention_dir) / "attention_high.pfm", mean_map(p.attention_high));
  }
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

int run_eval(const EvalArgs& a, std::ostream& out) {
  require_parent_dir(a.report);
  const Checkpoint ckpt = load_checkpoint(a.ckpt);
  const NetworkParams<float> params = restore_params(ckpt.tensors, ckpt.net);
  const std::vector<SampleTriplet> data = load_dataset(a.data);
  const GammaParams g{ckpt.train.gamma};
  const TonemapParams tm{ckpt.train.mu};
  const EvalReport net = evaluate(params, ckpt.net, data, g, tm, fingerprint(ckpt.net, ckpt.train));
  const EvalReport ref = evaluate_with(data, [&](const SampleTriplet& s) { return reference_only(s, g); }, tm);
  const EvalReport merge = evaluate_with(data, [&](const SampleTriplet& s) { return baseline_merge(s, g); }, tm);
  write_file_atomic(a.report, net.to_text());
  out << "network        psnr_mu " << net.mean_psnr_mu << "  psnr_l " << net.mean_psnr_l << "\n"
      << "reference_only psnr_mu " << ref.mean_psnr_mu << "  psnr_l " << ref.mean_psnr_l << "\n"
      << "baseline_merge psnr_mu " << merge.mean_psnr_mu << "  psnr_l " << merge.mean_psnr_l << "\n";
  return kExitOk;
}

int run_tonemap(const TonemapArgs& a, std::ostream& out) {
  const TonemapParams tm{a.mu};
  tm.validate();
  require_parent_dir(a.out);
  const Array<float> h = read_pfm(a.in);
  write_ppm(a.out, mu_law_tonemap(clamp_values(h), tm));
  out << "wrote " << a.out << "\n";
  return kExitOk;
}

int run_gradcheck_cmd(const GradcheckArgs& a, std::ostream& out) {
  const std::vector<GradCheckCase> cases = run_gradcheck(a.ops, a.seed);
  bool ok = true;
  for (const GradCheckCase& c : cases) {
    char line[256];
    std::snprintf(line, sizeof line, "%-4s %-10s %-18s %s=%.3e tol=%.0e checked=%zu worst=(%.6e, %.6e)",
                  c.passed() ? "PASS" : "FAIL", c.group.c_str(), c.name.c_str(),
                  c.metric == ErrorMetric::kElementwise ? "rel_error" : "norm_rel_error", c.error, c.tolerance,
                  c.checked, c.worst_analytic, c.worst_numeric);
    out << line << "\n";
    ok = ok && c.passed();
  }
  if (!ok) throw NumericError("gradient check failed");
  return kExitOk;
}

}  // namespace

int cli_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-exposure HDR reconstruction", "ahdr"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  GenDataArgs gen;
  CLI::App* gen_cmd = app.add_subcommand("gen-data", "Write a synthetic dataset");
  gen_cmd->add_option("--count", gen.count, "Number of samples")->required();
  gen_cmd->add_option("--seed", gen.seed, "Base seed")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory")->required();
  gen_cmd->add_option("--biases", gen.biases, "Exposure biases in stops")->capture_default_str();
  gen_cmd->add_option("--size", gen.size, "Image width and height")->capture_default_str();
  gen_cmd->add_option("--noise", gen.noise, "Sensor noise stddev")->capture_default_str();

  TrainArgs tr;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model; logs one JSON record per line");
  train_cmd->add_option("--data", tr.data, "Dataset directory")->required();
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--resume", tr.resume, "Continue from a checkpoint (configs come from it)");
  train_cmd->add_option("--log", tr.log, "Also append the JSON records to this file");
  train_cmd->add_option("--variant", tr.variant, "ahdr|drdb|a-rdb|rdb|rb|deep-rb|no-grl")->capture_default_str();
  train_cmd->add_option("--iters", tr.iters, "Total iterations")->capture_default_str();
  train_cmd->add_option("--patch", tr.patch, "Square patch size")->capture_default_str();
  train_cmd->add_option("--batch", tr.batch, "Batch size")->capture_default_str();
  train_cmd->add_option("--lr", tr.lr, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--loss", tr.loss, "l1|l2")->capture_default_str();
  train_cmd->add_option("--seed", tr.seed, "Seed")->capture_default_str();
  train_cmd->add_option("--base-channels", tr.base_channels, "Feature channels")->capture_default_str();
  train_cmd->add_option("--growth", tr.growth, "Dense growth rate")->capture_default_str();
  train_cmd->add_option("--blocks", tr.blocks, "Number of merging blocks")->capture_default_str();
  train_cmd->add_flag("--no-augment", tr.no_augment, "Disable flips and rotations");
  train_cmd->add_option("--log-every", tr.log_every, "Iterations between records")->capture_default_str();
  train_cmd->add_option("--checkpoint-every", tr.checkpoint_every, "Iterations between checkpoints (0 = end only)");

  InferArgs inf;
  CLI::App* infer_cmd = app.add_subcommand("infer", "Reconstruct an HDR image from three exposures");
  infer_cmd->add_option("--ckpt", inf.ckpt, "Checkpoint")->required();
  infer_cmd->add_option("--low", inf.low, "Short exposure PPM")->required();
  infer_cmd->add_option("--mid", inf.mid, "Reference exposure PPM")->required();
  infer_cmd->add_option("--high", inf.high, "Long exposure PPM")->required();
  infer_cmd->add_option("--biases", inf.biases, "Exposure biases in stops")->capture_default_str();
  infer_cmd->add_option("--out", inf.out, "Output PFM")->required();
  infer_cmd->add_option("--tonemapped", inf.tonemapped, "Also write a mu-law tonemapped PPM");
  infer_cmd->add_option("--dump-attention", inf.attention_dir, "Write channel-mean attention maps here");

  EvalArgs ev;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Score a checkpoint on a dataset");
  eval_cmd->add_option("--ckpt", ev.ckpt, "Checkpoint")->required();
  eval_cmd->add_option("--data", ev.data, "Dataset directory")->required();
  eval_cmd->add_option("--report", ev.report, "Report path")->required();

  TonemapArgs tmap;
  CLI::App* tonemap_cmd = app.add_subcommand("tonemap", "Mu-law tonemap a PFM into an 8-bit PPM");
  tonemap_cmd->add_option("--in", tmap.in, "Input PFM")->required();
  tonemap_cmd->add_option("--out", tmap.out, "Output PPM")->required();
  tonemap_cmd->add_option("--mu", tmap.mu, "Compression")->capture_default_str();

  GradcheckArgs gc;
  CLI::App* gradcheck_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient checks");
  gradcheck_cmd->add_option("--ops", gc.ops, "Groups to run (all, conv, relu, ...)")->delimiter(',');
  gradcheck_cmd->add_option("--seed", gc.seed, "Seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ahdr: error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return run_gen_data(gen, out);
    if (train_cmd->parsed()) return run_train(tr, out);
    if (infer_cmd->parsed()) return run_infer(inf, out);
    if (eval_cmd->parsed()) return run_eval(ev, out);
    if (tonemap_cmd->parsed()) return run_tonemap(tmap, out);
    if (gradcheck_cmd->parsed()) return run_gradcheck_cmd(gc, out);
  } catch (const ConfigError& e) {
    err << "ahdr: error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "ahdr: error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    err << "ahdr: error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace ahdr
