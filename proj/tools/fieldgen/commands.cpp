#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fieldgen/datasets/csv.hpp"
#include "fieldgen/fpverify/fp.hpp"
#include "fieldgen/matcher/train.hpp"
#include "fieldgen/mdp/rl.hpp"
#include "fieldgen/metrics/distances.hpp"
#include "fieldgen/report/csv.hpp"
#include "fieldgen/report/manifest.hpp"
#include "fieldgen/report/svg.hpp"

namespace fieldgen::cli {

namespace fs = std::filesystem;
using numkit::RngStream;
using numkit::SampleSet;
using numkit::Vec;
using report::CsvWriter;
using report::RunManifest;

namespace {

constexpr std::uint64_t kDatasetStream = 100;
constexpr std::uint64_t kModelInitStream = 101;
constexpr std::uint64_t kTrainStream = 102;
constexpr std::uint64_t kProjectionStream = 103;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw CliError(2, "cannot create output directory " + dir + ": " + ec.message());
}

/// Runs the command body with a manifest that lands on disk whether the body
/// succeeds or throws.
template <typename Body>
int with_manifest(const json& cfg, const std::string& command, const Body& body) {
  const std::string out_dir = resolve_out_dir(cfg, command);
  ensure_dir(out_dir);
  RunManifest manifest(out_dir, command, cfg.dump(2));
  try {
    const int code = body(out_dir, manifest);
    manifest.write(code == 0 ? "success" : "gate-failure");
    return code;
  } catch (const std::exception& e) {
    manifest.write("failure", e.what());
    throw;
  }
}

matcher::TrainConfig train_config_from(const json& t) {
  reject_unknown_keys(t, {"epsilon", "slices", "q_v", "q_w", "batch_pairs", "lr", "steps",
                          "log_every", "fd_jvp", "fd_h"},
                      "train");
  matcher::TrainConfig cfg;
  cfg.kernel.epsilon = get_or(t, "epsilon", 0.5);
  cfg.slice_count = get_or(t, "slices", 1);
  cfg.q_v = numkit::parse_slice_dist(get_or<std::string>(t, "q_v", "rademacher"));
  cfg.q_w = numkit::parse_slice_dist(get_or<std::string>(t, "q_w", "rademacher"));
  cfg.batch_pairs = get_or(t, "batch_pairs", 64);
  cfg.adam.learning_rate = get_or(t, "lr", 1e-3);
  cfg.steps = get_or<std::int64_t>(t, "steps", 20000);
  cfg.log_every = get_or(t, "log_every", 200);
  cfg.fd_jvp = get_or(t, "fd_jvp", false);
  cfg.fd_h = get_or(t, "fd_h", 1e-3);
  cfg.validate();
  return cfg;
}

fieldnet::FieldModelPair model_from(const json& m, int dim, std::uint64_t seed) {
  reject_unknown_keys(m, {"hidden", "activation"}, "model");
  const std::vector<int> hidden = get_or<std::vector<int>>(m, "hidden", {64, 64});
  const fieldnet::Activation act =
      fieldnet::parse_activation(get_or<std::string>(m, "activation", "tanh"));
  RngStream rng(seed, kModelInitStream);
  return fieldnet::FieldModelPair::make(dim, hidden, act, 0, rng);
}

dynamics::SdeConfig sde_config_from(const json& s, int dim) {
  reject_unknown_keys(s, {"steps", "eta", "chains", "init", "record_trajectories"}, "sde");
  dynamics::SdeConfig cfg;
  cfg.steps = get_or<std::int64_t>(s, "steps", 300);
  cfg.eta = get_or(s, "eta", 0.1);
  cfg.chains = get_or(s, "chains", 1000);
  if (s.contains("init")) {
    const json& init = s.at("init");
    if (init.is_string() && init.get<std::string>() == "standard-normal") {
      cfg.init = dynamics::InitDist::standard_normal();
    } else if (init.is_object() && init.contains("uniform")) {
      const auto box = init.at("uniform");
      Vec lo, hi;
      if (box.at(0).is_array()) {
        lo = box.at(0).get<Vec>();
        hi = box.at(1).get<Vec>();
      } else {
        lo.assign(static_cast<std::size_t>(dim), box.at(0).get<double>());
        hi.assign(static_cast<std::size_t>(dim), box.at(1).get<double>());
      }
      cfg.init = dynamics::InitDist::uniform_box(lo, hi);
    } else if (init.is_object() && init.contains("point")) {
      cfg.init = dynamics::InitDist::point(init.at("point").get<Vec>());
    } else {
      throw CliError(2, "sde.init must be \"standard-normal\", {\"uniform\": [lo, hi]} or "
                        "{\"point\": [...]}");
    }
  }
  cfg.validate();
  return cfg;
}

void write_samples_csv(const std::string& path, const SampleSet& samples) {
  const int d = samples.dim();
  std::vector<std::string> cols;
  for (int c = 0; c < d; ++c) cols.push_back("x_" + std::to_string(c + 1));
  cols.push_back("chain_id");
  cols.push_back("seed");
  CsvWriter csv(path, cols);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<double> row(samples.points[i]);
    row.push_back(static_cast<double>(i));
    row.push_back(static_cast<double>(samples.seed));
    csv.row(row);
  }
  csv.close();
}

/// Reads a samples CSV back, keeping only the x_* coordinate columns (or all
/// columns when no header names are present).
SampleSet read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open samples file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  // find coordinate columns from the header, if any
  std::vector<int> keep;
  {
    std::stringstream ss(text);
    std::string header;
    std::getline(ss, header);
    std::stringstream hs(header);
    std::string cell;
    int idx = 0;
    bool any_named = false;
    while (std::getline(hs, cell, ',')) {
      if (cell.rfind("x_", 0) == 0) {
        keep.push_back(idx);
        any_named = true;
      }
      ++idx;
    }
    if (!any_named) keep.clear();
  }

  datasets::CsvLoadResult parsed;
  try {
    parsed = datasets::parse_csv(text, false, path);
  } catch (const std::exception& e) {
    throw CliError(2, e.what());
  }
  if (keep.empty()) return parsed.samples;
  SampleSet out;
  out.source_label = parsed.samples.source_label;
  out.points.reserve(parsed.samples.size());
  for (const Vec& p : parsed.samples.points) {
    Vec q;
    q.reserve(keep.size());
    for (int c : keep) q.push_back(p[static_cast<std::size_t>(c)]);
    out.points.push_back(std::move(q));
  }
  return out;
}

}  // namespace

int cmd_train_gen(json cfg) {
  reject_unknown_keys(cfg, {"seed", "out", "dataset", "model", "train"}, "train-gen config");
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  return with_manifest(cfg, "train-gen", [&](const std::string& out_dir, RunManifest& manifest) {
    const SampleSet data = make_dataset(cfg.value("dataset", json::object()), seed);
    const matcher::TrainConfig tcfg = train_config_from(cfg.value("train", json::object()));
    fieldnet::FieldModelPair pair =
        model_from(cfg.value("model", json::object()), data.dim(), seed);

    CsvWriter loss_csv(out_dir + "/loss.csv",
                       {"step", "loss-grad", "loss-id", "epsilon", "slice-count", "wall-seconds"});
    const auto t0 = std::chrono::steady_clock::now();
    matcher::train_fields(pair, data, tcfg, seed, [&](const matcher::LossReport& rep) {
      if (!std::isfinite(rep.loss_grad) || !std::isfinite(rep.loss_id)) {
        throw CliError(3, "non-finite loss at step " + std::to_string(rep.step) +
                              " (loss-grad=" + std::to_string(rep.loss_grad) +
                              ", loss-id=" + std::to_string(rep.loss_id) + ")");
      }
      const double wall =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      loss_csv.row({static_cast<double>(rep.step), rep.loss_grad, rep.loss_id, rep.epsilon,
                    static_cast<double>(rep.slice_count), wall});
    });
    loss_csv.close();
    fieldnet::save_checkpoint(pair, out_dir + "/checkpoint.json");
    manifest.add_output("loss.csv");
    manifest.add_output("checkpoint.json");
    std::cout << "trained " << tcfg.steps << " steps on " << data.size() << " samples (dim "
              << data.dim() << "); checkpoint in " << out_dir << "\n";
    return 0;
  });
}

int cmd_sample(json cfg) {
  reject_unknown_keys(cfg, {"seed", "out", "checkpoint", "sde"}, "sample config");
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const std::string ckpt_path = get_or<std::string>(cfg, "checkpoint", "");
  if (ckpt_path.empty()) throw CliError(2, "sample: checkpoint path required");
  return with_manifest(cfg, "sample", [&](const std::string& out_dir, RunManifest& manifest) {
    fieldnet::FieldModelPair pair;
    try {
      pair = fieldnet::load_checkpoint(ckpt_path);
    } catch (const std::exception& e) {
      throw CliError(2, e.what());
    }
    const dynamics::SdeConfig scfg = sde_config_from(cfg.value("sde", json::object()), pair.dim());
    dynamics::SampleRun run;
    try {
      run = dynamics::sample_learned(pair, scfg, seed);
    } catch (const dynamics::DivergedChainError& e) {
      throw CliError(3, e.what());
    }
    write_samples_csv(out_dir + "/samples.csv", run.finals);
    manifest.add_output("samples.csv");
    if (pair.dim() == 1) {
      report::svg_histogram_1d(out_dir + "/samples.svg", run.finals, 80, "generated samples");
      manifest.add_output("samples.svg");
    } else if (pair.dim() == 2) {
      report::svg_scatter_2d(out_dir + "/samples.svg", run.finals, "generated samples");
      manifest.add_output("samples.svg");
    }
    std::cout << "sampled " << run.finals.size() << " points (T=" << scfg.steps
              << ", eta=" << scfg.eta << ") into " << out_dir << "\n";
    return 0;
  });
}

int cmd_eval(json cfg) {
  reject_unknown_keys(cfg, {"seed", "out", "a", "b", "metrics"}, "eval config");
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  const std::string path_a = get_or<std::string>(cfg, "a", "");
  const std::string path_b = get_or<std::string>(cfg, "b", "");
  if (path_a.empty() || path_b.empty()) throw CliError(2, "eval: both a and b are required");
  return with_manifest(cfg, "eval", [&](const std::string& out_dir, RunManifest& manifest) {
    const json mcfg = cfg.value("metrics", json::object());
    reject_unknown_keys(mcfg, {"projections", "mmd_sigma", "centers"}, "metrics");
    const SampleSet a = read_samples_csv(path_a);
    const SampleSet b = read_samples_csv(path_b);
    if (a.dim() != b.dim()) {
      throw CliError(2, "eval: dimension mismatch between a (" + std::to_string(a.dim()) +
                            ") and b (" + std::to_string(b.dim()) + ")");
    }

    CsvWriter csv(out_dir + "/metrics.csv",
                  {"metric", "value", "n_a", "n_b", "seed", "parameters"});
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());

    double wd;
    std::string wd_name, wd_params;
    if (a.dim() == 1) {
      wd = metrics::wasserstein_1d(a, b, seed);
      wd_name = "wasserstein-1d";
      wd_params = "order=1";
    } else {
      const int proj = get_or(mcfg, "projections", 128);
      RngStream rng(seed, kProjectionStream);
      wd = metrics::sliced_wasserstein(a, b, proj, rng);
      wd_name = "sliced-wasserstein";
      wd_params = "order=1;projections=" + std::to_string(proj);
    }
    csv.row_mixed({wd_name, CsvWriter::format(wd), CsvWriter::format(na), CsvWriter::format(nb),
                   std::to_string(seed), wd_params});

    double sigma = get_or(mcfg, "mmd_sigma", 0.0);
    if (sigma <= 0.0) sigma = metrics::median_heuristic_bandwidth(a, b, 2048, seed);
    const double mmd = metrics::mmd2(a, b, sigma);
    csv.row_mixed({"mmd2", CsvWriter::format(mmd), CsvWriter::format(na), CsvWriter::format(nb),
                   std::to_string(seed), "sigma=" + CsvWriter::format(sigma)});

    std::cout << wd_name << " = " << wd << "\n";
    std::cout << "mmd2 = " << mmd * 1e3 << " x 10^-3 (sigma = " << sigma << ")\n";

    if (mcfg.contains("centers")) {
      std::vector<Vec> centers;
      for (const auto& c : mcfg.at("centers")) centers.push_back(c.get<Vec>());
      const Vec mass_a = metrics::mode_mass(a, centers);
      const Vec mass_b = metrics::mode_mass(b, centers);
      for (std::size_t k = 0; k < centers.size(); ++k) {
        csv.row_mixed({"mode-mass-a-" + std::to_string(k), CsvWriter::format(mass_a[k]),
                       CsvWriter::format(na), CsvWriter::format(nb), std::to_string(seed), ""});
        csv.row_mixed({"mode-mass-b-" + std::to_string(k), CsvWriter::format(mass_b[k]),
                       CsvWriter::format(na), CsvWriter::format(nb), std::to_string(seed), ""});
      }
      std::cout << "mode masses (a vs b):";
      for (std::size_t k = 0; k < centers.size(); ++k) {
        std::cout << " " << mass_a[k] << "/" << mass_b[k];
      }
      std::cout << "\n";
    }
    csv.close();
    manifest.add_output("metrics.csv");
    return 0;
  });
}

int cmd_fp_verify(json cfg) {
  reject_unknown_keys(cfg, {"seed", "out", "fp"}, "fp-verify config");
  return with_manifest(cfg, "fp-verify", [&](const std::string& out_dir, RunManifest& manifest) {
    const json f = cfg.value("fp", json::object());
    reject_unknown_keys(f, {"target", "lo", "hi", "nodes", "t_end", "records",
                            "stationarity_nodes", "burn_frac", "floor_mult", "init_lo", "init_hi"},
                        "fp");
    const json target_spec = f.value("target", json{{"kind", "bimodal1d"}});
    const dynamics::AnalyticTarget target = make_analytic_target(target_spec);
    if (target.dim != 1) throw CliError(2, "fp-verify: 1-D targets only");

    const double lo = get_or(f, "lo", -6.0);
    const double hi = get_or(f, "hi", 6.0);
    const int nodes = get_or(f, "nodes", 601);
    const double t_end = get_or(f, "t_end", 400.0);
    const int records = get_or(f, "records", 400);
    const int fine_nodes = get_or(f, "stationarity_nodes", 4001);
    const double burn_frac = get_or(f, "burn_frac", 0.1);
    const double floor_mult = get_or(f, "floor_mult", 3.0);
    const double init_lo = get_or(f, "init_lo", lo + 0.08 * (hi - lo));
    const double init_hi = get_or(f, "init_hi", hi - 0.08 * (hi - lo));

    auto density_1d = [&](double x) { return target.density({x}); };
    auto deriv_1d = [&](double x) { return target.gradient({x})[0]; };

    // stationarity of the tabulated target under one fine-grid step
    const fpverify::FpProblem fine =
        fpverify::make_problem({lo, hi, fine_nodes}, density_1d, deriv_1d);
    const double resid = fpverify::stationarity_residual(fine, fine.stable_dt());
    const bool stationarity_ok = resid < 1e-8;

    // KL decay run from a uniform init on a coarser grid
    fpverify::FpProblem prob;
    double dt = 0.0;
    try {
      prob = fpverify::make_problem({lo, hi, nodes}, density_1d, deriv_1d);
      dt = prob.stable_dt();
    } catch (const fpverify::StepSizeError& e) {
      throw CliError(3, e.what());
    }
    Vec p0(prob.target.size(), 0.0);
    for (int i = 0; i < nodes; ++i) {
      const double x = prob.axis.node(i);
      if (x >= init_lo && x <= init_hi) p0[static_cast<std::size_t>(i)] = 1.0;
    }
    const double z0 = fpverify::mass_of(p0, prob.axis.spacing());
    if (!(z0 > 0.0)) throw CliError(2, "fp-verify: empty init support");
    for (double& v : p0) v /= z0;

    const long steps = static_cast<long>(t_end / dt);
    const fpverify::FpTrace trace =
        fpverify::evolve(prob, std::move(p0), dt, steps, std::max(1L, steps / records));

    CsvWriter csv(out_dir + "/fp.csv", {"time", "kl", "mass"});
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
      csv.row({trace.times[i], trace.kl[i], trace.mass[i]});
    }
    csv.close();
    manifest.add_output("fp.csv");

    // windowed monotonicity (averages of 10 consecutive records)
    bool monotone_ok = true;
    double prev_avg = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 10 <= trace.kl.size(); i += 10) {
      double avg = 0.0;
      for (std::size_t k = i; k < i + 10; ++k) avg += trace.kl[k];
      avg /= 10.0;
      if (avg > prev_avg * (1.0 + 1e-9)) monotone_ok = false;
      prev_avg = avg;
    }

    // decay fit over the post-burn-in, pre-floor window
    Vec fit_t, fit_kl;
    const std::size_t skip = static_cast<std::size_t>(burn_frac * trace.times.size());
    for (std::size_t i = skip; i < trace.times.size(); ++i) {
      fit_t.push_back(trace.times[i]);
      fit_kl.push_back(trace.kl[i]);
    }
    fpverify::DecayFit fit;
    try {
      fit = fpverify::fit_decay_rate(fit_t, fit_kl,
                                     std::max(trace.kl.back() * floor_mult, 1e-12));
    } catch (const fpverify::InsufficientSignalError& e) {
      throw CliError(3, e.what());
    }
    const bool fit_ok = fit.r2 > 0.95 && fit.alpha_hat > 0.0;

    report::svg_line_chart(out_dir + "/kl.svg",
                           {{"KL to target", trace.times, trace.kl, {}, {}}},
                           "density evolution: KL decay", "t", "KL", true);
    manifest.add_output("kl.svg");

    std::ostringstream summary;
    summary << "alpha-hat=" << fit.alpha_hat << " r2=" << fit.r2
            << " stationarity-residual=" << resid << " kl-monotone="
            << (monotone_ok ? "yes" : "no");
    std::cout << summary.str() << "\n";
    manifest.note("summary", summary.str());

    if (!stationarity_ok || !monotone_ok || !fit_ok) {
      std::cout << "gate failure:" << (stationarity_ok ? "" : " stationarity")
                << (monotone_ok ? "" : " monotonicity") << (fit_ok ? "" : " decay-fit") << "\n";
      return 1;
    }
    return 0;
  });
}

int cmd_rl(json cfg) {
  reject_unknown_keys(cfg, {"seed", "out", "rl"}, "rl config");
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  return with_manifest(cfg, "rl", [&](const std::string& out_dir, RunManifest& manifest) {
    const json r = cfg.value("rl", json::object());
    reject_unknown_keys(r, {"env", "kind", "steps", "seeds", "gamma", "batch", "replay",
                            "learn_start", "target_refresh", "eps_start", "eps_end", "eval_every",
                            "eval_episodes", "episode_cap", "quad", "bd", "c51", "slippery"},
                        "rl");
    const std::string env_name = get_or<std::string>(r, "env", "frozenlake");

    mdp::RlTrainConfig tcfg;
    tcfg.kind = mdp::parse_model_kind(get_or<std::string>(r, "kind", "bellman-diffusion"));
    tcfg.env_steps = get_or<std::int64_t>(r, "steps", 20000);
    tcfg.batch = get_or(r, "batch", 32);
    tcfg.replay_capacity = get_or(r, "replay", 10000);
    tcfg.learn_start = get_or(r, "learn_start", 500);
    tcfg.target_refresh = get_or(r, "target_refresh", 200);
    tcfg.eps_start = get_or(r, "eps_start", 1.0);
    tcfg.eps_end = get_or(r, "eps_end", 0.05);
    tcfg.eval_every = get_or<std::int64_t>(r, "eval_every", 500);
    tcfg.eval_episodes = get_or(r, "eval_episodes", 5);
    tcfg.expected_return_quad = get_or(r, "quad", 33);

    std::unique_ptr<mdp::Env> env;
    if (env_name == "frozenlake") {
      tcfg.gamma = get_or(r, "gamma", 0.95);
      tcfg.episode_cap = get_or<std::int64_t>(r, "episode_cap", 250);
      env = std::make_unique<mdp::FrozenLakeEnv>(
          mdp::FrozenLakeEnv::standard(get_or(r, "slippery", true), tcfg.gamma));
    } else if (env_name == "cartpole") {
      tcfg.gamma = get_or(r, "gamma", 1.0);
      tcfg.episode_cap = get_or<std::int64_t>(r, "episode_cap", 500);
      env = std::make_unique<mdp::CartPoleEnv>();
    } else {
      throw CliError(2, "unknown env: " + env_name + " (available: frozenlake, cartpole)");
    }

    const json bd = r.value("bd", json::object());
    reject_unknown_keys(bd, {"xi", "epsilon", "lr", "hidden", "embed_dim", "chain_rule_gamma",
                             "s_bias_init"},
                        "rl.bd");
    tcfg.bd.xi = get_or(bd, "xi", env_name == "cartpole" ? 0.02 : 0.05);
    tcfg.bd.epsilon = get_or(bd, "epsilon", env_name == "cartpole" ? 5e-4 : 2e-3);
    tcfg.bd.adam.learning_rate = get_or(bd, "lr", 2e-3);
    tcfg.bd.hidden = get_or<std::vector<int>>(bd, "hidden", {64, 64});
    tcfg.bd.embed_dim = get_or(bd, "embed_dim", 8);
    tcfg.bd.chain_rule_gamma = get_or(bd, "chain_rule_gamma", false);
    tcfg.bd.s_bias_init = get_or(bd, "s_bias_init", -4.0);

    const json c51 = r.value("c51", json::object());
    reject_unknown_keys(c51, {"atoms", "lr", "hidden"}, "rl.c51");
    tcfg.c51.atoms = get_or(c51, "atoms", 51);
    tcfg.c51.adam.learning_rate = get_or(c51, "lr", env_name == "cartpole" ? 1e-3 : 5e-3);
    tcfg.c51.hidden = get_or<std::vector<int>>(c51, "hidden", {64, 64});

    std::vector<std::uint64_t> seeds = get_or<std::vector<std::uint64_t>>(r, "seeds", {});
    if (seeds.empty()) seeds = {seed};

    std::vector<std::vector<mdp::CurvePoint>> curves;
    for (const std::uint64_t s : seeds) {
      const mdp::RlTrainResult result = rl_train(*env, tcfg, s);
      const std::string name = "curve-" + std::to_string(s) + ".csv";
      CsvWriter csv(out_dir + "/" + name,
                    {"env-step", "eval-return-mean", "eval-return-std", "loss-grad", "loss-id",
                     "epsilon-exploration", "seed"});
      for (const auto& p : result.curve) {
        csv.row({static_cast<double>(p.env_step), p.eval_return_mean, p.eval_return_std,
                 p.loss_grad, p.loss_id, p.eps_exploration, static_cast<double>(s)});
      }
      csv.close();
      manifest.add_output(name);
      curves.push_back(result.curve);
      std::cout << to_string(tcfg.kind) << " seed " << s << ": final eval "
                << result.curve.back().eval_return_mean << "\n";
    }

    // median and interquartile band across seeds, per evaluation point
    report::Series series;
    series.label = to_string(tcfg.kind);
    CsvWriter agg(out_dir + "/curve-aggregate.csv",
                  {"env-step", "median", "q25", "q75", "n-seeds"});
    const std::size_t points = curves.front().size();
    for (std::size_t i = 0; i < points; ++i) {
      std::vector<double> vals;
      for (const auto& c : curves) {
        if (i < c.size()) vals.push_back(c[i].eval_return_mean);
      }
      std::sort(vals.begin(), vals.end());
      auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(vals.size() - 1);
        const std::size_t lo_i = static_cast<std::size_t>(pos);
        const std::size_t hi_i = std::min(lo_i + 1, vals.size() - 1);
        return vals[lo_i] + (pos - static_cast<double>(lo_i)) * (vals[hi_i] - vals[lo_i]);
      };
      const double env_step = static_cast<double>(curves.front()[i].env_step);
      agg.row({env_step, quantile(0.5), quantile(0.25), quantile(0.75),
               static_cast<double>(vals.size())});
      series.x.push_back(env_step);
      series.y.push_back(quantile(0.5));
      series.y_lo.push_back(quantile(0.25));
      series.y_hi.push_back(quantile(0.75));
    }
    agg.close();
    manifest.add_output("curve-aggregate.csv");
    report::svg_line_chart(out_dir + "/curve.svg", {series}, env_name + " return", "env step",
                           "eval return");
    manifest.add_output("curve.svg");
    return 0;
  });
}

int cmd_ablate(json cfg) {
  reject_unknown_keys(cfg, {"seed", "out", "ablate"}, "ablate config");
  const std::uint64_t seed = get_or<std::uint64_t>(cfg, "seed", 0);
  return with_manifest(cfg, "ablate", [&](const std::string& out_dir, RunManifest& manifest) {
    const json ab = cfg.value("ablate", json::object());
    reject_unknown_keys(ab, {"epsilons", "slices", "dataset", "train", "sde", "heldout_n",
                             "projections"},
                        "ablate");
    const Vec epsilons = get_or<Vec>(ab, "epsilons", {0.01, 0.1, 0.5, 1.0});
    const std::vector<int> slice_counts = get_or<std::vector<int>>(ab, "slices", {1, 2, 3});
    const int heldout_n = get_or(ab, "heldout_n", 2048);
    const int projections = get_or(ab, "projections", 64);

    // completed cells from an interrupted sweep are skipped (the CSV is the
    // resume record; rows append in grid order so a resumed file matches a
    // fresh one byte for byte)
    const std::string table_path = out_dir + "/ablation.csv";
    std::set<std::pair<double, int>> done;
    if (fs::exists(table_path)) {
      const auto prior = datasets::load_csv(table_path, false);
      for (const Vec& row : prior.samples.points) {
        if (row.size() >= 2) done.insert({row[0], static_cast<int>(row[1])});
      }
    }

    std::ofstream table;
    if (done.empty()) {
      table.open(table_path);
      table << "epsilon,slices,wasserstein,mmd2\n";
    } else {
      table.open(table_path, std::ios::app);
    }
    if (!table) throw CliError(2, "cannot write " + table_path);

    const json dataset_spec = ab.value("dataset", json{{"kind", "mog"}});
    const SampleSet train_data = make_dataset(dataset_spec, seed);
    RngStream held_rng(seed, kDatasetStream + 7);
    json held_spec = dataset_spec;
    held_spec["n"] = heldout_n;
    const SampleSet heldout = make_dataset(held_spec, seed + 1);

    std::set<std::pair<double, int>> requested;  // deduplicates grid cells
    for (double eps : epsilons) {
      for (int n : slice_counts) requested.insert({eps, n});
    }

    for (const auto& [eps, n_slices] : requested) {
      if (done.count({eps, n_slices})) continue;
      json tcfg_json = ab.value("train", json::object());
      tcfg_json["epsilon"] = eps;
      tcfg_json["slices"] = n_slices;
      matcher::TrainConfig tcfg = train_config_from(tcfg_json);
      fieldnet::FieldModelPair pair =
          model_from(json::object(), train_data.dim(), seed + static_cast<std::uint64_t>(n_slices));
      matcher::train_fields(pair, train_data, tcfg, seed);

      dynamics::SdeConfig scfg = sde_config_from(ab.value("sde", json::object()), pair.dim());
      const dynamics::SampleRun run = dynamics::sample_learned(pair, scfg, seed + 17);

      double wd;
      if (train_data.dim() == 1) {
        wd = metrics::wasserstein_1d(run.finals, heldout, seed);
      } else {
        RngStream rng(seed, kProjectionStream);
        wd = metrics::sliced_wasserstein(run.finals, heldout, projections, rng);
      }
      const double sigma = metrics::median_heuristic_bandwidth(run.finals, heldout, 2048, seed);
      const double mmd = metrics::mmd2(run.finals, heldout, sigma);

      table << CsvWriter::format(eps) << "," << n_slices << "," << CsvWriter::format(wd) << ","
            << CsvWriter::format(mmd) << "\n";
      table.flush();
      std::cout << "cell epsilon=" << eps << " slices=" << n_slices << ": wasserstein=" << wd
                << " mmd2=" << mmd << "\n";
    }
    table.close();
    manifest.add_output("ablation.csv");
    return 0;
  });
}

}  // namespace fieldgen::cli
