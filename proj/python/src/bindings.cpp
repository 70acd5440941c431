#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fieldgen/datasets/csv.hpp"
#include "fieldgen/datasets/synthetic.hpp"
#include "fieldgen/dynamics/sde.hpp"
#include "fieldgen/fpverify/fp.hpp"
#include "fieldgen/matcher/divergence.hpp"
#include "fieldgen/matcher/losses.hpp"
#include "fieldgen/matcher/oracle.hpp"
#include "fieldgen/matcher/train.hpp"
#include "fieldgen/mdp/rl.hpp"
#include "fieldgen/metrics/distances.hpp"

namespace py = pybind11;
using namespace fieldgen;
using numkit::RngStream;
using numkit::SampleSet;
using numkit::Vec;

namespace {

SampleSet sample_set_from(const std::vector<Vec>& points) {
  SampleSet s;
  s.points = points;
  s.require_nonempty();
  s.require_uniform_dim();
  return s;
}

dynamics::AnalyticTarget mog_target(const datasets::MogSpec& spec) {
  dynamics::AnalyticTarget t;
  t.dim = spec.dim();
  t.density = [spec](const Vec& x) { return datasets::mog_fields(spec, x).first; };
  t.gradient = [spec](const Vec& x) { return datasets::mog_fields(spec, x).second; };
  return t;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "field-matching generative modeling, SDE sampling and distributional RL";

  // ---- numkit ----
  py::class_<RngStream>(m, "RngStream")
      .def(py::init<std::uint64_t, std::uint64_t>(), py::arg("seed"), py::arg("stream_id") = 0)
      .def("uniform01", &RngStream::uniform01)
      .def("normal", &RngStream::normal)
      .def("next_u64", &RngStream::next_u64);

  m.def(
      "gaussian_pdf",
      [](const Vec& x, const Vec& mean, double var) { return numkit::gaussian_pdf(x, mean, var); },
      py::arg("x"), py::arg("mean"), py::arg("var"));

  m.def(
      "sample_slice",
      [](const std::string& dist, int d, RngStream& rng) {
        return numkit::sample_slice(numkit::parse_slice_dist(dist), d, rng);
      },
      py::arg("dist"), py::arg("d"), py::arg("rng"));

  // ---- datasets ----
  py::class_<datasets::MogSpec>(m, "MogSpec")
      .def(py::init<>())
      .def_readwrite("weights", &datasets::MogSpec::weights)
      .def_readwrite("means", &datasets::MogSpec::means)
      .def_readwrite("var", &datasets::MogSpec::var)
      .def_static("unbalanced_three_mode_2d", &datasets::MogSpec::unbalanced_three_mode_2d)
      .def_static("gaussian_1d", &datasets::MogSpec::gaussian_1d, py::arg("mean") = 0.0,
                  py::arg("var") = 1.0)
      .def_static("bimodal_1d", &datasets::MogSpec::bimodal_1d, py::arg("separation") = 2.0,
                  py::arg("var") = 1.0);

  m.def(
      "gen_mog",
      [](const datasets::MogSpec& spec, int n, std::uint64_t seed) {
        RngStream rng(seed, 0);
        return datasets::gen_mog(spec, n, rng).points;
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));
  m.def(
      "mog_fields",
      [](const datasets::MogSpec& spec, const Vec& x) { return datasets::mog_fields(spec, x); },
      py::arg("spec"), py::arg("x"));
  m.def(
      "gen_two_moons",
      [](int n, double noise, std::uint64_t seed) {
        RngStream rng(seed, 0);
        return datasets::gen_two_moons(n, noise, rng).points;
      },
      py::arg("n"), py::arg("noise"), py::arg("seed"));

  // ---- fieldnet ----
  py::class_<fieldnet::FieldModelPair>(m, "FieldModelPair")
      .def_static(
          "make",
          [](int dim, const std::vector<int>& hidden, const std::string& activation,
             std::uint64_t seed) {
            RngStream rng(seed, 0);
            return fieldnet::FieldModelPair::make(dim, hidden,
                                                  fieldnet::parse_activation(activation), 0, rng);
          },
          py::arg("dim"), py::arg("hidden") = std::vector<int>{64, 64},
          py::arg("activation") = "tanh", py::arg("seed") = 0)
      .def("g", [](const fieldnet::FieldModelPair& p, const Vec& x) { return p.g(x); })
      .def("s", [](const fieldnet::FieldModelPair& p, const Vec& x) { return p.s(x); })
      .def("g_jvp",
           [](const fieldnet::FieldModelPair& p, const Vec& x, const Vec& v) {
             return p.g_jvp(x, v);
           })
      .def("dim", &fieldnet::FieldModelPair::dim)
      .def("save", &fieldnet::save_checkpoint, py::arg("path"))
      .def_static("load", &fieldnet::load_checkpoint, py::arg("path"));

  // ---- matcher ----
  py::class_<matcher::LossReport>(m, "LossReport")
      .def_readonly("loss_grad", &matcher::LossReport::loss_grad)
      .def_readonly("loss_id", &matcher::LossReport::loss_id)
      .def_readonly("step", &matcher::LossReport::step)
      .def_readonly("epsilon", &matcher::LossReport::epsilon)
      .def_readonly("slice_count", &matcher::LossReport::slice_count);

  m.def(
      "train_fields",
      [](fieldnet::FieldModelPair& pair, const std::vector<Vec>& data, double epsilon,
         int slice_count, std::int64_t steps, int batch_pairs, double lr, std::uint64_t seed) {
        matcher::TrainConfig cfg;
        cfg.kernel.epsilon = epsilon;
        cfg.slice_count = slice_count;
        cfg.steps = steps;
        cfg.batch_pairs = batch_pairs;
        cfg.adam.learning_rate = lr;
        const auto result = matcher::train_fields(pair, sample_set_from(data), cfg, seed);
        return result.log;
      },
      py::arg("pair"), py::arg("data"), py::arg("epsilon") = 0.5, py::arg("slice_count") = 1,
      py::arg("steps") = 20000, py::arg("batch_pairs") = 64, py::arg("lr") = 1e-3,
      py::arg("seed") = 0,
      "Train the field pair on data with the sliced matching losses; returns the loss log.");

  m.def(
      "loss_id_slice",
      [](const fieldnet::FieldModelPair& pair, const Vec& x1, const Vec& x2, const Vec& w,
         double epsilon) {
        return matcher::loss_id_slice([&pair](const Vec& x) { return pair.s(x); }, x1, x2, w,
                                      {epsilon});
      },
      py::arg("pair"), py::arg("x1"), py::arg("x2"), py::arg("w"), py::arg("epsilon"));
  m.def(
      "loss_grad_slice",
      [](const fieldnet::FieldModelPair& pair, const Vec& x1, const Vec& x2, const Vec& v,
         const Vec& w, double epsilon) {
        return matcher::loss_grad_slice(
            [&pair](const Vec& x) { return pair.g(x); },
            [&pair](const Vec& x, const Vec& dir) { return pair.g_jvp(x, dir); }, x1, x2, v, w,
            {epsilon});
      },
      py::arg("pair"), py::arg("x1"), py::arg("x2"), py::arg("v"), py::arg("w"),
      py::arg("epsilon"));

  m.def(
      "grid_oracle_fit",
      [](const std::vector<Vec>& samples, double epsilon, double lo, double hi, int nodes) {
        const auto fit =
            matcher::grid_oracle_fit(sample_set_from(samples), epsilon, {{lo, hi, nodes}});
        return py::make_tuple(fit.density.values, fit.gradient[0]);
      },
      py::arg("samples"), py::arg("epsilon"), py::arg("lo"), py::arg("hi"), py::arg("nodes"),
      "Closed-form kernel-smoothed density and its derivative on a 1-D grid.");

  // ---- dynamics ----
  auto run_to_points = [](const dynamics::SampleRun& run) { return run.finals.points; };
  m.def(
      "sample_learned",
      [run_to_points](const fieldnet::FieldModelPair& pair, std::int64_t steps, double eta,
                      int chains, std::uint64_t seed) {
        dynamics::SdeConfig cfg;
        cfg.steps = steps;
        cfg.eta = eta;
        cfg.chains = chains;
        return run_to_points(dynamics::sample_learned(pair, cfg, seed));
      },
      py::arg("pair"), py::arg("steps") = 300, py::arg("eta") = 0.1, py::arg("chains") = 1000,
      py::arg("seed") = 0);
  m.def(
      "sample_analytic_mog",
      [run_to_points](const datasets::MogSpec& spec, std::int64_t steps, double eta, int chains,
                      std::uint64_t seed) {
        dynamics::SdeConfig cfg;
        cfg.steps = steps;
        cfg.eta = eta;
        cfg.chains = chains;
        return run_to_points(dynamics::sample_analytic(mog_target(spec), cfg, seed));
      },
      py::arg("spec"), py::arg("steps") = 300, py::arg("eta") = 0.1, py::arg("chains") = 1000,
      py::arg("seed") = 0);
  m.def(
      "sample_langevin_mog",
      [run_to_points](const datasets::MogSpec& spec, std::int64_t steps, double eta, int chains,
                      double s_min, std::uint64_t seed) {
        dynamics::SdeConfig cfg;
        cfg.steps = steps;
        cfg.eta = eta;
        cfg.chains = chains;
        return run_to_points(dynamics::sample_langevin(mog_target(spec), cfg, s_min, seed));
      },
      py::arg("spec"), py::arg("steps") = 1000, py::arg("eta") = 0.01, py::arg("chains") = 1000,
      py::arg("s_min") = 1e-3, py::arg("seed") = 0);

  // ---- metrics ----
  m.def(
      "wasserstein_1d",
      [](const std::vector<Vec>& a, const std::vector<Vec>& b, std::uint64_t seed) {
        return metrics::wasserstein_1d(sample_set_from(a), sample_set_from(b), seed);
      },
      py::arg("a"), py::arg("b"), py::arg("seed") = 0);
  m.def(
      "sliced_wasserstein",
      [](const std::vector<Vec>& a, const std::vector<Vec>& b, int projections,
         std::uint64_t seed) {
        RngStream rng(seed, 0);
        return metrics::sliced_wasserstein(sample_set_from(a), sample_set_from(b), projections,
                                           rng);
      },
      py::arg("a"), py::arg("b"), py::arg("projections") = 64, py::arg("seed") = 0);
  m.def(
      "mmd2",
      [](const std::vector<Vec>& a, const std::vector<Vec>& b, double sigma) {
        const auto sa = sample_set_from(a);
        const auto sb = sample_set_from(b);
        if (sigma <= 0.0) sigma = metrics::median_heuristic_bandwidth(sa, sb);
        return metrics::mmd2(sa, sb, sigma);
      },
      py::arg("a"), py::arg("b"), py::arg("sigma") = 0.0);
  m.def(
      "mode_mass",
      [](const std::vector<Vec>& samples, const std::vector<Vec>& centers) {
        return metrics::mode_mass(sample_set_from(samples), centers);
      },
      py::arg("samples"), py::arg("centers"));

  // ---- density-evolution verifier ----
  m.def(
      "fp_verify_mog",
      [](const datasets::MogSpec& spec, double lo, double hi, int nodes, double t_end,
         int records) {
        const auto target = mog_target(spec);
        auto prob = fpverify::make_problem(
            {lo, hi, nodes}, [&](double x) { return target.density({x}); },
            [&](double x) { return target.gradient({x})[0]; });
        Vec p0(prob.target.size(), 0.0);
        for (int i = 0; i < nodes; ++i) {
          const double x = prob.axis.node(i);
          if (x >= lo * 0.85 && x <= hi * 0.85) p0[static_cast<std::size_t>(i)] = 1.0;
        }
        const double z = fpverify::mass_of(p0, prob.axis.spacing());
        for (double& v : p0) v /= z;
        const double dt = prob.stable_dt();
        const long steps = static_cast<long>(t_end / dt);
        const auto trace =
            fpverify::evolve(prob, std::move(p0), dt, steps, std::max(1L, steps / records));
        const auto fit = fpverify::fit_decay_rate(trace.times, trace.kl, trace.kl.back() * 3.0);
        py::dict out;
        out["times"] = trace.times;
        out["kl"] = trace.kl;
        out["mass"] = trace.mass;
        out["alpha_hat"] = fit.alpha_hat;
        out["r2"] = fit.r2;
        out["stationarity_residual"] = fpverify::stationarity_residual(prob, dt);
        return out;
      },
      py::arg("spec"), py::arg("lo") = -6.0, py::arg("hi") = 6.0, py::arg("nodes") = 601,
      py::arg("t_end") = 200.0, py::arg("records") = 200,
      "Evolve the sampling dynamics' density equation from a uniform start and fit the KL decay.");

  // ---- divergences on grids ----
  m.def(
      "div_grad_1d",
      [](const Vec& p, const Vec& q, double lo, double hi) {
        matcher::GridDensity gp = matcher::GridDensity::zeros({{lo, hi, (int)p.size()}});
        matcher::GridDensity gq = gp;
        gp.values = p;
        gq.values = q;
        return matcher::div_grad(gp, gq);
      },
      py::arg("p"), py::arg("q"), py::arg("lo"), py::arg("hi"));
  m.def(
      "div_id_1d",
      [](const Vec& p, const Vec& q, double lo, double hi) {
        matcher::GridDensity gp = matcher::GridDensity::zeros({{lo, hi, (int)p.size()}});
        matcher::GridDensity gq = gp;
        gp.values = p;
        gq.values = q;
        return matcher::div_id(gp, gq);
      },
      py::arg("p"), py::arg("q"), py::arg("lo"), py::arg("hi"));

  // ---- distributional RL (smoke-level surface) ----
  m.def(
      "frozenlake_policy_eval_w1",
      [](std::int64_t updates, int rollouts, std::uint64_t seed) {
        const auto env = mdp::FrozenLakeEnv::standard(true, 0.95);
        const mdp::Policy policy = [](const mdp::RlObservation&, RngStream& r) {
          return static_cast<int>(r.uniform_index(4));
        };
        mdp::PolicyEvalConfig cfg;
        cfg.updates = updates;
        cfg.bd.gamma = 0.95;
        cfg.bd.xi = 0.02;
        cfg.bd.epsilon = 5e-4;
        cfg.bd.adam.learning_rate = 1e-3;
        const auto model = mdp::bd_evaluate_policy(env, policy, cfg, seed);
        const auto mc = mdp::mc_return_distribution(env, policy, rollouts, 0.95, 10000, seed + 1);
        return mdp::return_distribution_w1(model, {env.lake().start_state, {}}, -1, mc.returns);
      },
      py::arg("updates") = 8000, py::arg("rollouts") = 20000, py::arg("seed") = 7,
      "Learn the fixed-policy return distribution on the 4x4 lake and compare against rollouts.");

  m.def("rl_train_curve", [](const std::string& env_name, const std::string& kind,
                             std::int64_t steps, std::uint64_t seed) {
    mdp::RlTrainConfig cfg;
    cfg.kind = mdp::parse_model_kind(kind);
    cfg.env_steps = steps;
    cfg.eval_every = std::max<std::int64_t>(1, steps / 10);
    cfg.eval_episodes = 5;
    std::unique_ptr<mdp::Env> env;
    if (env_name == "frozenlake") {
      cfg.gamma = 0.95;
      cfg.episode_cap = 250;
      env = std::make_unique<mdp::FrozenLakeEnv>(mdp::FrozenLakeEnv::standard(true, 0.95));
    } else if (env_name == "cartpole") {
      cfg.gamma = 0.99;
      cfg.episode_cap = 500;
      env = std::make_unique<mdp::CartPoleEnv>();
    } else {
      throw std::invalid_argument("unknown env: " + env_name);
    }
    const auto result = mdp::rl_train(*env, cfg, seed);
    std::vector<std::pair<std::int64_t, double>> curve;
    for (const auto& p : result.curve) curve.emplace_back(p.env_step, p.eval_return_mean);
    return curve;
  });
}
