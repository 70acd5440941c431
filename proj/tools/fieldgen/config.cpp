#include "config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "fieldgen/datasets/csv.hpp"
#include "fieldgen/numkit/gaussian.hpp"

namespace fieldgen::cli {

using datasets::MogSpec;
using datasets::SpanSpec;
using numkit::RngStream;
using numkit::Vec;

json load_config_file(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  if (!in) throw CliError(2, "cannot open config file: " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw CliError(2, "config file is not valid JSON: " + path);
  if (!j.is_object()) throw CliError(2, "config root must be a JSON object: " + path);
  return j;
}

void apply_override(json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw CliError(2, "override must look like key.path=value: " + assignment);
  }
  const std::string key_path = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;  // plain string

  json* node = &cfg;
  std::size_t start = 0;
  while (true) {
    const auto dot = key_path.find('.', start);
    const std::string part = key_path.substr(start, dot - start);
    if (part.empty()) throw CliError(2, "bad override key: " + key_path);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    if (!node->is_object() && !node->is_null()) {
      throw CliError(2, "override path crosses a non-object: " + key_path);
    }
    start = dot + 1;
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& scope) {
  if (!j.is_object()) throw CliError(2, scope + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw CliError(2, "unknown key '" + key + "' in " + scope + " (known: " + known + ")");
    }
  }
}

std::string resolve_out_dir(const json& cfg, const std::string& command) {
  if (cfg.contains("out")) return cfg.at("out").get<std::string>();
  const char* root = std::getenv("FIELDGEN_OUT_ROOT");
  const std::string base = root ? root : "runs";
  return base + "/" + command;
}

namespace {

MogSpec mog_from_json(const json& spec) {
  MogSpec mog;
  if (spec.contains("weights")) {
    mog.weights.clear();
    mog.means.clear();
    mog.weights = spec.at("weights").get<Vec>();
    for (const auto& m : spec.at("means")) mog.means.push_back(m.get<Vec>());
  } else {
    mog = MogSpec::unbalanced_three_mode_2d();
  }
  mog.var = get_or(spec, "var", mog.var);
  mog.validate();
  return mog;
}

}  // namespace

int dataset_dim(const json& spec) {
  const std::string kind = get_or<std::string>(spec, "kind", "gauss1d");
  if (kind == "gauss1d" || kind == "bimodal1d" || kind == "spans") return 1;
  if (kind == "moons") return 2;
  if (kind == "mog") return mog_from_json(spec).dim();
  throw CliError(2, "dataset_dim: unknown or data-dependent dataset kind: " + kind);
}

numkit::SampleSet make_dataset(const json& spec, std::uint64_t seed) {
  reject_unknown_keys(spec, {"kind", "n", "mean", "var", "separation", "weights", "means",
                             "spans", "noise", "path", "standardize"},
                      "dataset");
  const std::string kind = get_or<std::string>(spec, "kind", "gauss1d");
  const int n = get_or(spec, "n", 20000);
  RngStream rng(seed, 0xDA7A);
  if (kind == "gauss1d") {
    return datasets::gen_mog(
        MogSpec::gaussian_1d(get_or(spec, "mean", 0.0), get_or(spec, "var", 1.0)), n, rng);
  }
  if (kind == "bimodal1d") {
    return datasets::gen_mog(
        MogSpec::bimodal_1d(get_or(spec, "separation", 2.0), get_or(spec, "var", 1.0)), n, rng);
  }
  if (kind == "mog") {
    return datasets::gen_mog(mog_from_json(spec), n, rng);
  }
  if (kind == "spans") {
    SpanSpec spans = SpanSpec::default_three_span();
    if (spec.contains("spans")) {
      spans.spans.clear();
      for (const auto& s : spec.at("spans")) {
        spans.spans.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
      }
    }
    return datasets::gen_disjoint_uniform(spans, n, rng);
  }
  if (kind == "moons") {
    return datasets::gen_two_moons(n, get_or(spec, "noise", 0.05), rng);
  }
  if (kind == "csv") {
    const std::string path = get_or<std::string>(spec, "path", "");
    if (path.empty()) throw CliError(2, "dataset kind csv requires a path");
    try {
      return datasets::load_csv(path, get_or(spec, "standardize", true)).samples;
    } catch (const std::exception& e) {
      throw CliError(2, e.what());
    }
  }
  throw CliError(2, "unknown dataset kind: " + kind +
                        " (known: gauss1d, bimodal1d, mog, spans, moons, csv)");
}

dynamics::AnalyticTarget make_analytic_target(const json& spec) {
  const std::string kind = get_or<std::string>(spec, "kind", "gauss1d");
  dynamics::AnalyticTarget target;
  if (kind == "gauss1d" || kind == "bimodal1d" || kind == "mog") {
    MogSpec mog;
    if (kind == "gauss1d") {
      mog = MogSpec::gaussian_1d(get_or(spec, "mean", 0.0), get_or(spec, "var", 1.0));
    } else if (kind == "bimodal1d") {
      mog = MogSpec::bimodal_1d(get_or(spec, "separation", 2.0), get_or(spec, "var", 1.0));
    } else {
      mog = mog_from_json(spec);
    }
    target.dim = mog.dim();
    target.density = [mog](const Vec& x) { return datasets::mog_fields(mog, x).first; };
    target.gradient = [mog](const Vec& x) { return datasets::mog_fields(mog, x).second; };
    return target;
  }
  if (kind == "smoothed-spans") {
    // disjoint uniform spans convolved with the relaxation kernel, so the
    // density is smooth enough for the evolution scheme
    SpanSpec spans = SpanSpec::default_three_span();
    if (spec.contains("spans")) {
      spans.spans.clear();
      for (const auto& s : spec.at("spans")) {
        spans.spans.emplace_back(s.at(0).get<double>(), s.at(1).get<double>());
      }
    }
    spans.validate();
    const double eps = get_or(spec, "epsilon", 0.05);
    if (!(eps > 0.0)) throw CliError(2, "smoothed-spans: epsilon must be > 0");
    const double sd = std::sqrt(eps);
    const double total = spans.total_length();
    auto spans_copy = spans.spans;
    target.dim = 1;
    target.density = [spans_copy, sd, total](const Vec& x) {
      double acc = 0.0;
      for (const auto& [lo, hi] : spans_copy) {
        acc += 0.5 * (std::erf((hi - x[0]) / (sd * M_SQRT2)) -
                      std::erf((lo - x[0]) / (sd * M_SQRT2)));
      }
      return acc / total;
    };
    target.gradient = [spans_copy, sd, total](const Vec& x) {
      double acc = 0.0;
      const double eps_var = sd * sd;
      for (const auto& [lo, hi] : spans_copy) {
        acc += numkit::gaussian_pdf_1d(x[0], lo, eps_var) -
               numkit::gaussian_pdf_1d(x[0], hi, eps_var);
      }
      return Vec{acc / total};
    };
    return target;
  }
  throw CliError(2, "unknown analytic target kind: " + kind +
                        " (known: gauss1d, bimodal1d, mog, smoothed-spans)");
}

}  // namespace fieldgen::cli
