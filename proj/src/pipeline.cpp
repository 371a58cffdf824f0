#include "mlfd/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

namespace mlfd {

std::string to_string(Method m) { return m == Method::kMld ? "mld" : "bm"; }

Method parse_method(const std::string& s) {
  if (s == "bm") return Method::kBm;
  if (s == "mld") return Method::kMld;
  throw ConfigError("unknown method '" + s + "' (expected bm or mld)");
}

void RunConfig::validate() const {
  if (r_max < 1 || r_max > 64) throw ConfigError("rmax must be in [1, 64]");
  if (levels < 1 || levels > 12) throw ConfigError("levels must be in [1, 12]");
  if (min_cell_side < 1) throw ConfigError("min-cell must be >= 1");
  if (!(holdout > 0.0 && holdout < 1.0)) throw ConfigError("holdout must be in (0, 1)");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ConfigError("ridge must be a finite value >= 0");
  if (mem_budget_mib < 1) throw ConfigError("mem-budget must be >= 1 MiB");
  if (workers < 1) throw ConfigError("workers must be >= 1");
}

DilationOptions RunConfig::dilation(unsigned dilation_workers) const {
  return {.r_max = r_max, .memory_budget_bytes = mem_budget_mib << 20, .workers = dilation_workers};
}

MultilevelOptions RunConfig::multilevel(unsigned dilation_workers) const {
  return {.levels = levels, .min_cell_side = min_cell_side, .dilation = dilation(dilation_workers)};
}

nlohmann::json RunConfig::to_json() const {
  return {{"r_max", r_max},         {"levels", levels}, {"min_cell_side", min_cell_side},
          {"holdout", holdout},     {"ridge", ridge},   {"seed", seed},
          {"method", to_string(method)}, {"mem_budget_mib", mem_budget_mib},
          {"workers", workers}};
}

void RunConfig::merge_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "r_max") r_max = value.get<int>();
      else if (key == "levels") levels = value.get<int>();
      else if (key == "min_cell_side") min_cell_side = value.get<std::size_t>();
      else if (key == "holdout") holdout = value.get<double>();
      else if (key == "ridge") ridge = value.get<double>();
      else if (key == "seed") seed = value.get<std::uint64_t>();
      else if (key == "method") method = parse_method(value.get<std::string>());
      else if (key == "mem_budget_mib") mem_budget_mib = value.get<std::uint64_t>();
      else if (key == "workers") workers = value.get<unsigned>();
      else throw ConfigError("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig cfg;
  cfg.merge_json(j);
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  try {
    return RunConfig::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<std::string> feature_names(const RunConfig& cfg) {
  const auto radii = achievable_distances(cfg.r_max);
  std::vector<std::string> names;
  if (cfg.method == Method::kBm) {
    for (auto d2 : radii.squared) names.push_back("d_squared_" + std::to_string(d2));
  } else {
    for (std::size_t i = 1; i <= radii.size(); ++i) names.push_back("K_avg_" + std::to_string(i));
    for (std::size_t i = 1; i <= radii.size(); ++i) names.push_back("K_dev_" + std::to_string(i));
  }
  return names;
}

std::vector<double> extract_features(const GrayImage& img, const RunConfig& cfg,
                                     unsigned dilation_workers) {
  if (cfg.method == Method::kBm) return bm_descriptors(img, cfg.dilation(dilation_workers)).values;
  return build_efv(img, cfg.multilevel(dilation_workers)).efv;
}

FeatureMatrix extract_dataset(const DatasetManifest& manifest, const RunConfig& cfg) {
  cfg.validate();
  const std::size_t n = manifest.entries.size();
  if (n == 0) throw DataError("manifest has no entries");
  const auto names = feature_names(cfg);

  std::vector<std::vector<double>> rows(n);
  std::vector<std::exception_ptr> failures(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || abort.load()) return;
      try {
        rows[i] = extract_features(load_grayscale(manifest.entries[i].path), cfg);
      } catch (...) {
        failures[i] = std::current_exception();
        abort.store(true);
      }
    }
  };
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(cfg.workers, n));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    const std::string where = manifest.entries[i].path.string();
    try {
      std::rethrow_exception(failures[i]);
    } catch (const ResourceLimitError& e) {
      throw ResourceLimitError(where + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    } catch (const std::exception& e) {
      throw DataError(where + ": " + e.what());
    }
  }

  FeatureMatrix m;
  m.x.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < names.size(); ++j) {
      m.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    m.labels.push_back(manifest.entries[i].label);
  }
  m.feature_names = names;
  return m;
}

EvaluationResult evaluate_features(const FeatureMatrix& data, const RunConfig& cfg) {
  cfg.validate();
  data.validate();
  if (data.classes().size() < 2) throw DataError("evaluation needs at least 2 classes");

  const auto split = stratified_holdout(data, cfg.holdout, cfg.seed);
  EvaluationResult result;
  if (cfg.method == Method::kMld) {
    const auto ranking = rank_features(split.train, cfg.seed, cfg.ridge);
    result.selection = select_mld(split.train, ranking.order, cfg.seed, cfg.ridge);
    result.features_used = result.selection->selected();
  } else {
    result.features_used.resize(data.cols());
    for (std::size_t j = 0; j < data.cols(); ++j) result.features_used[j] = j;
  }
  const auto train = split.train.select_columns(result.features_used);
  const auto test = split.test.select_columns(result.features_used);
  result.report = evaluate(fit_lda(train, cfg.ridge), test);
  return result;
}

nlohmann::json evaluation_json(const EvaluationResult& result, const FeatureMatrix& data,
                               const RunConfig& cfg) {
  nlohmann::json j;
  j["config"] = cfg.to_json();
  j["metrics"] = metrics_to_json(result.report, result.features_used.size());
  std::vector<std::string> used;
  for (auto idx : result.features_used) {
    used.push_back(data.feature_names.empty() ? "f" + std::to_string(idx + 1)
                                              : data.feature_names[idx]);
  }
  j["features_used"] = used;
  if (result.selection) {
    j["selection"] = {{"prefix_length", result.selection->prefix_length},
                      {"prefix_accuracy", result.selection->prefix_accuracy}};
  }
  return j;
}

DescribeResult describe_image(const GrayImage& img, const RunConfig& cfg) {
  cfg.validate();
  DescribeResult r;
  r.curve = dilation_curve(img, cfg.dilation(cfg.workers));
  r.descriptors = descriptors_from_curve(r.curve);
  r.fd = estimate_fd(r.curve);
  if (cfg.method == Method::kMld) r.multilevel = build_efv(img, cfg.multilevel(cfg.workers));
  return r;
}

std::string describe_to_text(const DescribeResult& r) {
  std::ostringstream out;
  out << descriptor_csv_header(r.curve.radii) << '\n';
  for (std::size_t k = 0; k < r.descriptors.size(); ++k) {
    out << (k ? "," : "") << format_real(r.descriptors.values[k]);
  }
  out << "\n\n" << curve_to_csv(r.curve) << '\n';
  out << "fractal_dimension,slope,rms_residual,points\n"
      << format_real(r.fd.dimension) << ',' << format_real(r.fd.slope) << ','
      << format_real(r.fd.rms_residual) << ',' << r.fd.points << '\n';
  if (r.multilevel) {
    out << '\n' << efv_csv_header(r.descriptors.size()) << '\n';
    for (std::size_t k = 0; k < r.multilevel->efv.size(); ++k) {
      out << (k ? "," : "") << format_real(r.multilevel->efv[k]);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mlfd
