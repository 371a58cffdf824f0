#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mlfd/pipeline.hpp"

namespace mlfd::cli {

namespace fs = std::filesystem;

namespace {

struct ConfigFlags {
  std::optional<std::string> config_file;
  std::optional<int> r_max;
  std::optional<int> levels;
  std::optional<std::size_t> min_cell;
  std::optional<std::string> method;
  std::optional<double> holdout;
  std::optional<double> ridge;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> mem_budget;

  void attach(CLI::App* app) {
    app->add_option("--config", config_file, "JSON config file (flags override it)");
    app->add_option("--rmax", r_max, "Maximum dilation radius (default 10)");
    app->add_option("--levels", levels, "Decomposition levels (default 3)");
    app->add_option("--min-cell", min_cell, "Minimum cell side in pixels (default 32)");
    app->add_option("--method", method, "Descriptor method: bm or mld (default bm)");
    app->add_option("--holdout", holdout, "Training fraction of the hold-out split (default 0.5)");
    app->add_option("--ridge", ridge, "Relative covariance ridge (default 1e-6)");
    app->add_option("--seed", seed, "Random seed (default 0)");
    app->add_option("--workers", workers, "Worker threads (default 1)");
    app->add_option("--mem-budget", mem_budget, "Voxel storage budget in MiB (default 512)");
  }

  RunConfig resolve() const {
    RunConfig cfg = config_file ? load_config_file(*config_file) : RunConfig{};
    if (r_max) cfg.r_max = *r_max;
    if (levels) cfg.levels = *levels;
    if (min_cell) cfg.min_cell_side = *min_cell;
    if (method) cfg.method = parse_method(*method);
    if (holdout) cfg.holdout = *holdout;
    if (ridge) cfg.ridge = *ridge;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    if (mem_budget) cfg.mem_budget_mib = *mem_budget;
    cfg.validate();
    return cfg;
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(path.string() + ": cannot open for writing");
  f << text;
  if (!f) throw DataError(path.string() + ": write failed");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": cannot create directory: " + ec.message());
}

std::string row_csv(const std::string& header, const std::vector<double>& values) {
  std::string s = header + "\n";
  for (std::size_t k = 0; k < values.size(); ++k) s += (k ? "," : "") + format_real(values[k]);
  return s + "\n";
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilevel Bouligand-Minkowski fractal texture descriptors", "mlfd"};
  app.require_subcommand(1);

  ConfigFlags flags;
  std::string input;
  std::optional<std::string> out_path;

  auto* describe = app.add_subcommand("describe", "Descriptors, dilation curve and FD of one image");
  describe->add_option("image", input, "PGM or PNG image")->required();
  describe->add_option("--out", out_path, "Output directory (default: standard output)");
  flags.attach(describe);

  auto* extract = app.add_subcommand("extract", "Feature CSV for a class-per-directory dataset");
  extract->add_option("root", input, "Dataset root")->required();
  extract->add_option("--out", out_path, "Output CSV file (default: standard output)");
  flags.attach(extract);

  auto* evaluate = app.add_subcommand("evaluate", "Hold-out LDA evaluation of a feature CSV");
  evaluate->add_option("features", input, "Feature CSV with a final label column")->required();
  evaluate->add_option("--out", out_path, "Directory for metrics.json and confusion.csv");
  flags.attach(evaluate);

  int n_classes = 5, samples = 10;
  std::size_t size = 64;
  std::uint64_t synth_seed = 0;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic texture dataset");
  synth->add_option("--out", out_path, "Output directory")->required();
  synth->add_option("--classes", n_classes, "Number of classes, 2..8 (default 5)");
  synth->add_option("--samples", samples, "Samples per class (default 10)");
  synth->add_option("--size", size, "Image side in pixels, >= 32 (default 64)");
  synth->add_option("--seed", synth_seed, "Generator seed (default 0)");

  auto* scan = app.add_subcommand("scan", "Print the dataset manifest as CSV");
  scan->add_option("root", input, "Dataset root")->required();
  scan->add_option("--out", out_path, "Output CSV file (default: standard output)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "mlfd: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (describe->parsed()) {
      const auto cfg = flags.resolve();
      const auto result = describe_image(load_grayscale(input), cfg);
      if (!out_path) {
        out << describe_to_text(result);
      } else {
        const fs::path dir = *out_path;
        ensure_dir(dir);
        write_file(dir / "descriptors.csv",
                   row_csv(descriptor_csv_header(result.curve.radii), result.descriptors.values));
        write_file(dir / "curve.csv", curve_to_csv(result.curve));
        write_file(dir / "fd.csv", "fractal_dimension,slope,rms_residual,points\n" +
                                       format_real(result.fd.dimension) + "," +
                                       format_real(result.fd.slope) + "," +
                                       format_real(result.fd.rms_residual) + "," +
                                       std::to_string(result.fd.points) + "\n");
        if (result.multilevel) {
          write_file(dir / "efv.csv", row_csv(efv_csv_header(result.descriptors.size()),
                                              result.multilevel->efv));
        }
      }
    } else if (extract->parsed()) {
      const auto cfg = flags.resolve();
      const auto features = extract_dataset(scan_dataset(input), cfg);
      if (out_path) {
        std::ofstream f(*out_path, std::ios::binary);
        if (!f) throw DataError(*out_path + ": cannot open for writing");
        write_feature_csv(f, features);
      } else {
        write_feature_csv(out, features);
      }
    } else if (evaluate->parsed()) {
      const auto cfg = flags.resolve();
      const auto data = read_feature_csv(input);
      const auto result = evaluate_features(data, cfg);
      const std::string json = evaluation_json(result, data, cfg).dump(2) + "\n";
      if (out_path) {
        const fs::path dir = *out_path;
        ensure_dir(dir);
        write_file(dir / "metrics.json", json);
        write_file(dir / "confusion.csv", confusion_to_csv(result.report));
      } else {
        out << json;
      }
    } else if (synth->parsed()) {
      const auto n = generate_synthetic(*out_path, {n_classes, samples, size, synth_seed});
      err << "wrote " << n << " images to " << *out_path << "\n";
    } else if (scan->parsed()) {
      const auto csv = manifest_to_csv(scan_dataset(input));
      if (out_path) write_file(*out_path, csv);
      else out << csv;
    }
  } catch (const ConfigError& e) {
    err << "mlfd: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceLimitError& e) {
    err << "mlfd: " << e.what() << "\n";
    return kResourceLimit;
  } catch (const std::exception& e) {
    err << "mlfd: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace mlfd::cli
