#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mlfd/error.hpp"

namespace mlfd {

/// Samples in rows, features in columns, one class label per row.
struct FeatureMatrix {
  Eigen::MatrixXd x;
  std::vector<std::string> labels;
  std::vector<std::string> feature_names;  // empty or one per column

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(x.cols()); }

  /// Shape consistency and finiteness; throws DataError.
  void validate() const;
  /// Distinct labels in lexicographic order.
  std::vector<std::string> classes() const;

  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  FeatureMatrix select_columns(std::span<const std::size_t> cols) const;
};

/// Header row then one row per sample; the final column must be `label`.
FeatureMatrix read_feature_csv(std::istream& in);
FeatureMatrix read_feature_csv(const std::string& path);
/// Values are written with 12 significant digits.
void write_feature_csv(std::ostream& out, const FeatureMatrix& m);
std::string format_real(double v);

struct HoldoutSplit {
  FeatureMatrix train;
  FeatureMatrix test;
  std::vector<std::size_t> train_rows;  // indices into the source, ascending
  std::vector<std::size_t> test_rows;
};

/// Per class: floor(fraction * count) rows to train, clamped so both sides
/// keep at least one row. Classes are visited in label order with a single
/// seeded generator, so the split is a pure function of (data, fraction, seed).
HoldoutSplit stratified_holdout(const FeatureMatrix& data, double fraction, std::uint64_t seed);

struct Prediction {
  std::size_t class_index = 0;
  std::string label;
  std::vector<double> posteriors;  // aligned with LdaModel::classes()
};

/// Gaussian classifier with one pooled covariance and empirical priors.
class LdaModel {
 public:
  const std::vector<std::string>& classes() const { return classes_; }
  std::size_t dimension() const { return static_cast<std::size_t>(means_.cols()); }
  /// Row c is the mean of class c.
  const Eigen::MatrixXd& means() const { return means_; }
  /// Pooled within-class covariance after regularization.
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::VectorXd& priors() const { return priors_; }
  double ridge() const { return ridge_; }
  double shrinkage() const { return shrinkage_; }
  double min_eigenvalue() const;

  Prediction predict(const Eigen::VectorXd& x) const;

 private:
  friend LdaModel fit_lda(const FeatureMatrix& train, double ridge);

  std::vector<std::string> classes_;
  Eigen::MatrixXd means_;
  Eigen::MatrixXd covariance_;
  Eigen::VectorXd priors_;
  Eigen::MatrixXd weights_;  // d x C, covariance^-1 * mean_c
  Eigen::VectorXd bias_;     // -0.5 mean_c' weights_c + ln prior_c
  double ridge_ = 0.0;
  double shrinkage_ = 0.0;
};

inline constexpr double kDefaultRidge = 1e-6;
inline constexpr double kCovarianceFloor = 1e-9;

/// Regularizes the pooled covariance as S + (ridge * trace(S) / d + 1e-9) I.
LdaModel fit_lda(const FeatureMatrix& train, double ridge = kDefaultRidge);
Prediction predict_lda(const LdaModel& model, const Eigen::VectorXd& x);

using ConfusionMatrix = std::vector<std::vector<std::size_t>>;

struct ConfusionStats {
  double cr = 0.0;
  double kappa = 0.0;
  double ae1 = 0.0;
  double ae2 = 0.0;
};

/// CR, kappa, AE1 and AE2 of a square confusion matrix (rows = true class).
/// AE1 averages the per-class miss rate over classes present in the rows;
/// AE2 averages false assignments to class i over the population outside i.
ConfusionStats confusion_stats(const ConfusionMatrix& confusion);

struct MetricsReport {
  std::vector<std::string> classes;
  ConfusionMatrix confusion;
  double cr = 0.0;
  double kappa = 0.0;
  double acr = 0.0;  // mean max posterior, correctly classified samples
  double aer = 0.0;  // mean max posterior, misclassified samples (1 if none)
  double ae1 = 0.0;
  double ae2 = 0.0;
  std::vector<std::string> true_labels;
  std::vector<std::string> predicted_labels;
  std::vector<std::vector<double>> posteriors;

  std::size_t total() const;
};

MetricsReport evaluate(const LdaModel& model, const FeatureMatrix& test);

/// Metrics and confusion matrix; `nd` is the number of features used.
nlohmann::json metrics_to_json(const MetricsReport& report, std::size_t nd);
std::string confusion_to_csv(const MetricsReport& report);

struct FeatureRanking {
  std::vector<std::size_t> order;  // feature indices, best first
  std::vector<double> scores;      // validation accuracy per feature index
};

/// Scores each feature alone with a 1-D LDA on an internal split of the
/// training data and sorts by score (descending, ties by index).
FeatureRanking rank_features(const FeatureMatrix& train, std::uint64_t seed,
                             double ridge = kDefaultRidge);

struct SelectionResult {
  std::vector<std::size_t> ranked;
  std::size_t prefix_length = 0;
  std::vector<double> prefix_accuracy;  // entry i is for prefix length i + 1

  std::vector<std::size_t> selected() const {
    return {ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(prefix_length)};
  }
};

/// Smallest ranked prefix attaining the best internal validation accuracy.
SelectionResult select_mld(const FeatureMatrix& train, std::span<const std::size_t> ranked,
                           std::uint64_t seed, double ridge = kDefaultRidge);

inline constexpr double kSelectionFraction = 0.5;

}  // namespace mlfd
