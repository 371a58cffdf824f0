#include "mlfd/learner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

namespace mlfd {

// ---------------------------------------------------------------- matrix

void FeatureMatrix::validate() const {
  if (labels.size() != rows()) {
    throw DataError("feature matrix has " + std::to_string(rows()) + " rows but " +
                    std::to_string(labels.size()) + " labels");
  }
  if (!feature_names.empty() && feature_names.size() != cols()) {
    throw DataError("feature name count does not match column count");
  }
  if (!x.allFinite()) throw DataError("feature matrix contains NaN or infinite entries");
}

std::vector<std::string> FeatureMatrix::classes() const {
  std::vector<std::string> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), x.cols());
  out.feature_names = feature_names;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

FeatureMatrix FeatureMatrix::select_columns(std::span<const std::size_t> cols) const {
  FeatureMatrix out;
  out.x.resize(x.rows(), static_cast<Eigen::Index>(cols.size()));
  out.labels = labels;
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] >= this->cols()) throw ConfigError("column index out of range");
    out.x.col(static_cast<Eigen::Index>(j)) = x.col(static_cast<Eigen::Index>(cols[j]));
    if (!feature_names.empty()) out.feature_names.push_back(feature_names[cols[j]]);
  }
  return out;
}

// ---------------------------------------------------------------- CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

void strip_cr(std::string& s) {
  if (!s.empty() && s.back() == '\r') s.pop_back();
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

FeatureMatrix read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("feature CSV is empty");
  strip_cr(line);
  auto header = split_csv_line(line);
  if (header.size() < 2 || header.back() != "label") {
    throw DataError("feature CSV header must have >= 1 feature column and end with 'label'");
  }
  const std::size_t d = header.size() - 1;
  std::vector<double> values;
  std::vector<std::string> labels;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError("feature CSV line " + std::to_string(lineno) + ": expected " +
                      std::to_string(header.size()) + " fields, got " +
                      std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const char* begin = fields[j].c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0' || !std::isfinite(v)) {
        throw DataError("feature CSV line " + std::to_string(lineno) + ": bad number '" +
                        fields[j] + "'");
      }
      values.push_back(v);
    }
    if (fields.back().empty()) {
      throw DataError("feature CSV line " + std::to_string(lineno) + ": empty label");
    }
    labels.push_back(fields.back());
  }
  FeatureMatrix m;
  m.x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(d));
  m.labels = std::move(labels);
  header.pop_back();
  m.feature_names = std::move(header);
  m.validate();
  return m;
}

FeatureMatrix read_feature_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open feature CSV");
  return read_feature_csv(in);
}

void write_feature_csv(std::ostream& out, const FeatureMatrix& m) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    out << (m.feature_names.empty() ? "f" + std::to_string(j + 1) : m.feature_names[j]) << ',';
  }
  out << "label\n";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out << format_real(m.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) << ',';
    }
    out << m.labels[i] << '\n';
  }
}

// ---------------------------------------------------------------- hold-out

namespace {

// Unbiased draw in [0, n) from the raw 64-bit engine output; the standard
// distributions are implementation-defined and would break reproducibility.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace

HoldoutSplit stratified_holdout(const FeatureMatrix& data, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ConfigError("hold-out fraction must lie in (0, 1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < data.labels.size(); ++i) by_class[data.labels[i]].push_back(i);

  std::mt19937_64 rng(seed);
  HoldoutSplit split;
  for (auto& [label, rows] : by_class) {
    if (rows.size() < 2) {
      throw DataError("class '" + label + "' has fewer than 2 samples; cannot split");
    }
    for (std::size_t i = rows.size() - 1; i > 0; --i) {
      std::swap(rows[i], rows[bounded_draw(rng, i + 1)]);
    }
    auto n_train = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(rows.size())));
    n_train = std::clamp<std::size_t>(n_train, 1, rows.size() - 1);
    split.train_rows.insert(split.train_rows.end(), rows.begin(),
                            rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_rows.insert(split.test_rows.end(),
                           rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
  }
  std::sort(split.train_rows.begin(), split.train_rows.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  split.train = data.select_rows(split.train_rows);
  split.test = data.select_rows(split.test_rows);
  return split;
}

// ---------------------------------------------------------------- LDA

LdaModel fit_lda(const FeatureMatrix& train, double ridge) {
  train.validate();
  if (!(ridge >= 0.0)) throw ConfigError("ridge must be >= 0");
  if (train.cols() == 0) throw DataError("cannot fit LDA with zero features");
  LdaModel model;
  model.classes_ = train.classes();
  if (model.classes_.size() < 2) throw DataError("LDA needs at least 2 classes");

  const auto c = static_cast<Eigen::Index>(model.classes_.size());
  const auto d = train.x.cols();
  const auto n = train.x.rows();
  std::map<std::string, Eigen::Index> index;
  for (Eigen::Index k = 0; k < c; ++k) index[model.classes_[static_cast<std::size_t>(k)]] = k;

  model.means_ = Eigen::MatrixXd::Zero(c, d);
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(c);
  std::vector<Eigen::Index> cls(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto k = index.at(train.labels[static_cast<std::size_t>(i)]);
    cls[static_cast<std::size_t>(i)] = k;
    model.means_.row(k) += train.x.row(i);
    counts(k) += 1.0;
  }
  for (Eigen::Index k = 0; k < c; ++k) model.means_.row(k) /= counts(k);
  model.priors_ = counts / static_cast<double>(n);

  Eigen::MatrixXd centered = train.x;
  for (Eigen::Index i = 0; i < n; ++i) centered.row(i) -= model.means_.row(cls[static_cast<std::size_t>(i)]);
  const double dof = static_cast<double>(std::max<Eigen::Index>(n - c, 1));
  Eigen::MatrixXd pooled = (centered.transpose() * centered) / dof;
  pooled = 0.5 * (pooled + pooled.transpose());

  model.ridge_ = ridge;
  model.shrinkage_ = ridge * pooled.trace() / static_cast<double>(d) + kCovarianceFloor;
  pooled.diagonal().array() += model.shrinkage_;
  model.covariance_ = pooled;

  Eigen::LLT<Eigen::MatrixXd> llt(model.covariance_);
  if (llt.info() != Eigen::Success) {
    throw DataError("pooled covariance is not positive definite after regularization");
  }
  model.weights_ = llt.solve(model.means_.transpose());
  model.bias_.resize(c);
  for (Eigen::Index k = 0; k < c; ++k) {
    model.bias_(k) = -0.5 * model.means_.row(k).dot(model.weights_.col(k)) + std::log(model.priors_(k));
  }
  return model;
}

double LdaModel::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(covariance_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Prediction LdaModel::predict(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension()) {
    throw DataError("feature vector has " + std::to_string(x.size()) + " entries, model expects " +
                    std::to_string(dimension()));
  }
  // The shared quadratic term cancels between classes.
  Eigen::VectorXd score = weights_.transpose() * x + bias_;
  Prediction p;
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < score.size(); ++k) {
    if (score(k) > score(best)) best = k;  // strict: ties keep the smaller label
  }
  Eigen::ArrayXd w = (score.array() - score(best)).exp();
  w /= w.sum();
  p.class_index = static_cast<std::size_t>(best);
  p.label = classes_[p.class_index];
  p.posteriors.assign(w.begin(), w.end());
  return p;
}

Prediction predict_lda(const LdaModel& model, const Eigen::VectorXd& x) { return model.predict(x); }

// ---------------------------------------------------------------- metrics

ConfusionStats confusion_stats(const ConfusionMatrix& cm) {
  const std::size_t c = cm.size();
  std::vector<double> row(c, 0.0), col(c, 0.0);
  double total = 0.0, trace = 0.0;
  for (std::size_t i = 0; i < c; ++i) {
    if (cm[i].size() != c) throw DataError("confusion matrix must be square");
    for (std::size_t j = 0; j < c; ++j) {
      const auto v = static_cast<double>(cm[i][j]);
      row[i] += v;
      col[j] += v;
      total += v;
    }
    trace += static_cast<double>(cm[i][i]);
  }
  if (total <= 0.0) throw DataError("confusion matrix is empty");

  ConfusionStats s;
  s.cr = trace / total;
  double pe = 0.0;
  for (std::size_t i = 0; i < c; ++i) pe += row[i] * col[i];
  pe /= total * total;
  s.kappa = pe < 1.0 ? (s.cr - pe) / (1.0 - pe) : 1.0;

  double ae1 = 0.0, ae2 = 0.0;
  std::size_t n1 = 0, n2 = 0;
  for (std::size_t i = 0; i < c; ++i) {
    const auto hit = static_cast<double>(cm[i][i]);
    if (row[i] > 0.0) {
      ae1 += (row[i] - hit) / row[i];
      ++n1;
    }
    if (total - row[i] > 0.0) {
      ae2 += (col[i] - hit) / (total - row[i]);
      ++n2;
    }
  }
  s.ae1 = n1 ? ae1 / static_cast<double>(n1) : 0.0;
  s.ae2 = n2 ? ae2 / static_cast<double>(n2) : 0.0;
  return s;
}

std::size_t MetricsReport::total() const {
  std::size_t t = 0;
  for (const auto& r : confusion) t = std::accumulate(r.begin(), r.end(), t);
  return t;
}

MetricsReport evaluate(const LdaModel& model, const FeatureMatrix& test) {
  test.validate();
  if (test.rows() == 0) throw DataError("test set is empty");
  if (test.cols() != model.dimension()) throw DataError("test dimension does not match model");

  MetricsReport r;
  r.classes = model.classes();
  const std::size_t c = r.classes.size();
  r.confusion.assign(c, std::vector<std::size_t>(c, 0));
  std::map<std::string, std::size_t> index;
  for (std::size_t k = 0; k < c; ++k) index[r.classes[k]] = k;

  double correct_sum = 0.0, error_sum = 0.0;
  std::size_t correct = 0, errors = 0;
  for (std::size_t i = 0; i < test.rows(); ++i) {
    const auto it = index.find(test.labels[i]);
    if (it == index.end()) {
      throw DataError("test label '" + test.labels[i] + "' was not seen in training");
    }
    const auto p = model.predict(test.x.row(static_cast<Eigen::Index>(i)).transpose());
    ++r.confusion[it->second][p.class_index];
    const double top = p.posteriors[p.class_index];
    if (p.class_index == it->second) {
      correct_sum += top;
      ++correct;
    } else {
      error_sum += top;
      ++errors;
    }
    r.true_labels.push_back(test.labels[i]);
    r.predicted_labels.push_back(p.label);
    r.posteriors.push_back(p.posteriors);
  }
  const auto stats = confusion_stats(r.confusion);
  r.cr = stats.cr;
  r.kappa = stats.kappa;
  r.ae1 = stats.ae1;
  r.ae2 = stats.ae2;
  r.acr = correct ? correct_sum / static_cast<double>(correct) : 0.0;
  r.aer = errors ? error_sum / static_cast<double>(errors) : 1.0;
  return r;
}

nlohmann::json metrics_to_json(const MetricsReport& report, std::size_t nd) {
  nlohmann::json j;
  j["ND"] = nd;
  j["CR"] = report.cr;
  j["kappa"] = report.kappa;
  j["ACR"] = report.acr;
  j["AER"] = report.aer;
  j["AE1"] = report.ae1;
  j["AE2"] = report.ae2;
  j["test_size"] = report.total();
  j["classes"] = report.classes;
  j["confusion"] = report.confusion;
  return j;
}

std::string confusion_to_csv(const MetricsReport& report) {
  std::ostringstream out;
  out << "true\\predicted";
  for (const auto& c : report.classes) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    out << report.classes[i];
    for (auto v : report.confusion[i]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- selection

namespace {

double validation_accuracy(const HoldoutSplit& split, std::span<const std::size_t> cols,
                           double ridge) {
  const auto train = split.train.select_columns(cols);
  const auto val = split.test.select_columns(cols);
  const auto model = fit_lda(train, ridge);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < val.rows(); ++i) {
    if (model.predict(val.x.row(static_cast<Eigen::Index>(i)).transpose()).label == val.labels[i]) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(val.rows());
}

}  // namespace

FeatureRanking rank_features(const FeatureMatrix& train, std::uint64_t seed, double ridge) {
  train.validate();
  if (train.classes().size() < 2) throw DataError("feature ranking needs at least 2 classes");
  const auto split = stratified_holdout(train, kSelectionFraction, seed);

  FeatureRanking r;
  r.scores.resize(train.cols());
  for (std::size_t j = 0; j < train.cols(); ++j) {
    const std::size_t col[] = {j};
    r.scores[j] = validation_accuracy(split, col, ridge);
  }
  r.order.resize(train.cols());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(),
                   [&](std::size_t a, std::size_t b) { return r.scores[a] > r.scores[b]; });
  return r;
}

SelectionResult select_mld(const FeatureMatrix& train, std::span<const std::size_t> ranked,
                           std::uint64_t seed, double ridge) {
  std::vector<std::size_t> check(ranked.begin(), ranked.end());
  std::sort(check.begin(), check.end());
  for (std::size_t i = 0; i < check.size(); ++i) {
    if (check[i] != i) throw ConfigError("ranked indices must be a permutation of the features");
  }
  if (check.size() != train.cols() || check.empty()) {
    throw ConfigError("ranked indices must cover every feature");
  }
  const auto split = stratified_holdout(train, kSelectionFraction, seed);

  SelectionResult s;
  s.ranked.assign(ranked.begin(), ranked.end());
  double best = -1.0;
  for (std::size_t len = 1; len <= ranked.size(); ++len) {
    const double acc = validation_accuracy(split, ranked.first(len), ridge);
    s.prefix_accuracy.push_back(acc);
    if (acc > best) {
      best = acc;
      s.prefix_length = len;
    }
  }
  return s;
}

}  // namespace mlfd
