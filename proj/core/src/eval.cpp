#include "mtgan/eval.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mtgan {
namespace eval {

namespace {

Eigen::MatrixXd to_eigen(const Tensor& t) {
  Eigen::MatrixXd m(t.rows, t.cols);
  for (std::size_t i = 0; i < t.rows; ++i)
    for (std::size_t j = 0; j < t.cols; ++j) m(i, j) = t.at(i, j);
  return m;
}

// Symmetric PSD square root; small negative eigenvalues are clipped to zero.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& s) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("frechet_gaussian: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

GaussianFit fit_gaussian(const Tensor& samples) {
  if (samples.rows < 2)
    throw std::invalid_argument("fit_gaussian: need at least 2 samples, got " +
                                std::to_string(samples.rows));
  const std::size_t n = samples.rows, d = samples.cols;
  GaussianFit fit;
  fit.mu.assign(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) fit.mu[j] += samples.at(i, j);
  for (double& m : fit.mu) m /= static_cast<double>(n);
  fit.sigma = Tensor(d, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const double cj = samples.at(i, j) - fit.mu[j];
      for (std::size_t k = j; k < d; ++k)
        fit.sigma.at(j, k) += cj * (samples.at(i, k) - fit.mu[k]);
    }
  const double norm = 1.0 / static_cast<double>(n - 1);
  for (std::size_t j = 0; j < d; ++j)
    for (std::size_t k = j; k < d; ++k) {
      const double v = fit.sigma.at(j, k) * norm;
      fit.sigma.at(j, k) = v;
      fit.sigma.at(k, j) = v;
    }
  return fit;
}

double frechet_gaussian(const GaussianFit& a, const GaussianFit& b) {
  if (a.mu.size() != b.mu.size())
    throw std::invalid_argument("frechet_gaussian: dimension mismatch " +
                                std::to_string(a.mu.size()) + " vs " +
                                std::to_string(b.mu.size()));
  const std::size_t d = a.mu.size();
  double mean_term = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    const double diff = a.mu[j] - b.mu[j];
    mean_term += diff * diff;
  }
  Eigen::MatrixXd s1 = to_eigen(a.sigma);
  Eigen::MatrixXd s2 = to_eigen(b.sigma);
  // Regularize against rank-deficient small-sample fits.
  const double reg = 1e-10;
  s1 += reg * Eigen::MatrixXd::Identity(d, d);
  s2 += reg * Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd r1 = psd_sqrt(s1);
  Eigen::MatrixXd inner = r1 * s2 * r1;
  inner = 0.5 * (inner + inner.transpose().eval());
  Eigen::MatrixXd cross = psd_sqrt(inner);
  double trace_term = s1.trace() + s2.trace() - 2.0 * cross.trace();
  double result = mean_term + trace_term;
  if (result < 0.0) {
    if (result < -1e-8)
      throw std::runtime_error("frechet_gaussian: negative distance beyond round-off");
    result = 0.0;
  }
  return result;
}

double frechet_of_samples(const Tensor& a, const Tensor& b) {
  return frechet_gaussian(fit_gaussian(a), fit_gaussian(b));
}

std::pair<FineTuneValues, std::vector<LossValues>> cyclegan_scratch(
    const TranslationTask& task, const Hyperparams& hp, std::size_t steps,
    std::uint64_t init_seed) {
  ParamValues g0 = init_params(hp.gen_spec, init_seed);
  ParamValues g1 = init_params(hp.gen_spec, init_seed + 1);
  ParamValues d0 = init_params(hp.disc_spec, init_seed + 2);
  ParamValues d1 = init_params(hp.disc_spec, init_seed + 3);
  return adapt_from(g0, g1, d0, d1, task, hp, steps);
}

ConvergenceStats convergence_stats(const std::vector<std::vector<double>>& curves,
                                   double threshold) {
  if (curves.empty()) throw std::invalid_argument("convergence_stats: no curves");
  const std::size_t len = curves[0].size();
  for (const auto& c : curves)
    if (c.size() != len)
      throw std::invalid_argument("convergence_stats: curves differ in length");
  ConvergenceStats out;
  out.median_curve.resize(len);
  std::vector<double> col(curves.size());
  for (std::size_t s = 0; s < len; ++s) {
    for (std::size_t c = 0; c < curves.size(); ++c) col[c] = curves[c][s];
    std::sort(col.begin(), col.end());
    const std::size_t n = col.size();
    out.median_curve[s] = n % 2 ? col[n / 2] : 0.5 * (col[n / 2 - 1] + col[n / 2]);
  }
  for (std::size_t s = 0; s + 1 < len; ++s)
    out.auc += 0.5 * (out.median_curve[s] + out.median_curve[s + 1]);
  out.steps_to_threshold = -1;
  for (std::size_t s = 0; s < len; ++s)
    if (out.median_curve[s] < threshold) {
      out.steps_to_threshold = static_cast<std::ptrdiff_t>(s);
      break;
    }
  return out;
}

std::vector<AggregateRow> fold_report(const std::vector<RunReport>& reports) {
  if (reports.empty()) throw std::invalid_argument("fold_report: no reports");
  std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<double>> groups;
  for (const RunReport& r : reports) {
    groups[{r.method, "forward", r.shots}].push_back(r.frechet_forward);
    groups[{r.method, "backward", r.shots}].push_back(r.frechet_backward);
  }
  std::vector<AggregateRow> rows;
  for (const auto& [key, vals] : groups) {
    AggregateRow row;
    row.method = std::get<0>(key);
    row.direction = std::get<1>(key);
    row.shots = std::get<2>(key);
    row.n = vals.size();
    for (double v : vals) row.mean += v;
    row.mean /= static_cast<double>(vals.size());
    if (vals.size() > 1) {
      double ss = 0.0;
      for (double v : vals) ss += (v - row.mean) * (v - row.mean);
      row.stddev = std::sqrt(ss / static_cast<double>(vals.size() - 1));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double nearest_centroid_accuracy(const Tensor& translated, const Tensor& target_centroid,
                                 const Tensor& source_centroid) {
  if (translated.rows == 0) throw std::invalid_argument("nearest_centroid_accuracy: empty");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < translated.rows; ++i) {
    double dt = 0.0, ds = 0.0;
    for (std::size_t j = 0; j < translated.cols; ++j) {
      const double v = translated.at(i, j);
      dt += (v - target_centroid.data[j]) * (v - target_centroid.data[j]);
      ds += (v - source_centroid.data[j]) * (v - source_centroid.data[j]);
    }
    if (dt < ds) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(translated.rows);
}

}  // namespace eval
}  // namespace mtgan
