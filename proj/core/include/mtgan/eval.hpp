#pragma once

#include <string>
#include <vector>

#include "mtgan/meta.hpp"
#include "mtgan/tensor.hpp"

namespace mtgan {
namespace eval {

struct GaussianFit {
  std::vector<double> mu;
  Tensor sigma;  // symmetric PSD, [d,d]
};

// Sample mean and 1/(n-1)-normalized covariance.
GaussianFit fit_gaussian(const Tensor& samples);

// |mu1-mu2|^2 + Tr(S1 + S2 - 2 (S1 S2)^{1/2}); clipped to 0 on tiny negative
// round-off. Matrix square root via eigendecomposition of S1^{1/2} S2 S1^{1/2}.
double frechet_gaussian(const GaussianFit& a, const GaussianFit& b);

double frechet_of_samples(const Tensor& a, const Tensor& b);

// From-scratch baseline: randomly initialized nets trained by the exact adapt
// code path; differs from the meta-initialized run only in where the initial
// parameters come from.
std::pair<FineTuneValues, std::vector<LossValues>> cyclegan_scratch(
    const TranslationTask& task, const Hyperparams& hp, std::size_t steps,
    std::uint64_t init_seed);

struct ConvergenceStats {
  std::vector<double> median_curve;
  double auc = 0.0;                // trapezoid over step index
  std::ptrdiff_t steps_to_threshold = -1;  // -1 = never
};

ConvergenceStats convergence_stats(const std::vector<std::vector<double>>& curves,
                                   double threshold);

struct RunReport {
  std::string fold_id;
  std::string method;  // "mtgan" or "cyclegan_scratch"
  std::size_t shots = 0;
  double frechet_forward = 0.0;
  double frechet_backward = 0.0;
  std::vector<double> cyc_curve;
  std::uint64_t seed = 0;
};

struct AggregateRow {
  std::string method;
  std::string direction;  // "forward" or "backward"
  std::size_t shots = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample std; 0 with n=1 (flagged by n)
  std::size_t n = 0;
};

// Mean +- sample std of Frechet scores per (method, direction, shots).
std::vector<AggregateRow> fold_report(const std::vector<RunReport>& reports);

// Glyph-space analogue of identity classification: fraction of translated
// samples closer to the target identity centroid than to the source one.
double nearest_centroid_accuracy(const Tensor& translated, const Tensor& target_centroid,
                                 const Tensor& source_centroid);

}  // namespace eval
}  // namespace mtgan
