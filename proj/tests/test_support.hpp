#pragma once

#include <vector>

#include "jumpfisher/models.hpp"

namespace jumpfisher::testing {

/// Two-level pure decay: H = 0, single monitored channel sqrt(theta)
/// sigma_minus, estimation parameter theta = gamma. Not persistent: after
/// one click the system is dark.
LindbladModel pure_decay_model(double gamma);

/// One-dimensional Poisson counter: clicks at rate theta = gamma forever,
/// waiting times i.i.d. exponential. The persistent stand-in for pure
/// decay in multi-click statistics.
LindbladModel poisson_counter_model(double gamma);

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Chi-square tail probability for statistic x with k degrees of freedom.
double chi2_pvalue(double x, int dof);

/// Kolmogorov-Smirnov p-value for sorted samples against a CDF.
double ks_pvalue(std::vector<double> samples, const std::function<double(double)>& cdf);

struct SampleStats {
  double mean = 0.0;
  double stderr_mean = 0.0;
  double variance = 0.0;
};
SampleStats sample_stats(const std::vector<double>& xs);

}  // namespace jumpfisher::testing
