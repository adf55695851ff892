#include "ddc/robust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/erf.hpp>

namespace ddc {

namespace {

void checkProbability(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("probability must lie strictly between 0 and 1");
  }
}

// Median of a scratch buffer; reorders it.
double medianInPlace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace

RobustTuning::RobustTuning() : RobustTuning(0.99) {}

RobustTuning::RobustTuning(double tolerance) : tolerance_(0.0), cutoff_(0.0) {
  setTolerance(tolerance);
}

void RobustTuning::setTolerance(double p) {
  checkProbability(p);
  tolerance_ = p;
  cutoff_ = std::sqrt(chiSq1Quantile(p));
}

double median(std::span<const double> y) {
  if (y.empty()) throw std::invalid_argument("median of empty sample");
  std::vector<double> scratch(y.begin(), y.end());
  return medianInPlace(scratch);
}

double robLoc(std::span<const double> y, double biweightC) {
  if (y.empty()) throw std::invalid_argument("robLoc of empty sample");
  std::vector<double> scratch(y.begin(), y.end());
  const double m1 = medianInPlace(scratch);
  for (std::size_t i = 0; i < y.size(); ++i) scratch[i] = std::abs(y[i] - m1);
  const double s1 = medianInPlace(scratch);
  if (s1 == 0.0) return m1;

  double weighted = 0.0;
  double total = 0.0;
  for (const double v : y) {
    const double t = (v - m1) / s1 / biweightC;
    if (std::abs(t) > 1.0) continue;
    const double u = 1.0 - t * t;
    const double w = u * u;
    weighted += w * v;
    total += w;
  }
  // The median carries positive weight, so total > 0 here.
  return weighted / total;
}

double robScale(std::span<const double> y, double scaleB, double scaleDelta) {
  if (y.empty()) throw std::invalid_argument("robScale of empty sample");
  std::vector<double> scratch(y.size());
  std::transform(y.begin(), y.end(), scratch.begin(), [](double v) { return std::abs(v); });
  const double s2 = medianInPlace(scratch);
  if (s2 == 0.0) return 0.0;

  const double cap = scaleB * scaleB;
  double sum = 0.0;
  for (const double v : y) {
    const double t = v / s2;
    sum += std::min(t * t, cap);
  }
  return s2 * std::sqrt(sum / static_cast<double>(y.size()) / scaleDelta);
}

CorrelationEstimate robCorr(std::span<const double> zj, std::span<const double> zh,
                            const RobustTuning& tuning) {
  if (zj.size() != zh.size()) throw std::invalid_argument("robCorr: unpaired inputs");
  const std::size_t n = zj.size();
  if (n < 2) return {};

  std::vector<double> sum(n);
  std::vector<double> diff(n);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i] = zj[i] + zh[i];
    diff[i] = zj[i] - zh[i];
  }
  const double scaleSum = robScale(sum, tuning);
  const double scaleDiff = robScale(diff, tuning);
  double rho = (scaleSum * scaleSum - scaleDiff * scaleDiff) / 4.0;
  rho = std::clamp(rho, -1.0, 1.0);
  constexpr double kMaxAbsRho = 1.0 - 1e-9;
  if (std::abs(rho) > kMaxAbsRho) rho = std::copysign(kMaxAbsRho, rho);

  const double radius = tuning.ellipseDof == 1 ? chiSq1Quantile(tuning.tolerance())
                                               : chiSq2Quantile(tuning.tolerance());
  const double det = 1.0 - rho * rho;

  std::size_t inside = 0;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = zj[i];
    const double y = zh[i];
    const double q = ((x * x + y * y) - 2.0 * rho * (x * y)) / det;
    if (!(q < radius)) continue;
    ++inside;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  if (inside < 2 || sxx == 0.0 || syy == 0.0) return {};
  const double r = sxy / std::sqrt(sxx * syy);
  return {std::clamp(r, -1.0, 1.0), true};
}

double robSlope(std::span<const double> zj, std::span<const double> zh,
                const RobustTuning& tuning) {
  if (zj.size() != zh.size()) throw std::invalid_argument("robSlope: unpaired inputs");
  const std::size_t n = zj.size();

  std::vector<double> ratios;
  ratios.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (zh[i] != 0.0) ratios.push_back(zj[i] / zh[i]);
  }
  if (ratios.empty()) throw std::domain_error("slope undefined: no nonzero predictor values");
  const double initial = medianInPlace(ratios);

  std::vector<double> residuals(n);
  for (std::size_t i = 0; i < n; ++i) residuals[i] = zj[i] - initial * zh[i];
  const double bound = tuning.cutoff() * robScale(residuals, tuning);

  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(residuals[i]) > bound) continue;
    sxy += zj[i] * zh[i];
    sxx += zh[i] * zh[i];
  }
  if (sxx == 0.0) return initial;
  return sxy / sxx;
}

double chiSq1Cdf(double x) {
  if (!(x >= 0.0)) throw std::invalid_argument("chiSq1Cdf: argument must be nonnegative");
  if (std::isinf(x)) return 1.0;
  // 2 Phi(sqrt(x)) - 1 = erf(sqrt(x / 2))
  return std::erf(std::sqrt(0.5 * x));
}

double chiSq1Quantile(double p) {
  checkProbability(p);
  // Phi^-1((1 + p) / 2) = sqrt(2) erf^-1(p)
  const double root = boost::math::erf_inv(p);
  return 2.0 * root * root;
}

double chiSq2Quantile(double p) {
  checkProbability(p);
  return -2.0 * std::log1p(-p);
}

}  // namespace ddc
