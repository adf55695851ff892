#ifndef DDC_ROBUST_HPP
#define DDC_ROBUST_HPP

#include <span>
#include <vector>

namespace ddc {

/// Tuning constants of the univariate and bivariate building blocks.
///
/// The flagging cutoff is tied to the tolerance probability: cutoff() is always
/// sqrt of the chi-squared(1) quantile at tolerance(), so the two cannot drift
/// apart.
class RobustTuning {
 public:
  RobustTuning();
  explicit RobustTuning(double tolerance);

  double tolerance() const { return tolerance_; }
  double cutoff() const { return cutoff_; }
  void setTolerance(double p);

  /// Tukey biweight constant for robLoc.
  double biweightC = 3.0;
  /// Cap of rho(t) = min(t^2, b^2) for robScale.
  double scaleB = 2.5;
  /// Gaussian consistency constant for robScale.
  double scaleDelta = 0.845;
  /// Degrees of freedom of the chi-squared radius for the robCorr tolerance
  /// ellipse. Only 1 and 2 are supported.
  int ellipseDof = 2;

 private:
  double tolerance_;
  double cutoff_;
};

/// Median with the average-of-middle-two convention. Throws on empty input.
double median(std::span<const double> y);

/// One-step biweight M-estimate of location started from the median and the
/// (unscaled) median absolute deviation. Returns the median when the MAD is 0.
double robLoc(std::span<const double> y, double biweightC = 3.0);

/// One-step scale estimate for data already centered at zero:
/// s * sqrt(ave(min((y/s)^2, b^2)) / delta) with s = median |y|. Returns 0 when
/// median |y| is 0.
double robScale(std::span<const double> y, double scaleB = 2.5, double scaleDelta = 0.845);

inline double robLoc(std::span<const double> y, const RobustTuning& t) {
  return robLoc(y, t.biweightC);
}
inline double robScale(std::span<const double> y, const RobustTuning& t) {
  return robScale(y, t.scaleB, t.scaleDelta);
}

struct CorrelationEstimate {
  double value = 0.0;
  /// False when fewer than two complete pairs, fewer than two points in the
  /// tolerance ellipse, or a zero sum of squares; value is then 0.
  bool defined = false;
};

/// Robust correlation of two standardized columns: a Gnanadesikan-Kettenring
/// start defines a tolerance ellipse, and the result is the uncentered
/// product-moment correlation of the points strictly inside it. Inputs must be
/// paired and complete.
CorrelationEstimate robCorr(std::span<const double> zj, std::span<const double> zh,
                            const RobustTuning& tuning);

/// Slope of a robust no-intercept line predicting zj from zh: median of ratios,
/// then least squares on the points whose residual is within
/// cutoff * robScale(residuals). Throws std::domain_error when every zh is 0.
double robSlope(std::span<const double> zj, std::span<const double> zh,
                const RobustTuning& tuning);

/// Cdf of chi-squared with 1 degree of freedom. Throws on negative input.
double chiSq1Cdf(double x);
/// Quantile of chi-squared with 1 degree of freedom for p in (0, 1).
double chiSq1Quantile(double p);
/// Quantile of chi-squared with 2 degrees of freedom, -2 log(1 - p).
double chiSq2Quantile(double p);

}  // namespace ddc

#endif  // DDC_ROBUST_HPP
