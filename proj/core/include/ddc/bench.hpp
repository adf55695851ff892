#ifndef DDC_BENCH_HPP
#define DDC_BENCH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddc/engine.hpp"
#include "ddc/matrix.hpp"

namespace ddc::bench {

/// mt19937_64 with uniform and normal draws built from its raw output, so a
/// seed gives the same stream on every platform (the std distributions are
/// implementation-defined).
class Rng {
 public:
  static constexpr const char* kDescription =
      "mt19937_64; uniform = top 53 bits; normal = Marsaglia polar; "
      "replication seed = splitmix64 chain over (seed, scenario, replication)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t scenario, std::uint64_t replication);

enum class CorrelationKind { A09, RandomLowCorr };

struct CorrelationModel {
  CorrelationKind kind = CorrelationKind::A09;
  std::size_t d = 20;
  std::uint64_t seed = 0;
};

/// A09: (-0.9)^|h-j|. RandomLowCorr: random orthogonal eigenvectors with
/// eigenvalues log-uniform on [1, 100] (both ends attained), rescaled to a
/// correlation matrix.
Eigen::MatrixXd makeCorrelation(const CorrelationModel& model);

/// n draws from N(0, sigma) through its Cholesky factor. Throws
/// std::invalid_argument when sigma is not positive definite.
DataMatrix sampleGaussian(std::size_t n, const Eigen::MatrixXd& sigma, std::uint64_t seed);

enum class ContaminationMode { None, Cellwise, Rowwise };

struct ContaminationSpec {
  ContaminationMode mode = ContaminationMode::None;
  double fraction = 0.0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
};

struct Contaminated {
  DataMatrix data;
  /// Replaced cells, sorted (cellwise mode).
  std::vector<CellIndex> cells;
  /// Replaced rows, sorted (rowwise mode).
  std::vector<std::size_t> rows;
  std::vector<std::string> warnings;
};

/// Eigenvector of the smallest eigenvalue of sigma, scaled so that
/// v' sigma^-1 v = d, first nonzero coordinate positive.
Eigen::VectorXd hardestDirection(const Eigen::MatrixXd& sigma);

/// Cellwise: floor(eps n d) distinct cells set to gamma. Rowwise:
/// floor(eps n) distinct rows set to gamma * hardestDirection(sigma).
Contaminated contaminate(const DataMatrix& x, const ContaminationSpec& spec,
                         const Eigen::MatrixXd* sigma = nullptr);

/// Share of the true outliers that were not flagged. Throws on empty truth.
double missedFraction(const std::vector<CellIndex>& truth, const std::vector<CellIndex>& flagged);
double missedFraction(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& flagged);

/// Mean squared difference over all cells of the rows that were not flagged.
double imputationMSE(const DataMatrix& clean, const DataMatrix& imputed,
                     const std::vector<std::size_t>& flaggedRows);

/// trace(S T^-1) - log det(S T^-1) - d.
double lrtDeviation(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth);

/// Classical covariance of the rows that were not flagged.
Eigen::MatrixXd classicalCovariance(const DataMatrix& x, const std::vector<std::size_t>& excludedRows = {});

/// Expected fraction of contaminated rows, 1 - (1 - eps)^d.
double contaminationTheory(double eps, std::size_t d);

struct SubstructureTheory {
  double breakdown;
  double cleanRowProbability;
};
SubstructureTheory substructureTheory(std::size_t q, double eps);

enum class Detector { Ddc, Columnwise };

/// Flags and imputation from one detector on one data set.
struct Detection {
  /// Flagged cells in input column indices, sorted.
  std::vector<CellIndex> cells;
  /// Rows flagged by the row filter; always empty for the baseline.
  std::vector<std::size_t> rowFlags;
  /// Rows counted as detected in rowwise experiments.
  std::vector<std::size_t> rowsDetected;
  DataMatrix imputed;
};

/// DDC, or the columnwise baseline with flagged cells imputed by the column
/// location. The baseline has no row filter, so a row counts as detected when
/// any of its cells is flagged.
Detection detect(const DataMatrix& x, Detector detector, const DdcParams& params);

struct ExperimentGrid {
  std::vector<CorrelationKind> models{CorrelationKind::A09};
  std::vector<std::size_t> ns{200};
  std::vector<std::size_t> ds{20};
  std::vector<double> eps{0.1};
  std::vector<double> gammas{6.0};
  std::vector<ContaminationMode> modes{ContaminationMode::Cellwise};
  std::vector<Detector> detectors{Detector::Ddc, Detector::Columnwise};
  std::size_t replications = 50;
  std::uint64_t seed = 1;
  bool lrt = false;
  DdcParams params;
};

/// Parses the flat `key = value[, value...]` grid format. Lines starting with
/// '#' are comments. Throws DataError on unknown keys or bad values.
ExperimentGrid parseGrid(std::istream& in);

struct ExperimentRow {
  std::string model;
  std::size_t n = 0;
  std::size_t d = 0;
  double eps = 0.0;
  double gamma = 0.0;
  std::string mode;
  std::string detector;
  std::string metric;
  double value = 0.0;
  double standardError = 0.0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

/// Every detector sees the same replications of a scenario (model, n, d, eps,
/// gamma, mode), so comparisons between detectors are paired.
std::vector<ExperimentRow> runExperiment(const ExperimentGrid& grid);

/// CSV with a leading '#' line recording the generator.
void writeExperimentCsv(const std::vector<ExperimentRow>& rows, std::ostream& out);

/// Value of the first row matching detector, metric and gamma, or nullopt.
std::optional<double> findMetric(const std::vector<ExperimentRow>& rows, const std::string& detector,
                                 const std::string& metric, double gamma);

std::string toString(CorrelationKind kind);
std::string toString(ContaminationMode mode);
std::string toString(Detector detector);

}  // namespace ddc::bench

#endif  // DDC_BENCH_HPP
