#ifndef DDC_ENGINE_HPP
#define DDC_ENGINE_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "ddc/matrix.hpp"
#include "ddc/robust.hpp"

namespace ddc {

struct RobustColumnStats {
  std::vector<double> location;
  std::vector<double> scale;
};

struct Neighbor {
  std::size_t col = 0;
  double cor = 0.0;
  /// Slope predicting the owning column from `col`.
  double slope = 0.0;
};

/// Per-column sets of correlated columns. The owning column itself is implied
/// and not stored in the neighbor lists.
struct CorrelationGraph {
  std::vector<std::vector<Neighbor>> neighbors;

  bool connected(std::size_t j) const { return !neighbors[j].empty(); }
  std::size_t standaloneCount() const;
};

enum class CombinationRule { WeightedMean, WeightedMedian };

struct DdcParams {
  RobustTuning tuning;
  double corrlim = 0.5;
  CombinationRule combination = CombinationRule::WeightedMean;
  bool includeSelf = true;
  /// Extra passes of prediction, deshrinkage and flagging with the flagged
  /// cells masked.
  std::size_t nbIterations = 0;
  /// Restrict every column to its k most correlated neighbors. When unset the
  /// restriction is switched on with k = 100 for more than 1000 analyzed columns.
  std::optional<std::size_t> kNeighbors;
  bool rowFlagging = true;
  std::size_t minDistinct = 3;
  double maxMissingFrac = 0.5;
};

enum class FlagSign { Positive, Negative };

struct CellFlag {
  CellIndex cell;
  FlagSign sign = FlagSign::Positive;

  bool operator==(const CellFlag&) const = default;
};

struct Standardized {
  RobustColumnStats stats;
  MaskedMatrix z;
};

struct RawPredictions {
  DenseMatrix values;
  /// Nonzero where no term was available and the prediction fell back to 0.
  std::vector<unsigned char> failsafe;

  bool isFailsafe(std::size_t i, std::size_t j) const { return failsafe[j * values.rows() + i] != 0; }
};

struct Deshrunk {
  std::vector<double> factors;
  DenseMatrix predictions;
};

struct CellResiduals {
  MaskedMatrix residuals;
  /// Sorted by row, then column.
  std::vector<CellFlag> flags;
  std::vector<std::string> warnings;
};

struct RowScores {
  std::vector<std::optional<double>> score;
  std::vector<std::optional<double>> standardized;
  std::vector<std::size_t> flagged;
  std::vector<std::string> warnings;
};

/// Everything computed by runDdc. Matrices and cell indices refer to the
/// analyzed columns; report.kept maps them back to input columns. The imputed
/// matrix has the full input layout.
struct DdcResult {
  ColumnSelectionReport report;
  RobustColumnStats stats;
  MaskedMatrix standardized;
  MaskedMatrix univariate;
  CorrelationGraph graph;
  DenseMatrix predictions;
  std::vector<double> deshrinkFactors;
  MaskedMatrix residuals;
  std::vector<CellFlag> cellFlags;
  RowScores rows;
  DataMatrix imputed;
  std::vector<std::string> warnings;

  std::size_t originalColumn(std::size_t j) const { return report.kept[j]; }
};

/// Robust location and scale per column, and the standardized cells.
/// Throws std::logic_error on a zero scale (such columns must be dropped first).
Standardized standardize(const DataMatrix& x, const RobustTuning& tuning);

/// Copy of z with every cell beyond the cutoff masked.
MaskedMatrix univariateFlag(const MaskedMatrix& z, double cutoff);

CorrelationGraph buildCorrelationGraph(const MaskedMatrix& u, const DdcParams& params);

/// Combination of slope-scaled neighbor cells for every cell of the matrix.
RawPredictions predictCells(const MaskedMatrix& u, const CorrelationGraph& graph,
                            const DdcParams& params);

/// Rescales each column of predictions by the robust slope of the observed
/// standardized values on them. Fail-safe predictions do not enter the fit.
Deshrunk deshrink(const MaskedMatrix& z, const RawPredictions& raw, const RobustTuning& tuning);

/// Standardized residuals and the cells whose residual exceeds the cutoff.
/// Standalone columns use the standardized value itself as residual.
CellResiduals cellResidualsAndFlags(const MaskedMatrix& z, const DenseMatrix& predictions,
                                    const CorrelationGraph& graph, const RobustTuning& tuning);

/// Row score: average of the chi-squared(1) cdf of the squared residuals.
/// Rows whose robustly standardized score exceeds the cutoff are flagged.
RowScores flagRows(const MaskedMatrix& residuals, const RobustTuning& tuning);

/// Input matrix with analyzed cells that are flagged or missing replaced by
/// destandardized predictions. Other cells are copied unchanged.
DataMatrix imputeAndDestandardize(const DataMatrix& x, const ColumnSelectionReport& report,
                                  const RobustColumnStats& stats, const DenseMatrix& predictions,
                                  const std::vector<CellFlag>& flags);

DdcResult runDdc(const DataMatrix& x, const DdcParams& params = {});

/// Columnwise detector: flags every cell with |z_ij| above the cutoff. Columns
/// must already be analyzable.
std::vector<CellFlag> columnwiseBaseline(const DataMatrix& x, const RobustTuning& tuning);

}  // namespace ddc

#endif  // DDC_ENGINE_HPP
