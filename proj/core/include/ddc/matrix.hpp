#ifndef DDC_MATRIX_HPP
#define DDC_MATRIX_HPP

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ddc {

/// Raised for problems with the data itself (unparseable input, nothing left to
/// analyze). Precondition violations by the caller use std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CellIndex {
  std::size_t row = 0;
  std::size_t col = 0;

  auto operator<=>(const CellIndex&) const = default;
};

/// Dense column-major matrix of reals with no notion of missingness.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double operator()(std::size_t i, std::size_t j) const { return values_[j * rows_ + i]; }
  double& operator()(std::size_t i, std::size_t j) { return values_[j * rows_ + i]; }

  std::span<const double> column(std::size_t j) const {
    return {values_.data() + j * rows_, rows_};
  }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Column-major matrix with an explicit per-cell presence mask.
///
/// A missing cell has no value: at() returns std::nullopt and the raw storage
/// behind it is held at zero so it cannot leak a stale number. The span
/// accessors exist for hot loops; callers must consult columnMask() before
/// reading columnValues().
class MaskedMatrix {
 public:
  MaskedMatrix() = default;
  /// All cells start missing.
  MaskedMatrix(std::size_t rows, std::size_t cols);
  static MaskedMatrix fromDense(const DenseMatrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  bool present(std::size_t i, std::size_t j) const { return present_[j * rows_ + i] != 0; }
  std::optional<double> at(std::size_t i, std::size_t j) const;

  /// Stores a finite value and marks the cell present.
  void set(std::size_t i, std::size_t j, double value);
  void clear(std::size_t i, std::size_t j);

  std::span<const double> columnValues(std::size_t j) const {
    return {values_.data() + j * rows_, rows_};
  }
  std::span<const unsigned char> columnMask(std::size_t j) const {
    return {present_.data() + j * rows_, rows_};
  }

  /// Non-missing entries of column j in row order.
  std::vector<double> presentValues(std::size_t j) const;
  std::size_t presentCount(std::size_t j) const;
  std::size_t missingCount() const;

  bool operator==(const MaskedMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
  std::vector<unsigned char> present_;
};

enum class ColumnKind { Numeric, Text };

/// n x d data matrix with labels. Text columns carry their raw tokens and have
/// every numeric cell missing; they are never analyzed but are preserved so
/// they can be written back out.
class DataMatrix {
 public:
  DataMatrix() = default;
  /// Numeric-only matrix. Empty label lists are replaced by "1".."n" and
  /// "V1".."Vd".
  DataMatrix(MaskedMatrix cells, std::vector<std::string> rowLabels = {},
             std::vector<std::string> colLabels = {});
  DataMatrix(MaskedMatrix cells, std::vector<std::string> rowLabels,
             std::vector<std::string> colLabels, std::vector<ColumnKind> kinds,
             std::vector<std::vector<std::string>> text);

  /// Fully observed numeric matrix from a list of columns.
  static DataMatrix fromColumns(const std::vector<std::vector<double>>& columns);

  std::size_t rows() const { return cells_.rows(); }
  std::size_t cols() const { return cells_.cols(); }

  const MaskedMatrix& cells() const { return cells_; }
  std::optional<double> at(std::size_t i, std::size_t j) const { return cells_.at(i, j); }
  bool present(std::size_t i, std::size_t j) const { return cells_.present(i, j); }

  const std::vector<std::string>& rowLabels() const { return rowLabels_; }
  const std::vector<std::string>& colLabels() const { return colLabels_; }
  ColumnKind kind(std::size_t j) const { return kinds_[j]; }
  /// Raw tokens of a text column; empty for numeric columns.
  const std::vector<std::string>& text(std::size_t j) const { return text_[j]; }

  /// Header of the row-label column when the matrix came from a file that had one.
  const std::optional<std::string>& rowLabelHeader() const { return rowLabelHeader_; }
  void setRowLabelHeader(std::optional<std::string> header) { rowLabelHeader_ = std::move(header); }

  /// Copy of columns `cols` in the given order.
  DataMatrix selectColumns(std::span<const std::size_t> cols) const;

  bool operator==(const DataMatrix&) const = default;

 private:
  MaskedMatrix cells_;
  std::vector<std::string> rowLabels_;
  std::vector<std::string> colLabels_;
  std::vector<ColumnKind> kinds_;
  std::vector<std::vector<std::string>> text_;
  std::optional<std::string> rowLabelHeader_;
};

struct ColumnSelectionReport {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> droppedNonNumeric;
  std::vector<std::size_t> droppedFewValues;
  std::vector<std::size_t> droppedTooManyMissing;
  std::vector<std::size_t> droppedZeroScale;

  std::size_t droppedCount() const {
    return droppedNonNumeric.size() + droppedFewValues.size() + droppedTooManyMissing.size() +
           droppedZeroScale.size();
  }
};

struct ColumnSelectionOptions {
  std::size_t minDistinct = 3;
  double maxMissingFrac = 0.5;
  /// Constants used for the zero-scale check.
  double biweightC = 3.0;
  double scaleB = 2.5;
  double scaleDelta = 0.845;
};

struct ColumnSelection {
  DataMatrix data;
  ColumnSelectionReport report;
};

/// Keeps the columns that are numeric, are missing in at most maxMissingFrac
/// of the rows, take at least minDistinct distinct values and have nonzero
/// robust scale. Checks run in that order and a column lands in the first list
/// it fails. Throws DataError when nothing survives.
ColumnSelection selectAnalyzableColumns(const DataMatrix& x,
                                        const ColumnSelectionOptions& options = {});

/// x'_ij = factors_j * x_ij + shifts_j. Text columns and the mask are untouched.
DataMatrix columnAffineTransform(const DataMatrix& x, std::span<const double> shifts,
                                 std::span<const double> factors);

/// Row i of the result is row rowPerm[i] of x, column j is column colPerm[j].
DataMatrix permute(const DataMatrix& x, std::span<const std::size_t> rowPerm,
                   std::span<const std::size_t> colPerm);

std::vector<std::size_t> inversePermutation(std::span<const std::size_t> perm);

}  // namespace ddc

#endif  // DDC_MATRIX_HPP
