#include "ddc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "ddc/robust.hpp"

namespace ddc {

namespace {

std::vector<std::string> defaultLabels(std::size_t count, const std::string& prefix) {
  std::vector<std::string> labels;
  labels.reserve(count);
  for (std::size_t k = 0; k < count; ++k) labels.push_back(prefix + std::to_string(k + 1));
  return labels;
}

void requireUnique(const std::vector<std::string>& labels, const char* what) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) {
      throw std::invalid_argument(std::string("duplicate ") + what + " label '" + label + "'");
    }
  }
}

void requirePermutation(std::span<const std::size_t> perm, std::size_t size, const char* what) {
  if (perm.size() != size) {
    throw std::invalid_argument(std::string(what) + " permutation has wrong length");
  }
  std::vector<bool> seen(size, false);
  for (const std::size_t p : perm) {
    if (p >= size || seen[p]) {
      throw std::invalid_argument(std::string(what) + " permutation is not a bijection");
    }
    seen[p] = true;
  }
}

}  // namespace

MaskedMatrix::MaskedMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0), present_(rows * cols, 0) {}

MaskedMatrix MaskedMatrix::fromDense(const DenseMatrix& dense) {
  MaskedMatrix out(dense.rows(), dense.cols());
  for (std::size_t j = 0; j < dense.cols(); ++j) {
    for (std::size_t i = 0; i < dense.rows(); ++i) out.set(i, j, dense(i, j));
  }
  return out;
}

std::optional<double> MaskedMatrix::at(std::size_t i, std::size_t j) const {
  const std::size_t k = j * rows_ + i;
  if (present_[k] == 0) return std::nullopt;
  return values_[k];
}

void MaskedMatrix::set(std::size_t i, std::size_t j, double value) {
  if (!std::isfinite(value)) {
    throw std::invalid_argument("non-finite value stored in a matrix; use a missing cell instead");
  }
  const std::size_t k = j * rows_ + i;
  values_[k] = value;
  present_[k] = 1;
}

void MaskedMatrix::clear(std::size_t i, std::size_t j) {
  const std::size_t k = j * rows_ + i;
  values_[k] = 0.0;
  present_[k] = 0;
}

std::vector<double> MaskedMatrix::presentValues(std::size_t j) const {
  std::vector<double> out;
  out.reserve(rows_);
  const auto values = columnValues(j);
  const auto mask = columnMask(j);
  for (std::size_t i = 0; i < rows_; ++i) {
    if (mask[i] != 0) out.push_back(values[i]);
  }
  return out;
}

std::size_t MaskedMatrix::presentCount(std::size_t j) const {
  const auto mask = columnMask(j);
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), 1));
}

std::size_t MaskedMatrix::missingCount() const {
  return static_cast<std::size_t>(std::count(present_.begin(), present_.end(), 0));
}

DataMatrix::DataMatrix(MaskedMatrix cells, std::vector<std::string> rowLabels,
                       std::vector<std::string> colLabels)
    : DataMatrix(std::move(cells), std::move(rowLabels), std::move(colLabels), {}, {}) {}

DataMatrix::DataMatrix(MaskedMatrix cells, std::vector<std::string> rowLabels,
                       std::vector<std::string> colLabels, std::vector<ColumnKind> kinds,
                       std::vector<std::vector<std::string>> text)
    : cells_(std::move(cells)),
      rowLabels_(std::move(rowLabels)),
      colLabels_(std::move(colLabels)),
      kinds_(std::move(kinds)),
      text_(std::move(text)) {
  const std::size_t n = cells_.rows();
  const std::size_t d = cells_.cols();
  if (n == 0 || d == 0) throw std::invalid_argument("data matrix needs at least one row and column");
  if (rowLabels_.empty()) rowLabels_ = defaultLabels(n, "");
  if (colLabels_.empty()) colLabels_ = defaultLabels(d, "V");
  if (kinds_.empty()) kinds_.assign(d, ColumnKind::Numeric);
  if (text_.empty()) text_.resize(d);
  if (rowLabels_.size() != n || colLabels_.size() != d || kinds_.size() != d || text_.size() != d) {
    throw std::invalid_argument("data matrix labels do not match its dimensions");
  }
  requireUnique(rowLabels_, "row");
  requireUnique(colLabels_, "column");
  for (std::size_t j = 0; j < d; ++j) {
    if (kinds_[j] == ColumnKind::Text) {
      if (text_[j].size() != n) throw std::invalid_argument("text column has wrong length");
      if (cells_.presentCount(j) != 0) {
        throw std::invalid_argument("text column must not hold numeric cells");
      }
    } else if (!text_[j].empty()) {
      throw std::invalid_argument("numeric column must not hold text");
    }
  }
}

DataMatrix DataMatrix::fromColumns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) throw std::invalid_argument("fromColumns: no columns");
  const std::size_t n = columns.front().size();
  MaskedMatrix cells(n, columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j].size() != n) throw std::invalid_argument("fromColumns: ragged columns");
    for (std::size_t i = 0; i < n; ++i) cells.set(i, j, columns[j][i]);
  }
  return DataMatrix(std::move(cells));
}

DataMatrix DataMatrix::selectColumns(std::span<const std::size_t> cols) const {
  MaskedMatrix cells(rows(), cols.size());
  std::vector<std::string> labels;
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<std::string>> text;
  for (std::size_t k = 0; k < cols.size(); ++k) {
    const std::size_t j = cols[k];
    if (j >= this->cols()) throw std::invalid_argument("selectColumns: index out of range");
    for (std::size_t i = 0; i < rows(); ++i) {
      if (const auto v = cells_.at(i, j)) cells.set(i, k, *v);
    }
    labels.push_back(colLabels_[j]);
    kinds.push_back(kinds_[j]);
    text.push_back(text_[j]);
  }
  DataMatrix out(std::move(cells), rowLabels_, std::move(labels), std::move(kinds), std::move(text));
  out.rowLabelHeader_ = rowLabelHeader_;
  return out;
}

ColumnSelection selectAnalyzableColumns(const DataMatrix& x, const ColumnSelectionOptions& options) {
  if (options.minDistinct < 2) throw std::invalid_argument("minDistinct must be at least 2");
  if (!(options.maxMissingFrac > 0.0 && options.maxMissingFrac <= 1.0)) {
    throw std::invalid_argument("maxMissingFrac must lie in (0, 1]");
  }
  ColumnSelectionReport report;
  const auto n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (x.kind(j) == ColumnKind::Text) {
      report.droppedNonNumeric.push_back(j);
      continue;
    }
    std::vector<double> values = x.cells().presentValues(j);
    const double presentFrac = static_cast<double>(values.size()) / n;
    if (values.empty() || presentFrac < 1.0 - options.maxMissingFrac) {
      report.droppedTooManyMissing.push_back(j);
      continue;
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const auto distinct =
        static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    if (distinct < options.minDistinct) {
      report.droppedFewValues.push_back(j);
      continue;
    }
    const double loc = robLoc(values, options.biweightC);
    for (double& v : values) v -= loc;
    if (robScale(values, options.scaleB, options.scaleDelta) == 0.0) {
      report.droppedZeroScale.push_back(j);
      continue;
    }
    report.kept.push_back(j);
  }
  if (report.kept.empty()) throw DataError("no analyzable columns");
  DataMatrix data = x.selectColumns(report.kept);
  return {std::move(data), std::move(report)};
}

DataMatrix columnAffineTransform(const DataMatrix& x, std::span<const double> shifts,
                                 std::span<const double> factors) {
  if (shifts.size() != x.cols() || factors.size() != x.cols()) {
    throw std::invalid_argument("affine transform needs one shift and factor per column");
  }
  MaskedMatrix cells(x.rows(), x.cols());
  std::vector<std::vector<std::string>> text;
  std::vector<ColumnKind> kinds;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    if (factors[j] == 0.0 || !std::isfinite(factors[j]) || !std::isfinite(shifts[j])) {
      throw std::invalid_argument("affine factors must be finite and nonzero");
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (const auto v = x.at(i, j)) cells.set(i, j, factors[j] * *v + shifts[j]);
    }
    kinds.push_back(x.kind(j));
    text.push_back(x.text(j));
  }
  DataMatrix out(std::move(cells), x.rowLabels(), x.colLabels(), std::move(kinds), std::move(text));
  out.setRowLabelHeader(x.rowLabelHeader());
  return out;
}

DataMatrix permute(const DataMatrix& x, std::span<const std::size_t> rowPerm,
                   std::span<const std::size_t> colPerm) {
  requirePermutation(rowPerm, x.rows(), "row");
  requirePermutation(colPerm, x.cols(), "column");
  MaskedMatrix cells(x.rows(), x.cols());
  std::vector<std::string> rowLabels(x.rows());
  std::vector<std::string> colLabels(x.cols());
  std::vector<ColumnKind> kinds(x.cols());
  std::vector<std::vector<std::string>> text(x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) rowLabels[i] = x.rowLabels()[rowPerm[i]];
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const std::size_t src = colPerm[j];
    colLabels[j] = x.colLabels()[src];
    kinds[j] = x.kind(src);
    if (kinds[j] == ColumnKind::Text) {
      text[j].resize(x.rows());
      for (std::size_t i = 0; i < x.rows(); ++i) text[j][i] = x.text(src)[rowPerm[i]];
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (const auto v = x.at(rowPerm[i], src)) cells.set(i, j, *v);
    }
  }
  DataMatrix out(std::move(cells), std::move(rowLabels), std::move(colLabels), std::move(kinds),
                 std::move(text));
  out.setRowLabelHeader(x.rowLabelHeader());
  return out;
}

std::vector<std::size_t> inversePermutation(std::span<const std::size_t> perm) {
  requirePermutation(perm, perm.size(), "inverse");
  std::vector<std::size_t> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = k;
  return inv;
}

}  // namespace ddc
