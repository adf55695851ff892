#include "ddc/engine.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

namespace ddc {

namespace {

// Rows where both columns are present, as two aligned vectors.
void completePairs(const MaskedMatrix& m, std::size_t j, std::size_t h, std::vector<double>& a,
                   std::vector<double>& b) {
  a.clear();
  b.clear();
  const auto vj = m.columnValues(j);
  const auto vh = m.columnValues(h);
  const auto pj = m.columnMask(j);
  const auto ph = m.columnMask(h);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (pj[i] != 0 && ph[i] != 0) {
      a.push_back(vj[i]);
      b.push_back(vh[i]);
    }
  }
}

struct Candidate {
  std::size_t col;
  double cor;
};

// Larger |cor| first, lower column index on ties.
bool strongerFirst(const Candidate& x, const Candidate& y) {
  const double ax = std::abs(x.cor);
  const double ay = std::abs(y.cor);
  if (ax != ay) return ax > ay;
  return x.col < y.col;
}

void truncateToStrongest(std::vector<Candidate>& list, std::size_t k) {
  if (list.size() <= k) return;
  std::nth_element(list.begin(), list.begin() + static_cast<std::ptrdiff_t>(k), list.end(),
                   strongerFirst);
  list.resize(k);
}

struct Term {
  double value;
  double weight;
};

double weightedMedian(std::vector<Term>& terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.value < y.value; });
  double total = 0.0;
  for (const auto& t : terms) total += t.weight;
  const double half = 0.5 * total;
  double cumulative = 0.0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    cumulative += terms[k].weight;
    if (cumulative == half && k + 1 < terms.size()) {
      return 0.5 * (terms[k].value + terms[k + 1].value);
    }
    if (cumulative >= half) return terms[k].value;
  }
  return terms.back().value;
}

std::optional<std::size_t> effectiveNeighborLimit(const DdcParams& params, std::size_t d) {
  if (params.kNeighbors) {
    if (*params.kNeighbors == 0) throw std::invalid_argument("kNeighbors must be positive");
    if (*params.kNeighbors > d) {
      throw std::invalid_argument("kNeighbors exceeds the number of analyzed columns");
    }
    return params.kNeighbors;
  }
  if (d > 1000) return std::size_t{100};
  return std::nullopt;
}

}  // namespace

std::size_t CorrelationGraph::standaloneCount() const {
  return static_cast<std::size_t>(std::count_if(
      neighbors.begin(), neighbors.end(), [](const auto& list) { return list.empty(); }));
}

Standardized standardize(const DataMatrix& x, const RobustTuning& tuning) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Standardized out{{std::vector<double>(d), std::vector<double>(d)}, MaskedMatrix(n, d)};
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<double> values = x.cells().presentValues(j);
    if (values.empty()) throw std::logic_error("standardize: column " + x.colLabels()[j] + " is empty");
    const double loc = robLoc(values, tuning);
    for (double& v : values) v -= loc;
    const double scale = robScale(values, tuning);
    if (scale == 0.0) {
      throw std::logic_error("standardize: column " + x.colLabels()[j] + " has zero robust scale");
    }
    out.stats.location[j] = loc;
    out.stats.scale[j] = scale;
    for (std::size_t i = 0; i < n; ++i) {
      if (const auto v = x.at(i, j)) out.z.set(i, j, (*v - loc) / scale);
    }
  }
  return out;
}

MaskedMatrix univariateFlag(const MaskedMatrix& z, double cutoff) {
  MaskedMatrix u = z;
  for (std::size_t j = 0; j < z.cols(); ++j) {
    for (std::size_t i = 0; i < z.rows(); ++i) {
      if (const auto v = z.at(i, j); v && std::abs(*v) > cutoff) u.clear(i, j);
    }
  }
  return u;
}

CorrelationGraph buildCorrelationGraph(const MaskedMatrix& u, const DdcParams& params) {
  if (!(params.corrlim >= 0.0 && params.corrlim < 1.0)) {
    throw std::invalid_argument("corrlim must lie in [0, 1)");
  }
  const std::size_t d = u.cols();
  const auto limit = effectiveNeighborLimit(params, d);

  std::vector<std::vector<Candidate>> candidates(d);
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t h = j + 1; h < d; ++h) {
      completePairs(u, j, h, a, b);
      const CorrelationEstimate est = robCorr(a, b, params.tuning);
      if (!est.defined || std::abs(est.value) < params.corrlim) continue;
      candidates[j].push_back({h, est.value});
      candidates[h].push_back({j, est.value});
      // Keep the working set bounded in top-k mode.
      if (limit) {
        if (candidates[j].size() > 2 * *limit) truncateToStrongest(candidates[j], *limit);
        if (candidates[h].size() > 2 * *limit) truncateToStrongest(candidates[h], *limit);
      }
    }
  }

  CorrelationGraph graph;
  graph.neighbors.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    auto& list = candidates[j];
    if (limit) truncateToStrongest(list, *limit);
    std::sort(list.begin(), list.end(),
              [](const Candidate& x, const Candidate& y) { return x.col < y.col; });
    for (const auto& c : list) {
      completePairs(u, j, c.col, a, b);
      try {
        graph.neighbors[j].push_back({c.col, c.cor, robSlope(a, b, params.tuning)});
      } catch (const std::domain_error&) {
        // No usable predictor values: the pair carries no information.
      }
    }
  }
  return graph;
}

RawPredictions predictCells(const MaskedMatrix& u, const CorrelationGraph& graph,
                            const DdcParams& params) {
  const std::size_t n = u.rows();
  const std::size_t d = u.cols();
  [[maybe_unused]] const double cutoff = params.tuning.cutoff();
  RawPredictions out{DenseMatrix(n, d), std::vector<unsigned char>(n * d, 0)};

  std::vector<Term> terms;
  for (std::size_t j = 0; j < d; ++j) {
    const auto& neighbors = graph.neighbors[j];
    for (std::size_t i = 0; i < n; ++i) {
      terms.clear();
      if (params.includeSelf) {
        if (const auto v = u.at(i, j)) terms.push_back({*v, 1.0});
      }
      for (const auto& nb : neighbors) {
        const auto v = u.at(i, nb.col);
        if (!v) continue;
        const double term = nb.slope * *v;
        assert(std::abs(term) <= std::abs(nb.slope) * cutoff);
        terms.push_back({term, std::abs(nb.cor)});
      }
      if (terms.empty()) {
        out.failsafe[j * n + i] = 1;
        continue;
      }
      if (params.combination == CombinationRule::WeightedMedian) {
        out.values(i, j) = weightedMedian(terms);
      } else {
        double num = 0.0;
        double den = 0.0;
        for (const auto& t : terms) {
          num += t.weight * t.value;
          den += t.weight;
        }
        out.values(i, j) = num / den;
      }
    }
  }
  return out;
}

Deshrunk deshrink(const MaskedMatrix& z, const RawPredictions& raw, const RobustTuning& tuning) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  Deshrunk out{std::vector<double>(d, 1.0), DenseMatrix(n, d)};
  std::vector<double> observed;
  std::vector<double> predicted;
  for (std::size_t j = 0; j < d; ++j) {
    observed.clear();
    predicted.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = z.at(i, j);
      if (!v || raw.isFailsafe(i, j)) continue;
      observed.push_back(*v);
      predicted.push_back(raw.values(i, j));
    }
    try {
      out.factors[j] = robSlope(observed, predicted, tuning);
    } catch (const std::domain_error&) {
      out.factors[j] = 1.0;
    }
    for (std::size_t i = 0; i < n; ++i) out.predictions(i, j) = out.factors[j] * raw.values(i, j);
  }
  return out;
}

CellResiduals cellResidualsAndFlags(const MaskedMatrix& z, const DenseMatrix& predictions,
                                    const CorrelationGraph& graph, const RobustTuning& tuning) {
  const std::size_t n = z.rows();
  const std::size_t d = z.cols();
  const double cutoff = tuning.cutoff();
  CellResiduals out{MaskedMatrix(n, d), {}, {}};

  std::vector<double> raw;
  for (std::size_t j = 0; j < d; ++j) {
    bool useZ = !graph.connected(j);
    double scale = 1.0;
    if (!useZ) {
      raw.clear();
      for (std::size_t i = 0; i < n; ++i) {
        if (const auto v = z.at(i, j)) raw.push_back(*v - predictions(i, j));
      }
      scale = raw.empty() ? 0.0 : robScale(raw, tuning);
      if (scale == 0.0) {
        out.warnings.push_back("column " + std::to_string(j) +
                               ": residual scale is zero, using standardized values as residuals");
        useZ = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      const auto v = z.at(i, j);
      if (!v) continue;
      const double r = useZ ? *v : (*v - predictions(i, j)) / scale;
      out.residuals.set(i, j, r);
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      const auto r = out.residuals.at(i, j);
      if (!r || std::abs(*r) <= cutoff) continue;
      out.flags.push_back({{i, j}, *r > 0.0 ? FlagSign::Positive : FlagSign::Negative});
    }
  }
  return out;
}

RowScores flagRows(const MaskedMatrix& residuals, const RobustTuning& tuning) {
  const std::size_t n = residuals.rows();
  const std::size_t d = residuals.cols();
  RowScores out;
  out.score.resize(n);
  out.standardized.resize(n);

  std::vector<double> defined;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (const auto r = residuals.at(i, j)) {
        sum += chiSq1Cdf(*r * *r);
        ++count;
      }
    }
    if (count == 0) continue;
    out.score[i] = sum / static_cast<double>(count);
    defined.push_back(*out.score[i]);
  }
  if (defined.empty()) {
    out.warnings.emplace_back("no row has a defined residual; no rows flagged");
    return out;
  }

  const double loc = robLoc(defined, tuning);
  for (double& t : defined) t -= loc;
  const double scale = robScale(defined, tuning);
  if (scale == 0.0) {
    out.warnings.emplace_back("row scores have zero robust scale; no rows flagged");
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!out.score[i]) continue;
    const double s = (*out.score[i] - loc) / scale;
    out.standardized[i] = s;
    if (s > tuning.cutoff()) out.flagged.push_back(i);
  }
  return out;
}

DataMatrix imputeAndDestandardize(const DataMatrix& x, const ColumnSelectionReport& report,
                                  const RobustColumnStats& stats, const DenseMatrix& predictions,
                                  const std::vector<CellFlag>& flags) {
  const std::size_t n = x.rows();
  const std::size_t analyzed = report.kept.size();
  if (predictions.rows() != n || predictions.cols() != analyzed) {
    throw std::invalid_argument("imputeAndDestandardize: predictions do not match the data");
  }
  std::vector<unsigned char> flagged(n * analyzed, 0);
  for (const auto& f : flags) flagged[f.cell.col * n + f.cell.row] = 1;

  MaskedMatrix cells = x.cells();
  for (std::size_t k = 0; k < analyzed; ++k) {
    const std::size_t j = report.kept[k];
    for (std::size_t i = 0; i < n; ++i) {
      if (x.present(i, j) && flagged[k * n + i] == 0) continue;
      cells.set(i, j, stats.scale[k] * predictions(i, k) + stats.location[k]);
    }
  }
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<std::string>> text;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    kinds.push_back(x.kind(j));
    text.push_back(x.text(j));
  }
  DataMatrix out(std::move(cells), x.rowLabels(), x.colLabels(), std::move(kinds), std::move(text));
  out.setRowLabelHeader(x.rowLabelHeader());
  return out;
}

DdcResult runDdc(const DataMatrix& x, const DdcParams& params) {
  const RobustTuning& tuning = params.tuning;
  ColumnSelectionOptions selectOptions;
  selectOptions.minDistinct = params.minDistinct;
  selectOptions.maxMissingFrac = params.maxMissingFrac;
  selectOptions.biweightC = tuning.biweightC;
  selectOptions.scaleB = tuning.scaleB;
  selectOptions.scaleDelta = tuning.scaleDelta;
  ColumnSelection selection = selectAnalyzableColumns(x, selectOptions);

  DdcResult result;
  result.report = std::move(selection.report);
  Standardized std = standardize(selection.data, tuning);
  result.stats = std::move(std.stats);
  result.standardized = std::move(std.z);
  result.univariate = univariateFlag(result.standardized, tuning.cutoff());
  result.graph = buildCorrelationGraph(result.univariate, params);

  MaskedMatrix u = result.univariate;
  Deshrunk deshrunk;
  CellResiduals cells;
  for (std::size_t pass = 0; pass <= params.nbIterations; ++pass) {
    if (pass > 0) {
      for (const auto& f : cells.flags) u.clear(f.cell.row, f.cell.col);
    }
    const RawPredictions raw = predictCells(u, result.graph, params);
    deshrunk = deshrink(result.standardized, raw, tuning);
    cells = cellResidualsAndFlags(result.standardized, deshrunk.predictions, result.graph, tuning);
  }
  result.predictions = std::move(deshrunk.predictions);
  result.deshrinkFactors = std::move(deshrunk.factors);
  result.residuals = std::move(cells.residuals);
  result.cellFlags = std::move(cells.flags);
  result.warnings = std::move(cells.warnings);

  if (params.rowFlagging) {
    result.rows = flagRows(result.residuals, tuning);
    result.warnings.insert(result.warnings.end(), result.rows.warnings.begin(),
                           result.rows.warnings.end());
  } else {
    result.rows.score.resize(x.rows());
    result.rows.standardized.resize(x.rows());
  }

  result.imputed = imputeAndDestandardize(x, result.report, result.stats, result.predictions,
                                          result.cellFlags);
  return result;
}

std::vector<CellFlag> columnwiseBaseline(const DataMatrix& x, const RobustTuning& tuning) {
  const Standardized std = standardize(x, tuning);
  const double cutoff = tuning.cutoff();
  std::vector<CellFlag> flags;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const auto z = std.z.at(i, j);
      if (!z || std::abs(*z) <= cutoff) continue;
      flags.push_back({{i, j}, *z > 0.0 ? FlagSign::Positive : FlagSign::Negative});
    }
  }
  return flags;
}

}  // namespace ddc
