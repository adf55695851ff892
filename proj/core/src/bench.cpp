#include "ddc/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ddc::bench {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::size_t floorCount(double fraction, std::size_t total) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total) + 1e-9));
}

std::string formatNumber(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct Accumulator {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  double standardError() const {
    if (count < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count));
  }
};

}  // namespace

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  return u * factor;
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("Rng::below: zero bound");
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t r = engine_();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t scenario, std::uint64_t replication) {
  return splitmix64(splitmix64(splitmix64(base) ^ scenario) ^ replication);
}

Eigen::MatrixXd makeCorrelation(const CorrelationModel& model) {
  const auto d = static_cast<Eigen::Index>(model.d);
  if (d < 2) throw std::invalid_argument("makeCorrelation: need d >= 2");
  Eigen::MatrixXd sigma(d, d);
  if (model.kind == CorrelationKind::A09) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index h = 0; h < d; ++h) {
        sigma(j, h) = std::pow(-0.9, static_cast<double>(std::abs(h - j)));
      }
    }
    return sigma;
  }

  Rng rng(model.seed);
  Eigen::MatrixXd gaussian(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) gaussian(i, j) = rng.normal();
  }
  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian).householderQ();
  Eigen::VectorXd eigenvalues(d);
  const double logMax = std::log(100.0);
  eigenvalues(0) = 1.0;
  eigenvalues(d - 1) = 100.0;
  for (Eigen::Index k = 1; k + 1 < d; ++k) eigenvalues(k) = std::exp(rng.uniform() * logMax);
  Eigen::MatrixXd cov = q * eigenvalues.asDiagonal() * q.transpose();
  const Eigen::VectorXd invSd = cov.diagonal().cwiseSqrt().cwiseInverse();
  sigma = invSd.asDiagonal() * cov * invSd.asDiagonal();
  sigma = 0.5 * (sigma + sigma.transpose()).eval();
  sigma.diagonal().setOnes();
  return sigma;
}

DataMatrix sampleGaussian(std::size_t n, const Eigen::MatrixXd& sigma, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sampleGaussian: n must be positive");
  if (sigma.rows() != sigma.cols()) throw std::invalid_argument("sampleGaussian: sigma not square");
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("sampleGaussian: sigma is not positive definite");
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  const auto d = sigma.rows();
  Rng rng(seed);
  MaskedMatrix cells(n, static_cast<std::size_t>(d));
  Eigen::VectorXd draw(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) draw(k) = rng.normal();
    const Eigen::VectorXd row = lower * draw;
    for (Eigen::Index k = 0; k < d; ++k) cells.set(i, static_cast<std::size_t>(k), row(k));
  }
  return DataMatrix(std::move(cells));
}

Eigen::VectorXd hardestDirection(const Eigen::MatrixXd& sigma) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success || eig.eigenvalues()(0) <= 0.0) {
    throw std::invalid_argument("hardestDirection: sigma is not positive definite");
  }
  Eigen::VectorXd v = eig.eigenvectors().col(0);
  const double d = static_cast<double>(sigma.rows());
  // v is a unit eigenvector, so v' sigma^-1 v = 1 / lambda_min.
  v *= std::sqrt(d * eig.eigenvalues()(0));
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (v(k) != 0.0) {
      if (v(k) < 0.0) v = -v;
      break;
    }
  }
  return v;
}

Contaminated contaminate(const DataMatrix& x, const ContaminationSpec& spec,
                         const Eigen::MatrixXd* sigma) {
  if (!(spec.fraction >= 0.0 && spec.fraction < 0.5)) {
    throw std::invalid_argument("contamination fraction must lie in [0, 0.5)");
  }
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  Contaminated out{x, {}, {}, {}};
  if (spec.mode == ContaminationMode::None) return out;

  Rng rng(spec.seed);
  const std::size_t total = spec.mode == ContaminationMode::Cellwise ? n * d : n;
  const std::size_t count = floorCount(spec.fraction, total);
  if (count == 0) {
    out.warnings.emplace_back("contamination fraction too small: no cells replaced");
    return out;
  }
  // Partial Fisher-Yates: the first `count` entries are a uniform sample.
  std::vector<std::size_t> index(total);
  std::iota(index.begin(), index.end(), std::size_t{0});
  for (std::size_t k = 0; k < count; ++k) {
    const auto pick = k + static_cast<std::size_t>(rng.below(total - k));
    std::swap(index[k], index[pick]);
  }
  index.resize(count);
  std::sort(index.begin(), index.end());

  MaskedMatrix cells = x.cells();
  if (spec.mode == ContaminationMode::Cellwise) {
    for (const std::size_t k : index) {
      const CellIndex cell{k % n, k / n};
      cells.set(cell.row, cell.col, spec.gamma);
      out.cells.push_back(cell);
    }
    std::sort(out.cells.begin(), out.cells.end());
  } else {
    if (sigma == nullptr || static_cast<std::size_t>(sigma->rows()) != d) {
      throw std::invalid_argument("rowwise contamination needs the true covariance");
    }
    const Eigen::VectorXd v = hardestDirection(*sigma);
    for (const std::size_t i : index) {
      for (std::size_t j = 0; j < d; ++j) cells.set(i, j, spec.gamma * v(static_cast<Eigen::Index>(j)));
      out.rows.push_back(i);
    }
  }
  std::vector<ColumnKind> kinds;
  std::vector<std::vector<std::string>> text;
  for (std::size_t j = 0; j < d; ++j) {
    kinds.push_back(x.kind(j));
    text.push_back(x.text(j));
  }
  out.data = DataMatrix(std::move(cells), x.rowLabels(), x.colLabels(), std::move(kinds), std::move(text));
  return out;
}

double missedFraction(const std::vector<CellIndex>& truth, const std::vector<CellIndex>& flagged) {
  if (truth.empty()) throw std::invalid_argument("rate undefined on clean data");
  std::vector<CellIndex> sorted = flagged;
  std::sort(sorted.begin(), sorted.end());
  const auto missed = std::count_if(truth.begin(), truth.end(), [&](const CellIndex& c) {
    return !std::binary_search(sorted.begin(), sorted.end(), c);
  });
  return static_cast<double>(missed) / static_cast<double>(truth.size());
}

double missedFraction(const std::vector<std::size_t>& truth, const std::vector<std::size_t>& flagged) {
  if (truth.empty()) throw std::invalid_argument("rate undefined on clean data");
  std::vector<std::size_t> sorted = flagged;
  std::sort(sorted.begin(), sorted.end());
  const auto missed = std::count_if(truth.begin(), truth.end(), [&](std::size_t r) {
    return !std::binary_search(sorted.begin(), sorted.end(), r);
  });
  return static_cast<double>(missed) / static_cast<double>(truth.size());
}

double imputationMSE(const DataMatrix& clean, const DataMatrix& imputed,
                     const std::vector<std::size_t>& flaggedRows) {
  if (clean.rows() != imputed.rows() || clean.cols() != imputed.cols()) {
    throw std::invalid_argument("imputationMSE: matrices are not conformable");
  }
  std::vector<bool> skip(clean.rows(), false);
  for (const std::size_t i : flaggedRows) skip.at(i) = true;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < clean.rows(); ++i) {
    if (skip[i]) continue;
    for (std::size_t j = 0; j < clean.cols(); ++j) {
      const auto a = clean.at(i, j);
      const auto b = imputed.at(i, j);
      if (!a || !b) continue;
      sum += (*b - *a) * (*b - *a);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("imputationMSE: all rows flagged");
  return sum / static_cast<double>(count);
}

double lrtDeviation(const Eigen::MatrixXd& estimate, const Eigen::MatrixXd& truth) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols() ||
      estimate.rows() != estimate.cols()) {
    throw std::invalid_argument("lrtDeviation: matrices must be square and of equal size");
  }
  const Eigen::LLT<Eigen::MatrixXd> truthLlt(truth);
  const Eigen::LLT<Eigen::MatrixXd> estimateLlt(estimate);
  if (truthLlt.info() != Eigen::Success || estimateLlt.info() != Eigen::Success) {
    throw std::invalid_argument("lrtDeviation: singular or indefinite matrix");
  }
  const auto logDet = [](const Eigen::LLT<Eigen::MatrixXd>& llt) {
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  };
  // trace(S T^-1) = trace(T^-1 S)
  const double trace = truthLlt.solve(estimate).trace();
  const double value =
      trace - (logDet(estimateLlt) - logDet(truthLlt)) - static_cast<double>(truth.rows());
  return std::max(0.0, value);
}

Eigen::MatrixXd classicalCovariance(const DataMatrix& x, const std::vector<std::size_t>& excludedRows) {
  std::vector<bool> skip(x.rows(), false);
  for (const std::size_t i : excludedRows) skip.at(i) = true;
  const auto d = static_cast<Eigen::Index>(x.cols());
  std::vector<Eigen::VectorXd> rows;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    if (skip[i]) continue;
    Eigen::VectorXd row(d);
    bool complete = true;
    for (Eigen::Index j = 0; j < d && complete; ++j) {
      const auto v = x.at(i, static_cast<std::size_t>(j));
      if (v) row(j) = *v;
      complete = v.has_value();
    }
    if (complete) rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::invalid_argument("classicalCovariance: fewer than two complete rows");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  for (const auto& r : rows) mean += r;
  mean /= static_cast<double>(rows.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& r : rows) cov.noalias() += (r - mean) * (r - mean).transpose();
  return cov / static_cast<double>(rows.size() - 1);
}

double contaminationTheory(double eps, std::size_t d) {
  if (!(eps >= 0.0 && eps < 1.0) || d == 0) {
    throw std::invalid_argument("contaminationTheory: need 0 <= eps < 1 and d >= 1");
  }
  return 1.0 - std::pow(1.0 - eps, static_cast<double>(d));
}

SubstructureTheory substructureTheory(std::size_t q, double eps) {
  if (q < 2 || !(eps >= 0.0 && eps < 1.0)) {
    throw std::invalid_argument("substructureTheory: need q >= 2 and 0 <= eps < 1");
  }
  const double qd = static_cast<double>(q);
  return {1.0 - std::pow(2.0, -1.0 / qd), std::pow(1.0 - eps, qd)};
}

Detection detect(const DataMatrix& x, Detector detector, const DdcParams& params) {
  Detection out;
  if (detector == Detector::Ddc) {
    DdcResult result = runDdc(x, params);
    for (const auto& f : result.cellFlags) {
      out.cells.push_back({f.cell.row, result.originalColumn(f.cell.col)});
    }
    out.rowFlags = result.rows.flagged;
    out.rowsDetected = out.rowFlags;
    out.imputed = std::move(result.imputed);
  } else {
    ColumnSelectionOptions options;
    options.minDistinct = params.minDistinct;
    options.maxMissingFrac = params.maxMissingFrac;
    const ColumnSelection selection = selectAnalyzableColumns(x, options);
    const Standardized std = standardize(selection.data, params.tuning);
    const std::vector<CellFlag> flags = columnwiseBaseline(selection.data, params.tuning);
    const DenseMatrix zeros(x.rows(), selection.report.kept.size(), 0.0);
    out.imputed = imputeAndDestandardize(x, selection.report, std.stats, zeros, flags);
    for (const auto& f : flags) {
      out.cells.push_back({f.cell.row, selection.report.kept[f.cell.col]});
      out.rowsDetected.push_back(f.cell.row);
    }
  }
  std::sort(out.cells.begin(), out.cells.end());
  std::sort(out.rowsDetected.begin(), out.rowsDetected.end());
  out.rowsDetected.erase(std::unique(out.rowsDetected.begin(), out.rowsDetected.end()),
                         out.rowsDetected.end());
  return out;
}

std::string toString(CorrelationKind kind) {
  return kind == CorrelationKind::A09 ? "A09" : "randomLowCorr";
}

std::string toString(ContaminationMode mode) {
  switch (mode) {
    case ContaminationMode::None: return "none";
    case ContaminationMode::Cellwise: return "cellwise";
    case ContaminationMode::Rowwise: return "rowwise";
  }
  return "none";
}

std::string toString(Detector detector) { return detector == Detector::Ddc ? "ddc" : "columnwise"; }

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> splitList(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parseDouble(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw DataError("grid line " + std::to_string(line) + ": bad number '" + s + "'");
  }
  return v;
}

std::uint64_t parseUnsigned(const std::string& s, std::size_t line) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DataError("grid line " + std::to_string(line) + ": bad integer '" + s + "'");
  }
  return v;
}

// "a:b:step" expands to a, a+step, ..., up to b inclusive.
std::vector<double> parseNumbers(const std::string& value, std::size_t line) {
  std::vector<double> out;
  for (const auto& item : splitList(value)) {
    const auto first = item.find(':');
    if (first == std::string::npos) {
      out.push_back(parseDouble(item, line));
      continue;
    }
    const auto second = item.find(':', first + 1);
    const double start = parseDouble(trim(item.substr(0, first)), line);
    const double stop = parseDouble(
        trim(item.substr(first + 1, second == std::string::npos ? std::string::npos : second - first - 1)),
        line);
    const double step = second == std::string::npos ? 1.0 : parseDouble(trim(item.substr(second + 1)), line);
    if (!(step > 0.0) || stop < start) {
      throw DataError("grid line " + std::to_string(line) + ": bad range '" + item + "'");
    }
    for (std::size_t k = 0;; ++k) {
      const double v = start + static_cast<double>(k) * step;
      if (v > stop + 1e-9 * step) break;
      out.push_back(v);
    }
  }
  if (out.empty()) throw DataError("grid line " + std::to_string(line) + ": empty list");
  return out;
}

bool parseBool(const std::string& s, std::size_t line) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw DataError("grid line " + std::to_string(line) + ": bad boolean '" + s + "'");
}

}  // namespace

ExperimentGrid parseGrid(std::istream& in) {
  ExperimentGrid grid;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw DataError("grid line " + std::to_string(line) + ": expected key = value");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto fail = [&](const std::string& what) {
      return DataError("grid line " + std::to_string(line) + ": " + what);
    };

    if (key == "model") {
      grid.models.clear();
      for (const auto& item : splitList(value)) {
        if (item == "A09") grid.models.push_back(CorrelationKind::A09);
        else if (item == "randomLowCorr") grid.models.push_back(CorrelationKind::RandomLowCorr);
        else throw fail("unknown model '" + item + "'");
      }
    } else if (key == "n" || key == "d") {
      auto& target = key == "n" ? grid.ns : grid.ds;
      target.clear();
      for (const auto& item : splitList(value)) target.push_back(parseUnsigned(item, line));
    } else if (key == "eps") {
      grid.eps = parseNumbers(value, line);
    } else if (key == "gamma") {
      grid.gammas = parseNumbers(value, line);
    } else if (key == "mode") {
      grid.modes.clear();
      for (const auto& item : splitList(value)) {
        if (item == "cellwise") grid.modes.push_back(ContaminationMode::Cellwise);
        else if (item == "rowwise") grid.modes.push_back(ContaminationMode::Rowwise);
        else if (item == "none") grid.modes.push_back(ContaminationMode::None);
        else throw fail("unknown mode '" + item + "'");
      }
    } else if (key == "detector") {
      grid.detectors.clear();
      for (const auto& item : splitList(value)) {
        if (item == "ddc") grid.detectors.push_back(Detector::Ddc);
        else if (item == "columnwise") grid.detectors.push_back(Detector::Columnwise);
        else throw fail("unknown detector '" + item + "'");
      }
    } else if (key == "reps") {
      grid.replications = parseUnsigned(value, line);
    } else if (key == "seed") {
      grid.seed = parseUnsigned(value, line);
    } else if (key == "lrt") {
      grid.lrt = parseBool(value, line);
    } else if (key == "tolerance") {
      try {
        grid.params.tuning.setTolerance(parseDouble(value, line));
      } catch (const std::invalid_argument& e) {
        throw fail(e.what());
      }
    } else if (key == "corrlim") {
      grid.params.corrlim = parseDouble(value, line);
    } else if (key == "iterations") {
      grid.params.nbIterations = parseUnsigned(value, line);
    } else if (key == "include_self") {
      grid.params.includeSelf = parseBool(value, line);
    } else {
      throw fail("unknown key '" + key + "'");
    }
  }
  if (grid.models.empty() || grid.ns.empty() || grid.ds.empty() || grid.modes.empty() ||
      grid.detectors.empty()) {
    throw DataError("grid: every list must have at least one entry");
  }
  if (grid.replications == 0) throw DataError("grid: reps must be positive");
  return grid;
}

std::vector<ExperimentRow> runExperiment(const ExperimentGrid& grid) {
  static const std::vector<std::string> kMetrics{"missedFraction", "imputationMSE", "lrt",
                                                 "flaggedCellFraction", "flaggedRowFraction"};
  std::vector<ExperimentRow> table;
  std::uint64_t scenario = 0;
  for (const auto model : grid.models) {
    for (const auto n : grid.ns) {
      for (const auto d : grid.ds) {
        for (const double eps : grid.eps) {
          for (const double gamma : grid.gammas) {
            for (const auto mode : grid.modes) {
              // detector -> metric -> accumulator
              std::vector<std::map<std::string, Accumulator>> acc(grid.detectors.size());
              for (std::size_t rep = 0; rep < grid.replications; ++rep) {
                const std::uint64_t seed = deriveSeed(grid.seed, scenario, rep);
                const Eigen::MatrixXd sigma = makeCorrelation({model, d, deriveSeed(seed, 1, 0)});
                const DataMatrix clean = sampleGaussian(n, sigma, deriveSeed(seed, 2, 0));
                const Contaminated dirty =
                    contaminate(clean, {mode, eps, gamma, deriveSeed(seed, 3, 0)}, &sigma);
                for (std::size_t k = 0; k < grid.detectors.size(); ++k) {
                  const Detection det = detect(dirty.data, grid.detectors[k], grid.params);
                  auto& m = acc[k];
                  if (mode == ContaminationMode::Cellwise && !dirty.cells.empty()) {
                    m["missedFraction"].add(missedFraction(dirty.cells, det.cells));
                  } else if (mode == ContaminationMode::Rowwise && !dirty.rows.empty()) {
                    m["missedFraction"].add(missedFraction(dirty.rows, det.rowsDetected));
                  }
                  try {
                    m["imputationMSE"].add(imputationMSE(clean, det.imputed, det.rowFlags));
                  } catch (const std::invalid_argument&) {
                    // every row flagged: no cells to score
                  }
                  if (grid.lrt) {
                    try {
                      m["lrt"].add(lrtDeviation(classicalCovariance(det.imputed, det.rowFlags), sigma));
                    } catch (const std::invalid_argument&) {
                      // singular covariance after row removal
                    }
                  }
                  m["flaggedCellFraction"].add(static_cast<double>(det.cells.size()) /
                                               static_cast<double>(n * d));
                  m["flaggedRowFraction"].add(static_cast<double>(det.rowFlags.size()) /
                                              static_cast<double>(n));
                }
              }
              for (std::size_t k = 0; k < grid.detectors.size(); ++k) {
                for (const auto& metric : kMetrics) {
                  const auto it = acc[k].find(metric);
                  if (it == acc[k].end() || it->second.count == 0) continue;
                  table.push_back({toString(model), n, d, eps, gamma, toString(mode),
                                   toString(grid.detectors[k]), metric, it->second.mean,
                                   it->second.standardError(), it->second.count, grid.seed});
                }
              }
              ++scenario;
            }
          }
        }
      }
    }
  }
  return table;
}

void writeExperimentCsv(const std::vector<ExperimentRow>& rows, std::ostream& out) {
  out << "# rng: " << Rng::kDescription << '\n';
  out << "model,n,d,eps,gamma,detector,metric,value,stderr,reps,seed,mode\n";
  for (const auto& r : rows) {
    out << r.model << ',' << r.n << ',' << r.d << ',' << formatNumber(r.eps) << ','
        << formatNumber(r.gamma) << ',' << r.detector << ',' << r.metric << ','
        << formatNumber(r.value) << ',' << formatNumber(r.standardError) << ',' << r.reps << ','
        << r.seed << ',' << r.mode << '\n';
  }
}

std::optional<double> findMetric(const std::vector<ExperimentRow>& rows, const std::string& detector,
                                 const std::string& metric, double gamma) {
  for (const auto& r : rows) {
    if (r.detector == detector && r.metric == metric && r.gamma == gamma) return r.value;
  }
  return std::nullopt;
}

}  // namespace ddc::bench
