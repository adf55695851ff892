#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "ddc/bench.hpp"
#include "ddc/engine.hpp"
#include "ddc/io.hpp"

namespace ddc::cli {

namespace {

struct DetectOptions {
  std::string input;
  double tolerance = 0.99;
  double corrlim = 0.5;
  std::size_t iterations = 0;
  std::optional<std::size_t> kNeighbors;
  bool noRowFlags = false;
  bool includeSelf = false;
  bool excludeSelf = false;
  std::string combination = "mean";
  std::size_t minDistinct = 3;
  double maxMissingFrac = 0.5;
  std::string flagsOut;
  std::string imputedOut;
  std::string rowFlagsOut;
  std::string cellMapOut;
  std::string cellMapConfig;
  std::size_t blockRows = 1;
  std::size_t blockCols = 1;
  std::vector<std::string> naTokens = io::defaultNaTokens();
};

struct BenchOptions {
  std::string grid;
  std::string out;
};

struct TheoryOptions {
  std::size_t q = 2;
  double eps = 0.1;
  std::optional<std::size_t> d;
  bool table = false;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string percent(double fraction) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << 100.0 * fraction << '%';
  return s.str();
}

std::string joinDropped(const DataMatrix& x, const ColumnSelectionReport& report) {
  std::vector<std::string> parts;
  const auto add = [&](const std::vector<std::size_t>& cols, const char* reason) {
    for (const std::size_t j : cols) parts.push_back(x.colLabels()[j] + "(" + reason + ")");
  };
  add(report.droppedNonNumeric, "non-numeric");
  add(report.droppedFewValues, "few-values");
  add(report.droppedTooManyMissing, "too-many-missing");
  add(report.droppedZeroScale, "zero-scale");
  if (parts.empty()) return "none";
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k > 0) out += ' ';
    out += parts[k];
  }
  return out;
}

DdcParams makeParams(const DetectOptions& o) {
  if (!(o.tolerance > 0.0 && o.tolerance < 1.0)) throw UsageError("--tolerance must lie in (0, 1)");
  if (!(o.corrlim >= 0.0 && o.corrlim < 1.0)) throw UsageError("--corrlim must lie in [0, 1)");
  if (o.minDistinct < 2) throw UsageError("--min-distinct must be at least 2");
  if (!(o.maxMissingFrac > 0.0 && o.maxMissingFrac <= 1.0)) {
    throw UsageError("--max-missing-frac must lie in (0, 1]");
  }
  if (o.kNeighbors && *o.kNeighbors == 0) throw UsageError("--k-neighbors must be positive");
  if (o.blockRows == 0 || o.blockCols == 0) throw UsageError("block sizes must be positive");
  DdcParams params;
  params.tuning.setTolerance(o.tolerance);
  params.corrlim = o.corrlim;
  params.nbIterations = o.iterations;
  params.kNeighbors = o.kNeighbors;
  params.rowFlagging = !o.noRowFlags;
  params.includeSelf = !o.excludeSelf;
  params.combination =
      o.combination == "median" ? CombinationRule::WeightedMedian : CombinationRule::WeightedMean;
  params.minDistinct = o.minDistinct;
  params.maxMissingFrac = o.maxMissingFrac;
  return params;
}

int runDetect(const DetectOptions& o, std::ostream& out, std::ostream& err) {
  const DdcParams params = makeParams(o);
  const DataMatrix x = io::readCsv(o.input, o.naTokens);
  if (params.kNeighbors && *params.kNeighbors > x.cols()) {
    throw UsageError("--k-neighbors exceeds the number of columns");
  }
  const DdcResult result = runDdc(x, params);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';

  if (!o.flagsOut.empty()) io::writeFlags(result, x, o.flagsOut);
  if (!o.rowFlagsOut.empty()) io::writeRowFlags(result, x, o.rowFlagsOut);
  if (!o.imputedOut.empty()) io::writeImputed(result.imputed, o.imputedOut);
  if (!o.cellMapOut.empty()) {
    io::CellMapSpec spec;
    spec.blockRows = std::min(o.blockRows, x.rows());
    spec.blockCols = std::min(o.blockCols, result.report.kept.size());
    spec.showRowFlags = params.rowFlagging;
    if (!o.cellMapConfig.empty()) {
      std::ifstream config(o.cellMapConfig);
      if (!config) throw DataError("cannot read " + o.cellMapConfig);
      spec.palette = io::CellMapPalette::parse(config);
    }
    io::renderCellMap(result, x, spec, o.cellMapOut);
  }

  out << "n=" << x.rows() << " d=" << x.cols() << " analyzed=" << result.report.kept.size()
      << " flagged_cells=" << result.cellFlags.size() << " flagged_rows=" << result.rows.flagged.size()
      << " dropped=" << joinDropped(x, result.report) << '\n';
  return kExitOk;
}

int runBench(const BenchOptions& o, std::ostream& out) {
  std::ifstream in(o.grid);
  if (!in) throw DataError("cannot read " + o.grid);
  const bench::ExperimentGrid grid = bench::parseGrid(in);
  const auto rows = bench::runExperiment(grid);
  if (o.out.empty()) {
    bench::writeExperimentCsv(rows, out);
  } else {
    std::ofstream file(o.out, std::ios::binary);
    if (!file) throw DataError("cannot write " + o.out);
    bench::writeExperimentCsv(rows, file);
    out << "wrote " << rows.size() << " rows to " << o.out << '\n';
  }
  return kExitOk;
}

int runTheory(const TheoryOptions& o, std::ostream& out) {
  if (o.q < 2) throw UsageError("--q must be at least 2");
  if (!(o.eps >= 0.0 && o.eps < 1.0)) throw UsageError("--eps must lie in [0, 1)");
  if (o.d && *o.d == 0) throw UsageError("--d must be positive");
  if (o.table) {
    out << "q,breakdown,clean_row_probability\n";
    for (const std::size_t q : {2, 3, 4, 5, 10, 20}) {
      const auto t = bench::substructureTheory(q, o.eps);
      out << q << ',' << percent(t.breakdown) << ',' << percent(t.cleanRowProbability) << '\n';
    }
    return kExitOk;
  }
  const auto t = bench::substructureTheory(o.q, o.eps);
  out << "q=" << o.q << " eps=" << o.eps << '\n';
  out << "breakdown: " << percent(t.breakdown) << '\n';
  out << "clean-row: " << percent(t.cleanRowProbability) << '\n';
  if (o.d) {
    out << "contaminated-rows (d=" << *o.d << "): " << percent(bench::contaminationTheory(o.eps, *o.d))
        << '\n';
  }
  return kExitOk;
}

}  // namespace

int cliMain(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Detect deviating cells in a data matrix"};
  app.name("ddc");
  app.require_subcommand(1);

  DetectOptions detect;
  auto* detectCmd = app.add_subcommand("detect", "Flag deviating cells and rows in a CSV file");
  detectCmd->add_option("--input", detect.input, "Input CSV file")->required();
  detectCmd->add_option("--tolerance", detect.tolerance, "Tolerance probability p")->capture_default_str();
  detectCmd->add_option("--corrlim", detect.corrlim, "Minimal |correlation| for neighbors")
      ->capture_default_str();
  detectCmd->add_option("--iterations", detect.iterations, "Extra flagging passes")->capture_default_str();
  detectCmd->add_option("--k-neighbors", detect.kNeighbors, "Use only the k most correlated columns");
  detectCmd->add_flag("--no-row-flags", detect.noRowFlags, "Skip row flagging");
  auto* include = detectCmd->add_flag("--include-self", detect.includeSelf,
                                      "Use the cell itself in its prediction (default)");
  auto* exclude = detectCmd->add_flag("--exclude-self", detect.excludeSelf,
                                      "Predict each cell from other columns only");
  include->excludes(exclude);
  detectCmd->add_option("--combination", detect.combination, "Combination rule")
      ->check(CLI::IsMember({"mean", "median"}))
      ->capture_default_str();
  detectCmd->add_option("--min-distinct", detect.minDistinct, "Minimal distinct values per column")
      ->capture_default_str();
  detectCmd->add_option("--max-missing-frac", detect.maxMissingFrac, "Maximal missing fraction per column")
      ->capture_default_str();
  detectCmd->add_option("--flags-out", detect.flagsOut, "Flagged cells CSV");
  detectCmd->add_option("--imputed-out", detect.imputedOut, "Imputed data CSV");
  detectCmd->add_option("--rowflags-out", detect.rowFlagsOut, "Row scores CSV");
  detectCmd->add_option("--cellmap-out", detect.cellMapOut, "Cell map SVG");
  detectCmd->add_option("--cellmap-config", detect.cellMapConfig, "Palette file for the cell map");
  detectCmd->add_option("--block-rows", detect.blockRows, "Rows per cell map block")->capture_default_str();
  detectCmd->add_option("--block-cols", detect.blockCols, "Columns per cell map block")->capture_default_str();
  detectCmd->add_option("--na-token", detect.naTokens, "Token read as missing (repeatable)");

  BenchOptions benchOpts;
  auto* benchCmd = app.add_subcommand("bench", "Run a contamination experiment grid");
  benchCmd->add_option("--grid", benchOpts.grid, "Grid config file")->required();
  benchCmd->add_option("--out", benchOpts.out, "Results CSV (default: standard output)");

  TheoryOptions theory;
  auto* theoryCmd = app.add_subcommand("theory", "Print contamination propagation values");
  theoryCmd->add_option("--q", theory.q, "Substructure dimension")->capture_default_str();
  theoryCmd->add_option("--eps", theory.eps, "Cell contamination probability")->capture_default_str();
  theoryCmd->add_option("--d", theory.d, "Dimension for the contaminated-row fraction");
  theoryCmd->add_flag("--table", theory.table, "Print the substructure table");

  std::vector<const char*> argv{"ddc"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*detectCmd) return runDetect(detect, out, err);
    if (*benchCmd) return runBench(benchOpts, out);
    return runTheory(theory, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace ddc::cli
