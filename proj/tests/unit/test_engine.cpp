#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "ddc/engine.hpp"
#include "ddc/io.hpp"
#include "test_support.hpp"

using namespace ddc;
using ddc::testing::a09Sample;
using ddc::testing::flaggedInputCells;
using ddc::testing::fromRows;
using ddc::testing::gaussian;

namespace {

MaskedMatrix maskedFromColumns(const std::vector<std::vector<double>>& cols) {
  MaskedMatrix m(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < cols[j].size(); ++i) m.set(i, j, cols[j][i]);
  return m;
}

DataMatrix duplicateColumns() { return io::readCsv(ddc::testing::dataDir() / "duplicate_columns_50x3.csv"); }

}  // namespace

TEST(Standardize, HandEvaluatedColumn) {
  const auto s = standardize(DataMatrix::fromColumns({{1, 2, 3, 4, 5}}), RobustTuning{});
  EXPECT_DOUBLE_EQ(s.stats.location[0], 3.0);
  const double scale = robScale(std::vector<double>{-2, -1, 0, 1, 2});
  EXPECT_NEAR(s.stats.scale[0], scale, 1e-15);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(*s.z.at(i, 0), (i + 1.0 - 3.0) / scale, 1e-15);
}

TEST(Standardize, GaussianColumnNearUnit) {
  const auto s = standardize(DataMatrix::fromColumns({gaussian(10000, 3)}), RobustTuning{});
  EXPECT_NEAR(s.stats.location[0], 0.0, 0.05);
  EXPECT_NEAR(s.stats.scale[0], 1.0, 0.05);
}

TEST(Standardize, ZeroScaleIsInternalError) {
  EXPECT_THROW(standardize(DataMatrix::fromColumns({{1, 1, 1, 1, 2}}), RobustTuning{}), std::logic_error);
}

TEST(UnivariateFlag, MasksBeyondCutoff) {
  const MaskedMatrix z = maskedFromColumns({{2.0, 3.0, -3.0, -2.5}});
  const MaskedMatrix u = univariateFlag(z, 2.576);
  EXPECT_EQ(u.at(0, 0), 2.0);
  EXPECT_FALSE(u.present(1, 0));
  EXPECT_FALSE(u.present(2, 0));
  EXPECT_EQ(u.at(3, 0), -2.5);
}

TEST(UnivariateFlag, AboutOnePercentOnGaussian) {
  const auto y = gaussian(100000, 9);
  const MaskedMatrix u = univariateFlag(maskedFromColumns({y}), RobustTuning{}.cutoff());
  EXPECT_NEAR(static_cast<double>(u.missingCount()) / 1e5, 0.01, 0.002);
}

TEST(UnivariateFlag, MonotoneInTolerance) {
  const MaskedMatrix z = maskedFromColumns({gaussian(2000, 1), gaussian(2000, 2)});
  std::size_t prev = z.rows() * z.cols();
  for (const double p : {0.5, 0.8, 0.9, 0.95, 0.99, 0.999}) {
    const std::size_t masked = univariateFlag(z, RobustTuning(p).cutoff()).missingCount();
    EXPECT_LE(masked, prev);
    prev = masked;
  }
}

TEST(CorrelationGraph, DuplicatePairConnected) {
  const auto y = gaussian(100, 4);
  const auto g = buildCorrelationGraph(maskedFromColumns({y, y}), DdcParams{});
  ASSERT_EQ(g.neighbors[0].size(), 1u);
  ASSERT_EQ(g.neighbors[1].size(), 1u);
  EXPECT_NEAR(g.neighbors[0][0].cor, 1.0, 1e-12);
  EXPECT_NEAR(g.neighbors[0][0].slope, 1.0, 1e-12);
  EXPECT_NEAR(g.neighbors[1][0].slope, 1.0, 1e-12);
  EXPECT_EQ(g.standaloneCount(), 0u);
}

TEST(CorrelationGraph, IndependentColumnsStandalone) {
  const auto g = buildCorrelationGraph(maskedFromColumns({gaussian(500, 1), gaussian(500, 2)}), DdcParams{});
  EXPECT_FALSE(g.connected(0));
  EXPECT_FALSE(g.connected(1));
  EXPECT_EQ(g.standaloneCount(), 2u);
}

TEST(CorrelationGraph, A09AdjacentColumns) {
  const DataMatrix x = a09Sample(10000, 4, 21);
  const RobustTuning t;
  const auto s = standardize(x, t);
  const auto g = buildCorrelationGraph(univariateFlag(s.z, t.cutoff()), DdcParams{});
  for (std::size_t j = 0; j + 1 < 4; ++j) {
    const auto it = std::find_if(g.neighbors[j].begin(), g.neighbors[j].end(),
                                 [&](const Neighbor& nb) { return nb.col == j + 1; });
    ASSERT_NE(it, g.neighbors[j].end());
    EXPECT_NEAR(it->cor, -0.9, 0.05);
  }
}

TEST(CorrelationGraph, SymmetricAndAboveCorrlim) {
  const DataMatrix x = a09Sample(300, 8, 5);
  const RobustTuning t;
  const auto u = univariateFlag(standardize(x, t).z, t.cutoff());
  DdcParams p;
  const auto g = buildCorrelationGraph(u, p);
  for (std::size_t j = 0; j < 8; ++j) {
    for (const auto& nb : g.neighbors[j]) {
      EXPECT_NE(nb.col, j);
      EXPECT_GE(std::abs(nb.cor), p.corrlim);
      const auto& back = g.neighbors[nb.col];
      const auto it = std::find_if(back.begin(), back.end(), [&](const Neighbor& b) { return b.col == j; });
      ASSERT_NE(it, back.end());
      EXPECT_EQ(it->cor, nb.cor);
    }
  }
}

TEST(CorrelationGraph, RejectsBadParameters) {
  const MaskedMatrix u = maskedFromColumns({gaussian(30, 1), gaussian(30, 2)});
  DdcParams p;
  p.corrlim = 1.0;
  EXPECT_THROW(buildCorrelationGraph(u, p), std::invalid_argument);
  p = {};
  p.kNeighbors = 0;
  EXPECT_THROW(buildCorrelationGraph(u, p), std::invalid_argument);
  p.kNeighbors = 3;
  EXPECT_THROW(buildCorrelationGraph(u, p), std::invalid_argument);
}

TEST(CorrelationGraph, TopKKeepsStrongestWithLowerIndexTies) {
  const auto y = gaussian(80, 6);
  // Columns 1..3 equal column 0, so every neighbor has |cor| = 1.
  const MaskedMatrix u = maskedFromColumns({y, y, y, y});
  DdcParams p;
  p.kNeighbors = 2;
  const auto g = buildCorrelationGraph(u, p);
  ASSERT_EQ(g.neighbors[0].size(), 2u);
  EXPECT_EQ(g.neighbors[0][0].col, 1u);
  EXPECT_EQ(g.neighbors[0][1].col, 2u);
  ASSERT_EQ(g.neighbors[3].size(), 2u);
  EXPECT_EQ(g.neighbors[3][0].col, 0u);
  EXPECT_EQ(g.neighbors[3][1].col, 1u);

  const DataMatrix x = a09Sample(300, 6, 7);
  const RobustTuning t;
  const auto ux = univariateFlag(standardize(x, t).z, t.cutoff());
  p.kNeighbors = 1;
  const auto g1 = buildCorrelationGraph(ux, p);
  const auto gAll = buildCorrelationGraph(ux, DdcParams{});
  for (std::size_t j = 0; j < 6; ++j) {
    ASSERT_LE(g1.neighbors[j].size(), 1u);
    if (gAll.neighbors[j].empty()) continue;
    double best = 0.0;
    for (const auto& nb : gAll.neighbors[j]) best = std::max(best, std::abs(nb.cor));
    EXPECT_EQ(std::abs(g1.neighbors[j][0].cor), best);
  }
}

TEST(CorrelationGraph, AutomaticNeighborLimitForWideData) {
  // 1001 columns, a block of 150 copies of one column: every copy could have
  // 149 neighbors but the automatic limit keeps 100.
  const auto base = gaussian(12, 1);
  std::vector<std::vector<double>> cols;
  for (std::size_t j = 0; j < 1001; ++j) cols.push_back(j < 150 ? base : gaussian(12, 1000 + j));
  DdcParams p;
  p.corrlim = 0.99;
  const auto g = buildCorrelationGraph(maskedFromColumns(cols), p);
  EXPECT_EQ(g.neighbors[0].size(), 100u);
  EXPECT_EQ(g.neighbors[0].back().col, 100u);
}

TEST(PredictCells, StandaloneColumnUsesItself) {
  MaskedMatrix u = maskedFromColumns({{0.5, -1.0, 2.0}});
  u.clear(1, 0);
  const CorrelationGraph g{{{}}};
  const auto raw = predictCells(u, g, DdcParams{});
  EXPECT_EQ(raw.values(0, 0), 0.5);
  EXPECT_EQ(raw.values(2, 0), 2.0);
  EXPECT_EQ(raw.values(1, 0), 0.0);
  EXPECT_TRUE(raw.isFailsafe(1, 0));
  EXPECT_FALSE(raw.isFailsafe(0, 0));
}

TEST(PredictCells, ThreeDuplicatesReproduceTheColumn) {
  const auto y = gaussian(60, 12);
  const MaskedMatrix u = univariateFlag(maskedFromColumns({y, y, y}), 2.576);
  for (const auto rule : {CombinationRule::WeightedMean, CombinationRule::WeightedMedian}) {
    DdcParams p;
    p.combination = rule;
    const auto g = buildCorrelationGraph(u, p);
    const auto raw = predictCells(u, g, p);
    for (std::size_t i = 0; i < 60; ++i) {
      if (!u.present(i, 0)) continue;
      EXPECT_NEAR(raw.values(i, 0), y[i], 1e-12);
    }
  }
}

TEST(PredictCells, MaskedCellsNeverContribute) {
  const DataMatrix x = a09Sample(100, 5, 13);
  const RobustTuning t;
  MaskedMatrix u = univariateFlag(standardize(x, t).z, t.cutoff());
  const DdcParams p;
  const auto g = buildCorrelationGraph(u, p);
  u.clear(10, 2);
  const auto before = predictCells(u, g, p);
  // A masked cell holds no value; overwriting and re-masking must not change anything.
  MaskedMatrix u2 = u;
  u2.set(10, 2, 2.5);
  u2.clear(10, 2);
  EXPECT_EQ(predictCells(u2, g, p).values, before.values);
}

TEST(PredictCells, ExcludeSelfUsesNeighborsOnly) {
  const auto y = gaussian(50, 14);
  auto y2 = y;
  MaskedMatrix u = maskedFromColumns({y, y2});
  u.set(0, 0, 1.0);
  u.set(0, 1, -1.0);
  DdcParams p;
  p.includeSelf = false;
  const auto g = buildCorrelationGraph(u, p);
  ASSERT_TRUE(g.connected(0));
  const auto raw = predictCells(u, g, p);
  EXPECT_NEAR(raw.values(0, 0), g.neighbors[0][0].slope * -1.0, 1e-12);
}

TEST(Deshrink, IdentityAndHalvedPredictions) {
  const auto y = gaussian(80, 15);
  const MaskedMatrix z = maskedFromColumns({y, y});
  RawPredictions raw{DenseMatrix(80, 2), std::vector<unsigned char>(160, 0)};
  for (std::size_t i = 0; i < 80; ++i) {
    raw.values(i, 0) = y[i];
    raw.values(i, 1) = y[i] / 2;
  }
  const auto d = deshrink(z, raw, RobustTuning{});
  EXPECT_NEAR(d.factors[0], 1.0, 1e-12);
  EXPECT_NEAR(d.factors[1], 2.0, 1e-12);
  for (std::size_t i = 0; i < 80; ++i) EXPECT_NEAR(d.predictions(i, 1), y[i], 1e-12);
}

TEST(Deshrink, FailsafeRowsDoNotEnterFit) {
  const auto y = gaussian(40, 16);
  const MaskedMatrix z = maskedFromColumns({y});
  RawPredictions raw{DenseMatrix(40, 1), std::vector<unsigned char>(40, 0)};
  for (std::size_t i = 0; i < 40; ++i) raw.values(i, 0) = y[i] / 2;
  for (std::size_t i = 0; i < 15; ++i) {
    raw.values(i, 0) = 0.0;
    raw.failsafe[i] = 1;
  }
  EXPECT_NEAR(deshrink(z, raw, RobustTuning{}).factors[0], 2.0, 1e-12);
}

TEST(Deshrink, EquicorrelatedPredictionsAreShrunk) {
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(10, 10, 0.7);
  sigma.diagonal().setOnes();
  double mean = 0.0;
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    const auto r = runDdc(bench::sampleGaussian(200, sigma, 300 + rep));
    mean += std::accumulate(r.deshrinkFactors.begin(), r.deshrinkFactors.end(), 0.0) / 10.0;
  }
  EXPECT_GT(mean / 5.0, 1.0);
}

TEST(CellResiduals, PerfectFitGivesNoFlags) {
  std::vector<double> y(50);
  for (std::size_t i = 0; i < 50; ++i) y[i] = 2.0 * std::sin(0.7 * static_cast<double>(i));
  const MaskedMatrix z = maskedFromColumns({y, y});
  DenseMatrix pred(50, 2);
  for (std::size_t i = 0; i < 50; ++i) pred(i, 0) = pred(i, 1) = y[i];
  const CorrelationGraph g{{{Neighbor{1, 1.0, 1.0}}, {Neighbor{0, 1.0, 1.0}}}};
  const auto res = cellResidualsAndFlags(z, pred, g, RobustTuning{});
  EXPECT_TRUE(res.flags.empty());
  // Zero residual scale in a connected column falls back to the univariate rule.
  EXPECT_EQ(res.warnings.size(), 2u);
  EXPECT_EQ(*res.residuals.at(3, 0), y[3]);
}

TEST(CellResiduals, StandaloneColumnUsesZ) {
  MaskedMatrix z = maskedFromColumns({{0.1, 3.0, -2.8, 1.0}});
  z.clear(3, 0);
  const DenseMatrix pred(4, 1);
  const auto res = cellResidualsAndFlags(z, pred, CorrelationGraph{{{}}}, RobustTuning{});
  ASSERT_EQ(res.flags.size(), 2u);
  EXPECT_EQ(res.flags[0], (CellFlag{{1, 0}, FlagSign::Positive}));
  EXPECT_EQ(res.flags[1], (CellFlag{{2, 0}, FlagSign::Negative}));
  EXPECT_FALSE(res.residuals.present(3, 0));
}

TEST(Pipeline, DuplicateColumnsPlantedCell) {
  const DataMatrix x = duplicateColumns();
  const auto r = runDdc(x);
  ASSERT_EQ(r.cellFlags.size(), 1u);
  EXPECT_EQ(r.cellFlags[0], (CellFlag{{17, 0}, FlagSign::Positive}));
  // The flagged cell is imputed near its row-mates' common value.
  EXPECT_NEAR(*r.imputed.at(17, 0), *x.at(17, 1), 0.05);
}

TEST(Pipeline, MissingCellImputedFromDuplicates) {
  // Values symmetric around 5 with three copies of the center. Dropping one
  // copy leaves the robust location at 5, so the standardized duplicates stay
  // proportional and the missing cell is predicted exactly.
  std::vector<double> y{5.0, 5.0, 5.0};
  const auto g = gaussian(24, 33);
  for (const double v : g) {
    y.push_back(5.0 + v);
    y.push_back(5.0 - v);
  }
  MaskedMatrix cells = maskedFromColumns({y, y, y});
  cells.clear(1, 2);
  const DataMatrix x(cells);
  const auto r = runDdc(x);
  EXPECT_EQ(r.graph.standaloneCount(), 0u);
  EXPECT_NEAR(*r.imputed.at(1, 2), *x.at(1, 1), 1e-6);
  for (const auto& f : r.cellFlags) EXPECT_FALSE(f.cell.row == 1 && f.cell.col == 2);
  EXPECT_FALSE(r.residuals.present(1, 2));
}

TEST(Pipeline, MissingCellNeverFlagged) {
  MaskedMatrix cells = duplicateColumns().cells();
  cells.clear(5, 2);
  cells.clear(17, 1);
  const auto r = runDdc(DataMatrix(cells));
  for (const auto& f : r.cellFlags) {
    EXPECT_FALSE(f.cell.row == 5 && f.cell.col == 2);
    EXPECT_FALSE(f.cell.row == 17 && f.cell.col == 1);
  }
  EXPECT_TRUE(r.imputed.present(5, 2));
}

TEST(Pipeline, CleanDataFlagRate) {
  std::size_t flagged = 0;
  for (std::uint64_t rep = 0; rep < 5; ++rep) flagged += runDdc(a09Sample(200, 20, 40 + rep)).cellFlags.size();
  const double rate = static_cast<double>(flagged) / (5.0 * 4000.0);
  EXPECT_GE(rate, 0.002);
  EXPECT_LE(rate, 0.05);
}

TEST(Pipeline, GrossErrorInCorrelatedColumn) {
  // Price-like columns driven by one factor; one weight entry mistyped by a
  // factor of ten stays flagged while its row-mates do not.
  const auto f = gaussian(60, 50);
  std::vector<std::vector<double>> cols(4, std::vector<double>(60));
  const auto noise = gaussian(240, 51);
  for (std::size_t i = 0; i < 60; ++i)
    for (std::size_t j = 0; j < 4; ++j) cols[j][i] = 1000 + 100 * (j + 1) * f[i] + 10 * noise[j * 60 + i];
  cols[2][7] = 10 * cols[2][7];
  const auto r = runDdc(DataMatrix::fromColumns(cols));
  const auto cells = flaggedInputCells(r);
  EXPECT_NE(std::find(cells.begin(), cells.end(), CellIndex{7, 2}), cells.end());
  for (const std::size_t j : {0u, 1u, 3u})
    EXPECT_EQ(std::find(cells.begin(), cells.end(), CellIndex{7, j}), cells.end()) << j;
}

TEST(Pipeline, NoFlagsNoMissingCopiesInput) {
  const DataMatrix x = a09Sample(100, 5, 60);
  auto r = runDdc(x);
  const auto imputed = imputeAndDestandardize(x, r.report, r.stats, r.predictions, {});
  EXPECT_EQ(imputed, x);
}

TEST(Pipeline, ImputedKeepsUnflaggedObservedCells) {
  MaskedMatrix cells = a09Sample(150, 8, 61).cells();
  for (std::size_t k = 0; k < 20; ++k) cells.clear((k * 37) % 150, (k * 5) % 8);
  cells.set(3, 3, 40.0);
  const DataMatrix x(cells);
  const auto r = runDdc(x);
  std::vector<unsigned char> flagged(150 * 8, 0);
  for (const auto& f : r.cellFlags) flagged[f.cell.col * 150 + f.cell.row] = 1;
  EXPECT_TRUE(flagged[3 * 150 + 3]);
  for (std::size_t i = 0; i < 150; ++i) {
    for (std::size_t j = 0; j < 8; ++j) {
      ASSERT_TRUE(r.imputed.present(i, j));
      if (x.present(i, j) && !flagged[j * 150 + i]) {
        EXPECT_EQ(r.imputed.at(i, j), x.at(i, j));
      }
    }
  }
}

TEST(Pipeline, Deterministic) {
  const DataMatrix x = a09Sample(120, 10, 62);
  DdcParams p;
  p.nbIterations = 1;
  const auto a = runDdc(x, p), b = runDdc(x, p);
  EXPECT_EQ(a.cellFlags, b.cellFlags);
  EXPECT_EQ(a.predictions, b.predictions);
  EXPECT_EQ(a.residuals, b.residuals);
  EXPECT_EQ(a.rows.score, b.rows.score);
  EXPECT_EQ(a.imputed, b.imputed);
}

TEST(Pipeline, SelfConsistentDataIsFixedPoint) {
  // Perfect duplicates with nothing extreme: predictions equal z, no flags.
  std::vector<double> y(40);
  for (std::size_t i = 0; i < 40; ++i) y[i] = std::sin(0.37 * static_cast<double>(i));
  const DataMatrix x = DataMatrix::fromColumns({y, y, y});
  const auto r = runDdc(x);
  EXPECT_TRUE(r.cellFlags.empty());
  EXPECT_EQ(r.imputed, x);
}

TEST(Pipeline, AffineAndPermutationEquivariance) {
  std::mt19937 gen(70);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    MaskedMatrix cells = a09Sample(80, 6, 700 + seed).cells();
    cells.set(5, 2, 8.0);
    cells.clear(9, 4);
    const DataMatrix x(cells);
    const auto base = runDdc(x);

    const std::vector<double> shifts{100, -3, 0.5, 7, 0, -20}, factors{2, -1, 0.1, 5, -3, 1};
    const auto t = runDdc(columnAffineTransform(x, shifts, factors));
    EXPECT_EQ(flaggedInputCells(t), flaggedInputCells(base));
    EXPECT_EQ(t.rows.flagged, base.rows.flagged);

    std::vector<std::size_t> rp(80), cp(6);
    std::iota(rp.begin(), rp.end(), 0);
    std::iota(cp.begin(), cp.end(), 0);
    std::shuffle(rp.begin(), rp.end(), gen);
    std::shuffle(cp.begin(), cp.end(), gen);
    const auto pr = runDdc(permute(x, rp, cp));
    std::vector<CellIndex> mapped;
    for (const auto& c : flaggedInputCells(pr)) mapped.push_back({rp[c.row], cp[c.col]});
    std::sort(mapped.begin(), mapped.end());
    EXPECT_EQ(mapped, flaggedInputCells(base));
  }
}

TEST(Pipeline, ShiftedColumnGivesSameFlags) {
  const DataMatrix x = a09Sample(100, 5, 80);
  const std::vector<double> shifts{100, 0, 0, 0, 0}, factors(5, 1.0);
  EXPECT_EQ(runDdc(columnAffineTransform(x, shifts, factors)).cellFlags, runDdc(x).cellFlags);
}

TEST(Pipeline, SwappedColumnsSameOriginalCells) {
  MaskedMatrix cells = a09Sample(100, 5, 81).cells();
  cells.set(4, 0, 9.0);
  const DataMatrix x(cells);
  const std::vector<std::size_t> rows = [] {
    std::vector<std::size_t> r(100);
    std::iota(r.begin(), r.end(), 0);
    return r;
  }();
  const std::vector<std::size_t> swap{1, 0, 2, 3, 4};
  auto swapped = flaggedInputCells(runDdc(permute(x, rows, swap)));
  for (auto& c : swapped) c.col = swap[c.col];
  std::sort(swapped.begin(), swapped.end());
  EXPECT_EQ(swapped, flaggedInputCells(runDdc(x)));
}

TEST(Pipeline, IterationKeepsPlantedFlags) {
  MaskedMatrix cells = a09Sample(200, 10, 90).cells();
  for (std::size_t k = 0; k < 10; ++k) cells.set(k * 7, k, 7.0);
  const DataMatrix x(cells);
  DdcParams p;
  p.nbIterations = 2;
  const auto cellsFlagged = flaggedInputCells(runDdc(x, p));
  for (std::size_t k = 0; k < 10; ++k)
    EXPECT_NE(std::find(cellsFlagged.begin(), cellsFlagged.end(), CellIndex{k * 7, k}), cellsFlagged.end());
}

TEST(Pipeline, DroppedColumnsPassThrough) {
  const auto g1 = gaussian(30, 91), g2 = gaussian(30, 92);
  std::vector<double> binary(30);
  for (std::size_t i = 0; i < 30; ++i) binary[i] = static_cast<double>(i % 2);
  const DataMatrix x = DataMatrix::fromColumns({g1, binary, g2});
  const auto r = runDdc(x);
  EXPECT_EQ(r.report.kept, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(r.originalColumn(1), 2u);
  for (std::size_t i = 0; i < 30; ++i) EXPECT_EQ(r.imputed.at(i, 1), x.at(i, 1));
}

TEST(FlagRows, AllZeroResiduals) {
  MaskedMatrix res(10, 3);
  for (std::size_t i = 0; i < 10; ++i)
    for (std::size_t j = 0; j < 3; ++j) res.set(i, j, 0.0);
  const auto rows = flagRows(res, RobustTuning{});
  for (const auto& t : rows.score) EXPECT_EQ(t, 0.0);
  EXPECT_TRUE(rows.flagged.empty());
  EXPECT_EQ(rows.warnings.size(), 1u);
}

TEST(FlagRows, SingleHugeResidualIsBounded) {
  const DataMatrix x = a09Sample(200, 20, 95);
  MaskedMatrix cells = x.cells();
  cells.set(11, 4, 1e6);
  const auto r = runDdc(DataMatrix(cells));
  double meanF = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 0; j < 20; ++j) {
    if (j == 4) continue;
    meanF += chiSq1Cdf(std::pow(*r.residuals.at(11, j), 2));
    ++count;
  }
  meanF /= static_cast<double>(count);
  ASSERT_TRUE(r.rows.score[11].has_value());
  EXPECT_LE(*r.rows.score[11], (1.0 + 19.0 * meanF) / 20.0 + 1e-12);
  EXPECT_EQ(std::find(r.rows.flagged.begin(), r.rows.flagged.end(), 11u), r.rows.flagged.end());
}

TEST(FlagRows, RowwiseOutlierFlagged) {
  const auto sigma = bench::makeCorrelation({bench::CorrelationKind::A09, 20, 0});
  DataMatrix x = bench::sampleGaussian(200, sigma, 96);
  const Eigen::VectorXd v = bench::hardestDirection(sigma);
  MaskedMatrix cells = x.cells();
  for (std::size_t j = 0; j < 20; ++j) cells.set(30, j, 10.0 * v(static_cast<Eigen::Index>(j)));
  const auto r = runDdc(DataMatrix(cells));
  EXPECT_NE(std::find(r.rows.flagged.begin(), r.rows.flagged.end(), 30u), r.rows.flagged.end());
}

TEST(Baseline, ThreeScalesFlagged) {
  auto y = gaussian(101, 97);
  const double m = robLoc(y);
  std::vector<double> c = y;
  for (auto& v : c) v -= m;
  const double s = robScale(c);
  // Replacing one value moves m and s slightly; 3.2 s keeps it beyond 3 s.
  y[0] = m + 3.2 * s;
  const auto flags = columnwiseBaseline(DataMatrix::fromColumns({y}), RobustTuning{});
  ASSERT_FALSE(flags.empty());
  EXPECT_EQ(flags[0], (CellFlag{{0, 0}, FlagSign::Positive}));
}

TEST(Baseline, ToyDiscordantPair) {
  // Both coordinates are in range but the pair breaks the strong correlation.
  const auto a = gaussian(100, 98), e = gaussian(100, 99);
  std::vector<double> x1(100), x2(100);
  for (std::size_t i = 0; i < 100; ++i) {
    x1[i] = a[i];
    x2[i] = a[i] + 0.1 * e[i];
  }
  x1[0] = 2.0;
  x2[0] = -2.0;
  const DataMatrix x = DataMatrix::fromColumns({x1, x2});
  const auto base = columnwiseBaseline(x, RobustTuning{});
  for (const auto& f : base) EXPECT_NE(f.cell.row, 0u);
  const auto ddcCells = flaggedInputCells(runDdc(x));
  EXPECT_NE(std::find(ddcCells.begin(), ddcCells.end(), CellIndex{0, 0}), ddcCells.end());
}

TEST(Baseline, AboutOnePercentOnGaussian) {
  std::size_t flagged = 0;
  for (std::uint64_t rep = 0; rep < 5; ++rep) {
    std::vector<std::vector<double>> cols;
    for (std::size_t j = 0; j < 20; ++j) cols.push_back(gaussian(500, rep * 100 + j));
    flagged += columnwiseBaseline(DataMatrix::fromColumns(cols), RobustTuning{}).size();
  }
  EXPECT_NEAR(static_cast<double>(flagged) / 50000.0, 0.01, 0.004);
}
