#ifndef DDC_IO_HPP
#define DDC_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ddc/engine.hpp"
#include "ddc/matrix.hpp"

namespace ddc::io {

std::vector<std::string> defaultNaTokens();

/// Parses CSV text with a header row. A first column whose values are all
/// non-numeric and unique becomes the row labels. Numbers use '.' as decimal
/// separator; any other non-NA token turns its column into a text column.
/// Throws DataError naming the offending line on ragged rows, duplicate
/// headers or unterminated quotes.
DataMatrix parseCsv(std::istream& in, const std::vector<std::string>& naTokens = defaultNaTokens());
DataMatrix readCsv(const std::filesystem::path& path,
                   const std::vector<std::string>& naTokens = defaultNaTokens());

/// rowLabel,colLabel,observed,predicted,stdResidual,sign with the predicted
/// value on the input scale.
void writeFlags(const DdcResult& result, const DataMatrix& input, std::ostream& out);
/// rowLabel,T,standardizedT,flagged
void writeRowFlags(const DdcResult& result, const DataMatrix& input, std::ostream& out);
/// Same layout as the input file; missing cells are written as NA.
void writeImputed(const DataMatrix& imputed, std::ostream& out);

void writeFlags(const DdcResult& result, const DataMatrix& input, const std::filesystem::path& path);
void writeRowFlags(const DdcResult& result, const DataMatrix& input, const std::filesystem::path& path);
void writeImputed(const DataMatrix& imputed, const std::filesystem::path& path);

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;

  bool operator==(const Rgb&) const = default;
  std::string hex() const;
  static Rgb fromHex(const std::string& text);
};

struct CellMapPalette {
  Rgb unflagged{0xFF, 0xFF, 0x00};
  Rgb positiveFlag{0xFF, 0x00, 0x00};
  Rgb negativeFlag{0x00, 0x00, 0xFF};
  Rgb missing{0xFF, 0xFF, 0xFF};
  Rgb flaggedRowMarker{0x00, 0x00, 0x00};
  /// Fill of the row strip for rows that are not flagged.
  Rgb unflaggedRowMarker{0xFF, 0xFF, 0xFF};

  /// Reads `key = #RRGGBB` lines (keys: unflagged, positive, negative,
  /// missing, rowflag, rowok). Lines starting with # or ; are comments.
  static CellMapPalette parse(std::istream& in);
};

struct CellMapSpec {
  std::size_t blockRows = 1;
  std::size_t blockCols = 1;
  bool showRowFlags = true;
  CellMapPalette palette;
  std::size_t cellSize = 12;
};

/// Per-channel mean of the colors, rounded half up.
Rgb averageColor(const std::vector<Rgb>& colors);

/// Static SVG 1.1 cell map of the analyzed columns. Each block of
/// blockRows x blockCols cells is one rect of class "cell" filled with the
/// average of its members' palette colors.
void renderCellMap(const DdcResult& result, const DataMatrix& input, const CellMapSpec& spec,
                   std::ostream& out);
void renderCellMap(const DdcResult& result, const DataMatrix& input, const CellMapSpec& spec,
                   const std::filesystem::path& path);

/// Shortest round-trip decimal form.
std::string formatExact(double v);
/// Ten significant digits, used where outputs are compared as text.
std::string formatShort(double v);

}  // namespace ddc::io

#endif  // DDC_IO_HPP
