#include "ddc/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace ddc::io {

namespace {

struct Record {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// Reads one CSV record, following quoted fields across line breaks.
// Returns false at end of input.
bool readRecord(std::istream& in, std::size_t& line, Record& record) {
  record.fields.clear();
  std::string field;
  bool quoted = false;
  bool any = false;
  record.line = line + 1;
  char ch = 0;
  while (in.get(ch)) {
    any = true;
    if (quoted) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      record.fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++line;
      record.fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field.push_back(ch);
    }
  }
  if (quoted) throw DataError("line " + std::to_string(record.line) + ": unterminated quoted field");
  if (!any) return false;
  ++line;
  record.fields.push_back(std::move(field));
  return true;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parseNumber(const std::string& token) {
  std::string_view s = token;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::general);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool isBlankRecord(const Record& r) {
  return r.fields.size() == 1 && trim(r.fields[0]).empty();
}

std::string quoteField(const std::string& s) {
  const bool needs = s.find_first_of(",\"\n\r") != std::string::npos ||
                     (!s.empty() && (s.front() == ' ' || s.back() == ' '));
  if (!needs) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string xmlEscape(const std::string& s) {
  std::string out;
  for (const char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::ofstream openForWrite(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("error while writing " + path.string());
}

}  // namespace

std::vector<std::string> defaultNaTokens() { return {"NA", "", "NaN"}; }

std::string formatExact(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string formatShort(double v) {
  if (v == 0.0) v = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

DataMatrix parseCsv(std::istream& in, const std::vector<std::string>& naTokens) {
  const std::unordered_set<std::string> na(naTokens.begin(), naTokens.end());
  std::size_t line = 0;
  Record header;
  do {
    if (!readRecord(in, line, header)) throw DataError("empty CSV input: no header row");
  } while (isBlankRecord(header));
  for (auto& h : header.fields) h = trim(h);
  {
    std::unordered_set<std::string> seen;
    for (const auto& h : header.fields) {
      if (!seen.insert(h).second) {
        throw DataError("line " + std::to_string(header.line) + ": duplicate header '" + h + "'");
      }
    }
  }
  const std::size_t width = header.fields.size();

  std::vector<std::vector<std::string>> rows;
  Record record;
  while (readRecord(in, line, record)) {
    if (isBlankRecord(record)) continue;
    if (record.fields.size() != width) {
      throw DataError("line " + std::to_string(record.line) + ": expected " + std::to_string(width) +
                      " fields, found " + std::to_string(record.fields.size()));
    }
    for (auto& f : record.fields) f = trim(f);
    rows.push_back(std::move(record.fields));
  }
  if (rows.empty()) throw DataError("CSV input has a header but no data rows");
  const std::size_t n = rows.size();

  // Row labels: first column entirely non-numeric, non-NA and unique.
  bool labelColumn = width >= 2;
  if (labelColumn) {
    std::unordered_set<std::string> seen;
    for (const auto& r : rows) {
      const auto& token = r[0];
      if (na.contains(token) || parseNumber(token) || !seen.insert(token).second) {
        labelColumn = false;
        break;
      }
    }
  }
  const std::size_t first = labelColumn ? 1 : 0;
  const std::size_t d = width - first;

  MaskedMatrix cells(n, d);
  std::vector<std::string> colLabels(header.fields.begin() + static_cast<std::ptrdiff_t>(first),
                                     header.fields.end());
  std::vector<ColumnKind> kinds(d, ColumnKind::Numeric);
  std::vector<std::vector<std::string>> text(d);
  for (std::size_t j = 0; j < d; ++j) {
    bool numeric = true;
    for (std::size_t i = 0; i < n && numeric; ++i) {
      const auto& token = rows[i][j + first];
      if (na.contains(token)) continue;
      if (const auto v = parseNumber(token)) {
        cells.set(i, j, *v);
      } else {
        numeric = false;
      }
    }
    if (!numeric) {
      kinds[j] = ColumnKind::Text;
      for (std::size_t i = 0; i < n; ++i) {
        cells.clear(i, j);
        text[j].push_back(rows[i][j + first]);
      }
    }
  }
  std::vector<std::string> rowLabels;
  if (labelColumn) {
    for (const auto& r : rows) rowLabels.push_back(r[0]);
  }
  DataMatrix out(std::move(cells), std::move(rowLabels), std::move(colLabels), std::move(kinds),
                 std::move(text));
  if (labelColumn) out.setRowLabelHeader(header.fields[0]);
  return out;
}

DataMatrix readCsv(const std::filesystem::path& path, const std::vector<std::string>& naTokens) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return parseCsv(in, naTokens);
}

void writeFlags(const DdcResult& result, const DataMatrix& input, std::ostream& out) {
  out << "rowLabel,colLabel,observed,predicted,stdResidual,sign\n";
  for (const auto& f : result.cellFlags) {
    const std::size_t i = f.cell.row;
    const std::size_t k = f.cell.col;
    const std::size_t j = result.originalColumn(k);
    const double observed = input.at(i, j).value();
    const double predicted = result.stats.scale[k] * result.predictions(i, k) + result.stats.location[k];
    out << quoteField(input.rowLabels()[i]) << ',' << quoteField(input.colLabels()[j]) << ','
        << formatShort(observed) << ',' << formatShort(predicted) << ','
        << formatShort(result.residuals.at(i, k).value()) << ','
        << (f.sign == FlagSign::Positive ? "+" : "-") << '\n';
  }
}

void writeRowFlags(const DdcResult& result, const DataMatrix& input, std::ostream& out) {
  out << "rowLabel,T,standardizedT,flagged\n";
  std::vector<bool> flagged(input.rows(), false);
  for (const std::size_t i : result.rows.flagged) flagged[i] = true;
  for (std::size_t i = 0; i < input.rows(); ++i) {
    const auto& t = result.rows.score[i];
    const auto& s = result.rows.standardized[i];
    out << quoteField(input.rowLabels()[i]) << ',' << (t ? formatShort(*t) : "NA") << ','
        << (s ? formatShort(*s) : "NA") << ',' << (flagged[i] ? 1 : 0) << '\n';
  }
}

void writeImputed(const DataMatrix& imputed, std::ostream& out) {
  const bool labels = imputed.rowLabelHeader().has_value();
  if (labels) out << quoteField(*imputed.rowLabelHeader()) << ',';
  for (std::size_t j = 0; j < imputed.cols(); ++j) {
    if (j > 0) out << ',';
    out << quoteField(imputed.colLabels()[j]);
  }
  out << '\n';
  for (std::size_t i = 0; i < imputed.rows(); ++i) {
    if (labels) out << quoteField(imputed.rowLabels()[i]) << ',';
    for (std::size_t j = 0; j < imputed.cols(); ++j) {
      if (j > 0) out << ',';
      if (imputed.kind(j) == ColumnKind::Text) {
        out << quoteField(imputed.text(j)[i]);
      } else if (const auto v = imputed.at(i, j)) {
        out << formatExact(*v);
      } else {
        out << "NA";
      }
    }
    out << '\n';
  }
}

void writeFlags(const DdcResult& result, const DataMatrix& input, const std::filesystem::path& path) {
  auto out = openForWrite(path);
  writeFlags(result, input, out);
  finish(out, path);
}

void writeRowFlags(const DdcResult& result, const DataMatrix& input, const std::filesystem::path& path) {
  auto out = openForWrite(path);
  writeRowFlags(result, input, out);
  finish(out, path);
}

void writeImputed(const DataMatrix& imputed, const std::filesystem::path& path) {
  auto out = openForWrite(path);
  writeImputed(imputed, out);
  finish(out, path);
}

std::string Rgb::hex() const {
  static constexpr char kDigits[] = "0123456789ABCDEF";
  std::string out = "#";
  for (const int c : {r, g, b}) {
    out.push_back(kDigits[(c >> 4) & 0xF]);
    out.push_back(kDigits[c & 0xF]);
  }
  return out;
}

Rgb Rgb::fromHex(const std::string& text) {
  const std::string s = trim(text);
  if (s.size() != 7 || s[0] != '#') throw DataError("bad color '" + text + "', expected #RRGGBB");
  int channels[3] = {0, 0, 0};
  for (int k = 0; k < 3; ++k) {
    const char* begin = s.data() + 1 + 2 * k;
    const auto res = std::from_chars(begin, begin + 2, channels[k], 16);
    if (res.ec != std::errc() || res.ptr != begin + 2) {
      throw DataError("bad color '" + text + "', expected #RRGGBB");
    }
  }
  return {channels[0], channels[1], channels[2]};
}

CellMapPalette CellMapPalette::parse(std::istream& in) {
  CellMapPalette palette;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(raw);
    if (text.empty() || text.front() == '#' || text.front() == ';') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw DataError("palette line " + std::to_string(line) + ": expected key = #RRGGBB");
    const std::string key = trim(text.substr(0, eq));
    const Rgb color = Rgb::fromHex(text.substr(eq + 1));
    if (key == "unflagged") palette.unflagged = color;
    else if (key == "positive") palette.positiveFlag = color;
    else if (key == "negative") palette.negativeFlag = color;
    else if (key == "missing") palette.missing = color;
    else if (key == "rowflag") palette.flaggedRowMarker = color;
    else if (key == "rowok") palette.unflaggedRowMarker = color;
    else throw DataError("palette line " + std::to_string(line) + ": unknown key '" + key + "'");
  }
  return palette;
}

Rgb averageColor(const std::vector<Rgb>& colors) {
  if (colors.empty()) throw std::invalid_argument("averageColor of no colors");
  const int count = static_cast<int>(colors.size());
  int r = 0;
  int g = 0;
  int b = 0;
  for (const auto& c : colors) {
    r += c.r;
    g += c.g;
    b += c.b;
  }
  // round half up: floor((2 * sum + count) / (2 * count))
  const auto mean = [count](int sum) { return (2 * sum + count) / (2 * count); };
  return {mean(r), mean(g), mean(b)};
}

void renderCellMap(const DdcResult& result, const DataMatrix& input, const CellMapSpec& spec,
                   std::ostream& out) {
  const std::size_t n = input.rows();
  const std::size_t d = result.report.kept.size();
  if (spec.blockRows == 0 || spec.blockCols == 0 || spec.blockRows > n || spec.blockCols > d) {
    throw std::invalid_argument("cell map block sizes must be positive and fit the matrix");
  }
  const CellMapPalette& pal = spec.palette;
  const std::size_t blockRowCount = (n + spec.blockRows - 1) / spec.blockRows;
  const std::size_t blockColCount = (d + spec.blockCols - 1) / spec.blockCols;

  std::vector<const Rgb*> cellColor(n * d, &pal.unflagged);
  for (std::size_t k = 0; k < d; ++k) {
    const std::size_t j = result.originalColumn(k);
    for (std::size_t i = 0; i < n; ++i) {
      if (!input.present(i, j)) cellColor[k * n + i] = &pal.missing;
    }
  }
  for (const auto& f : result.cellFlags) {
    cellColor[f.cell.col * n + f.cell.row] =
        f.sign == FlagSign::Positive ? &pal.positiveFlag : &pal.negativeFlag;
  }
  std::vector<bool> rowFlagged(n, false);
  for (const std::size_t i : result.rows.flagged) rowFlagged[i] = true;

  const auto span = [](std::size_t block, std::size_t size, std::size_t total) {
    const std::size_t begin = block * size;
    return std::pair{begin, std::min(begin + size, total)};
  };
  std::vector<std::string> rowText(blockRowCount);
  for (std::size_t b = 0; b < blockRowCount; ++b) {
    const auto [begin, end] = span(b, spec.blockRows, n);
    rowText[b] = spec.blockRows == 1 ? input.rowLabels()[begin]
                                     : std::to_string(begin + 1) + "-" + std::to_string(end);
  }
  std::vector<std::string> colText(blockColCount);
  for (std::size_t b = 0; b < blockColCount; ++b) {
    const auto [begin, end] = span(b, spec.blockCols, d);
    const auto& labels = input.colLabels();
    colText[b] = end - begin == 1 ? labels[result.originalColumn(begin)]
                                  : labels[result.originalColumn(begin)] + "-" +
                                        labels[result.originalColumn(end - 1)];
  }
  const auto longest = [](const std::vector<std::string>& v) {
    std::size_t m = 0;
    for (const auto& s : v) m = std::max(m, s.size());
    return m;
  };

  const std::size_t cell = spec.cellSize;
  const std::size_t charWidth = 7;
  const std::size_t labelWidth = 6 + charWidth * longest(rowText);
  const std::size_t stripWidth = spec.showRowFlags ? cell / 2 + 2 : 0;
  const std::size_t left = labelWidth + stripWidth;
  const std::size_t top = 6 + charWidth * longest(colText);
  const std::size_t width = left + blockColCount * cell + 4;
  const std::size_t height = top + blockRowCount * cell + 4;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<g font-family=\"monospace\" font-size=\"10\">\n";
  for (std::size_t b = 0; b < blockColCount; ++b) {
    const std::size_t x = left + b * cell + cell / 2 + 3;
    out << "<text transform=\"translate(" << x << ',' << top - 4 << ") rotate(-90)\">"
        << xmlEscape(colText[b]) << "</text>\n";
  }
  for (std::size_t b = 0; b < blockRowCount; ++b) {
    const std::size_t y = top + b * cell + cell - 2;
    out << "<text x=\"" << labelWidth - 4 << "\" y=\"" << y << "\" text-anchor=\"end\">"
        << xmlEscape(rowText[b]) << "</text>\n";
  }
  out << "</g>\n";

  std::vector<Rgb> members;
  if (spec.showRowFlags) {
    for (std::size_t b = 0; b < blockRowCount; ++b) {
      const auto [begin, end] = span(b, spec.blockRows, n);
      members.clear();
      for (std::size_t i = begin; i < end; ++i) {
        members.push_back(rowFlagged[i] ? pal.flaggedRowMarker : pal.unflaggedRowMarker);
      }
      out << "<rect class=\"rowflag\" x=\"" << labelWidth << "\" y=\"" << top + b * cell
          << "\" width=\"" << cell / 2 << "\" height=\"" << cell << "\" fill=\""
          << averageColor(members).hex() << "\"/>\n";
    }
  }
  for (std::size_t br = 0; br < blockRowCount; ++br) {
    const auto [rowBegin, rowEnd] = span(br, spec.blockRows, n);
    for (std::size_t bc = 0; bc < blockColCount; ++bc) {
      const auto [colBegin, colEnd] = span(bc, spec.blockCols, d);
      members.clear();
      for (std::size_t k = colBegin; k < colEnd; ++k) {
        for (std::size_t i = rowBegin; i < rowEnd; ++i) members.push_back(*cellColor[k * n + i]);
      }
      out << "<rect class=\"cell\" x=\"" << left + bc * cell << "\" y=\"" << top + br * cell
          << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\""
          << averageColor(members).hex() << "\" stroke=\"#808080\" stroke-width=\"0.5\"/>\n";
    }
  }
  out << "</svg>\n";
}

void renderCellMap(const DdcResult& result, const DataMatrix& input, const CellMapSpec& spec,
                   const std::filesystem::path& path) {
  auto out = openForWrite(path);
  renderCellMap(result, input, spec, out);
  finish(out, path);
}

}  // namespace ddc::io
