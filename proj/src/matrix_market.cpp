#include "ekcg/harness/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace ekcg::harness {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

SparseSpdMatrix<double> read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("matrix market: empty input");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket") throw ParseError("matrix market: missing %%MatrixMarket banner");
  object = lower(object);
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (object != "matrix") throw ParseError("matrix market: unsupported object '" + object + "'");
  if (format != "coordinate") throw ParseError("matrix market: unsupported format '" + format + "'");
  if (field != "real" && field != "integer" && field != "double")
    throw ParseError("matrix market: unsupported field '" + field + "'");
  if (symmetry != "symmetric" && symmetry != "general")
    throw ParseError("matrix market: unsupported symmetry '" + symmetry + "'");
  const bool symmetric = symmetry == "symmetric";

  do {
    if (!std::getline(in, line)) throw ParseError("matrix market: missing size line");
  } while (line.empty() || line[0] == '%');
  long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size(line);
    if (!(size >> rows >> cols >> nnz)) throw ParseError("matrix market: malformed size line");
  }
  if (rows <= 0 || rows != cols) throw ParseError("matrix market: matrix must be square and nonempty");
  if (nnz < 0) throw ParseError("matrix market: negative entry count");

  std::vector<Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(symmetric ? 2 * nnz : nnz));
  long read = 0;
  while (read < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream entry(line);
    long i = 0, j = 0;
    double v = 0;
    if (!(entry >> i >> j >> v)) throw ParseError("matrix market: malformed entry on data line " + std::to_string(read + 1));
    if (i < 1 || i > rows || j < 1 || j > cols) throw ParseError("matrix market: entry index out of range");
    if (symmetric && j > i) throw ParseError("matrix market: symmetric file stores an upper-triangle entry");
    entries.push_back({i - 1, j - 1, v});
    if (symmetric && i != j) entries.push_back({j - 1, i - 1, v});
    ++read;
  }
  if (read != nnz) throw ParseError("matrix market: expected " + std::to_string(nnz) + " entries, found " +
                                    std::to_string(read));
  return SparseSpdMatrix<double>::from_triplets(rows, entries);
}

SparseSpdMatrix<double> read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("matrix market: cannot open " + path);
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseSpdMatrix<double>& a) {
  const int* rp = a.row_ptr();
  const int* ci = a.col_idx();
  const double* v = a.values();
  long lower_count = 0;
  for (Index i = 0; i < a.rows(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] <= i) ++lower_count;
  out << "%%MatrixMarket matrix coordinate real symmetric\n";
  out << a.rows() << ' ' << a.cols() << ' ' << lower_count << '\n';
  char buf[64];
  for (Index i = 0; i < a.rows(); ++i)
    for (int p = rp[i]; p < rp[i + 1]; ++p)
      if (ci[p] <= i) {
        std::snprintf(buf, sizeof buf, "%.17g", v[p]);
        out << i + 1 << ' ' << ci[p] + 1 << ' ' << buf << '\n';
      }
}

void write_matrix_market_file(const std::string& path, const SparseSpdMatrix<double>& a) {
  std::ofstream out(path);
  if (!out) throw ParseError("matrix market: cannot write " + path);
  write_matrix_market(out, a);
}

}  // namespace ekcg::harness
