#include "pcgs/io.hpp"

#include <algorithm>
#include <limits>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "pcgs/errors.hpp"

namespace pcgs::io {
namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool parse_double(std::string_view tok, double& out) {
  while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.front()))) tok.remove_prefix(1);
  while (!tok.empty() && std::isspace(static_cast<unsigned char>(tok.back()))) tok.remove_suffix(1);
  if (tok.empty()) return false;
  if (tok.front() == '+') tok.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec == std::errc() && ptr == tok.data() + tok.size()) return true;
  // from_chars rejects "inf"/"nan" spellings some writers use.
  const std::string t = lower(std::string(tok));
  if (t == "inf" || t == "infinity") { out = std::numeric_limits<double>::infinity(); return true; }
  if (t == "-inf" || t == "-infinity") { out = -std::numeric_limits<double>::infinity(); return true; }
  return false;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

SparseDesignMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string() + ": empty file");
  std::istringstream banner(lower(line));
  std::string mm, object, format, field, symmetry;
  banner >> mm >> object >> format >> field >> symmetry;
  if (mm != "%%matrixmarket" || object != "matrix")
    throw ParseError(path.string() + ": missing %%MatrixMarket matrix banner");
  if (format != "coordinate") throw ParseError(path.string() + ": only coordinate format is supported");
  if (field != "real" && field != "integer" && field != "pattern" && field != "double")
    throw ParseError(path.string() + ": unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric")
    throw ParseError(path.string() + ": unsupported symmetry '" + symmetry + "'");
  const bool pattern = field == "pattern";
  const bool symmetric = symmetry == "symmetric";

  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') break;
  std::size_t n = 0, p = 0, nnz = 0;
  {
    std::istringstream hdr(line);
    if (!(hdr >> n >> p >> nnz)) throw ParseError(path.string() + ": bad size line");
  }
  std::vector<std::size_t> rows, cols;
  std::vector<double> vals;
  rows.reserve(symmetric ? 2 * nnz : nnz);
  cols.reserve(rows.capacity());
  vals.reserve(rows.capacity());
  std::size_t read = 0;
  while (read < nnz && std::getline(in, line)) {
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    std::size_t i = 0, j = 0;
    double v = 1.0;
    if (!(es >> i >> j)) throw ParseError(path.string() + ": bad entry line " + std::to_string(read + 1));
    if (!pattern && !(es >> v)) throw ParseError(path.string() + ": missing value on entry " + std::to_string(read + 1));
    if (i < 1 || j < 1 || i > n || j > p)
      throw ParseError(path.string() + ": entry index out of range (1-based)");
    rows.push_back(i - 1);
    cols.push_back(j - 1);
    vals.push_back(v);
    if (symmetric && i != j) {
      rows.push_back(j - 1);
      cols.push_back(i - 1);
      vals.push_back(v);
    }
    ++read;
  }
  if (read != nnz) throw ParseError(path.string() + ": truncated; expected " + std::to_string(nnz) + " entries");
  return SparseDesignMatrix::from_triplets(n, p, rows, cols, vals);
}

void write_matrix_market(const std::filesystem::path& path, const SparseDesignMatrix& x) {
  if (x.standardized()) throw ArgumentError("write_matrix_market: write the raw matrix, not a standardized view");
  auto out = open_out(path);
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << x.n_rows() << ' ' << x.n_cols() << ' ' << x.nnz() << '\n';
  const auto rp = x.row_ptr();
  const auto ci = x.col_idx();
  const auto val = x.values();
  for (std::size_t i = 0; i < x.n_rows(); ++i)
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k)
      out << i + 1 << ' ' << ci[k] + 1 << ' ' << val[k] << '\n';
}

SparseDesignMatrix read_dense_csv(const std::filesystem::path& path, bool has_header) {
  auto in = open_in(path);
  std::string line;
  if (has_header) std::getline(in, line);
  std::vector<std::size_t> row_ptr{0}, col_idx;
  std::vector<double> vals;
  std::size_t p = 0, n = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto toks = split_csv(line);
    if (n == 0) p = toks.size();
    if (toks.size() != p)
      throw ParseError(path.string() + ": row " + std::to_string(n + 1) + " has " +
                       std::to_string(toks.size()) + " fields, expected " + std::to_string(p));
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0.0;
      if (!parse_double(toks[j], v))
        throw ParseError(path.string() + ": non-numeric field in row " + std::to_string(n + 1));
      if (v != 0.0) {
        col_idx.push_back(j);
        vals.push_back(v);
      }
    }
    row_ptr.push_back(vals.size());
    ++n;
  }
  return SparseDesignMatrix::from_csr(n, p, std::move(row_ptr), std::move(col_idx), std::move(vals));
}

void write_dense_csv(const std::filesystem::path& path, const Eigen::MatrixXd& x) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j) out << ',';
      out << x(i, j);
    }
    out << '\n';
  }
}

std::vector<double> read_vector_csv(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::vector<double> v;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    double x = 0.0;
    if (!parse_double(split_csv(line).front(), x)) {
      if (first) {
        first = false;
        continue;
      }
      throw ParseError(path.string() + ": non-numeric value on line " + std::to_string(v.size() + 2));
    }
    first = false;
    v.push_back(x);
  }
  return v;
}

void write_vector_csv(const std::filesystem::path& path, const std::vector<double>& v,
                      const std::string& header) {
  auto out = open_out(path);
  if (!header.empty()) out << header << '\n';
  for (double x : v) out << x << '\n';
}

SparseDesignMatrix read_design(const std::filesystem::path& path, bool csv_header) {
  if (lower(path.extension().string()) == ".mtx") return read_matrix_market(path);
  return read_dense_csv(path, csv_header);
}

}  // namespace pcgs::io
