#include "pcgs/state_io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "pcgs/errors.hpp"

namespace pcgs::io {

namespace {

constexpr std::array<char, 8> kMagic{'P', 'C', 'G', 'S', 'S', 'T', 'A', 'T'};

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b.data(), 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::uint64_t u64(const char* what) {
    std::array<unsigned char, 8> b{};
    in_.read(reinterpret_cast<char*>(b.data()), 8);
    if (in_.gcount() != 8) throw ParseError(std::string("state file truncated while reading ") + what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
    return v;
  }
  double f64(const char* what) { return std::bit_cast<double>(u64(what)); }
  std::uint8_t byte(const char* what) {
    const int c = in_.get();
    if (c == std::char_traits<char>::eof()) throw ParseError(std::string("state file truncated while reading ") + what);
    return static_cast<std::uint8_t>(c);
  }
  std::vector<double> array(std::uint64_t len, const char* what) {
    std::vector<double> v(static_cast<std::size_t>(len));
    for (double& x : v) x = f64(what);
    return v;
  }

 private:
  std::istream& in_;
};

}  // namespace

void save_state(const std::filesystem::path& path, const SavedState& saved) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open state file for writing: " + path.string());
  const auto& s = saved.state;
  out.write(kMagic.data(), kMagic.size());
  out.put(static_cast<char>(kStateVersion));
  out.put(static_cast<char>((saved.standardized ? 1 : 0) | (saved.intercept ? 2 : 0)));
  put_u64(out, s.beta.size());
  put_u64(out, s.omega.size());
  put_u64(out, s.lambda.size());
  put_u64(out, saved.unshrunk_prior_sd.size());
  put_f64(out, s.tau);
  for (double v : s.beta) put_f64(out, v);
  for (double v : s.omega) put_f64(out, v);
  for (double v : s.lambda) put_f64(out, v);
  for (double v : saved.unshrunk_prior_sd) put_f64(out, v);
  if (!out) throw ArgumentError("failed writing state file: " + path.string());
}

SavedState load_state(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open state file: " + path.string());
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (in.gcount() != 8 || magic != kMagic) throw ParseError("not a state file (bad magic): " + path.string());
  Reader r(in);
  const std::uint8_t version = r.byte("version");
  if (version != kStateVersion)
    throw ParseError("state file version " + std::to_string(version) + " is not supported (expected " +
                     std::to_string(kStateVersion) + ")");
  const std::uint8_t flags = r.byte("flags");
  const std::uint64_t nb = r.u64("beta length"), nw = r.u64("omega length");
  const std::uint64_t nl = r.u64("lambda length"), ns = r.u64("unshrunk length");
  // Reject lengths the file cannot possibly hold before allocating.
  const auto here = in.tellg();
  in.seekg(0, std::ios::end);
  const auto remaining = static_cast<std::uint64_t>(in.tellg() - here);
  in.seekg(here);
  const std::uint64_t words = nb + nw + nl + ns + 1;
  if (words < nb || remaining / 8 < words) throw ParseError("state file truncated: " + path.string());
  SavedState saved;
  saved.standardized = (flags & 1) != 0;
  saved.intercept = (flags & 2) != 0;
  saved.state.tau = r.f64("tau");
  saved.state.beta = r.array(nb, "beta");
  saved.state.omega = r.array(nw, "omega");
  saved.state.lambda = r.array(nl, "lambda");
  saved.unshrunk_prior_sd = r.array(ns, "unshrunk prior sd");
  return saved;
}

namespace {

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

void write_chain_csv(const std::filesystem::path& path, const ChainOutput& chain) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open chain file for writing: " + path.string());
  const std::size_t width = chain.draws.empty() ? chain.scaled_beta.mean.size() : chain.draws.front().size();
  for (std::size_t j = 0; j < width; ++j) out << "beta_" << j << ',';
  out << "tau,logdensity\n";
  for (std::size_t d = 0; d < chain.draws.size(); ++d) {
    for (double v : chain.draws[d]) out << format_double(v) << ',';
    out << format_double(chain.tau_draws[d]) << ','
        << format_double(d < chain.draw_logdensity.size() ? chain.draw_logdensity[d] : 0.0) << '\n';
  }
  if (!out) throw ArgumentError("failed writing chain file: " + path.string());
}

ChainTable read_chain_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open chain file: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty chain file: " + path.string());
  std::size_t cols = 1;
  for (char c : line) cols += c == ',' ? 1 : 0;
  if (cols < 2 || line.rfind("tau,logdensity") == std::string::npos)
    throw ParseError("chain file header must end with tau,logdensity: " + path.string());
  ChainTable t;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t end = std::min(line.find(',', start), line.size());
      double v = 0.0;
      const auto res = std::from_chars(line.data() + start, line.data() + end, v);
      if (res.ec != std::errc() || res.ptr != line.data() + end)
        throw ParseError("bad number in chain file at line " + std::to_string(lineno));
      row.push_back(v);
      start = end + 1;
    }
    if (row.size() != cols) throw ParseError("wrong column count in chain file at line " + std::to_string(lineno));
    t.logdensity.push_back(row.back());
    t.tau.push_back(row[cols - 2]);
    row.resize(cols - 2);
    t.draws.push_back(std::move(row));
  }
  return t;
}

}  // namespace pcgs::io
