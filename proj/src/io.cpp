#include "swmsl/io.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "swmsl/parallel.hpp"

namespace swmsl {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Line-oriented reader that tracks line numbers for diagnostics.
class LineReader {
 public:
  explicit LineReader(const std::string& path) : path_(path), in_(path) {
    if (!in_) throw IoError("cannot open file: " + path);
  }

  /// Next non-empty line; false at EOF.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++lineno_;
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const {
    std::ostringstream msg;
    msg << path_ << ":" << lineno_ << ": " << message;
    throw IoError(msg.str());
  }

  std::vector<std::string> tokens(const std::string& line) const {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
  }

  long long parse_int(const std::string& tok) const {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(tok, &pos);
    } catch (const std::exception&) {
      fail("expected integer, got '" + tok + "'");
    }
    if (pos != tok.size()) fail("trailing characters in integer '" + tok + "'");
    return v;
  }

  double parse_real(const std::string& tok) const {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      fail("expected real number, got '" + tok + "'");
    }
    if (pos != tok.size()) fail("trailing characters in number '" + tok + "'");
    return v;
  }

  int lineno() const { return lineno_; }

 private:
  std::string path_;
  std::ifstream in_;
  int lineno_ = 0;
};

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw IoError("cannot open file for writing: " + path);
  return out;
}

void read_header(LineReader& reader, std::vector<long long>& values,
                 const char* expected) {
  std::string line;
  if (!reader.next(line)) reader.fail(std::string("missing header ") + expected);
  const auto toks = reader.tokens(line);
  if (toks.size() != values.size())
    reader.fail(std::string("header must be '") + expected + "'");
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = reader.parse_int(toks[i]);
}

}  // namespace

IrfBank read_irf(const std::string& path) {
  LineReader reader(path);
  std::vector<long long> hdr(5);
  read_header(reader, hdr, "L T t_min t_max support");
  const int L = static_cast<int>(hdr[0]);
  const int T = static_cast<int>(hdr[1]);
  const int t_min = static_cast<int>(hdr[2]);
  const int t_max = static_cast<int>(hdr[3]);
  const int support = static_cast<int>(hdr[4]);
  if (L < 1 || support < 1) reader.fail("L and support must be >= 1");

  std::vector<std::vector<double>> g(L, std::vector<double>(support));
  std::string line;
  for (int d = 0; d < support; ++d) {
    if (!reader.next(line)) reader.fail("unexpected end of IRF data");
    const auto toks = reader.tokens(line);
    if (static_cast<int>(toks.size()) != L)
      reader.fail("expected " + std::to_string(L) + " IRF values");
    for (int l = 0; l < L; ++l) {
      const double v = reader.parse_real(toks[l]);
      if (!(v >= 0.0)) reader.fail("negative IRF value");
      g[l][d] = v;
    }
  }
  if (reader.next(line)) reader.fail("trailing data after IRF bins");
  try {
    return IrfBank::validated(T, t_min - 1, t_max - 1, std::move(g));
  } catch (const ValidationError& e) {
    throw IoError(path + ": " + e.what());
  }
}

void write_irf(const std::string& path, const IrfBank& bank) {
  auto out = open_out(path);
  out << bank.L() << ' ' << bank.T() << ' ' << bank.t_min() + 1 << ' '
      << bank.t_max() + 1 << ' ' << bank.support() << '\n';
  for (int d = 0; d < bank.support(); ++d) {
    for (int l = 0; l < bank.L(); ++l)
      out << (l ? " " : "") << fmt_double(bank.g(l, d));
    out << '\n';
  }
}

SceneCube read_scene(const std::string& path) {
  LineReader reader(path);
  std::vector<long long> hdr(3);
  read_header(reader, hdr, "rows cols T");
  const int rows = static_cast<int>(hdr[0]);
  const int cols = static_cast<int>(hdr[1]);
  const int T = static_cast<int>(hdr[2]);
  if (rows < 1 || cols < 1 || T < 1) reader.fail("nonpositive scene dimensions");
  const long long N = static_cast<long long>(rows) * cols;

  std::vector<std::vector<PhotonBin>> lists(N);
  std::string line;
  while (reader.next(line)) {
    const auto toks = reader.tokens(line);
    if (toks.size() != 3) reader.fail("expected 'pixel bin count'");
    const long long pixel = reader.parse_int(toks[0]);
    const long long bin = reader.parse_int(toks[1]);
    const long long count = reader.parse_int(toks[2]);
    if (pixel < 1 || pixel > N)
      reader.fail("pixel index outside [1," + std::to_string(N) + "]");
    if (bin < 1 || bin > T)
      reader.fail("bin index outside [1," + std::to_string(T) + "]");
    if (count < 1 || count > 0x7fffffffLL) reader.fail("count outside [1,2^31)");
    lists[pixel - 1].push_back(
        {static_cast<int>(bin - 1), static_cast<int>(count)});
  }
  return SceneCube::from_toa_lists(rows, cols, T, std::move(lists));
}

void write_scene(const std::string& path, const SceneCube& scene) {
  auto out = open_out(path);
  out << scene.rows() << ' ' << scene.cols() << ' ' << scene.T() << '\n';
  for (int n = 0; n < scene.pixels(); ++n)
    for (const auto& p : scene.photons(n))
      out << n + 1 << ' ' << p.bin + 1 << ' ' << p.count << '\n';
}

SceneCube read_scene_dense(const std::string& path) {
  LineReader reader(path + ".hdr");
  std::vector<long long> hdr(3);
  read_header(reader, hdr, "rows cols T");
  const int rows = static_cast<int>(hdr[0]);
  const int cols = static_cast<int>(hdr[1]);
  const int T = static_cast<int>(hdr[2]);
  if (rows < 1 || cols < 1 || T < 1) reader.fail("nonpositive scene dimensions");

  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  const std::size_t count = static_cast<std::size_t>(rows) * cols * T;
  std::vector<std::uint32_t> buf(count);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(count * sizeof(std::uint32_t)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(std::uint32_t))
    throw IoError(path + ": truncated dense scene payload");
  char extra;
  if (in.read(&extra, 1))
    throw IoError(path + ": trailing bytes after dense scene payload");
  return SceneCube::from_dense(rows, cols, T, buf);
}

void write_scene_dense(const std::string& path, const SceneCube& scene) {
  {
    auto hdr = open_out(path + ".hdr");
    hdr << scene.rows() << ' ' << scene.cols() << ' ' << scene.T() << '\n';
  }
  auto out = open_out(path, /*binary=*/true);
  const auto dense = scene.to_dense();
  out.write(reinterpret_cast<const char*>(dense.data()),
            static_cast<std::streamsize>(dense.size() * sizeof(std::uint32_t)));
}

GroundTruth read_truth(const std::string& path) {
  LineReader reader(path);
  std::vector<long long> hdr(3);
  read_header(reader, hdr, "rows cols L");
  const int rows = static_cast<int>(hdr[0]);
  const int cols = static_cast<int>(hdr[1]);
  const int L = static_cast<int>(hdr[2]);
  if (rows < 1 || cols < 1 || L < 1) reader.fail("nonpositive truth dimensions");

  GroundTruth truth;
  truth.depth = DepthField(rows, cols);
  truth.refl = ReflectivityCube(rows, cols, L);
  std::string line;
  for (int n = 0; n < rows * cols; ++n) {
    if (!reader.next(line)) reader.fail("missing truth row for pixel " +
                                        std::to_string(n + 1));
    const auto toks = reader.tokens(line);
    if (static_cast<int>(toks.size()) != L + 1)
      reader.fail("expected 't r_1 ... r_L'");
    truth.depth[n] = static_cast<int>(reader.parse_int(toks[0])) - 1;
    for (int l = 0; l < L; ++l) {
      const double v = reader.parse_real(toks[l + 1]);
      if (!(v >= 0.0)) reader.fail("negative reflectivity");
      truth.refl.r(n, l) = v;
    }
  }
  if (reader.next(line)) reader.fail("trailing data after truth rows");
  return truth;
}

void write_truth(const std::string& path, const GroundTruth& truth) {
  auto out = open_out(path);
  out << truth.depth.rows() << ' ' << truth.depth.cols() << ' '
      << truth.refl.L() << '\n';
  for (int n = 0; n < truth.depth.pixels(); ++n) {
    out << truth.depth[n] + 1;
    for (int l = 0; l < truth.refl.L(); ++l)
      out << ' ' << fmt_double(truth.refl.r(n, l));
    out << '\n';
  }
}

DepthField read_depth(const std::string& path) {
  LineReader reader(path);
  std::vector<long long> hdr(2);
  read_header(reader, hdr, "rows cols");
  const int rows = static_cast<int>(hdr[0]);
  const int cols = static_cast<int>(hdr[1]);
  DepthField t(rows, cols);
  std::string line;
  for (int i = 0; i < rows; ++i) {
    if (!reader.next(line)) reader.fail("missing matrix row");
    const auto toks = reader.tokens(line);
    if (static_cast<int>(toks.size()) != cols)
      reader.fail("expected " + std::to_string(cols) + " values");
    for (int j = 0; j < cols; ++j)
      t[i * cols + j] = static_cast<int>(reader.parse_int(toks[j])) - 1;
  }
  if (reader.next(line)) reader.fail("trailing data after matrix rows");
  return t;
}

void write_depth(const std::string& path, const DepthField& t) {
  auto out = open_out(path);
  out << t.rows() << ' ' << t.cols() << '\n';
  for (int i = 0; i < t.rows(); ++i) {
    for (int j = 0; j < t.cols(); ++j)
      out << (j ? " " : "") << t[i * t.cols() + j] + 1;
    out << '\n';
  }
}

namespace {

void write_band_matrix(std::ofstream& out, const double* values, int rows,
                       int cols, int stride) {
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j)
      out << (j ? " " : "")
          << fmt_double(values[static_cast<std::size_t>(i * cols + j) * stride]);
    out << '\n';
  }
}

void read_band_matrix(LineReader& reader, double* values, int rows, int cols,
                      int stride) {
  std::string line;
  for (int i = 0; i < rows; ++i) {
    if (!reader.next(line)) reader.fail("missing matrix row");
    const auto toks = reader.tokens(line);
    if (static_cast<int>(toks.size()) != cols)
      reader.fail("expected " + std::to_string(cols) + " values");
    for (int j = 0; j < cols; ++j)
      values[static_cast<std::size_t>(i * cols + j) * stride] =
          reader.parse_real(toks[j]);
  }
}

}  // namespace

WeightField read_weights(const std::string& path) {
  LineReader reader(path);
  std::vector<long long> hdr(3);
  read_header(reader, hdr, "rows cols L");
  const int rows = static_cast<int>(hdr[0]);
  const int cols = static_cast<int>(hdr[1]);
  const int L = static_cast<int>(hdr[2]);
  WeightField W(rows, cols, L);
  for (int l = 0; l < L; ++l)
    read_band_matrix(reader, W.data().data() + l, rows, cols, L);
  std::string line;
  if (reader.next(line)) reader.fail("trailing data after weight bands");
  W.check_simplex(1e-9);
  return W;
}

void write_weights(const std::string& path, const WeightField& W) {
  auto out = open_out(path);
  out << W.rows() << ' ' << W.cols() << ' ' << W.L() << '\n';
  for (int l = 0; l < W.L(); ++l) {
    if (l) out << '\n';
    write_band_matrix(out, W.data().data() + l, W.rows(), W.cols(), W.L());
  }
}

ReflectivityCube read_reflectivity(const std::string& path) {
  LineReader reader(path);
  std::vector<long long> hdr(3);
  read_header(reader, hdr, "rows cols L");
  const int rows = static_cast<int>(hdr[0]);
  const int cols = static_cast<int>(hdr[1]);
  const int L = static_cast<int>(hdr[2]);
  ReflectivityCube cube(rows, cols, L);
  for (int l = 0; l < L; ++l)
    read_band_matrix(reader, cube.r_data().data() + l, rows, cols, L);
  read_band_matrix(reader, cube.b_data().data(), rows, cols, 1);
  std::string line;
  if (reader.next(line)) reader.fail("trailing data after reflectivity bands");
  cube.check_nonnegative();
  return cube;
}

void write_reflectivity(const std::string& path, const ReflectivityCube& cube) {
  auto out = open_out(path);
  out << cube.rows() << ' ' << cube.cols() << ' ' << cube.L() << '\n';
  for (int l = 0; l < cube.L(); ++l) {
    if (l) out << '\n';
    write_band_matrix(out, cube.r_data().data() + l, cube.rows(), cube.cols(),
                      cube.L());
  }
  out << '\n';
  write_band_matrix(out, cube.b_data().data(), cube.rows(), cube.cols(), 1);
}

std::vector<double> read_matrix(const std::string& path, int& rows, int& cols) {
  LineReader reader(path);
  std::vector<long long> hdr(2);
  read_header(reader, hdr, "rows cols");
  rows = static_cast<int>(hdr[0]);
  cols = static_cast<int>(hdr[1]);
  std::vector<double> data(static_cast<std::size_t>(rows) * cols);
  read_band_matrix(reader, data.data(), rows, cols, 1);
  std::string line;
  if (reader.next(line)) reader.fail("trailing data after matrix rows");
  return data;
}

void write_matrix(const std::string& path, const std::vector<double>& data,
                  int rows, int cols) {
  if (data.size() != static_cast<std::size_t>(rows) * cols)
    throw ValidationError("write_matrix: buffer size mismatch");
  auto out = open_out(path);
  out << rows << ' ' << cols << '\n';
  write_band_matrix(out, data.data(), rows, cols, 1);
}

void write_int_matrix(const std::string& path, const std::vector<int>& data,
                      int rows, int cols) {
  if (data.size() != static_cast<std::size_t>(rows) * cols)
    throw ValidationError("write_int_matrix: buffer size mismatch");
  auto out = open_out(path);
  out << rows << ' ' << cols << '\n';
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) out << (j ? " " : "") << data[i * cols + j];
    out << '\n';
  }
}

void write_trace_csv(const std::string& path,
                     const std::vector<SemTraceRow>& trace) {
  auto out = open_out(path);
  out << "iter,rel_err,q_pre,q_post_w,q_post_phi,wall_ms\n";
  for (const auto& row : trace)
    out << row.iter << ',' << fmt_double(row.rel_err) << ','
        << fmt_double(row.q_pre) << ',' << fmt_double(row.q_post_w) << ','
        << fmt_double(row.q_post_phi) << ',' << fmt_double(row.wall_ms) << '\n';
}

void write_grid_csv(const std::string& path,
                    const std::vector<CellResult>& cells) {
  auto out = open_out(path);
  out << "alpha,gammaT,method,seed,counts,sbr,mse_r,n_iter,sec_per_iter,"
         "total_sec,status\n";
  for (const auto& c : cells)
    out << fmt_double(c.alpha) << ',' << fmt_double(c.gammaT) << ',' << c.method
        << ',' << c.seed << ',' << fmt_double(c.counts_mean) << ','
        << fmt_double(c.sbr_value) << ',' << fmt_double(c.mse_r) << ','
        << c.n_iter << ',' << fmt_double(c.sec_per_iter) << ','
        << fmt_double(c.total_sec) << ',' << (c.ok ? "ok" : c.error) << '\n';
}

void write_timing_csv(const std::string& path,
                      const std::vector<TimingRow>& rows) {
  auto out = open_out(path);
  out << "alpha,gammaT,method,n_iter,sec_per_iter,total_sec\n";
  for (const auto& r : rows)
    out << fmt_double(r.alpha) << ',' << fmt_double(r.gammaT) << ',' << r.method
        << ',' << fmt_double(r.n_iter) << ',' << fmt_double(r.sec_per_iter)
        << ',' << fmt_double(r.total_sec) << '\n';
}

void write_cdf(const std::string& path, const CdfTable& cdf) {
  auto out = open_out(path);
  out << "threshold,fraction\n";
  for (std::size_t i = 0; i < cdf.threshold.size(); ++i)
    out << cdf.threshold[i] << ',' << fmt_double(cdf.fraction[i]) << '\n';
}

CdfTable read_cdf(const std::string& path) {
  LineReader reader(path);
  std::string line;
  if (!reader.next(line) || line != "threshold,fraction")
    reader.fail("expected CDF header 'threshold,fraction'");
  CdfTable cdf;
  while (reader.next(line)) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) reader.fail("expected 'threshold,fraction'");
    cdf.threshold.push_back(
        static_cast<int>(reader.parse_int(line.substr(0, comma))));
    cdf.fraction.push_back(reader.parse_real(line.substr(comma + 1)));
  }
  return cdf;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  nlohmann::json j;
  j["command"] = command;
  j["version"] = kVersion;
  j["threads"] = thread_count();
  nlohmann::json opts = nlohmann::json::object();
  for (const auto& [key, value] : entries) opts[key] = value;
  j["options"] = opts;
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace swmsl
