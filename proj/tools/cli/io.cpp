#include "io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace hellinger::io {

namespace fs = std::filesystem;

namespace {

Error malformed(const std::string& what) { return Error(ErrorKind::Io, what); }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw malformed("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw malformed("cannot write " + path.string());
  out << text;
  if (!out) throw malformed("write failed for " + path.string());
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::vector<std::string_view> lines_of(const std::string& text) {
  std::vector<std::string_view> out;
  for (std::string_view l : split(text, '\n')) {
    if (!l.empty() && l.back() == '\r') l.remove_suffix(1);
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw malformed("complex entry must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

Json to_json(const Matrix& m) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back({m(i, k).real(), m(i, k).imag()});
  }
  return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const Json& j) {
  try {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const Json& data = j.at("data");
    if (rows < 0 || cols < 0 || !data.is_array() ||
        data.size() != static_cast<std::size_t>(rows * cols)) {
      throw malformed("matrix data has the wrong length");
    }
    Matrix m(rows, cols);
    std::size_t p = 0;
    for (Eigen::Index i = 0; i < rows; ++i) {
      for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = complex_from_json(data[p++]);
    }
    if (!m.allFinite()) throw malformed("matrix has non-finite entries");
    return m;
  } catch (const Json::exception& e) {
    throw malformed(std::string("bad matrix: ") + e.what());
  }
}

Json to_json(const Realization& r) {
  return Json{{"A", to_json(r.A)}, {"B", to_json(r.B)}, {"C", to_json(r.C)}, {"D", to_json(r.D)}};
}

Realization realization_from_json(const Json& j) {
  try {
    return Realization(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                       matrix_from_json(j.at("C")), matrix_from_json(j.at("D")));
  } catch (const Json::exception& e) {
    throw malformed(std::string("bad realization: ") + e.what());
  }
}

Json to_json(const FilterBank& g) { return Json{{"A", to_json(g.A())}, {"B", to_json(g.B())}}; }

FilterBank bank_from_json(const Json& j) {
  try {
    return FilterBank(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")));
  } catch (const Json::exception& e) {
    throw malformed(std::string("bad filter bank: ") + e.what());
  }
}

Json to_json(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

RealVector real_vector_from_json(const Json& j) {
  if (!j.is_array()) throw malformed("expected an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

ArModel ar_model_from_json(const Json& j) {
  try {
    const Json& a = j.at("a");
    if (!a.is_array() || a.empty()) throw malformed("AR model needs a nonempty \"a\"");
    ArModel model;
    model.a.resize(static_cast<Eigen::Index>(a.size()));
    for (std::size_t k = 0; k < a.size(); ++k) model.a(static_cast<Eigen::Index>(k)) = complex_from_json(a[k]);
    model.sigma_e = j.value("sigma_e", 1.0);
    if (std::abs(model.a(0) - Complex(1.0, 0.0)) > 1e-12) throw malformed("AR model needs a_0 = 1");
    if (!(model.sigma_e > 0.0)) throw malformed("AR model needs sigma_e > 0");
    return model;
  } catch (const Json::exception& e) {
    throw malformed(std::string("bad AR model: ") + e.what());
  }
}

Json read_json(const fs::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw malformed(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const Json& j) { write_file(path, j.dump(2) + "\n"); }

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw malformed("not a number: '" + std::string(s) + "'");
  }
  return x;
}

void write_time_series(const fs::path& path, const TimeSeries& y) {
  std::string out = "t";
  for (Eigen::Index k = 1; k <= y.dim(); ++k) {
    out += ",re_" + std::to_string(k) + ",im_" + std::to_string(k);
  }
  out += '\n';
  for (Eigen::Index t = 0; t < y.size(); ++t) {
    out += std::to_string(t);
    for (Eigen::Index k = 0; k < y.dim(); ++k) {
      out += ',' + format_double(y.values(t, k).real()) + ',' + format_double(y.values(t, k).imag());
    }
    out += '\n';
  }
  write_file(path, out);
}

TimeSeries read_time_series(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw malformed(path.string() + ": no samples");
  const auto header = split(lines[0], ',');
  if (header.empty() || header[0] != "t") throw malformed(path.string() + ": header must start with t");

  // Column index of the real and imaginary part of each component.
  std::vector<int> re_col, im_col;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string_view h = header[c];
    const bool is_re = h.rfind("re_", 0) == 0;
    const bool is_im = h.rfind("im_", 0) == 0;
    if (!is_re && !is_im) throw malformed(path.string() + ": unknown column " + std::string(h));
    const int k = static_cast<int>(parse_double(h.substr(3))) - 1;
    auto& cols = is_re ? re_col : im_col;
    if (k < 0) throw malformed(path.string() + ": bad column " + std::string(h));
    if (static_cast<int>(cols.size()) <= k) cols.resize(static_cast<std::size_t>(k + 1), -1);
    cols[static_cast<std::size_t>(k)] = static_cast<int>(c);
  }
  const std::size_t m = re_col.size();
  if (m == 0 || im_col.size() > m) throw malformed(path.string() + ": missing re_k columns");
  for (int c : re_col) {
    if (c < 0) throw malformed(path.string() + ": missing re_k column");
  }

  Matrix values(static_cast<Eigen::Index>(lines.size() - 1), static_cast<Eigen::Index>(m));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != header.size()) {
      throw malformed(path.string() + ": row " + std::to_string(r) + " has the wrong width");
    }
    for (std::size_t k = 0; k < m; ++k) {
      const double re = parse_double(cells[static_cast<std::size_t>(re_col[k])]);
      const int ic = k < im_col.size() ? im_col[k] : -1;
      const double im = ic >= 0 ? parse_double(cells[static_cast<std::size_t>(ic)]) : 0.0;
      values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(k)) = Complex(re, im);
    }
  }
  return TimeSeries(std::move(values));
}

void write_spectrum(const fs::path& path, const std::vector<double>& thetas,
                    const std::vector<Matrix>& values) {
  if (thetas.size() != values.size() || values.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "write_spectrum: grid and values differ");
  }
  const Eigen::Index m = values.front().rows();
  std::string out = "theta";
  for (Eigen::Index i = 1; i <= m; ++i) {
    for (Eigen::Index k = 1; k <= m; ++k) {
      const std::string idx = std::to_string(i) + std::to_string(k);
      out += ",re_" + idx + ",im_" + idx;
    }
  }
  out += '\n';
  for (std::size_t p = 0; p < thetas.size(); ++p) {
    out += format_double(thetas[p]);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index k = 0; k < m; ++k) {
        out += ',' + format_double(values[p](i, k).real()) + ',' + format_double(values[p](i, k).imag());
      }
    }
    out += '\n';
  }
  write_file(path, out);
}

SpectrumTable read_spectrum(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = lines_of(text);
  if (lines.size() < 2) throw malformed(path.string() + ": empty spectrum");
  const auto header = split(lines[0], ',');
  if (header.empty() || header[0] != "theta" || header.size() % 2 != 1) {
    throw malformed(path.string() + ": bad spectrum header");
  }
  const std::size_t entries = (header.size() - 1) / 2;
  const auto m = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(entries))));
  if (static_cast<std::size_t>(m * m) != entries || m == 0) {
    throw malformed(path.string() + ": spectrum entries do not form a square matrix");
  }
  SpectrumTable table;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split(lines[r], ',');
    if (cells.size() != header.size()) {
      throw malformed(path.string() + ": row " + std::to_string(r) + " has the wrong width");
    }
    table.thetas.push_back(parse_double(cells[0]));
    Matrix v(m, m);
    for (Eigen::Index e = 0; e < m * m; ++e) {
      const std::size_t c = 1 + 2 * static_cast<std::size_t>(e);
      v(e / m, e % m) = Complex(parse_double(cells[c]), parse_double(cells[c + 1]));
    }
    table.values.push_back(std::move(v));
  }
  return table;
}

void write_trace(const fs::path& path, const SolverTrace& trace) {
  std::string out = "iter,J,grad_norm,t,backtracks,constraint_residual,decrease\n";
  for (const IterationRecord& r : trace.records) {
    out += std::to_string(r.iter) + ',' + format_double(r.J) + ',' + format_double(r.grad_norm) + ',' +
           format_double(r.t) + ',' + std::to_string(r.backtracks) + ',' +
           format_double(r.constraint_residual) + ',' + format_double(r.decrease) + '\n';
  }
  write_file(path, out);
}

void write_curve(const fs::path& path, const std::vector<double>& thetas, const RealVector& values,
                 const std::string& column) {
  if (static_cast<Eigen::Index>(thetas.size()) != values.size()) {
    throw Error(ErrorKind::DimensionMismatch, "write_curve");
  }
  std::string out = "theta," + column + '\n';
  for (std::size_t p = 0; p < thetas.size(); ++p) {
    out += format_double(thetas[p]) + ',' + format_double(values(static_cast<Eigen::Index>(p))) + '\n';
  }
  write_file(path, out);
}

std::string fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_file(const fs::path& path) { return fnv1a(read_file(path)); }

}  // namespace hellinger::io
