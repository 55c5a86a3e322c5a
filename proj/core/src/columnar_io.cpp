#include "torusfio/columnar_io.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "torusfio/error.hpp"

namespace torusfio {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string join_axes(const Index& v, int dim) {
  std::string s;
  for (int j = 0; j < dim; ++j) {
    if (j) s += ',';
    s += std::to_string(v[j]);
  }
  return s;
}

Index split_axes(const std::string& s, int dim) {
  Index v{0, 0, 0};
  std::stringstream ss(s);
  std::string part;
  int j = 0;
  while (std::getline(ss, part, ',')) {
    if (j >= dim) throw Error(ErrorKind::Io, "too many axes in '" + s + "'");
    v[j++] = std::stoi(part);
  }
  if (j != dim) throw Error(ErrorKind::Io, "too few axes in '" + s + "'");
  return v;
}

struct Header {
  std::string tag;
  std::map<std::string, std::string> fields;

  const std::string& get(const std::string& k) const {
    auto it = fields.find(k);
    if (it == fields.end()) throw Error(ErrorKind::Io, "header lacks field " + k);
    return it->second;
  }
};

// name= takes the rest of the line up to the next known key, so names may not
// contain " lo=" or " hi=".
Header read_header(std::istream& in, const std::string& expected) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::Io, "empty input");
  std::stringstream ss(line);
  std::string hash;
  Header h;
  ss >> hash >> h.tag;
  if (hash != "#" || h.tag != expected)
    throw Error(ErrorKind::Io, "expected header tag " + expected + ", got '" + line + "'");
  std::string tok;
  while (ss >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Io, "malformed header field '" + tok + "'");
    h.fields[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return h;
}

void expect_rows(std::istream& in, std::size_t rows, std::size_t cols_a, std::size_t cols_b,
                 const std::function<void(std::size_t, std::size_t, Complex)>& put) {
  std::string line;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    long long a = -1, b = -1;
    double re = 0, im = 0;
    if (!(ss >> a >> b >> re >> im)) throw Error(ErrorKind::Io, "malformed row '" + line + "'");
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= cols_a || static_cast<std::size_t>(b) >= cols_b)
      throw Error(ErrorKind::Io, "row index out of range in '" + line + "'");
    put(static_cast<std::size_t>(a), static_cast<std::size_t>(b), Complex(re, im));
    ++seen;
  }
  if (seen != rows)
    throw Error(ErrorKind::Io, "expected " + std::to_string(rows) + " rows, read " + std::to_string(seen));
}

}  // namespace

void write_symbol_table(std::ostream& out, const LatticeSymbol& a) {
  if (!a.is_table()) throw Error(ErrorKind::Domain, "only tabulated symbols serialize");
  const SymbolTable& t = a.table();
  const int n = t.grid.dim();
  bool symmetric = true;
  for (int j = 0; j < n; ++j) symmetric = symmetric && t.box.lo[j] == -t.box.hi[j] && t.box.hi[j] == t.box.hi[0];
  out << "# torusfio-symbol n=" << n << " N=" << t.grid.points_per_axis()
      << " Xi=" << (symmetric ? t.box.hi[0] : -1) << " name=" << (a.name().empty() ? "-" : a.name());
  if (!symmetric) out << " lo=" << join_axes(t.box.lo, n) << " hi=" << join_axes(t.box.hi, n);
  out << " order=" << format_real(a.order()) << '\n';
  const std::size_t b = t.box.size();
  for (std::size_t k = 0; k < t.grid.size(); ++k)
    for (std::size_t i = 0; i < b; ++i) {
      const Complex v = t.values[k * b + i];
      out << k << ' ' << i << ' ' << format_real(v.real()) << ' ' << format_real(v.imag()) << '\n';
    }
}

LatticeSymbol read_symbol_table(std::istream& in) {
  const Header h = read_header(in, "torusfio-symbol");
  const int n = std::stoi(h.get("n"));
  SymbolTable t;
  t.grid = TorusGrid(n, std::stoi(h.get("N")));
  const int cutoff = std::stoi(h.get("Xi"));
  t.box.dim = n;
  if (cutoff >= 0) {
    t.box = LatticeBox::from_cube(FrequencyCube(n, cutoff));
  } else {
    t.box.lo = split_axes(h.get("lo"), n);
    t.box.hi = split_axes(h.get("hi"), n);
  }
  if (t.box.empty()) throw Error(ErrorKind::Io, "empty frequency box in header");
  const std::size_t b = t.box.size();
  t.values.assign(t.grid.size() * b, Complex(0.0));
  std::vector<char> filled(t.values.size(), 0);
  expect_rows(in, t.values.size(), t.grid.size(), b, [&](std::size_t k, std::size_t i, Complex v) {
    if (filled[k * b + i]) throw Error(ErrorKind::Io, "duplicate row " + std::to_string(k) + " " + std::to_string(i));
    filled[k * b + i] = 1;
    t.values[k * b + i] = v;
  });
  const double order = h.fields.count("order") ? std::stod(h.get("order")) : 0.0;
  std::string name = h.get("name");
  if (name == "-") name.clear();
  return LatticeSymbol::tabulated(name, order, std::move(t));
}

void write_dense_operator(std::ostream& out, const DenseOperator& m) {
  out << "# torusfio-dense n=" << m.grid.dim() << " N=" << m.grid.points_per_axis()
      << " name=" << (m.provenance.empty() ? "-" : m.provenance) << '\n';
  for (Eigen::Index r = 0; r < m.matrix.rows(); ++r)
    for (Eigen::Index c = 0; c < m.matrix.cols(); ++c) {
      const Complex v = m.matrix(r, c);
      out << r << ' ' << c << ' ' << format_real(v.real()) << ' ' << format_real(v.imag()) << '\n';
    }
}

DenseOperator read_dense_operator(std::istream& in) {
  const Header h = read_header(in, "torusfio-dense");
  DenseOperator m;
  m.grid = TorusGrid(std::stoi(h.get("n")), std::stoi(h.get("N")));
  m.provenance = h.get("name");
  if (m.provenance == "-") m.provenance.clear();
  const auto s = static_cast<Eigen::Index>(m.grid.size());
  m.matrix = Eigen::MatrixXcd::Zero(s, s);
  expect_rows(in, m.grid.size() * m.grid.size(), m.grid.size(), m.grid.size(),
              [&](std::size_t r, std::size_t c, Complex v) { m.matrix(r, c) = v; });
  return m;
}

void write_function(std::ostream& out, const PeriodicFunction& f) {
  out << "# torusfio-function n=" << f.grid.dim() << " N=" << f.grid.points_per_axis() << '\n';
  for (std::size_t k = 0; k < f.values.size(); ++k)
    out << k << ' ' << format_real(f.values[k].real()) << ' ' << format_real(f.values[k].imag()) << '\n';
}

PeriodicFunction read_function(std::istream& in) {
  const Header h = read_header(in, "torusfio-function");
  PeriodicFunction f(TorusGrid(std::stoi(h.get("n")), std::stoi(h.get("N"))));
  std::vector<char> filled(f.values.size(), 0);
  std::string line;
  std::size_t seen = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    long long k = -1;
    double re = 0, im = 0;
    if (!(ss >> k >> re >> im)) throw Error(ErrorKind::Io, "malformed row '" + line + "'");
    if (k < 0 || static_cast<std::size_t>(k) >= f.values.size() || filled[static_cast<std::size_t>(k)])
      throw Error(ErrorKind::Io, "bad or duplicate node index in '" + line + "'");
    filled[static_cast<std::size_t>(k)] = 1;
    f.values[static_cast<std::size_t>(k)] = Complex(re, im);
    ++seen;
  }
  if (seen != f.values.size())
    throw Error(ErrorKind::Io, "expected " + std::to_string(f.values.size()) + " rows, read " + std::to_string(seen));
  return f;
}

}  // namespace torusfio
