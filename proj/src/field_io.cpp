#include "hyxc/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace hyxc {

namespace {

std::string axis_list(const Grid& g, bool high) {
  std::string s;
  char buf[64];
  for (int a = 0; a < g.dim(); ++a) {
    std::snprintf(buf, sizeof(buf), "%.17g", high ? g.hi(a) : g.lo(a));
    if (a) s += ',';
    s += buf;
  }
  return s;
}

std::array<double, 3> parse_axis_list(const std::string& s, int dim) {
  std::array<double, 3> out = {0, 0, 0};
  std::stringstream ss(s);
  std::string tok;
  for (int a = 0; a < dim; ++a) {
    if (!std::getline(ss, tok, ',')) throw std::runtime_error("field dump: bad axis list " + s);
    out[a] = std::stod(tok);
  }
  return out;
}

}  // namespace

void write_field(const std::string& path, const Field& f) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const Grid& g = f.grid();
  os << "# hyxc-field v1 dim=" << g.dim() << " n=" << g.points_per_axis() << " a1="
     << axis_list(g, false) << " a2=" << axis_list(g, true) << "\n";
  char buf[96];
  for (std::size_t i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g\n", f[i].real(), f[i].imag());
    os << buf;
  }
  if (!os) throw std::runtime_error("write failed for " + path);
}

Field read_field(const std::string& path, FieldKind kind) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(is, header);
  int dim = 0, n = 0;
  std::string a1s, a2s;
  {
    std::stringstream ss(header);
    std::string tok;
    while (ss >> tok) {
      if (tok.rfind("dim=", 0) == 0) dim = std::stoi(tok.substr(4));
      else if (tok.rfind("n=", 0) == 0) n = std::stoi(tok.substr(2));
      else if (tok.rfind("a1=", 0) == 0) a1s = tok.substr(3);
      else if (tok.rfind("a2=", 0) == 0) a2s = tok.substr(3);
    }
  }
  if (header.rfind("# hyxc-field v1", 0) != 0 || dim == 0 || n == 0)
    throw std::runtime_error("not a hyxc-field v1 dump: " + path);
  Grid grid(dim, parse_axis_list(a1s, dim), parse_axis_list(a2s, dim), n);
  std::vector<cplx> values(grid.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    double re, im;
    if (!(is >> re >> im)) throw std::runtime_error("truncated field dump: " + path);
    values[i] = cplx(re, im);
  }
  return Field(grid, std::move(values), kind);
}

}  // namespace hyxc
