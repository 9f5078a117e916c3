#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qslimit/cf_solver.hpp"
#include "qslimit/grid.hpp"
#include "qslimit/quicksort_sim.hpp"

namespace qslimit {

/// Shortest round-trippable decimal form.
inline std::string fmt_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// `t,re,im`
inline void write_cf_csv(std::ostream& os, const CfGrid& phi) {
  os << "t,re,im\n";
  for (std::size_t i = 0; i < phi.size(); ++i)
    os << fmt_real(phi.grid().point(i)) << ',' << fmt_real(phi[i].real()) << ','
       << fmt_real(phi[i].imag()) << '\n';
}

/// `x,f` for k = 0; for k > 0 a `# k=<k>` line followed by `x,fk`.
inline void write_density_csv(std::ostream& os, const RealGrid& g, int k = 0) {
  if (k == 0) {
    os << "x,f\n";
  } else {
    os << "# k=" << k << "\nx,fk\n";
  }
  for (std::size_t i = 0; i < g.size(); ++i)
    os << fmt_real(g.point(i)) << ',' << fmt_real(g[i]) << '\n';
}

/// `x,F`
inline void write_cdf_csv(std::ostream& os, const RealGrid& F) {
  os << "x,F\n";
  for (std::size_t i = 0; i < F.size(); ++i)
    os << fmt_real(F.point(i)) << ',' << fmt_real(F[i]) << '\n';
}

/// strtod rather than stod: deep-tail CDF values can be subnormal.
inline double parse_real(const std::string& field) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw std::invalid_argument("csv: not a number '" + field + "'");
  return v;
}

/// Reads an `x,F` file written by write_cdf_csv. The x column must be
/// uniformly spaced.
inline RealGrid read_cdf_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("x,F", 0) != 0)
    throw std::invalid_argument("cdf csv: expected header x,F");
  std::vector<double> xs, fs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw std::invalid_argument("cdf csv: malformed row '" + line + "'");
    xs.push_back(parse_real(a));
    fs.push_back(parse_real(b));
  }
  if (xs.size() < 2) throw std::invalid_argument("cdf csv: need at least two rows");
  const double dx = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - (xs.front() + static_cast<double>(i) * dx)) > 1e-9 * (1.0 + std::abs(xs[i])))
      throw std::invalid_argument("cdf csv: x column is not uniformly spaced");
  return RealGrid(xs.front(), dx, std::move(fs));
}

/// `bin_lo,bin_hi,count`
inline void write_histogram_csv(std::ostream& os, const Histogram& h) {
  os << "bin_lo,bin_hi,count\n";
  for (std::size_t b = 0; b < h.counts.size(); ++b)
    os << fmt_real(h.edges[b]) << ',' << fmt_real(h.edges[b + 1]) << ','
       << h.counts[b] << '\n';
}

}  // namespace qslimit
