#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "hwlab/calkin.hpp"
#include "hwlab/errors.hpp"
#include "hwlab/operators.hpp"
#include "hwlab/threads.hpp"
#include "hwlab/word.hpp"

namespace hwlab {

// Rectangular window in the spectral plane. Defaults frame the lollipop
// with room to spare on every side.
struct ScanGrid {
  double re_min = -1.5;
  double re_max = 2.5;
  double im_min = -1.5;
  double im_max = 1.5;
  int nx = 121;
  int ny = 91;
};

inline void validate(const ScanGrid& grid) {
  require(grid.nx >= 2 && grid.ny >= 2, errc::invalid_argument, "scan grid needs nx, ny >= 2");
  require(std::isfinite(grid.re_min) && std::isfinite(grid.re_max) && std::isfinite(grid.im_min) &&
              std::isfinite(grid.im_max),
          errc::invalid_argument, "scan window must be finite");
  require(grid.re_max > grid.re_min && grid.im_max > grid.im_min, errc::invalid_argument,
          "scan window must have positive extent");
}

// Smallest singular value of (A_N - lambda I) per window point,
// row-major by grid index (iy * nx + ix).
struct ScanResult {
  ScanGrid grid;
  int size = 0;
  Basis basis = Basis::legendre_orthonormal;
  std::vector<double> sigma_min;

  double re_at(int ix) const {
    return grid.re_min + (grid.re_max - grid.re_min) * ix / (grid.nx - 1);
  }
  double im_at(int iy) const {
    return grid.im_min + (grid.im_max - grid.im_min) * iy / (grid.ny - 1);
  }
  Complex point_at(int ix, int iy) const { return {re_at(ix), im_at(iy)}; }
  double value_at(int ix, int iy) const { return sigma_min[static_cast<size_t>(iy) * grid.nx + ix]; }
};

// sqrt of the smallest eigenvalue of m^H m: one Hermitian eigensolve per
// point keeps the full-window scan cheap. Values below the normal-equations
// floor sqrt(eps) * sigma_max read as that floor (~1e-8 sigma_max), which is
// far below every threshold a scan is judged against.
inline double smallest_singular_value(const Eigen::MatrixXcd& m) {
  const Eigen::MatrixXcd gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues()(0)));
}

// Full-accuracy variant for per-point checks where values can sit below
// the normal-equations floor (e.g. deep inside the point spectrum).
inline double smallest_singular_value_exact(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues()(m.rows() - 1);
}

inline ScanResult pseudospectrum(const OperatorWord& word, const ScanGrid& grid, int size = 64) {
  validate(grid);
  require(size >= 1, errc::invalid_argument, "compression size must be >= 1");
  const Eigen::MatrixXcd a = word_matrix(word, size, Basis::legendre_orthonormal).entries;
  ScanResult out;
  out.grid = grid;
  out.size = size;
  out.basis = Basis::legendre_orthonormal;
  out.sigma_min.assign(static_cast<size_t>(grid.nx) * grid.ny, 0.0);
  parallel_for(grid.nx * grid.ny, [&](int index) {
    const int ix = index % grid.nx;
    const int iy = index / grid.nx;
    Eigen::MatrixXcd shifted = a;
    shifted.diagonal().array() -= Complex(out.re_at(ix), out.im_at(iy));
    out.sigma_min[index] = smallest_singular_value(shifted);
  });
  return out;
}

// Dense eigenvalues of the compression, sorted by descending real part
// then ascending imaginary part. Finite sections of non-normal
// operators are basis-dependent: the monomial compression of the
// difference word is lower triangular, so its eigenvalue list is just
// the diagonal {1/(n+1)} and says nothing about the true spectrum.
// That failure is the reason scans report sigma_min instead.
inline std::vector<Complex> truncation_eigenvalues(const OperatorWord& word, Basis basis, int size) {
  require(size >= 1, errc::invalid_argument, "compression size must be >= 1");
  const Eigen::MatrixXcd a = word_matrix(word, size, basis).entries;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, /*computeEigenvectors=*/false);
  std::vector<Complex> values(solver.eigenvalues().data(), solver.eigenvalues().data() + size);
  std::sort(values.begin(), values.end(), [](Complex lhs, Complex rhs) {
    if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
    return lhs.imag() < rhs.imag();
  });
  return values;
}

// Median sigma_min within distance-to-lollipop bands
// [0,0.05), [0.05,0.2), [0.2,0.5), [0.5,inf).
struct DistanceProfile {
  std::array<double, 4> median{};
  std::array<int, 4> count{};
  bool strictly_increasing = false;
};

inline DistanceProfile lollipop_distance_profile(const ScanResult& result) {
  static constexpr std::array<double, 3> kEdges = {0.05, 0.2, 0.5};
  const Lollipop lollipop;
  std::array<std::vector<double>, 4> bands;
  for (int iy = 0; iy < result.grid.ny; ++iy) {
    for (int ix = 0; ix < result.grid.nx; ++ix) {
      const double dist = lollipop.distance(result.point_at(ix, iy));
      size_t band = 0;
      while (band < kEdges.size() && dist >= kEdges[band]) ++band;
      bands[band].push_back(result.value_at(ix, iy));
    }
  }
  DistanceProfile profile;
  for (size_t b = 0; b < bands.size(); ++b) {
    auto& values = bands[b];
    profile.count[b] = static_cast<int>(values.size());
    if (values.empty()) {
      profile.median[b] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    std::sort(values.begin(), values.end());
    const size_t mid = values.size() / 2;
    profile.median[b] =
        values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  }
  profile.strictly_increasing = true;
  for (size_t b = 0; b + 1 < bands.size(); ++b) {
    if (!(profile.median[b] < profile.median[b + 1])) profile.strictly_increasing = false;
  }
  return profile;
}

namespace detail {

inline std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

inline std::string format_svg(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

}  // namespace detail

inline void write_scan_csv(const ScanResult& result, std::ostream& out) {
  out << "re,im,sigma_min\n";
  for (int iy = 0; iy < result.grid.ny; ++iy) {
    for (int ix = 0; ix < result.grid.nx; ++ix) {
      out << detail::format_real(result.re_at(ix)) << ',' << detail::format_real(result.im_at(iy))
          << ',' << detail::format_real(result.value_at(ix, iy)) << '\n';
    }
  }
}

// Self-contained SVG 1.1 scatter: one grayscale cell per grid point
// (dark = small sigma_min), the segment and the unit circle about 1
// drawn on top in plot coordinates.
inline void write_scan_svg(const ScanResult& result, std::ostream& out) {
  const ScanGrid& grid = result.grid;
  const double span_re = grid.re_max - grid.re_min;
  const double span_im = grid.im_max - grid.im_min;
  const double scale = 800.0 / span_re;
  const int width = 800;
  const int height = static_cast<int>(std::lround(scale * span_im));
  const double dx = span_re / (grid.nx - 1);
  const double dy = span_im / (grid.ny - 1);

  double top = 0.0;
  for (double value : result.sigma_min) top = std::max(top, value);
  if (top <= 0.0) top = 1.0;

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  out << "<desc>smallest singular value of the shifted compression over the spectral window"
         "</desc>\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"#ffffff\"/>\n";
  out << "<g transform=\"translate(" << detail::format_svg(-scale * grid.re_min) << ','
      << detail::format_svg(scale * grid.im_max) << ") scale(" << detail::format_svg(scale) << ','
      << detail::format_svg(-scale) << ")\">\n";
  for (int iy = 0; iy < grid.ny; ++iy) {
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double level = std::sqrt(std::min(1.0, result.value_at(ix, iy) / top));
      const int shade = static_cast<int>(std::lround(255.0 * level));
      char color[8];
      std::snprintf(color, sizeof(color), "#%02x%02x%02x", shade, shade, 255);
      out << "<rect x=\"" << detail::format_svg(result.re_at(ix) - 0.5 * dx) << "\" y=\""
          << detail::format_svg(result.im_at(iy) - 0.5 * dy) << "\" width=\""
          << detail::format_svg(dx) << "\" height=\"" << detail::format_svg(dy) << "\" fill=\""
          << color << "\"/>\n";
    }
  }
  out << "<line x1=\"-1\" y1=\"0\" x2=\"0\" y2=\"0\" stroke=\"#000000\" "
         "stroke-width=\"0.015\"/>\n";
  out << "<circle cx=\"1\" cy=\"0\" r=\"1\" fill=\"none\" stroke=\"#000000\" "
         "stroke-width=\"0.015\"/>\n";
  out << "</g>\n</svg>\n";
}

}  // namespace hwlab
