#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <istream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hwlab/errors.hpp"
#include "hwlab/functions.hpp"
#include "hwlab/threads.hpp"

namespace hwlab {

// Integral kernel k(x, s) over [0,1]^2, either a callable or a square
// sample array. Sampled kernels live on the uniform midpoint grid
// x_i = (i + 1/2)/N with row = x index and column = s index; the matrix
// samples/N is then the L2-discretization of the operator
// (Tf)(x) = integral k(x,s) f(s) ds, so block operator norms are
// sigma_max(block)/N.
struct KernelFunction {
  enum class Tag { callable, sampled };

  Tag tag = Tag::sampled;
  std::function<double(double, double)> k;  // callable form only
  Eigen::MatrixXd samples;                  // sampled form only

  int side() const { return tag == Tag::sampled ? static_cast<int>(samples.rows()) : 0; }

  static KernelFunction from_callable(std::function<double(double, double)> fn) {
    require(static_cast<bool>(fn), errc::invalid_argument, "kernel callable must be non-empty");
    KernelFunction out;
    out.tag = Tag::callable;
    out.k = std::move(fn);
    return out;
  }

  static KernelFunction from_samples(Eigen::MatrixXd m) {
    require(m.rows() >= 1 && m.rows() == m.cols(), errc::invalid_argument,
            "sampled kernel must be a nonempty square array");
    require(m.allFinite(), errc::invalid_argument, "sampled kernel has non-finite entries");
    KernelFunction out;
    out.tag = Tag::sampled;
    out.samples = std::move(m);
    return out;
  }

  // Materializes a callable kernel on the N x N midpoint grid.
  KernelFunction sampled_at(int n) const {
    require(n >= 1, errc::invalid_argument, "sample count must be >= 1");
    if (tag == Tag::sampled) {
      require(side() == n, errc::invalid_argument, "kernel already sampled at a different size");
      return *this;
    }
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i) {
      const double x = (i + 0.5) / n;
      for (int j = 0; j < n; ++j) {
        m(i, j) = k(x, (j + 0.5) / n);
      }
    }
    return from_samples(std::move(m));
  }

  static KernelFunction volterra() {
    return from_callable([](double x, double s) { return s < x ? 1.0 : 0.0; });
  }
};

// Parses an N x N kernel: N lines of N comma-separated reals,
// row = x index ascending, column = s index ascending.
inline KernelFunction load_kernel_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && rows.empty()) continue;  // leading blank lines
    if (line.empty()) {
      // Blank lines are only tolerated at the end of the file.
      std::string rest;
      while (std::getline(in, rest)) {
        if (!rest.empty() && rest != "\r") {
          fail(errc::malformed_csv, "blank line inside kernel data");
        }
      }
      break;
    }
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      const double value = std::strtod(begin, &end);
      while (end && *end == ' ') ++end;
      if (end == begin || (end && *end != '\0') || !std::isfinite(value)) {
        fail(errc::malformed_csv, "cell '" + cell + "' is not a finite real");
      }
      row.push_back(value);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(errc::malformed_csv, "ragged row: expected " + std::to_string(rows.front().size()) +
                                    " cells, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(errc::malformed_csv, "no data rows");
  if (rows.size() != rows.front().size()) {
    fail(errc::malformed_csv, "kernel must be square: " + std::to_string(rows.size()) +
                                  " rows of " + std::to_string(rows.front().size()) + " cells");
  }
  const int n = static_cast<int>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return KernelFunction::from_samples(std::move(m));
}

// phi otimes psi with split point t: phi vanishes on [0,t] and psi on
// [t,1], so the rank-one map f -> <f,psi> phi factors through the
// integration operator as M_phi V M_psi^*.
struct RankOnePair {
  std::function<Complex(double)> phi;
  std::function<Complex(double)> psi;
  double t = 0.5;
};

inline RankOnePair make_rank_one_pair(const ClosedForm& phi, const ClosedForm& psi, double t) {
  require(t > 0.0 && t < 1.0, errc::invalid_argument, "split point must lie in (0,1)");
  RankOnePair pair;
  pair.phi = [phi](double x) { return phi.at(x); };
  pair.psi = [psi](double x) { return psi.at(x); };
  pair.t = t;
  return pair;
}

// Operator-norm distance on the N-point midpoint grid between the outer
// product <f,psi> phi and the composed M_phi V M_psi^* compression.
inline double rank_one_defect(const RankOnePair& pair, int n) {
  require(n >= 2, errc::invalid_argument, "need at least two sample points");
  require(pair.t > 0.0 && pair.t < 1.0, errc::invalid_argument, "split point must lie in (0,1)");
  Eigen::VectorXcd u(n), v(n);
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    u(i) = pair.phi(x);
    v(i) = pair.psi(x);
  }
  const double scale_u = 1.0 + u.cwiseAbs().maxCoeff();
  const double scale_v = 1.0 + v.cwiseAbs().maxCoeff();
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    if (x < pair.t && std::abs(u(i)) > 1e-12 * scale_u) {
      fail(errc::invalid_supports, "phi does not vanish on [0,t]: phi(" + std::to_string(x) +
                                       ") = " + std::to_string(std::abs(u(i))));
    }
    if (x > pair.t && std::abs(v(i)) > 1e-12 * scale_v) {
      fail(errc::invalid_supports, "psi does not vanish on [t,1]: psi(" + std::to_string(x) +
                                       ") = " + std::to_string(std::abs(v(i))));
    }
  }
  // Outer-product kernel phi(x) conj(psi(s)) against the composed kernel
  // phi(x) chi_{s<x} conj(psi(s)).
  Eigen::MatrixXcd defect = u * v.adjoint();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) defect(i, j) = 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXcd>(defect).singularValues()(0) / n;
}

// True iff every strictly upper entry (column index past the row index,
// i.e. integration variable past the output variable) is below tol.
inline bool is_triangular(const KernelFunction& kernel, double tol) {
  require(kernel.tag == KernelFunction::Tag::sampled, errc::invalid_argument,
          "triangularity test needs a sampled kernel");
  const int n = kernel.side();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(kernel.samples(i, j)) > tol) return false;
  return true;
}

// One truncated-SVD factor of an off-diagonal block: the row factor is
// supported on grid rows [row_start, row_start+len) which lie in
// [split, 1], the column factor on columns [col_start, col_start+len)
// in [0, split].
struct RankOnePiece {
  double split = 0.5;
  int row_start = 0;
  int col_start = 0;
  Eigen::VectorXd row_factor;  // phi samples, singular value absorbed
  Eigen::VectorXd col_factor;  // psi samples
};

// Step-function pair matching the piece on the midpoint grid of the
// given side, for feeding back into rank_one_defect.
inline RankOnePair as_rank_one_pair(const RankOnePiece& piece, int side) {
  require(side >= 2, errc::invalid_argument, "side must be >= 2");
  RankOnePair pair;
  pair.t = piece.split;
  const auto sample = [side](const Eigen::VectorXd& values, int start) {
    return [side, values, start](double x) -> Complex {
      const int cell = static_cast<int>(std::floor(x * side));
      const int local = cell - start;
      if (local < 0 || local >= values.size()) return 0.0;
      return values(local);
    };
  };
  pair.phi = sample(piece.row_factor, piece.row_start);
  pair.psi = sample(piece.col_factor, piece.col_start);
  return pair;
}

struct DyadicApproximation {
  int levels = 0;
  int side = 0;
  std::vector<RankOnePiece> pieces;
  // Residual bound after peeling 1..levels: max operator norm over the
  // 2^level diagonal blocks of the untouched kernel.
  std::vector<double> level_bounds;
  double residual_bound = 0.0;
  // Operator-norm mass discarded by the per-block SVD truncations.
  double truncation_tail = 0.0;

  int rank() const { return static_cast<int>(pieces.size()); }

  // Sampled kernel of the assembled finite-rank operator.
  Eigen::MatrixXd dense() const {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(side, side);
    for (const RankOnePiece& piece : pieces) {
      sum.block(piece.row_start, piece.col_start, piece.row_factor.size(),
                piece.col_factor.size()) += piece.row_factor * piece.col_factor.transpose();
    }
    return sum;
  }
};

namespace detail {

inline double block_norm(const Eigen::MatrixXd& block, int grid_side) {
  if (block.size() == 0) return 0.0;
  return Eigen::BDCSVD<Eigen::MatrixXd>(block).singularValues()(0) / grid_side;
}

}  // namespace detail

// Peels the off-diagonal blocks P_[mid,b] K P_[a,mid] at L dyadic levels
// into truncated-SVD rank-one pieces, each factoring through the
// integration operator because its row support starts at the split.
// What is left over is block diagonal with 2^L blocks; the returned
// bound is the max of their operator norms.
inline DyadicApproximation dyadic_approximation(const KernelFunction& kernel, int levels) {
  require(levels >= 1, errc::invalid_argument, "levels must be >= 1");
  require(kernel.tag == KernelFunction::Tag::sampled, errc::invalid_argument,
          "dyadic scheme needs a sampled kernel");
  const int n = kernel.side();
  require(n % (1 << levels) == 0, errc::invalid_argument,
          "grid side must be a multiple of 2^levels");
  const double scale = kernel.samples.cwiseAbs().maxCoeff();
  if (!is_triangular(kernel, 1e-12 * (1.0 + scale))) {
    fail(errc::not_in_alglat, "kernel is not triangular: it does not leave the "
                              "integration operator's invariant subspaces invariant");
  }

  constexpr double kEps = 1e-7;  // total truncation budget, operator norm units
  DyadicApproximation out;
  out.levels = levels;
  out.side = n;

  std::vector<double> tails(levels, 0.0);
  for (int level = 1; level <= levels; ++level) {
    const int block_count = 1 << (level - 1);
    const int half = n >> level;
    std::vector<std::vector<RankOnePiece>> per_block(block_count);
    std::vector<double> per_block_tail(block_count, 0.0);
    parallel_for(block_count, [&](int b) {
      const int base = b * 2 * half;
      const Eigen::MatrixXd block = kernel.samples.block(base + half, base, half, half);
      if (block.cwiseAbs().maxCoeff() == 0.0) return;
      Eigen::BDCSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      const double cutoff = kEps / std::pow(2.0, level + 2);
      int rank = 0;
      while (rank < sv.size() && sv(rank) / n > cutoff) ++rank;
      if (rank < sv.size()) per_block_tail[b] = sv(rank) / n;
      for (int r = 0; r < rank; ++r) {
        RankOnePiece piece;
        piece.split = static_cast<double>(base + half) / n;
        piece.row_start = base + half;
        piece.col_start = base;
        piece.row_factor = svd.matrixU().col(r) * sv(r);
        piece.col_factor = svd.matrixV().col(r);
        per_block[b].push_back(std::move(piece));
      }
    });
    for (int b = 0; b < block_count; ++b) {
      tails[level - 1] += per_block_tail[b];
      for (RankOnePiece& piece : per_block[b]) out.pieces.push_back(std::move(piece));
    }

    const int diag_count = 1 << level;
    const int diag_side = n / diag_count;
    std::vector<double> diag_norms(diag_count, 0.0);
    parallel_for(diag_count, [&](int b) {
      diag_norms[b] =
          detail::block_norm(kernel.samples.block(b * diag_side, b * diag_side, diag_side, diag_side), n);
    });
    double bound = 0.0;
    for (double value : diag_norms) bound = std::max(bound, value);
    out.level_bounds.push_back(bound);
  }

  out.residual_bound = out.level_bounds.back();
  for (double value : tails) out.truncation_tail += value;
  return out;
}

// Max over the n diagonal block compressions of the operator norm
// (the quantity whose decay certifies approximability).
inline double block_diagonal_norm(const KernelFunction& kernel, int blocks) {
  require(kernel.tag == KernelFunction::Tag::sampled, errc::invalid_argument,
          "block norms need a sampled kernel");
  require(blocks >= 1 && (blocks & (blocks - 1)) == 0, errc::invalid_argument,
          "block count must be a power of two");
  const int n = kernel.side();
  require(n % blocks == 0, errc::invalid_argument, "grid side must be a multiple of the block count");
  const int side = n / blocks;
  std::vector<double> norms(blocks, 0.0);
  parallel_for(blocks, [&](int b) {
    norms[b] = detail::block_norm(kernel.samples.block(b * side, b * side, side, side), n);
  });
  double out = 0.0;
  for (double value : norms) out = std::max(out, value);
  return out;
}

}  // namespace hwlab
