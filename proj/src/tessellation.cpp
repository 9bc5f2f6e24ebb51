#include "addivortes/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "addivortes/error.hpp"

namespace addivortes {

CovariateMatrix::CovariateMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major,
                                 std::vector<std::string> names)
    : rows_(rows), cols_(cols), data_(std::move(column_major)), names_(std::move(names)) {
  if (rows_ == 0 || cols_ == 0) throw StructuralError("covariate matrix must have at least one row and column");
  if (data_.size() != rows_ * cols_) throw StructuralError("covariate matrix data size does not match shape");
  for (double v : data_)
    if (!std::isfinite(v)) throw StructuralError("covariate matrix contains a non-finite entry");
  if (names_.empty()) {
    names_.reserve(cols_);
    for (std::size_t k = 0; k < cols_; ++k) names_.push_back("x" + std::to_string(k + 1));
  } else if (names_.size() != cols_) {
    throw StructuralError("covariate name count does not match column count");
  }
}

CovariateMatrix CovariateMatrix::from_rows(const std::vector<std::vector<double>>& rows,
                                           std::vector<std::string> names) {
  if (rows.empty()) throw StructuralError("covariate matrix must have at least one row");
  const std::size_t n = rows.size();
  const std::size_t p = rows.front().size();
  std::vector<double> data(n * p);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != p) throw StructuralError("ragged covariate rows");
    for (std::size_t k = 0; k < p; ++k) data[k * n + i] = rows[i][k];
  }
  return CovariateMatrix(n, p, std::move(data), std::move(names));
}

std::vector<double> CovariateMatrix::row(std::size_t r) const {
  std::vector<double> out(cols_);
  for (std::size_t k = 0; k < cols_; ++k) out[k] = (*this)(r, k);
  return out;
}

CovariateMatrix CovariateMatrix::select_rows(std::span<const std::size_t> indices) const {
  const std::size_t n = indices.size();
  std::vector<double> data(n * cols_);
  for (std::size_t k = 0; k < cols_; ++k)
    for (std::size_t i = 0; i < n; ++i) data[k * n + i] = (*this)(indices[i], k);
  return CovariateMatrix(n, cols_, std::move(data), names_);
}

Tessellation Tessellation::make(std::vector<std::size_t> dims, const std::vector<std::vector<double>>& centres) {
  std::vector<std::size_t> order(dims.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dims[a] < dims[b]; });
  Tessellation t;
  t.dims.reserve(dims.size());
  for (std::size_t o : order) t.dims.push_back(dims[o]);
  for (const auto& c : centres) {
    if (c.size() != dims.size()) throw StructuralError("centre length does not match dimension count");
    for (std::size_t o : order) t.centres.push_back(c[o]);
  }
  t.validate();
  return t;
}

bool Tessellation::uses(std::size_t covariate) const {
  return std::binary_search(dims.begin(), dims.end(), covariate);
}

void Tessellation::validate(std::size_t p) const {
  if (dims.empty()) throw StructuralError("tessellation has no dimensions");
  for (std::size_t i = 1; i < dims.size(); ++i)
    if (dims[i] <= dims[i - 1]) throw StructuralError("tessellation dims must be distinct and increasing");
  if (p != 0 && dims.back() >= p) throw StructuralError("tessellation dimension index out of range");
  if (centres.empty() || centres.size() % dims.size() != 0)
    throw StructuralError("centre coordinates do not form whole centres");
  for (double v : centres)
    if (!std::isfinite(v)) throw StructuralError("non-finite centre coordinate");
  const std::size_t b = centre_count();
  const std::size_t d = dims.size();
  // Sort centre indices lexicographically, then compare neighbours.
  std::vector<std::size_t> order(b);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto less = [&](std::size_t a, std::size_t c) {
    return std::lexicographical_compare(centres.begin() + a * d, centres.begin() + (a + 1) * d,
                                        centres.begin() + c * d, centres.begin() + (c + 1) * d);
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t i = 1; i < b; ++i)
    if (std::equal(centres.begin() + order[i - 1] * d, centres.begin() + (order[i - 1] + 1) * d,
                   centres.begin() + order[i] * d))
      throw StructuralError("duplicate centre");
}

std::size_t assign_cell(std::span<const double> x, const Tessellation& t) {
  const std::size_t d = t.dims.size();
  if (d == 0) throw StructuralError("tessellation has no dimensions");
  if (t.dims.back() >= x.size()) throw StructuralError("tessellation dimension exceeds covariate length");
  const std::size_t b = t.centre_count();
  std::size_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < b; ++c) {
    const double* centre = t.centres.data() + c * d;
    double dist = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = x[t.dims[k]] - centre[k];
      dist += diff * diff;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best = c;
    }
  }
  return best;
}

double tessellation_output(std::span<const double> x, const Tessellation& t, const CellOutputs& m) {
  if (m.values.size() != t.centre_count()) throw StructuralError("cell output count does not match centre count");
  return m.values[assign_cell(x, t)];
}

double ensemble_sum(std::span<const double> x, const Ensemble& ensemble) {
  double total = 0.0;
  for (const auto& member : ensemble.members) total += tessellation_output(x, member.structure, member.outputs);
  return total;
}

void assign_rows(const Tessellation& t, const CovariateMatrix& x, std::span<std::uint32_t> cell_of_row,
                 std::vector<double>& scratch) {
  const std::size_t n = x.rows();
  const std::size_t d = t.dims.size();
  if (d == 0) throw StructuralError("tessellation has no dimensions");
  if (t.dims.back() >= x.cols()) throw StructuralError("tessellation dimension exceeds covariate count");
  if (cell_of_row.size() != n) throw StructuralError("assignment buffer length does not match row count");
  scratch.assign(2 * n, 0.0);
  double* best = scratch.data();
  double* dist = scratch.data() + n;
  std::fill(best, best + n, std::numeric_limits<double>::infinity());
  std::fill(cell_of_row.begin(), cell_of_row.end(), 0u);
  const std::size_t b = t.centre_count();
  for (std::size_t c = 0; c < b; ++c) {
    const double* centre = t.centres.data() + c * d;
    std::fill(dist, dist + n, 0.0);
    // Same summation order over dims as assign_cell.
    for (std::size_t k = 0; k < d; ++k) {
      const double* col = x.column(t.dims[k]).data();
      const double ck = centre[k];
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = col[i] - ck;
        dist[i] += diff * diff;
      }
    }
    const auto index = static_cast<std::uint32_t>(c);
    for (std::size_t i = 0; i < n; ++i) {
      if (dist[i] < best[i]) {
        best[i] = dist[i];
        cell_of_row[i] = index;
      }
    }
  }
}

namespace {

// Squared distance from row i to centre c, summed in the same order as
// assign_cell and assign_rows so that comparisons agree bit for bit.
double row_distance(const Tessellation& t, const CovariateMatrix& x, std::size_t i, std::size_t c) {
  const std::size_t d = t.dims.size();
  const double* centre = t.centres.data() + c * d;
  double dist = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double diff = x(i, t.dims[k]) - centre[k];
    dist += diff * diff;
  }
  return dist;
}

std::uint32_t nearest_centre(const Tessellation& t, const CovariateMatrix& x, std::size_t i) {
  const std::size_t b = t.centre_count();
  std::uint32_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < b; ++c) {
    const double dist = row_distance(t, x, i, c);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

}  // namespace

void reassign_rows(const Tessellation& updated, const CovariateMatrix& x, CentreChange change, std::size_t slot,
                   std::span<const std::uint32_t> before, std::span<std::uint32_t> after) {
  const std::size_t n = x.rows();
  if (before.size() != n || after.size() != n) throw StructuralError("assignment buffer length does not match row count");
  if (updated.dims.empty()) throw StructuralError("tessellation has no dimensions");
  const auto s = static_cast<std::uint32_t>(slot);
  switch (change) {
    case CentreChange::Inserted:
      if (slot >= updated.centre_count()) throw StructuralError("inserted centre index out of range");
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t c = before[i];
        const std::uint32_t shifted = c + (c >= s ? 1u : 0u);
        const double d_new = row_distance(updated, x, i, slot);
        const double d_cur = row_distance(updated, x, i, shifted);
        // on a tie the lower index wins, and the new centre precedes `shifted` iff c >= s
        after[i] = (d_new < d_cur || (d_new == d_cur && c >= s)) ? s : shifted;
      }
      break;
    case CentreChange::Removed:
      if (slot > updated.centre_count()) throw StructuralError("removed centre index out of range");
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t c = before[i];
        after[i] = c == s ? nearest_centre(updated, x, i) : c - (c > s ? 1u : 0u);
      }
      break;
    case CentreChange::Moved:
      if (slot >= updated.centre_count()) throw StructuralError("moved centre index out of range");
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t c = before[i];
        if (c == s) {
          after[i] = nearest_centre(updated, x, i);
          continue;
        }
        const double d_new = row_distance(updated, x, i, slot);
        const double d_cur = row_distance(updated, x, i, c);
        after[i] = (d_new < d_cur || (d_new == d_cur && s < c)) ? s : c;
      }
      break;
  }
}

std::vector<std::uint32_t> assign_rows(const Tessellation& t, const CovariateMatrix& x) {
  std::vector<std::uint32_t> cells(x.rows());
  std::vector<double> scratch;
  assign_rows(t, x, cells, scratch);
  return cells;
}

CellPartition cell_partition(const Tessellation& t, const CovariateMatrix& x) {
  const auto cells = assign_rows(t, x);
  CellPartition partition;
  partition.rows.resize(t.centre_count());
  partition.counts.assign(t.centre_count(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    partition.rows[cells[i]].push_back(i);
    ++partition.counts[cells[i]];
  }
  return partition;
}

void accumulate_outputs(const EnsembleMember& member, const CovariateMatrix& x, std::span<double> out,
                        std::vector<std::uint32_t>& cells, std::vector<double>& scratch) {
  if (member.outputs.values.size() != member.structure.centre_count())
    throw StructuralError("cell output count does not match centre count");
  cells.resize(x.rows());
  assign_rows(member.structure, x, cells, scratch);
  const double* mu = member.outputs.values.data();
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] += mu[cells[i]];
}

std::vector<double> ensemble_sum(const CovariateMatrix& x, const Ensemble& ensemble) {
  std::vector<double> out(x.rows(), 0.0);
  std::vector<std::uint32_t> cells;
  std::vector<double> scratch;
  for (const auto& member : ensemble.members) accumulate_outputs(member, x, out, cells, scratch);
  return out;
}

}  // namespace addivortes
