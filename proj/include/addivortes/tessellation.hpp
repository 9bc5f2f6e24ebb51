#ifndef ADDIVORTES_TESSELLATION_HPP
#define ADDIVORTES_TESSELLATION_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace addivortes {

// n x p matrix of finite covariates, stored column-major so that a single
// covariate is contiguous (the nearest-centre scan walks columns).
class CovariateMatrix {
 public:
  CovariateMatrix() = default;
  CovariateMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major,
                  std::vector<std::string> names = {});

  static CovariateMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                   std::vector<std::string> names = {});

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t row, std::size_t col) const { return data_[col * rows_ + row]; }
  std::span<const double> column(std::size_t col) const {
    return {data_.data() + col * rows_, rows_};
  }
  std::vector<double> row(std::size_t r) const;
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<double>& data() const { return data_; }

  CovariateMatrix select_rows(std::span<const std::size_t> indices) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<std::string> names_;
};

// Voronoi partition over a subset of covariates. `dims` is strictly
// increasing; `centres` holds b rows of |dims| coordinates, row-major.
struct Tessellation {
  std::vector<std::size_t> dims;
  std::vector<double> centres;

  // Builds from unordered dims, permuting coordinates to canonical order.
  static Tessellation make(std::vector<std::size_t> dims,
                           const std::vector<std::vector<double>>& centres);

  std::size_t dimension() const { return dims.size(); }
  std::size_t centre_count() const { return dims.empty() ? 0 : centres.size() / dims.size(); }
  std::span<const double> centre(std::size_t i) const {
    return {centres.data() + i * dims.size(), dims.size()};
  }
  std::span<double> centre(std::size_t i) { return {centres.data() + i * dims.size(), dims.size()}; }
  bool uses(std::size_t covariate) const;

  // Throws StructuralError if any invariant is broken. When `p` is non-zero
  // every dimension must also be below p.
  void validate(std::size_t p = 0) const;

  friend bool operator==(const Tessellation&, const Tessellation&) = default;
};

struct CellOutputs {
  std::vector<double> values;
  friend bool operator==(const CellOutputs&, const CellOutputs&) = default;
};

struct EnsembleMember {
  Tessellation structure;
  CellOutputs outputs;
  friend bool operator==(const EnsembleMember&, const EnsembleMember&) = default;
};

struct Ensemble {
  std::vector<EnsembleMember> members;
  friend bool operator==(const Ensemble&, const Ensemble&) = default;
};

// Index of the nearest centre (Euclidean over T.dims), lowest index on ties.
std::size_t assign_cell(std::span<const double> x, const Tessellation& t);

double tessellation_output(std::span<const double> x, const Tessellation& t, const CellOutputs& m);

double ensemble_sum(std::span<const double> x, const Ensemble& ensemble);

// Batch nearest-centre assignment of every row of X. Produces exactly the
// indices assign_cell would return row by row.
void assign_rows(const Tessellation& t, const CovariateMatrix& x, std::span<std::uint32_t> cell_of_row,
                 std::vector<double>& scratch);
std::vector<std::uint32_t> assign_rows(const Tessellation& t, const CovariateMatrix& x);

enum class CentreChange { Inserted, Removed, Moved };

// Assignment of `updated` derived from the assignment `before` of the
// structure it came from by inserting, removing or moving centre `slot`.
// Only rows whose nearest centre can change are rescanned; the result equals
// assign_rows(updated, x) exactly.
void reassign_rows(const Tessellation& updated, const CovariateMatrix& x, CentreChange change, std::size_t slot,
                   std::span<const std::uint32_t> before, std::span<std::uint32_t> after);

struct CellPartition {
  std::vector<std::vector<std::size_t>> rows;
  std::vector<std::size_t> counts;
};

CellPartition cell_partition(const Tessellation& t, const CovariateMatrix& x);

// Adds g(x_i | T, M) to out[i] for every row.
void accumulate_outputs(const EnsembleMember& member, const CovariateMatrix& x, std::span<double> out,
                        std::vector<std::uint32_t>& cells, std::vector<double>& scratch);

// G(x_i) for every row.
std::vector<double> ensemble_sum(const CovariateMatrix& x, const Ensemble& ensemble);

}  // namespace addivortes

#endif
