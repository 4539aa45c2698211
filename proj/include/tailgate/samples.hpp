#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tailgate/error.hpp"

namespace tailgate {

using WeightVector = std::vector<double>;

// A sequence of equal-length real vectors, stored row-major. Scalars are
// the dim == 1 case.
class SampleSet {
 public:
  SampleSet() = default;
  explicit SampleSet(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw Error("SampleSet: dimension must be at least 1");
  }
  SampleSet(std::size_t dim, std::vector<double> flat) : SampleSet(dim) {
    if (flat.size() % dim != 0)
      throw Error("SampleSet: flat data length is not a multiple of dim");
    data_ = std::move(flat);
  }

  static SampleSet scalars(std::span<const double> xs) {
    return SampleSet(1, std::vector<double>(xs.begin(), xs.end()));
  }

  // Rows must all share one dimension.
  static SampleSet from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("SampleSet: no rows");
    SampleSet out(rows.front().size());
    out.data_.reserve(rows.size() * out.dim_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != out.dim_)
        throw Error("SampleSet: row " + std::to_string(i) + " has dimension " +
                    std::to_string(rows[i].size()) + ", expected " +
                    std::to_string(out.dim_));
      out.data_.insert(out.data_.end(), rows[i].begin(), rows[i].end());
    }
    return out;
  }

  void push_back(std::span<const double> row) {
    if (row.size() != dim_)
      throw Error("SampleSet: pushed row has dimension " +
                  std::to_string(row.size()) + ", expected " +
                  std::to_string(dim_));
    data_.insert(data_.end(), row.begin(), row.end());
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / dim_; }
  bool empty() const noexcept { return data_.empty(); }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  std::span<double> row(std::size_t i) { return {data_.data() + i * dim_, dim_}; }

  const std::vector<double>& flat() const noexcept { return data_; }

  std::vector<std::vector<double>> rows() const {
    std::vector<std::vector<double>> out;
    out.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
      auto r = row(i);
      out.emplace_back(r.begin(), r.end());
    }
    return out;
  }

  friend bool operator==(const SampleSet&, const SampleSet&) = default;

 private:
  std::size_t dim_ = 1;
  std::vector<double> data_;
};

}  // namespace tailgate
