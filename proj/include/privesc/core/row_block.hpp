#pragma once

#include <cassert>
#include <span>
#include <vector>

namespace privesc {

/// Dense row-major block of equally sized feature rows.
struct RowBlock {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  RowBlock() = default;
  RowBlock(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  std::span<double> row(int i) {
    assert(i >= 0 && i < rows);
    return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int i) const {
    assert(i >= 0 && i < rows);
    return {data.data() + static_cast<std::size_t>(i) * cols, static_cast<std::size_t>(cols)};
  }
  void push_row(std::span<const double> r) {
    assert(static_cast<int>(r.size()) == cols);
    data.insert(data.end(), r.begin(), r.end());
    ++rows;
  }

  bool operator==(const RowBlock&) const = default;
};

}  // namespace privesc
