#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace privesc::nn {

/// Location of one named tensor inside a ParamStore's flat buffer.
struct TensorRef {
  std::size_t offset = 0;
  int rows = 0;
  int cols = 0;
  std::size_t size() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool operator==(const TensorRef&) const = default;
};

struct TensorInfo {
  std::string name;
  TensorRef ref;
  bool operator==(const TensorInfo&) const = default;
};

/// Named row-major tensors packed into one contiguous buffer, so optimizer
/// state and gradients are plain vectors of the same length.
class ParamStore {
 public:
  /// Appends a zero-filled tensor. Names must be unique.
  TensorRef add(std::string_view name, int rows, int cols);

  std::span<double> view(const TensorRef& t) { return {data_.data() + t.offset, t.size()}; }
  std::span<const double> view(const TensorRef& t) const { return {data_.data() + t.offset, t.size()}; }

  const TensorInfo* find(std::string_view name) const;
  const std::vector<TensorInfo>& tensors() const { return tensors_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }
  std::size_t count() const { return data_.size(); }

  bool operator==(const ParamStore&) const = default;

 private:
  std::vector<TensorInfo> tensors_;
  std::vector<double> data_;
};

}  // namespace privesc::nn
