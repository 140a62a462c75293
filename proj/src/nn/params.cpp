#include "privesc/nn/params.hpp"

#include <stdexcept>

namespace privesc::nn {

TensorRef ParamStore::add(std::string_view name, int rows, int cols) {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("tensor shape must be positive: " + std::string(name));
  if (find(name)) throw std::invalid_argument("duplicate tensor name: " + std::string(name));
  TensorRef ref{data_.size(), rows, cols};
  tensors_.push_back({std::string(name), ref});
  data_.resize(data_.size() + ref.size(), 0.0);
  return ref;
}

const TensorInfo* ParamStore::find(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

}  // namespace privesc::nn
