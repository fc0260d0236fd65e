#pragma once

#include <string>
#include <vector>

#include "prism/tensor.hpp"

namespace prism {

struct RecordedLayer {
  std::string name;
  Tensor4 activations;
};

// Per-layer activations of one forward pass, shallowest first. All entries
// share a batch size.
class ActivationStack {
 public:
  ActivationStack() = default;

  // Throws Errc::BatchSizeMismatch when t's batch differs from earlier entries.
  void push(std::string name, Tensor4 t);
  void clear() { layers_.clear(); }

  bool empty() const { return layers_.empty(); }
  std::size_t size() const { return layers_.size(); }
  std::size_t batch_size() const { return layers_.empty() ? 0 : layers_.front().activations.n(); }

  const std::vector<RecordedLayer>& layers() const { return layers_; }
  const RecordedLayer& deepest() const { return layers_.back(); }
  const RecordedLayer& shallowest() const { return layers_.front(); }

  auto begin() const { return layers_.begin(); }
  auto end() const { return layers_.end(); }

 private:
  std::vector<RecordedLayer> layers_;
};

// Every recorded tensor multiplied by alpha.
ActivationStack scaled(const ActivationStack& stack, float alpha);

}  // namespace prism
