#include "prism/activations.hpp"

#include "prism/error.hpp"

namespace prism {

void ActivationStack::push(std::string name, Tensor4 t) {
  if (!layers_.empty() && t.n() != batch_size()) {
    throw Error(Errc::BatchSizeMismatch, "layer '" + name + "' has batch " + std::to_string(t.n()) +
                                             ", earlier layers have " + std::to_string(batch_size()));
  }
  layers_.push_back({std::move(name), std::move(t)});
}

ActivationStack scaled(const ActivationStack& stack, float alpha) {
  ActivationStack out;
  for (const auto& layer : stack) out.push(layer.name, scaled(layer.activations, alpha));
  return out;
}

}  // namespace prism
