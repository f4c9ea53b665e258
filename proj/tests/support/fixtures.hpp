#pragma once

#include <memory>
#include <string>
#include <vector>

#include "causal/causal_space.hpp"

namespace fx {

using namespace causal;

/// Components named A, B, ... with the given numbers of outcomes "0", "1", ...
inline SpacePtr space(std::vector<std::size_t> sizes) {
  std::vector<Component> comps;
  for (std::size_t t = 0; t < sizes.size(); ++t) {
    Component c{std::string(1, static_cast<char>('A' + t)), {}};
    for (std::size_t k = 0; k < sizes[t]; ++k) c.outcomes.push_back(std::to_string(k));
    comps.push_back(std::move(c));
  }
  return std::make_shared<const FiniteProductSpace>(std::move(comps));
}

inline std::vector<double> weights(const Dist& d) { return {d.weights().begin(), d.weights().end()}; }

inline std::vector<double> row(const Kernel& k, std::size_t r) {
  return {k.row(r).begin(), k.row(r).end()};
}

}  // namespace fx
