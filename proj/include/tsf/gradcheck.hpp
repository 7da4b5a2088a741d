#pragma once

#include <functional>
#include <span>

#include "tsf/tensor.hpp"

namespace tsf {

/// Compares analytic gradients of a scalar-valued function against central
/// finite differences, coordinate by coordinate, over every given parameter.
/// f must be deterministic and rebuild its graph on each call. Returns the
/// maximum relative error |a - n| / max(|a|, |n|, 1e-8).
double check_gradients(const std::function<Tensor()>& f, std::span<Tensor> params,
                       double h = 1e-5);

}  // namespace tsf
