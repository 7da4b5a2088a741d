#include "tsf/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tsf/error.hpp"

namespace tsf {

double check_gradients(const std::function<Tensor()>& f, std::span<Tensor> params,
                       double h) {
    if (h <= 0.0) throw ContractError("check_gradients: h must be > 0");

    for (Tensor& p : params) p.zero_grad();
    Tensor loss = f();
    backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (Tensor& p : params)
        analytic.emplace_back(p.grad().begin(), p.grad().end());

    double max_rel = 0.0;
    detail::NoGradGuard value_only;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto values = params[pi].mutable_data();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + h;
            const double fp = f().item();
            values[i] = saved - h;
            const double fm = f().item();
            values[i] = saved;
            const double numeric = (fp - fm) / (2.0 * h);
            const double a = analytic[pi][i];
            const double rel =
                std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace tsf
