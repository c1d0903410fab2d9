#include "tilq/solution.hpp"

#include "tilq/quadrature.hpp"

#include <algorithm>
#include <utility>

namespace tilq {

RiccatiSolution::RiccatiSolution(TimeGrid grid, std::vector<Matrix> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid_.size()) {
        throw InvalidInputError("RiccatiSolution: one value per grid node required");
    }
}

Matrix RiccatiSolution::at(double t) const {
    const int idx = grid_.node_index(t);
    if (idx >= 0) return values_[static_cast<std::size_t>(idx)];
    const double T = grid_.horizon();
    if (t < 0.0 || t > T) throw InvalidInputError("RiccatiSolution::at: t outside [0, T]");
    if (grid_.is_uniform()) return cubic_interpolate(values_, t / grid_.step());
    const auto& nodes = grid_.nodes();
    const int i = static_cast<int>(std::upper_bound(nodes.begin(), nodes.end(), t) - nodes.begin()) - 1;
    const double a = (t - nodes[static_cast<std::size_t>(i)]) / (nodes[static_cast<std::size_t>(i) + 1] - nodes[static_cast<std::size_t>(i)]);
    return (1.0 - a) * values_[static_cast<std::size_t>(i)] + a * values_[static_cast<std::size_t>(i) + 1];
}

double RiccatiSolution::c_norm() const {
    if (values_.empty()) return 0.0;
    Matrix sup = Matrix::Zero(values_[0].rows(), values_[0].cols());
    for (const auto& v : values_) sup = sup.cwiseMax(v.cwiseAbs());
    return sup.rowwise().sum().maxCoeff();
}

}  // namespace tilq
