#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "kdsqnm/inversion.hpp"

namespace kdsqnm {

double RectangleSpec::M_at(int i) const {
  return nM == 1 ? M_min : M_min + (M_max - M_min) * i / (nM - 1);
}

double RectangleSpec::a_at(int j) const {
  return na == 1 ? a_min : a_min + (a_max - a_min) * j / (na - 1);
}

namespace {

void check_grid(const RectangleSpec& g) {
  if (g.nM < 1 || g.na < 1) throw Error(ErrorCode::InvalidArgument, "grid counts must be >= 1");
  if (g.M_max < g.M_min || g.a_max < g.a_min) {
    throw Error(ErrorCode::InvalidArgument, "grid ranges must satisfy min <= max");
  }
}

struct NodeJacobian {
  Vec<2> value;
  Mat<2> J;
};

// Evaluates map and Jacobian at a node, or nothing if the node is outside the
// admissible set (including its finite-difference stencil).
std::optional<NodeJacobian> evaluate_node(const ObservableMap<2>& map, double Lambda, double M, double a,
                                          const StepSpec& step) {
  if (!(M > 0.0) || !(9.0 * Lambda * M * M < 1.0)) return std::nullopt;
  try {
    const Vec<2> x(M, a);
    return NodeJacobian{map(x), numeric_jacobian<2>(map, x, step)};
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

StabilityConstants stability_constants(const ObservableMap<2>& map, double Lambda, const RectangleSpec& grid,
                                       const StepSpec& step, Execution exec) {
  check_grid(grid);
  const auto count = static_cast<std::size_t>(grid.node_count());
  std::vector<std::optional<NodeJacobian>> nodes(count);
  for_each_index(exec, count, [&](std::size_t k) {
    const int i = static_cast<int>(k) / grid.na;
    const int j = static_cast<int>(k) % grid.na;
    nodes[k] = evaluate_node(map, Lambda, grid.M_at(i), grid.a_at(j), step);
  });

  StabilityConstants out;
  out.c_star = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    if (!nodes[k]) {
      ++out.nodes_filtered;
      continue;
    }
    ++out.nodes_used;
    const Mat<2>& J = nodes[k]->J;
    const double det = std::abs(J.determinant());
    const double norm = Eigen::JacobiSVD<Mat<2>>(J).singularValues()(0);
    if (det < out.c_star) {
      out.c_star = det;
      out.worst_M = grid.M_at(static_cast<int>(k) / grid.na);
      out.worst_a = grid.a_at(static_cast<int>(k) % grid.na);
    }
    out.L_star = std::max(out.L_star, norm);
  }
  if (out.nodes_used == 0) {
    throw Error(ErrorCode::EmptyRegion, "no admissible grid node after filtering");
  }
  out.C_star = out.L_star / out.c_star;
  return out;
}

PMatrixReport p_matrix_rectangle_scan(const RectangleSpec& rect, double Lambda, int ell, int n,
                                      Execution exec, double collision_tolerance) {
  check_grid(rect);
  const ObservableMap<2> map = two_parameter_map(Lambda, Resolution::mode(n, ell));
  const auto count = static_cast<std::size_t>(rect.node_count());

  std::vector<std::optional<NodeJacobian>> evals(count);
  for_each_index(exec, count, [&](std::size_t k) {
    const int i = static_cast<int>(k) / rect.na;
    const int j = static_cast<int>(k) % rect.na;
    evals[k] = evaluate_node(map, Lambda, rect.M_at(i), rect.a_at(j), StepSpec{});
  });

  PMatrixReport report;
  report.min_minus_dU_dM = std::numeric_limits<double>::infinity();
  report.min_dV_da = std::numeric_limits<double>::infinity();
  report.min_minus_det = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < count; ++k) {
    if (!evals[k]) {
      ++report.nodes_filtered;
      continue;
    }
    const Mat<2>& J = evals[k]->J;
    PMatrixNode node;
    node.M = rect.M_at(static_cast<int>(k) / rect.na);
    node.a = rect.a_at(static_cast<int>(k) % rect.na);
    node.U = evals[k]->value[0];
    node.V = evals[k]->value[1];
    node.minus_dU_dM = -J(0, 0);
    node.dV_da = J(1, 1);
    node.minus_det = -J.determinant();
    node.ok = node.minus_dU_dM > 0.0 && node.dV_da > 0.0 && node.minus_det > 0.0;
    report.min_minus_dU_dM = std::min(report.min_minus_dU_dM, node.minus_dU_dM);
    report.min_dV_da = std::min(report.min_dV_da, node.dV_da);
    report.min_minus_det = std::min(report.min_minus_det, node.minus_det);
    report.nodes.push_back(node);
  }
  report.truncated = report.nodes_filtered > 0;
  if (report.nodes.empty()) {
    throw Error(ErrorCode::EmptyRegion, "no admissible node in the rectangle");
  }
  report.signs_pass = std::all_of(report.nodes.begin(), report.nodes.end(),
                                  [](const PMatrixNode& nd) { return nd.ok; });

  // Pairwise probe: min over j > i of max(|dU|, |dV|), one slot per i.
  const std::size_t m = report.nodes.size();
  std::vector<double> nearest(m, std::numeric_limits<double>::infinity());
  for_each_index(exec, m, [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = i + 1; j < m; ++j) {
      const double d = std::max(std::abs(report.nodes[i].U - report.nodes[j].U),
                                std::abs(report.nodes[i].V - report.nodes[j].V));
      best = std::min(best, d);
    }
    nearest[i] = best;
  });
  report.min_separation = *std::min_element(nearest.begin(), nearest.end());
  report.collision_found = report.min_separation < collision_tolerance;
  report.pass = report.signs_pass && !report.collision_found;
  return report;
}

}  // namespace kdsqnm
