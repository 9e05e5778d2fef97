// O(N^2) pair-interaction kernels shared by the discrete energies and the
// continuum double integrals.
//
// Two implementations are kept side by side:
//   * pileup::kernels           OpenMP rows, per-row early exit, fixed
//                               reduction tree (bit-identical for any
//                               thread count)
//   * pileup::kernels::reference  straight double loop in (k, j) order,
//                               serial, no cutoff; used by tests and the
//                               benchmark as the ground truth.

#pragma once

#include <span>

namespace pileup::kernels {

enum class PairKernel {
  Wall,    // phi(r) = V(r)
  NegLog,  // phi(r) = -log r
};

/// Sum over i < j of phi(scale * (nodes[j] - nodes[i])).
///
/// `nodes` must be non-decreasing. Any zero gap gives +inf (both kernels are
/// singular at 0); a negative gap is treated the same way. Pairs with
/// scale * distance > cutoff are skipped (use +inf to keep everything;
/// NegLog ignores the cutoff).
double pair_sum(PairKernel kernel, std::span<const double> nodes, double scale,
                double cutoff);

/// Same sum; also writes d(sum)/d(nodes[i]) into `grad` (overwritten,
/// size == nodes.size()). Throws std::domain_error on a non-positive gap.
double pair_sum_gradient(PairKernel kernel, std::span<const double> nodes,
                         double scale, double cutoff, std::span<double> grad);

/// Curvature of the sum along each gap coordinate: curv[k] (k < nodes.size()-1)
/// is the sum over pairs i <= k < j of scale^2 phi''(scale (nodes[j]-nodes[i])),
/// the diagonal of the Hessian after the change of variables to gaps.
void pair_gap_curvature(PairKernel kernel, std::span<const double> nodes,
                        double scale, double cutoff, std::span<double> curv);

namespace reference {

double pair_sum(PairKernel kernel, std::span<const double> nodes, double scale);

double pair_sum_gradient(PairKernel kernel, std::span<const double> nodes,
                         double scale, std::span<double> grad);

void pair_gap_curvature(PairKernel kernel, std::span<const double> nodes,
                        double scale, std::span<double> curv);

}  // namespace reference

/// True iff every consecutive gap is strictly positive and finite.
bool strictly_increasing(std::span<const double> nodes);

}  // namespace pileup::kernels
