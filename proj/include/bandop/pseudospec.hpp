#pragma once

// Grid pseudospectra, essential pseudospectra, level sets, Hausdorff
// diagnostics and rank-one perturbation witnesses (p = 2).

#include <functional>
#include <vector>

#include "bandop/norms.hpp"

namespace bandop {

struct Box {
    double re0 = -2, re1 = 2, im0 = -2, im1 = 2;
};

enum class GridKind { plain, essential };
enum class EssentialMethod { mu, limitops, both };

/// values[ix * ny + iy] at lambda = node(ix, iy). The grid stores reciprocal
/// resolvent norms, so the eps-pseudospectrum is {value < eps}.
struct PseudospectrumGrid {
    Box box;
    int nx = 0;
    int ny = 0;
    GridKind kind = GridKind::plain;
    std::vector<double> values;
    std::vector<double> alt_values;  // limit-operator route when both methods ran
    double max_discrepancy = 0;
    int unconverged_nodes = 0;  // nodes whose value is only an upper bound

    cplx node(int ix, int iy) const;
    double value(int ix, int iy) const { return values[static_cast<std::size_t>(ix * ny + iy)]; }
    double dx() const;
    double dy() const;
};

/// Default worker count: BANDOP_JOBS if set, else the hardware concurrency.
unsigned default_jobs();
/// Runs body(0..n-1) on up to `jobs` threads (0 = default_jobs()).
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body);

/// value(lambda) = ||(A - lambda)^-1||^-1.
PseudospectrumGrid pseudospectrum_grid(const BandOperator& a, const Box& box, int nx, int ny, double tol = 1e-6,
                                       unsigned jobs = 0);
/// value(lambda) = mu(A - lambda) (method mu) or the limit-operator minimum
/// (method limitops); `both` fills both arrays and records the largest gap.
PseudospectrumGrid essential_pseudospectrum_grid(const BandOperator& a, const Box& box, int nx, int ny,
                                                 double tol = 1e-6, EssentialMethod method = EssentialMethod::mu,
                                                 unsigned jobs = 0);

struct GridNode {
    int ix = 0;
    int iy = 0;
    friend bool operator==(const GridNode&, const GridNode&) = default;
};

/// Nodes with value < eps.
std::vector<GridNode> level_set(const PseudospectrumGrid& g, double eps);

/// Hausdorff distances between level_set(eps) and {value <= tol}, measured
/// between grid nodes; meaningful up to one cell diagonal.
struct HausdorffReport {
    std::vector<double> distances;  // NaN where undefined
    std::vector<bool> defined;      // false when a set is empty
    double cell_diagonal = 0;
};
HausdorffReport hausdorff_gap(const PseudospectrumGrid& g, const std::vector<double>& eps_list, double tol = 1e-6);

/// Finitely supported unit x with ||(A - lambda) x|| < eps and the rank-one
/// K u = -<u, x> (A - lambda) x, so that (A - lambda + K) x = 0. When only the
/// adjoint is small on some unit y, K = -y (y^H (A - lambda)) kills y from the left.
struct PerturbationWitness {
    cplx lambda;
    double epsilon = 0;
    bool left_sided = false;
    WindowVector u;                // x, or y in the left-sided case
    WindowVector image;            // (A - lambda) x, or (A - lambda)^* y
    Index functional_index = 0;    // position of the largest coordinate of u
    double k_norm = 0;
    Interval verification_window;  // supp u widened by 3w on each side
    double verification_sigma_min = 0;
};

/// Throws PreconditionError unless ||(A - lambda)^-1||^-1 < eps.
PerturbationWitness witness_perturbation(const BandOperator& a, cplx lambda, double eps, double tol = 1e-8);

/// Dense matrix of A - lambda + K on the verification window.
Matrix witness_matrix(const BandOperator& a, const PerturbationWitness& w);

}  // namespace bandop
