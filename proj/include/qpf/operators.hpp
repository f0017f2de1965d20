#pragma once
// Linear theory around U_eps: spectral splitting sigma0/sigma1/sigma2, the
// projection identities, the 2q x 2q block family Lambda_eps^(k'), and
// numeric inverse-bound checks for the truncated L_eps.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qpf/asymptotics.hpp"
#include "qpf/field.hpp"
#include "qpf/linalg.hpp"

namespace qpf {

enum class Region { S0, S1, S2 };

struct SplitLabels {
  const LatticeAtlas* atlas = nullptr;
  double epsilon = 0, C = 0, delta = 0, delta1 = 0;
  std::vector<Region> region;  // per site
  std::vector<int> disc;       // S2 only: disc index j in 0..2q-1, else -1
};

SplitLabels classify_spectrum(const LatticeAtlas& atlas, double epsilon,
                              double C);

// classify an arbitrary plane point with the same geometric rules
Region classify_point(const SplitLabels& labels, double x, double y);

struct Violation {
  std::string kind;  // which emptiness statement failed
  int site;          // shifted source site
  double x, y;       // landing point
};

// shift-emptiness checks behind Lemma "prop Proj": sigma1 + (2-sums) misses
// sigma1 and sigma2; sigma2 + (2- or 4-sums) misses sigma1
std::vector<Violation> check_disjointness(const SplitLabels& labels);

SpectralField project(const SpectralField& f, const SplitLabels& labels,
                      Region r);
// restriction to one disc sigma_{2,j}
SpectralField project_disc(const SpectralField& f, const SplitLabels& labels,
                           int j);

// P_{2,j}(a u) for sigma2-supported u via the explicit coefficient formula
// (3 { u^(k) + u^(k - 2 k_j) + sum_{l != j, j+q} 2 u^(k + k_l - k_j) })
SpectralField apply_P2a(const SpectralField& u, const SplitLabels& labels);

struct SectorPoint {
  double x = 0, y = 0;  // offset k' with |k'| <= delta1, arg in [-pi/2q, pi/2q)
};

// deterministic radial-angular grid of the Sigma_1 sector, count points
std::vector<SectorPoint> sector_grid(int q, double delta1, int count);

struct BlockMatrix {
  int q = 0;
  SectorPoint kprime;
  double epsilon = 0;
  std::vector<double> beta;  // beta_j(k') = (2 k_j . k' + |k'|^2)^2
  Matrix mat;                // Lambda0 + eps^2 Lambda1, symmetric 2q x 2q
};

// the constant coupling matrix Lambda1, built from the apply_P2a coefficient
// rule (3 on j and j +- q, 6 elsewhere)
Matrix lambda1_matrix(int q);

BlockMatrix assemble_block(int q, const SectorPoint& kprime, double epsilon);

// sorted eigenvalues by cyclic Jacobi
std::vector<double> block_eigenvalues(const BlockMatrix& block);

// characteristic-polynomial oracle for small blocks (bisection on
// det(A - mu I) sign changes); independent of the Jacobi path
std::vector<double> charpoly_eigenvalues(const Matrix& A);

// dense truncated L_eps = (1+Delta)^2 - lambda_eps + 3 U_eps^2, full
// coefficient space over the atlas
Matrix assemble_L_eps(const LatticeAtlas& atlas, double epsilon,
                      const ExpansionBundle& bundle);
// restriction to the pi/q-symmetric subspace in an orbit-orthonormal basis
Matrix assemble_L_eps_symmetric(const LatticeAtlas& atlas, double epsilon,
                                const ExpansionBundle& bundle);

struct InverseBoundRow {
  double epsilon;
  double min_abs_eig;  // of the symmetric-subspace restriction
  double scaled;       // min_abs_eig / eps^2
};
std::vector<InverseBoundRow> inverse_bound_sweep(const LatticeAtlas& atlas,
                                                 const ExpansionBundle& bundle,
                                                 const std::vector<double>& eps_list);

struct SchurReduction {
  std::vector<int> idx0, idx1, idx2;  // site indices per region
  Matrix X;                   // (n0+n1) x n2 map: [U0;U1] = X U2 + rhs01
  std::vector<double> rhs01;  // block solve applied to (P0+P1) f
};

// eliminate the E0/E1 blocks of L_eps U = f by a direct solve
SchurReduction schur_reduce(const LatticeAtlas& atlas, const SplitLabels& labels,
                            double epsilon, const ExpansionBundle& bundle,
                            const SpectralField& f);

}  // namespace qpf
