// Siegel upper half-space H_g, its bounded (disc) realization, and the
// symplectic group actions on both charts.
//
// Conventions.  The symplectic form on R^{2g} is
//     omega(u, v) = u^T [[0, -I], [I, 0]] v,
// coordinates ordered (x_1..x_g, y_1..y_g).  A real 2g x 2g matrix
// M = [[A, B], [C, D]] is symplectic when M^T J M = J for that J.  The two
// charts are related by the Cayley map  tau = (i - Omega)(i + Omega)^{-1},
// which sends H_g onto the open disc { tau symmetric, 1 - tau* tau > 0 };
// the closed disc adds the degenerate boundary (real Omega, including the
// point tau = -1 "at Omega = infinity").
#pragma once

#include "thetaquant/errors.hpp"
#include "thetaquant/types.hpp"

namespace thetaquant {

// [[0, -I], [I, 0]]: the Gram matrix of omega.
RMat standard_form(int g);

double omega_form(const RVec& u, const RVec& v);

bool is_symplectic(const RMat& m, double tol = 1e-10);
void require_symplectic(const RMat& m, double tol = 1e-10);

// Membership with margin: Omega symmetric and Im Omega positive definite.
bool in_siegel(const Mat& omega_mat, double tol = 1e-12);

// Closed disc: tau symmetric and 1 - tau* tau positive semidefinite
// (smallest eigenvalue >= -tol).
bool in_disc(const Mat& tau, double tol = 1e-12);

// tau = (i - Omega)(i + Omega)^{-1}; the two factors commute.
Mat cayley(const Mat& omega_mat);

// Omega = i(1 - tau)(1 + tau)^{-1}; throws ChartSingular when det(1+tau) = 0.
Mat cayley_inverse(const Mat& tau);

// Moebius action (A Omega + B)(C Omega + D)^{-1} on H_g.
Mat sp_act_H(const RMat& m, const Mat& omega_mat);

// The same action transported to the closed disc, computed directly in the
// tau chart so boundary points (real Omega, tau = -1) need no excursion
// through infinity:  tau' = (V tau - conj(W)) (conj(V) - W tau)^{-1}  with
// V = ((A+D) + i(B-C))/2,  W = ((A-D) + i(B+C))/2.
Mat sp_act_D(const RMat& m, const Mat& tau);

// Compatible complex structure at Omega in block form
//   [[-O1 O2^{-1},  O1 O2^{-1} O1 + O2], [-O2^{-1},  O2^{-1} O1]],
// Omega = O1 + i O2.  Satisfies J^2 = -1.
RMat complex_structure(const Mat& omega_mat);

// Riemannian metric gamma(u, v) = omega(u, J_Omega v); positive definite.
RMat siegel_metric(const Mat& omega_mat);

}  // namespace thetaquant
