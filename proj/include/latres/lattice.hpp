// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "latres/perturbation.hpp"
#include "latres/types.hpp"
#include "latres/window.hpp"

namespace latres {

enum class WeightSign { Plus, Minus };

/// Dirichlet finite section of the free Hamiltonian: block tridiagonal with
/// 2*I_d on the diagonal and -I_d on the first off-diagonals. Hermitian.
CMatrix free_hamiltonian(const LatticeWindow& win);

/// Diagonal weight exp(+-(gamma/2)|n|) (x) I_d. The two signs are inverses.
CMatrix weight_matrix(const LatticeWindow& win, double gamma, WeightSign sign);

/// Diagonal alternating-sign involution (-1)^{|n|} (x) I_d. Conjugation by it
/// swaps the two band edges: S H0 S + H0 = 4 I on the window rows.
CMatrix staggering(const LatticeWindow& win);

/// Finite section of (Gamma1 (x) Lambda1) W (Gamma2 (x) Lambda2); block (n,m)
/// is g1(n) g2(m) * Lambda1 w(n,m) Lambda2. Throws if a stored kernel entry
/// violates the decay bound, naming the offending pair.
CMatrix perturbation_matrix(const PerturbationSpec& spec,
                            const LatticeWindow& win);

/// S V S with S the staggering involution (self-inverse, so conjugation).
CMatrix conjugate_by_staggering(const CMatrix& v, const LatticeWindow& win);

/// Multiplier symbol of the free Hamiltonian: 4 sin^2(alpha/2), range [0,4].
double fourier_symbol(double alpha);

}  // namespace latres
