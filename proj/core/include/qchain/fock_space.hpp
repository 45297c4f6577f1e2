// fock_space.hpp - Truncated multi-mode Fock bases and quadratic bosonic Hamiltonians
//
// Basis index of |n_0, n_1, ..., n_{M-1}> is sum_k n_k d^(M-1-k): mode 0 is the
// most significant digit, so a_0 = a (x) 1 (x) ... (x) 1.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qchain/linalg.hpp"

namespace qchain::fock {

class ModeSpace {
public:
    ModeSpace(std::size_t modes, std::size_t levels);

    std::size_t modes() const { return modes_; }
    std::size_t levels() const { return levels_; }
    std::size_t dim() const { return dim_; }

    std::size_t occupation(std::size_t index, std::size_t mode) const
    {
        return (index / strides_[mode]) % levels_;
    }
    std::size_t stride(std::size_t mode) const { return strides_[mode]; }
    std::size_t total_excitations(std::size_t index) const;

    /// Truncated annihilation operator of one mode, sqrt(n)|n-1><n|.
    SparseC lowering(std::size_t mode) const;
    SparseC number(std::size_t mode) const;

private:
    std::size_t modes_;
    std::size_t levels_;
    std::size_t dim_;
    std::vector<std::size_t> strides_;
};

/// Quadratic, particle-hole symmetric bosonic Hamiltonian:
///   sum w_i a_i^dag a_i + sum c (a_i^dag a_j + h.c.) + sum c' (a_i^dag a_j^dag + h.c.)
/// evaluated directly on the truncated occupation basis.
class QuadraticHamiltonian {
public:
    enum class Kind { Number, Hopping, Pairing };
    struct Term {
        Kind kind;
        std::size_t i;
        std::size_t j;
        double coeff;
    };

    void add_number(std::size_t mode, double omega);
    void add_hopping(std::size_t i, std::size_t j, double coeff);
    void add_pairing(std::size_t i, std::size_t j, double coeff);

    const std::vector<Term>& terms() const { return terms_; }

    /// True when no pairing term is present, so total excitation number is conserved.
    bool conserves_number() const;

    SparseR matrix(const ModeSpace& space) const;

    /// Dense restriction to a subset of basis states that is closed under the
    /// Hamiltonian (e.g. one charge sector). `local` maps global -> local index
    /// (entries outside the subset are ignored).
    RMatrix block(const ModeSpace& space,
                  std::span<const std::size_t> states,
                  std::span<const std::ptrdiff_t> local) const;

private:
    template <class Emit>
    void apply(const ModeSpace& space, std::size_t state, Emit&& emit) const;

    std::vector<Term> terms_;
};

/// Abelian charge that a Hamiltonian conserves: total excitation number
/// (modulus 0) or its parity (modulus 2).
struct ChargeSymmetry {
    std::vector<int> charge; ///< per basis state
    int modulus{0};

    /// Whether charge(a) - charge(b) is zero (mod modulus).
    bool same_sector(std::size_t a, std::size_t b) const;
    /// Canonical sector label of a basis state.
    int sector_of(std::size_t state) const;
};

ChargeSymmetry symmetry_of(const ModeSpace& space, const QuadraticHamiltonian& h);

/// Basis states grouped by sector, in ascending sector label.
std::vector<std::vector<std::size_t>> sectors(const ChargeSymmetry& sym);

/// Diagonal Gibbs state of a single oscillator truncated to `levels` levels.
/// temperature = 0 gives the ground-state projector.
CMatrix truncated_thermal(double omega, double temperature, std::size_t levels);

/// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

} // namespace qchain::fock
