// fock_space.cpp - Truncated Fock bases and quadratic Hamiltonians on them

#include "qchain/fock_space.hpp"

#include <cmath>
#include <map>

#include "qchain/errors.hpp"

namespace qchain::fock {

ModeSpace::ModeSpace(std::size_t modes, std::size_t levels)
    : modes_(modes)
    , levels_(levels)
    , dim_(1)
    , strides_(modes, 1)
{
    if (modes == 0) throw DomainError("ModeSpace needs at least one mode");
    if (levels < 2) throw DomainError("ModeSpace needs at least two levels per mode");
    for (std::size_t k = modes; k-- > 0;) {
        strides_[k] = dim_;
        if (dim_ > (std::size_t{1} << 40) / levels) throw DimensionBudgetError("Fock space too large");
        dim_ *= levels;
    }
}

std::size_t ModeSpace::total_excitations(std::size_t index) const
{
    std::size_t total = 0;
    for (std::size_t k = 0; k < modes_; ++k) total += occupation(index, k);
    return total;
}

SparseC ModeSpace::lowering(std::size_t mode) const
{
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(dim_);
    for (std::size_t s = 0; s < dim_; ++s) {
        const std::size_t n = occupation(s, mode);
        if (n == 0) continue;
        trips.emplace_back(static_cast<int>(s - strides_[mode]), static_cast<int>(s),
                           std::sqrt(static_cast<double>(n)));
    }
    SparseC out(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

SparseC ModeSpace::number(std::size_t mode) const
{
    std::vector<Eigen::Triplet<cplx>> trips;
    for (std::size_t s = 0; s < dim_; ++s) {
        const std::size_t n = occupation(s, mode);
        if (n != 0) trips.emplace_back(static_cast<int>(s), static_cast<int>(s), static_cast<double>(n));
    }
    SparseC out(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(dim_));
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

void QuadraticHamiltonian::add_number(std::size_t mode, double omega)
{
    terms_.push_back({Kind::Number, mode, mode, omega});
}

void QuadraticHamiltonian::add_hopping(std::size_t i, std::size_t j, double coeff)
{
    if (i == j) throw DomainError("hopping term needs two distinct modes");
    terms_.push_back({Kind::Hopping, i, j, coeff});
}

void QuadraticHamiltonian::add_pairing(std::size_t i, std::size_t j, double coeff)
{
    if (i == j) throw DomainError("pairing term needs two distinct modes");
    terms_.push_back({Kind::Pairing, i, j, coeff});
}

bool QuadraticHamiltonian::conserves_number() const
{
    for (const auto& t : terms_) {
        if (t.kind == Kind::Pairing && t.coeff != 0.0) return false;
    }
    return true;
}

// Calls emit(target, value) for every <target|H|state> contribution.
template <class Emit>
void QuadraticHamiltonian::apply(const ModeSpace& space, std::size_t state, Emit&& emit) const
{
    const std::size_t top = space.levels() - 1;
    for (const auto& t : terms_) {
        if (t.coeff == 0.0) continue;
        const std::size_t ni = space.occupation(state, t.i);
        const std::size_t nj = space.occupation(state, t.j);
        const std::size_t si = space.stride(t.i);
        const std::size_t sj = space.stride(t.j);
        switch (t.kind) {
        case Kind::Number:
            if (ni != 0) emit(state, t.coeff * static_cast<double>(ni));
            break;
        case Kind::Hopping:
            // a_i^dag a_j
            if (nj > 0 && ni < top) {
                emit(state + si - sj, t.coeff * std::sqrt(static_cast<double>((ni + 1) * nj)));
            }
            // a_j^dag a_i
            if (ni > 0 && nj < top) {
                emit(state + sj - si, t.coeff * std::sqrt(static_cast<double>((nj + 1) * ni)));
            }
            break;
        case Kind::Pairing:
            // a_i^dag a_j^dag
            if (ni < top && nj < top) {
                emit(state + si + sj, t.coeff * std::sqrt(static_cast<double>((ni + 1) * (nj + 1))));
            }
            // a_j a_i
            if (ni > 0 && nj > 0) {
                emit(state - si - sj, t.coeff * std::sqrt(static_cast<double>(ni * nj)));
            }
            break;
        }
    }
}

SparseR QuadraticHamiltonian::matrix(const ModeSpace& space) const
{
    std::vector<Eigen::Triplet<double>> trips;
    for (std::size_t s = 0; s < space.dim(); ++s) {
        apply(space, s, [&](std::size_t target, double value) {
            trips.emplace_back(static_cast<int>(target), static_cast<int>(s), value);
        });
    }
    const auto n = static_cast<Eigen::Index>(space.dim());
    SparseR out(n, n);
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
}

RMatrix QuadraticHamiltonian::block(const ModeSpace& space,
                                    std::span<const std::size_t> states,
                                    std::span<const std::ptrdiff_t> local) const
{
    const auto n = static_cast<Eigen::Index>(states.size());
    RMatrix out = RMatrix::Zero(n, n);
    for (Eigen::Index col = 0; col < n; ++col) {
        apply(space, states[static_cast<std::size_t>(col)], [&](std::size_t target, double value) {
            const std::ptrdiff_t row = local[target];
            if (row < 0) throw DomainError("basis subset is not closed under the Hamiltonian");
            out(row, col) += value;
        });
    }
    return out;
}

bool ChargeSymmetry::same_sector(std::size_t a, std::size_t b) const
{
    const int diff = charge[a] - charge[b];
    return modulus == 0 ? diff == 0 : diff % modulus == 0;
}

int ChargeSymmetry::sector_of(std::size_t state) const
{
    return modulus == 0 ? charge[state] : charge[state] % modulus;
}

ChargeSymmetry symmetry_of(const ModeSpace& space, const QuadraticHamiltonian& h)
{
    ChargeSymmetry sym;
    sym.modulus = h.conserves_number() ? 0 : 2;
    sym.charge.resize(space.dim());
    for (std::size_t s = 0; s < space.dim(); ++s) {
        sym.charge[s] = static_cast<int>(space.total_excitations(s));
    }
    return sym;
}

std::vector<std::vector<std::size_t>> sectors(const ChargeSymmetry& sym)
{
    std::map<int, std::vector<std::size_t>> grouped;
    for (std::size_t s = 0; s < sym.charge.size(); ++s) grouped[sym.sector_of(s)].push_back(s);
    std::vector<std::vector<std::size_t>> out;
    out.reserve(grouped.size());
    for (auto& [label, states] : grouped) out.push_back(std::move(states));
    return out;
}

CMatrix truncated_thermal(double omega, double temperature, std::size_t levels)
{
    if (levels < 2) throw DomainError("truncated_thermal needs at least two levels");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("frequency must be positive");
    if (!(temperature >= 0.0) || !std::isfinite(temperature)) throw DomainError("temperature must be non-negative");
    RVector pop = RVector::Zero(static_cast<Eigen::Index>(levels));
    pop(0) = 1.0;
    if (temperature > 0.0) {
        const double ratio = std::exp(-omega / temperature);
        for (Eigen::Index n = 1; n < pop.size(); ++n) pop(n) = pop(n - 1) * ratio;
    }
    pop /= pop.sum();
    return pop.cast<cplx>().asDiagonal();
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace qchain::fock
