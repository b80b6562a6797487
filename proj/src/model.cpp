#include "pfdde/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "pfdde/errors.hpp"

namespace pfdde {

namespace {

struct SlotGroup {
    std::vector<Slot> multiset;  // sorted
    std::vector<std::size_t> members;
};

std::vector<std::vector<Slot>> arrangements(std::vector<Slot> sorted) {
    std::vector<std::vector<Slot>> out;
    do {
        out.push_back(sorted);
    } while (std::next_permutation(sorted.begin(), sorted.end()));
    return out;
}

bool group_is_symmetric(const MultilinearStencil& s, const SlotGroup& g) {
    auto arr = arrangements(g.multiset);
    if (arr.size() != g.members.size()) return false;
    const StencilTerm& first = s.terms[g.members.front()];
    std::vector<bool> seen(arr.size(), false);
    for (std::size_t idx : g.members) {
        const StencilTerm& t = s.terms[idx];
        if (!(t.coeff == first.coeff) || t.real != first.real) return false;
        auto it = std::find(arr.begin(), arr.end(), t.slots);
        if (it == arr.end()) return false;
        auto k = static_cast<std::size_t>(it - arr.begin());
        if (seen[k]) return false;
        seen[k] = true;
    }
    return true;
}

std::vector<SlotGroup> group_terms(const MultilinearStencil& s) {
    std::vector<SlotGroup> groups;
    for (std::size_t i = 0; i < s.terms.size(); ++i) {
        std::vector<Slot> key = s.terms[i].slots;
        std::sort(key.begin(), key.end());
        auto it = std::find_if(groups.begin(), groups.end(),
                               [&](const SlotGroup& g) { return g.multiset == key; });
        if (it == groups.end()) {
            groups.push_back({key, {i}});
        } else {
            it->members.push_back(i);
        }
    }
    return groups;
}

}  // namespace

bool is_symmetric(const MultilinearStencil& stencil) {
    for (const auto& g : group_terms(stencil))
        if (!group_is_symmetric(stencil, g)) return false;
    return true;
}

MultilinearStencil symmetrize(const MultilinearStencil& stencil) {
    auto groups = group_terms(stencil);
    bool all_symmetric = std::all_of(groups.begin(), groups.end(), [&](const SlotGroup& g) {
        return group_is_symmetric(stencil, g);
    });
    if (all_symmetric) return stencil;

    MultilinearStencil out;
    out.order = stencil.order;
    for (const auto& g : groups) {
        if (group_is_symmetric(stencil, g)) {
            for (std::size_t idx : g.members) out.terms.push_back(stencil.terms[idx]);
            continue;
        }
        FourierSeries sum = stencil.terms[g.members.front()].coeff;
        bool real = stencil.terms[g.members.front()].real;
        for (std::size_t k = 1; k < g.members.size(); ++k) {
            sum += stencil.terms[g.members[k]].coeff;
            real = real && stencil.terms[g.members[k]].real;
        }
        auto arr = arrangements(g.multiset);
        sum *= 1.0 / static_cast<double>(arr.size());
        for (auto& slots : arr) out.terms.push_back({sum, std::move(slots), real});
    }
    return out;
}

Model::Model(int n, std::optional<double> period, LinearPart linear,
             std::optional<MultilinearStencil> bilinear,
             std::optional<MultilinearStencil> trilinear,
             std::optional<Eigen::VectorXd> equilibrium)
    : n_(n), period_(period), linear_(std::move(linear)) {
    if (n_ < 1) throw ValidationError("model dimension n must be positive");
    if (period_ && !(std::isfinite(*period_) && *period_ > 0.0))
        throw ValidationError("forcing period T must be positive");

    auto& L = linear_;
    if (L.delays.empty()) throw ValidationError("linear part needs at least one delay entry");
    if (L.delays.size() != L.matrices.size())
        throw ValidationError("number of delays and matrices differ");
    std::vector<std::size_t> order(L.delays.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return L.delays[a] < L.delays[b]; });
    std::vector<double> delays;
    std::vector<Eigen::MatrixXd> matrices;
    for (auto i : order) {
        double tau = L.delays[i];
        if (!std::isfinite(tau) || tau < 0.0) throw ValidationError("delays must be finite and >= 0");
        if (!delays.empty() && delays.back() == tau)
            throw ValidationError("duplicate delay " + std::to_string(tau));
        const auto& A = L.matrices[i];
        if (A.rows() != n_ || A.cols() != n_)
            throw ValidationError("linear matrix for delay " + std::to_string(tau) + " is not n x n");
        if (!A.allFinite()) throw ValidationError("linear matrix has non-finite entries");
        delays.push_back(tau);
        matrices.push_back(A);
    }
    L.delays = std::move(delays);
    L.matrices = std::move(matrices);
    const double hmax = L.delays.back();
    if (L.max_delay <= 0.0) {
        L.max_delay = hmax;
    } else if (L.max_delay < hmax) {
        throw ValidationError("max_delay is smaller than the largest linear delay");
    }

    auto prepare = [&](std::optional<MultilinearStencil>& st, int order_expected, const char* name) {
        if (!st) return;
        if (st->terms.empty()) {
            st.reset();
            return;
        }
        st->order = order_expected;
        for (auto& term : st->terms) {
            if (static_cast<int>(term.slots.size()) != order_expected)
                throw ValidationError(std::string(name) + " term must have " +
                                      std::to_string(order_expected) + " slots");
            for (const auto& slot : term.slots) {
                if (!std::isfinite(slot.delay) || slot.delay < 0.0 || slot.delay > L.max_delay)
                    throw ValidationError(std::string(name) + " delay out of range: " +
                                          std::to_string(slot.delay) + " not in [0, " +
                                          std::to_string(L.max_delay) + "]");
                if (slot.component < 0 || slot.component >= n_)
                    throw ValidationError(std::string(name) + " slot component out of range");
            }
            if (term.coeff.dim() != n_)
                throw ValidationError(std::string(name) + " coefficient dimension differs from n");
            if (period_) {
                term.coeff = term.coeff.with_period(period_);
            } else {
                if (term.coeff.max_mode() != 0)
                    throw ValidationError(std::string(name) +
                                          " coefficient has nonzero modes in an autonomous model");
                term.coeff = FourierSeries::constant(term.coeff.coeff(0));
            }
            const double tol = kRealFlagTol * (1.0 + term.coeff.max_abs());
            if (term.real && !term.coeff.is_real(tol))
                throw ValidationError(std::string(name) +
                                      " coefficient flagged real violates c_{-m} = conj(c_m)");
            if (!term.coeff.is_real(tol)) real_ = false;
        }
        st = symmetrize(*st);
    };
    prepare(bilinear, 2, "bilinear");
    prepare(trilinear, 3, "trilinear");
    bilinear_ = std::move(bilinear);
    trilinear_ = std::move(trilinear);

    if (equilibrium) {
        if (equilibrium->size() != n_) throw ValidationError("equilibrium has wrong dimension");
        equilibrium_ = *equilibrium;
    } else {
        equilibrium_ = Eigen::VectorXd::Zero(n_);
    }
}

double Model::forcing_frequency() const {
    return period_ ? 2.0 * std::numbers::pi / *period_ : 0.0;
}

Model Model::with_matrices(std::vector<Eigen::MatrixXd> matrices) const {
    LinearPart L = linear_;
    L.matrices = std::move(matrices);
    return Model(n_, period_, std::move(L), bilinear_, trilinear_, equilibrium_);
}

}  // namespace pfdde
