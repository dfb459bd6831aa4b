#include "normgeo/norms.hpp"

#include "normgeo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace normgeo {

std::string to_string(NormKind kind) {
    switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
    case NormKind::GroupL2: return "group";
    }
    return "unknown";
}

GroupPartition::GroupPartition(std::vector<std::vector<Index>> groups) : groups_(std::move(groups)) {
    if (groups_.empty()) throw InputError("group partition must contain at least one group");
    Index total = 0;
    for (const auto& g : groups_) {
        if (g.empty()) throw InputError("group partition contains an empty group");
        total += static_cast<Index>(g.size());
        m_ = std::max<Index>(m_, static_cast<Index>(g.size()));
    }
    p_ = total;
    std::vector<char> seen(static_cast<std::size_t>(p_), 0);
    for (const auto& g : groups_) {
        for (Index i : g) {
            if (i < 0 || i >= p_)
                throw InputError("group index " + std::to_string(i) + " outside [0, " +
                                 std::to_string(p_) + ")");
            if (seen[static_cast<std::size_t>(i)])
                throw InputError("group index " + std::to_string(i) + " appears twice");
            seen[static_cast<std::size_t>(i)] = 1;
        }
    }
}

GroupPartition GroupPartition::contiguous(Index p, Index size) {
    if (p < 1 || size < 1) throw InputError("contiguous partition needs p >= 1 and size >= 1");
    std::vector<std::vector<Index>> groups;
    for (Index start = 0; start < p; start += size) {
        std::vector<Index> g;
        for (Index i = start; i < std::min(p, start + size); ++i) g.push_back(i);
        groups.push_back(std::move(g));
    }
    return GroupPartition(std::move(groups));
}

Norm Norm::l1(Index p) {
    if (p < 1) throw InputError("norm dimension must be >= 1");
    return Norm(NormKind::L1, p, std::nullopt);
}
Norm Norm::l2(Index p) {
    if (p < 1) throw InputError("norm dimension must be >= 1");
    return Norm(NormKind::L2, p, std::nullopt);
}
Norm Norm::linf(Index p) {
    if (p < 1) throw InputError("norm dimension must be >= 1");
    return Norm(NormKind::Linf, p, std::nullopt);
}
Norm Norm::group(GroupPartition partition) {
    const Index p = partition.dim();
    return Norm(NormKind::GroupL2, p, std::move(partition));
}

void Norm::check_dim(const Vector& u) const {
    if (u.size() != p_)
        throw InputError("dimension mismatch: norm on R^" + std::to_string(p_) +
                         " applied to a vector of length " + std::to_string(u.size()));
}

namespace {

template <class F>
void for_each_block(const GroupPartition& part, const Vector& u, F&& f) {
    Vector block;
    for (std::size_t t = 0; t < part.groups().size(); ++t) {
        const auto& g = part.groups()[t];
        block.resize(static_cast<Index>(g.size()));
        for (std::size_t k = 0; k < g.size(); ++k) block[static_cast<Index>(k)] = u[g[k]];
        f(g, block);
    }
}

}  // namespace

double Norm::value(const Vector& u) const {
    check_dim(u);
    switch (kind_) {
    case NormKind::L1: return u.lpNorm<1>();
    case NormKind::L2: return u.norm();
    case NormKind::Linf: return u.size() == 0 ? 0.0 : u.lpNorm<Eigen::Infinity>();
    case NormKind::GroupL2: {
        double s = 0.0;
        for_each_block(*partition_, u, [&](const auto&, const Vector& b) { s += b.norm(); });
        return s;
    }
    }
    return 0.0;
}

double Norm::dual_value(const Vector& v) const {
    check_dim(v);
    switch (kind_) {
    case NormKind::L1: return v.lpNorm<Eigen::Infinity>();
    case NormKind::L2: return v.norm();
    case NormKind::Linf: return v.lpNorm<1>();
    case NormKind::GroupL2: {
        double m = 0.0;
        for_each_block(*partition_, v, [&](const auto&, const Vector& b) { m = std::max(m, b.norm()); });
        return m;
    }
    }
    return 0.0;
}

Vector Norm::subgradient(const Vector& u) const {
    check_dim(u);
    Vector g = Vector::Zero(u.size());
    switch (kind_) {
    case NormKind::L1:
        for (Index i = 0; i < u.size(); ++i) g[i] = u[i] > 0.0 ? 1.0 : (u[i] < 0.0 ? -1.0 : 0.0);
        break;
    case NormKind::L2: {
        const double r = u.norm();
        if (r > 0.0) g = u / r;
        break;
    }
    case NormKind::Linf: {
        const double m = u.lpNorm<Eigen::Infinity>();
        if (m == 0.0) break;
        Index ties = 0;
        for (Index i = 0; i < u.size(); ++i) ties += std::abs(u[i]) == m ? 1 : 0;
        for (Index i = 0; i < u.size(); ++i)
            if (std::abs(u[i]) == m) g[i] = (u[i] > 0.0 ? 1.0 : -1.0) / static_cast<double>(ties);
        break;
    }
    case NormKind::GroupL2:
        for_each_block(*partition_, u, [&](const auto& idx, const Vector& b) {
            const double r = b.norm();
            if (r == 0.0) return;
            for (std::size_t k = 0; k < idx.size(); ++k) g[idx[k]] = b[static_cast<Index>(k)] / r;
        });
        break;
    }
    return g;
}

Vector project_l1_ball(const Vector& x, double radius) {
    if (radius < 0.0) throw InputError("l1-ball radius must be nonnegative");
    if (x.lpNorm<1>() <= radius) return x;
    if (radius == 0.0) return Vector::Zero(x.size());
    std::vector<double> a(static_cast<std::size_t>(x.size()));
    for (Index i = 0; i < x.size(); ++i) a[static_cast<std::size_t>(i)] = std::abs(x[i]);
    std::sort(a.begin(), a.end(), std::greater<>());
    double cumsum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        cumsum += a[j];
        const double cand = (cumsum - radius) / static_cast<double>(j + 1);
        if (a[j] - cand > 0.0) theta = cand;
    }
    Vector out(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        const double mag = std::max(std::abs(x[i]) - theta, 0.0);
        out[i] = x[i] >= 0.0 ? mag : -mag;
    }
    return out;
}

Vector Norm::prox(const Vector& x, double t) const {
    check_dim(x);
    if (!(t > 0.0) || !std::isfinite(t)) throw InputError("prox step must be a positive finite number");
    Vector v(x.size());
    switch (kind_) {
    case NormKind::L1:
        for (Index i = 0; i < x.size(); ++i) {
            const double mag = std::max(std::abs(x[i]) - t, 0.0);
            v[i] = x[i] >= 0.0 ? mag : -mag;
        }
        break;
    case NormKind::L2: {
        const double r = x.norm();
        v = r > t ? Vector((1.0 - t / r) * x) : Vector::Zero(x.size());
        break;
    }
    case NormKind::Linf:
        // Moreau: prox_{t||.||_inf}(x) = x - P_{t B_1}(x).
        v = x - project_l1_ball(x, t);
        break;
    case NormKind::GroupL2:
        v.setZero();
        for_each_block(*partition_, x, [&](const auto& idx, const Vector& b) {
            const double r = b.norm();
            if (r <= t) return;
            const double shrink = 1.0 - t / r;
            for (std::size_t k = 0; k < idx.size(); ++k) v[idx[k]] = shrink * b[static_cast<Index>(k)];
        });
        break;
    }
    return v;
}

std::string Norm::describe() const {
    std::ostringstream os;
    os << to_string(kind_) << "(p=" << p_;
    if (partition_) os << ", T=" << partition_->count() << ", m=" << partition_->max_size();
    os << ")";
    return os.str();
}

SupportSpec support_of(const Norm& norm, const Vector& theta) {
    SupportSpec s;
    for (Index i = 0; i < theta.size(); ++i) s.s += theta[i] != 0.0 ? 1 : 0;
    if (norm.kind() == NormKind::GroupL2) {
        for (const auto& g : norm.partition()->groups()) {
            bool active = false;
            for (Index i : g) active = active || theta[i] != 0.0;
            s.s_groups += active ? 1 : 0;
        }
    }
    return s;
}

std::optional<double> compat_bound(const Norm& norm, const SupportSpec& support) {
    switch (norm.kind()) {
    case NormKind::L1:
        if (support.s < 0 || support.s > norm.dim())
            throw InputError("sparsity s=" + std::to_string(support.s) + " outside [0, p]");
        return 4.0 * std::sqrt(static_cast<double>(support.s));
    case NormKind::GroupL2:
        if (support.s_groups < 0 || support.s_groups > norm.partition()->count())
            throw InputError("active group count s_G=" + std::to_string(support.s_groups) +
                             " outside [0, T]");
        return 4.0 * std::sqrt(static_cast<double>(support.s_groups));
    case NormKind::L2: return 1.0;
    case NormKind::Linf: return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace normgeo
