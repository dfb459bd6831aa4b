#pragma once

#include "normgeo/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace normgeo {

enum class NormKind { L1, L2, Linf, GroupL2 };

std::string to_string(NormKind kind);

/// Disjoint groups covering {0, ..., p-1}.
class GroupPartition {
public:
    /// Validates that `groups` is a partition of {0..p-1} with nonempty
    /// groups; p is inferred as the total number of indices.
    explicit GroupPartition(std::vector<std::vector<Index>> groups);

    /// Consecutive groups of `size` indices (the last one may be shorter).
    static GroupPartition contiguous(Index p, Index size);

    const std::vector<std::vector<Index>>& groups() const noexcept { return groups_; }
    Index dim() const noexcept { return p_; }
    Index count() const noexcept { return static_cast<Index>(groups_.size()); }
    Index max_size() const noexcept { return m_; }

private:
    std::vector<std::vector<Index>> groups_;
    Index p_ = 0;
    Index m_ = 0;
};

/// A norm on R^p in closed form. For GroupL2 the norm is sum_t ||u_{G_t}||_2.
class Norm {
public:
    static Norm l1(Index p);
    static Norm l2(Index p);
    static Norm linf(Index p);
    static Norm group(GroupPartition partition);

    NormKind kind() const noexcept { return kind_; }
    Index dim() const noexcept { return p_; }
    const std::optional<GroupPartition>& partition() const noexcept { return partition_; }

    double value(const Vector& u) const;
    /// sup_{value(x) <= 1} <x, v>.
    double dual_value(const Vector& v) const;
    /// Minimal-norm element of the subdifferential at u.
    Vector subgradient(const Vector& u) const;
    /// argmin_v 1/2 ||v - x||^2 + t * value(v).
    Vector prox(const Vector& x, double t) const;

    std::string describe() const;

private:
    Norm(NormKind kind, Index p, std::optional<GroupPartition> partition)
        : kind_(kind), p_(p), partition_(std::move(partition)) {}
    void check_dim(const Vector& u) const;

    NormKind kind_;
    Index p_;
    std::optional<GroupPartition> partition_;
};

/// Euclidean projection onto {x : ||x||_1 <= radius}.
Vector project_l1_ball(const Vector& x, double radius);

/// Sparsity description for the analytic compatibility constant.
struct SupportSpec {
    Index s = 0;        // nonzero count (L1)
    Index s_groups = 0; // active group count (GroupL2)
};

/// Support of a parameter vector in the norm's own terms.
SupportSpec support_of(const Norm& norm, const Vector& theta);

/// Upper bound on sup_{u in E_r} R(u)/||u||_2 for decomposable norms:
/// 4 sqrt(s) (L1), 4 sqrt(s_G) (group), 1 (L2). Empty for Linf.
std::optional<double> compat_bound(const Norm& norm, const SupportSpec& support);

}  // namespace normgeo
