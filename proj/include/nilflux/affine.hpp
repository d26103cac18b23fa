#ifndef NILFLUX_AFFINE_HPP
#define NILFLUX_AFFINE_HPP

#include "nilflux/linalg.hpp"

#include <cstddef>

namespace nilflux {

/// Exact affine map x |-> A x + b on rational n-space.
class AffineMap {
public:
    AffineMap(RationalMatrix linear, RationalVector translation);
    static AffineMap identity(std::size_t n);
    static AffineMap translation(RationalVector b);

    std::size_t dimension() const { return translation_.size(); }
    const RationalMatrix& linear() const { return linear_; }
    const RationalVector& translation() const { return translation_; }

    RationalVector apply(const RationalVector& point) const;

    /// this after other: (this.compose(other))(x) = this(other(x)).
    AffineMap compose(const AffineMap& other) const;
    /// Exact inverse; throws SingularMap when the linear part is singular.
    AffineMap inverse() const;
    /// Integer power (negative powers go through the inverse).
    AffineMap power(long e) const;

    bool is_identity() const;
    /// (A - I) nilpotent.
    bool is_unipotent() const;

    friend bool operator==(const AffineMap& a, const AffineMap& b) {
        return a.linear_ == b.linear_ && a.translation_ == b.translation_;
    }
    friend bool operator!=(const AffineMap& a, const AffineMap& b) { return !(a == b); }

    /// Deterministic flattening (row-major linear part, then translation);
    /// used as an ordering key.
    RationalVector flatten() const;

private:
    RationalMatrix linear_;
    RationalVector translation_;
};

/// Index such that N^k = 0, or nullopt when N is not nilpotent.
std::optional<int> nilpotency_index(const RationalMatrix& n);

} // namespace nilflux

#endif
