#include "nilflux/affine.hpp"
#include "nilflux/errors.hpp"

namespace nilflux {

AffineMap::AffineMap(RationalMatrix linear, RationalVector translation)
    : linear_(std::move(linear)), translation_(std::move(translation)) {
    if (linear_.size() != translation_.size())
        throw BadDimension("linear part and translation disagree");
    for (const auto& row : linear_)
        if (row.size() != translation_.size())
            throw BadDimension("linear part is not square");
}

AffineMap AffineMap::identity(std::size_t n) {
    return AffineMap(identity_matrix(n), RationalVector(n, Rational(0)));
}

AffineMap AffineMap::translation(RationalVector b) {
    auto n = b.size();
    return AffineMap(identity_matrix(n), std::move(b));
}

RationalVector AffineMap::apply(const RationalVector& point) const {
    RationalVector out = mat_vec(linear_, point);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += translation_[i];
    return out;
}

AffineMap AffineMap::compose(const AffineMap& other) const {
    if (dimension() != other.dimension()) throw BadDimension("composing maps of different dimension");
    RationalMatrix a = mat_mul(linear_, other.linear_);
    RationalVector b = mat_vec(linear_, other.translation_);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += translation_[i];
    return AffineMap(std::move(a), std::move(b));
}

AffineMap AffineMap::inverse() const {
    auto inv = invert(linear_);
    if (!inv) throw SingularMap("affine map has singular linear part");
    RationalVector b = mat_vec(*inv, translation_);
    for (auto& x : b) x = -x;
    return AffineMap(std::move(*inv), std::move(b));
}

AffineMap AffineMap::power(long e) const {
    AffineMap base = e >= 0 ? *this : inverse();
    long reps = e >= 0 ? e : -e;
    AffineMap out = identity(dimension());
    for (long i = 0; i < reps; ++i) out = out.compose(base);
    return out;
}

bool AffineMap::is_identity() const {
    return *this == identity(dimension());
}

bool AffineMap::is_unipotent() const {
    std::size_t n = dimension();
    RationalMatrix m = linear_;
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= 1;
    return nilpotency_index(m).has_value();
}

RationalVector AffineMap::flatten() const {
    RationalVector v;
    for (const auto& row : linear_) v.insert(v.end(), row.begin(), row.end());
    v.insert(v.end(), translation_.begin(), translation_.end());
    return v;
}

std::optional<int> nilpotency_index(const RationalMatrix& n) {
    std::size_t dim = n.size();
    if (dim == 0) return 1;
    auto is_zero = [](const RationalMatrix& m) {
        for (const auto& row : m)
            for (const auto& x : row)
                if (x != 0) return false;
        return true;
    };
    // A nilpotent matrix of size dim vanishes by the dim-th power.
    RationalMatrix p = n;
    for (std::size_t k = 1; k <= dim; ++k) {
        if (is_zero(p)) return static_cast<int>(k);
        if (k < dim) p = mat_mul(p, n);
    }
    return std::nullopt;
}

} // namespace nilflux
