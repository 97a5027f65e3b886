#include "bolab/field.hpp"

#include <algorithm>
#include <numbers>

namespace bolab {

Grid Grid::make(double half_length, std::size_t n) {
    if (!std::isfinite(half_length) || half_length <= 0.0)
        throw std::invalid_argument("grid half length must be finite and positive");
    if (n < 8) throw std::invalid_argument("grid needs at least 8 points");
    if (n % 2 != 0) throw std::invalid_argument("grid point count must be even");

    auto d = std::make_shared<Data>();
    d->L = half_length;
    d->n = n;
    d->h = 2.0 * half_length / static_cast<double>(n);
    d->x.resize(n);
    d->xi.resize(n);
    const long half = static_cast<long>(n / 2);
    for (std::size_t i = 0; i < n; ++i) {
        d->x[i] = -half_length + static_cast<double>(i) * d->h;
        long k = static_cast<long>(i) < half ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
        d->xi[i] = std::numbers::pi * static_cast<double>(k) / half_length;
    }
    Grid g;
    g.data_ = std::move(d);
    return g;
}

RealField real_part(const ComplexField& f) {
    RealField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].real();
    return out;
}

RealField imag_part(const ComplexField& f) {
    RealField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].imag();
    return out;
}

ComplexField to_complex(const RealField& f) {
    ComplexField out(f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i];
    return out;
}

double max_abs(const RealField& f) {
    double m = 0.0;
    for (double v : f) m = std::max(m, std::abs(v));
    return m;
}

double max_abs(const ComplexField& f) {
    double m = 0.0;
    for (const cplx& v : f) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace bolab
