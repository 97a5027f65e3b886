#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <vector>

namespace bolab {

using cplx = std::complex<double>;

// Periodic grid on [-L, L) with n collocation points. Copies share the
// sampled point and wavenumber tables.
class Grid {
public:
    Grid() = default;

    static Grid make(double half_length, std::size_t n);

    bool valid() const { return static_cast<bool>(data_); }
    double half_length() const { return data_->L; }
    std::size_t size() const { return data_->n; }
    double spacing() const { return data_->h; }
    double x(std::size_t i) const { return data_->x[i]; }
    double xi(std::size_t k) const { return data_->xi[k]; }
    std::size_t nyquist() const { return data_->n / 2; }
    const std::vector<double>& points() const { return data_->x; }
    const std::vector<double>& wavenumbers() const { return data_->xi; }

    friend bool operator==(const Grid& a, const Grid& b) {
        if (a.data_ == b.data_) return true;
        if (!a.data_ || !b.data_) return false;
        return a.data_->n == b.data_->n && a.data_->L == b.data_->L;
    }

private:
    struct Data {
        double L = 0.0;
        std::size_t n = 0;
        double h = 0.0;
        std::vector<double> x;
        std::vector<double> xi;
    };
    std::shared_ptr<const Data> data_;
};

class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
    if (!(a == b)) throw GridMismatch("fields live on different grids");
}

inline bool is_finite(double v) { return std::isfinite(v); }
inline bool is_finite(const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

template <class T>
class Field {
public:
    using value_type = T;

    Field() = default;
    explicit Field(Grid g) : grid_(std::move(g)), v_(grid_.size(), T{}) {}
    Field(Grid g, std::vector<T> v) : grid_(std::move(g)), v_(std::move(v)) {
        if (v_.size() != grid_.size())
            throw std::invalid_argument("sample count does not match grid size");
        for (const T& s : v_)
            if (!is_finite(s)) throw std::domain_error("field sample is not finite");
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return v_.size(); }
    T& operator[](std::size_t i) { return v_[i]; }
    const T& operator[](std::size_t i) const { return v_[i]; }
    T* data() { return v_.data(); }
    const T* data() const { return v_.data(); }
    std::vector<T>& values() { return v_; }
    const std::vector<T>& values() const { return v_; }
    auto begin() { return v_.begin(); }
    auto end() { return v_.end(); }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    Field& operator+=(const Field& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    Field& operator-=(const Field& o) {
        require_same_grid(grid_, o.grid_);
        for (std::size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
        return *this;
    }
    Field& operator*=(T s) {
        for (auto& a : v_) a *= s;
        return *this;
    }

private:
    Grid grid_;
    std::vector<T> v_;
};

using RealField = Field<double>;
using ComplexField = Field<cplx>;

template <class T>
Field<T> operator+(Field<T> a, const Field<T>& b) { return a += b; }
template <class T>
Field<T> operator-(Field<T> a, const Field<T>& b) { return a -= b; }
template <class T>
Field<T> operator*(T s, Field<T> a) { return a *= s; }
template <class T>
Field<T> operator*(Field<T> a, T s) { return a *= s; }

// Pointwise product.
template <class T>
Field<T> times(const Field<T>& a, const Field<T>& b) {
    require_same_grid(a.grid(), b.grid());
    Field<T> out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

RealField real_part(const ComplexField& f);
RealField imag_part(const ComplexField& f);
ComplexField to_complex(const RealField& f);

// Samples a callable on the grid points.
template <class F>
RealField sample(const Grid& g, F&& fn) {
    RealField out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = fn(g.x(i));
    return out;
}

double max_abs(const RealField& f);
double max_abs(const ComplexField& f);

}  // namespace bolab
