#pragma once

// Second-order forward-mode differentiation numbers.
//
// A Jet carries a value together with its gradient and Hessian with respect to
// up to kMaxDim chart coordinates. Arithmetic propagates all three exactly, so
// metric coefficients built from Jets expose the two derivatives curvature
// needs without finite-difference noise.

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <span>

namespace ricci_lab {

inline constexpr int kMaxDim = 4;

using Grad = Eigen::Matrix<double, kMaxDim, 1>;
using Hess = Eigen::Matrix<double, kMaxDim, kMaxDim>;

struct Jet {
    double v = 0.0;
    Grad d = Grad::Zero();
    Hess h = Hess::Zero();

    Jet() = default;
    Jet(double value) : v(value) {} // NOLINT: implicit lift of constants is intended

    static Jet constant(double value) { return Jet(value); }

    /// The coordinate function x_index evaluated at `value`.
    static Jet variable(double value, int index) {
        Jet j(value);
        j.d[index] = 1.0;
        return j;
    }

    Jet& operator+=(const Jet& o) {
        v += o.v;
        d += o.d;
        h += o.h;
        return *this;
    }
    Jet& operator-=(const Jet& o) {
        v -= o.v;
        d -= o.d;
        h -= o.h;
        return *this;
    }
    Jet& operator*=(const Jet& o);
    Jet& operator/=(const Jet& o);
};

/// Applies a scalar function with known value, first and second derivative.
inline Jet chain(const Jet& a, double f, double fp, double fpp) {
    Jet r;
    r.v = f;
    r.d = fp * a.d;
    r.h = fpp * (a.d * a.d.transpose()) + fp * a.h;
    return r;
}

inline Jet operator-(const Jet& a) {
    Jet r;
    r.v = -a.v;
    r.d = -a.d;
    r.h = -a.h;
    return r;
}

inline Jet operator+(Jet a, const Jet& b) { return a += b; }
inline Jet operator-(Jet a, const Jet& b) { return a -= b; }

inline Jet operator*(const Jet& a, const Jet& b) {
    Jet r;
    r.v = a.v * b.v;
    r.d = a.v * b.d + b.v * a.d;
    const Hess cross = a.d * b.d.transpose();
    r.h = a.v * b.h + b.v * a.h + cross + cross.transpose();
    return r;
}

inline Jet operator*(const Jet& a, double s) {
    Jet r;
    r.v = a.v * s;
    r.d = a.d * s;
    r.h = a.h * s;
    return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }

inline Jet reciprocal(const Jet& a) {
    const double inv = 1.0 / a.v;
    return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }
inline Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
inline Jet operator/(double s, const Jet& a) { return s * reciprocal(a); }

inline Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }
inline Jet& Jet::operator/=(const Jet& o) { return *this = *this / o; }

inline Jet square(const Jet& a) { return a * a; }

inline Jet sin(const Jet& a) {
    const double s = std::sin(a.v);
    const double c = std::cos(a.v);
    return chain(a, s, c, -s);
}

inline Jet cos(const Jet& a) {
    const double s = std::sin(a.v);
    const double c = std::cos(a.v);
    return chain(a, c, -s, -c);
}

inline Jet exp(const Jet& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}

inline Jet log(const Jet& a) {
    const double inv = 1.0 / a.v;
    return chain(a, std::log(a.v), inv, -inv * inv);
}

inline Jet sqrt(const Jet& a) {
    const double s = std::sqrt(a.v);
    return chain(a, s, 0.5 / s, -0.25 / (s * a.v));
}

/// Coordinate jets for a point: component i is the variable x_i.
template <class Vector>
std::array<Jet, kMaxDim> coordinate_jets(const Vector& x) {
    std::array<Jet, kMaxDim> out{};
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
        out[i] = Jet::variable(x[i], i);
    }
    return out;
}

/// A small square matrix of Jets (dimension <= kMaxDim).
class JetMatrix {
public:
    JetMatrix() = default;
    explicit JetMatrix(int n) : n_(n) {}

    int dim() const { return n_; }
    Jet& operator()(int i, int j) { return a_[i * kMaxDim + j]; }
    const Jet& operator()(int i, int j) const { return a_[i * kMaxDim + j]; }

    Eigen::MatrixXd value() const {
        Eigen::MatrixXd m(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).v;
        return m;
    }

    /// Matrix of first partials d/dx_k.
    Eigen::MatrixXd partial(int k) const {
        Eigen::MatrixXd m(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).d[k];
        return m;
    }

    /// Matrix of second partials d^2/dx_k dx_l.
    Eigen::MatrixXd partial2(int k, int l) const {
        Eigen::MatrixXd m(n_, n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j).h(k, l);
        return m;
    }

    JetMatrix& operator+=(const JetMatrix& o) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    JetMatrix& operator-=(const JetMatrix& o) {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }

    static JetMatrix constant(const Eigen::MatrixXd& m) {
        JetMatrix r(static_cast<int>(m.rows()));
        for (int i = 0; i < r.n_; ++i)
            for (int j = 0; j < r.n_; ++j) r(i, j) = Jet(m(i, j));
        return r;
    }

private:
    int n_ = 0;
    std::array<Jet, kMaxDim * kMaxDim> a_{};
};

inline JetMatrix operator*(const Jet& s, const JetMatrix& m) {
    JetMatrix r(m.dim());
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) r(i, j) = s * m(i, j);
    return r;
}

inline JetMatrix operator+(JetMatrix a, const JetMatrix& b) { return a += b; }
inline JetMatrix operator-(JetMatrix a, const JetMatrix& b) { return a -= b; }

/// Gauss-Jordan inverse with partial pivoting on the values.
JetMatrix inverse(const JetMatrix& m);

} // namespace ricci_lab
