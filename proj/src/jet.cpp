#include "ricci_lab/jet.hpp"

#include "ricci_lab/errors.hpp"

#include <cmath>
#include <utility>

namespace ricci_lab {

JetMatrix inverse(const JetMatrix& m) {
    const int n = m.dim();
    JetMatrix a = m;
    JetMatrix inv(n);
    for (int i = 0; i < n; ++i) inv(i, i) = Jet(1.0);

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a(r, col).v) > std::abs(a(piv, col).v)) piv = r;
        if (std::abs(a(piv, col).v) < 1e-300) throw DegeneracyError("singular matrix in jet inverse");
        if (piv != col) {
            for (int j = 0; j < n; ++j) {
                std::swap(a(col, j), a(piv, j));
                std::swap(inv(col, j), inv(piv, j));
            }
        }
        const Jet r = reciprocal(a(col, col));
        for (int j = 0; j < n; ++j) {
            a(col, j) = a(col, j) * r;
            inv(col, j) = inv(col, j) * r;
        }
        for (int row = 0; row < n; ++row) {
            if (row == col) continue;
            const Jet f = a(row, col);
            if (f.v == 0.0 && f.d.isZero() && f.h.isZero()) continue;
            for (int j = 0; j < n; ++j) {
                a(row, j) -= f * a(col, j);
                inv(row, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

} // namespace ricci_lab
