#include "ricci_lab/fields.hpp"

#include "ricci_lab/errors.hpp"

#include <sstream>

namespace ricci_lab {

bool ChartBox::contains(const Vec& x) const {
    if (x.size() != lower.size()) return false;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
    return true;
}

namespace {

void check_point(const std::string& chart, int dim, const ChartBox& box, const Vec& x) {
    if (x.size() != dim) {
        std::ostringstream os;
        os << "point of dimension " << x.size() << " passed to chart '" << chart << "' of dimension " << dim;
        throw InputError(os.str());
    }
    if (!box.contains(x)) {
        std::ostringstream os;
        os << "point (" << x.transpose() << ") outside domain of chart '" << chart << "'";
        throw InputError(os.str());
    }
}

} // namespace

JetMatrix MatrixField::at(const Vec& x) const {
    check_point(chart_id, dim, domain, x);
    return eval(x);
}

Jet ScalarField::at(const Vec& x) const {
    check_point(chart_id, dim, domain, x);
    return eval(x);
}

MatrixField make_matrix_field(std::string chart_id, ChartBox domain,
                              std::function<JetMatrix(std::span<const Jet>)> f) {
    MatrixField m;
    m.chart_id = std::move(chart_id);
    m.dim = static_cast<int>(domain.lower.size());
    m.domain = std::move(domain);
    m.eval = [f = std::move(f), n = m.dim](const Vec& x) {
        const auto jets = coordinate_jets(x);
        return f(std::span<const Jet>(jets.data(), static_cast<std::size_t>(n)));
    };
    return m;
}

ScalarField make_scalar_field(std::string chart_id, ChartBox domain,
                              std::function<Jet(std::span<const Jet>)> f) {
    ScalarField s;
    s.chart_id = std::move(chart_id);
    s.dim = static_cast<int>(domain.lower.size());
    s.domain = std::move(domain);
    s.eval = [f = std::move(f), n = s.dim](const Vec& x) {
        const auto jets = coordinate_jets(x);
        return f(std::span<const Jet>(jets.data(), static_cast<std::size_t>(n)));
    };
    return s;
}

} // namespace ricci_lab
