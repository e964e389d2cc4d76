#pragma once

// Chart-presented fields: matrix-valued and scalar functions of chart
// coordinates whose values come with exact first and second derivatives.

#include "ricci_lab/jet.hpp"

#include <Eigen/Core>

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace ricci_lab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Axis-aligned coordinate box of a chart.
struct ChartBox {
    Vec lower;
    Vec upper;

    bool contains(const Vec& x) const;
};

/// Symmetric-matrix-valued field x -> a_ij(x) on one chart. A MetricField is a
/// MatrixField whose values are positive definite.
struct MatrixField {
    std::string chart_id;
    int dim = 0;
    ChartBox domain;
    std::function<JetMatrix(const Vec&)> eval;

    /// Evaluates with bounds and dimension checks (throws InputError).
    JetMatrix at(const Vec& x) const;
};

using MetricField = MatrixField;

struct ScalarField {
    std::string chart_id;
    int dim = 0;
    ChartBox domain;
    std::function<Jet(const Vec&)> eval;

    Jet at(const Vec& x) const;
};

/// A named, reproducible set of chart points. Every sampled quantity reports
/// the id of the set it was computed on.
struct SampleSet {
    std::string id;
    std::vector<Vec> points;
};

/// Builds a matrix field from a function of coordinate jets.
MatrixField make_matrix_field(std::string chart_id, ChartBox domain,
                              std::function<JetMatrix(std::span<const Jet>)> f);

ScalarField make_scalar_field(std::string chart_id, ChartBox domain,
                              std::function<Jet(std::span<const Jet>)> f);

/// Pointwise value, used by tests that want a plain matrix.
inline Mat value_at(const MatrixField& g, const Vec& x) { return g.at(x).value(); }

} // namespace ricci_lab
