#pragma once

// Scalar fields on S^n: a periodic grid on S^1, or a cell-centered grid in the
// polar angle for axisymmetric fields on S^n, n >= 2.

#include <cstddef>
#include <span>
#include <vector>

namespace dualflow {

enum class GridMode { Circle, Axisym };

/// Behaviour of a field under reflection across the poles (Axisym) or periodic wrap (Circle).
enum class Parity { Even, Odd, Periodic };

struct Grid {
    GridMode mode = GridMode::Axisym;
    int n = 2;
    int m = 64;
    double h = 0.0;

    /// Full periodic grid, theta_j = j h, h = 2 pi / m; n = 1.
    static Grid circle(int m);
    /// theta_j = (j + 1/2) h, h = pi / m; n >= 2.
    static Grid axisym(int n, int m);
    /// Circle for n = 1, Axisym otherwise.
    static Grid for_dimension(int n, int m);

    double node(int j) const noexcept { return mode == GridMode::Circle ? j * h : (j + 0.5) * h; }
    std::vector<double> nodes() const;
    /// Length of the parameter interval: 2 pi or pi.
    double span() const noexcept;
    /// Parity for fields that are even functions of the polar angle.
    Parity even_parity() const noexcept { return mode == GridMode::Circle ? Parity::Periodic : Parity::Even; }
    Parity odd_parity() const noexcept { return mode == GridMode::Circle ? Parity::Periodic : Parity::Odd; }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.mode == b.mode && a.n == b.n && a.m == b.m;
    }
};

struct ScalarField {
    Grid grid;
    std::vector<double> values;
    Parity parity = Parity::Even;

    ScalarField() = default;
    ScalarField(Grid g, std::vector<double> v, Parity p);
    /// Samples f at the nodes.
    template <class Fn>
    static ScalarField sample(const Grid& g, Parity p, Fn&& f) {
        std::vector<double> v(static_cast<std::size_t>(g.m));
        for (int j = 0; j < g.m; ++j) v[static_cast<std::size_t>(j)] = f(g.node(j));
        return ScalarField(g, std::move(v), p);
    }

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }
    double min() const;
    double max() const;
};

/// Ghost-extended copy: two extra entries on each side (index 2 holds f_0).
void extend_with_ghosts(const Grid& g, Parity p, std::span<const double> f, std::vector<double>& ext);

/// 4th-order central differences, order 1 or 2. Derivatives of Even fields are Odd and vice versa.
ScalarField differentiate(const ScalarField& f, int order);

/// Raw-buffer variant used in the time-stepping loop; `ext` is scratch.
void differentiate_into(const Grid& g, Parity p, std::span<const double> f, int order, std::span<double> out,
                        std::vector<double>& ext);

/// Quadrature weights over S^n, including |S^{n-1}| for Axisym grids.
std::vector<double> quadrature_weights(const Grid& g);

double integrate_sphere(const ScalarField& f);
double integrate_sphere(const Grid& g, std::span<const double> f);

/// Area of the unit sphere S^k.
double sphere_area(int k);

/// Shape-preserving monotone cubic (Fritsch-Carlson) interpolation of (x, y) onto the target nodes.
/// Data are extended by the parity (reflection at 0 and pi, or 2 pi periodicity) before
/// interpolating, so x only has to cover one fundamental period.
/// Throws ReparametrizationError if x is not strictly increasing.
ScalarField resample_monotone(std::span<const double> x, std::span<const double> y, const Grid& target,
                              Parity parity);

/// Same contract as resample_monotone but with local 6-point Lagrange interpolation (6th order, no
/// shape preservation).
ScalarField resample_high_order(std::span<const double> x, std::span<const double> y, const Grid& target,
                                Parity parity);

/// Evaluates the high-order interpolant of the uniform field at arbitrary angles.
std::vector<double> interpolate_at(const ScalarField& f, std::span<const double> theta);

/// Location and value of the extremum of the field's high-order interpolant.
struct Extremum {
    double theta;
    double value;
};
Extremum refine_extremum(const ScalarField& f, bool maximum);

/// Value at theta = 0 (north) or theta = pi (south) by symmetric 6-point extrapolation; Axisym only.
double pole_value(const ScalarField& f, bool north);

}  // namespace dualflow
