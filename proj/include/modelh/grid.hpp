#ifndef MODELH_GRID_HPP
#define MODELH_GRID_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace modelh {

/// Boundary treatment shared by every field on a grid.
///
/// NeumannNoSlip: zero normal derivative for cell-centered scalars and
/// homogeneous Dirichlet data for the velocity. Periodic: both axes wrap.
enum class Boundary { NeumannNoSlip, Periodic };

inline std::string_view to_string(Boundary bc)
{
    return bc == Boundary::Periodic ? "periodic" : "neumann";
}

inline Boundary boundary_from_string(std::string_view s)
{
    if (s == "periodic")
        return Boundary::Periodic;
    if (s == "neumann" || s == "neumann_noslip" || s == "noslip")
        return Boundary::NeumannNoSlip;
    throw std::invalid_argument("unknown boundary mode '" + std::string(s) + "'");
}

/// Uniform cell-centered grid on the rectangle [0, lx] x [0, ly].
struct Grid {
    int nx = 0;
    int ny = 0;
    double lx = 1.0;
    double ly = 1.0;
    Boundary bc = Boundary::NeumannNoSlip;

    Grid() = default;
    Grid(int nx_, int ny_, double lx_, double ly_, Boundary bc_)
        : nx(nx_), ny(ny_), lx(lx_), ly(ly_), bc(bc_)
    {
        validate();
    }

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_area() const { return hx() * hy(); }
    double area() const { return lx * ly; }
    double h_min() const { return hx() < hy() ? hx() : hy(); }
    bool periodic() const { return bc == Boundary::Periodic; }

    // cell-center coordinates
    double xc(int i) const { return (i + 0.5) * hx(); }
    double yc(int j) const { return (j + 0.5) * hy(); }
    // face / node coordinates
    double xf(int i) const { return i * hx(); }
    double yf(int j) const { return j * hy(); }

    void validate() const
    {
        if (nx < 4 || ny < 4)
            throw std::invalid_argument("grid needs at least 4 cells per axis");
        if (!(lx > 0.0) || !(ly > 0.0))
            throw std::invalid_argument("grid lengths must be positive");
    }

    friend bool operator==(const Grid& a, const Grid& b)
    {
        return a.nx == b.nx && a.ny == b.ny && a.lx == b.lx && a.ly == b.ly && a.bc == b.bc;
    }
};

inline void require_same_grid(const Grid& a, const Grid& b)
{
    if (!(a == b))
        throw std::invalid_argument("fields live on different grids");
}

} // namespace modelh

#endif
