#ifndef WGF_GRID_HPP
#define WGF_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wgf {

// Uniform cell-centered partition of [x_min, x_max] into n cells.
// Cell centers: x_i = x_min + (i + 1/2) h, i = 0..n-1.
struct Grid {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 0;

    Grid() = default;
    Grid(double xmin, double xmax, std::size_t cells)
        : x_min(xmin), x_max(xmax), n(cells) {
        if (!(x_min < x_max))
            throw std::invalid_argument("Grid: x_min must be < x_max");
        if (n < 8)
            throw std::invalid_argument("Grid: need at least 8 cells, got " +
                                        std::to_string(n));
    }

    double spacing() const { return (x_max - x_min) / static_cast<double>(n); }
    double center(std::size_t i) const {
        return x_min + (static_cast<double>(i) + 0.5) * spacing();
    }
    double left_face(std::size_t i) const {
        return x_min + static_cast<double>(i) * spacing();
    }
    double range() const { return x_max - x_min; }

    std::vector<double> centers() const {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = center(i);
        return x;
    }

    bool operator==(const Grid& o) const {
        return x_min == o.x_min && x_max == o.x_max && n == o.n;
    }
};

}  // namespace wgf

#endif
