#include "wgf/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace wgf {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
        out << contents;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("rename failed: " + tmp + " -> " + path);
}

void write_density_csv(const std::string& path, const DensityMeasure& rho) {
    std::ostringstream os;
    os << "x,rho\n";
    for (std::size_t i = 0; i < rho.size(); ++i)
        os << fmt17(rho.grid().center(i)) << ',' << fmt17(rho.value(i)) << '\n';
    write_file_atomic(path, os.str());
}

DensityMeasure read_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open density file: " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,rho", 0) != 0)
        throw std::invalid_argument("density file missing `x,rho` header: " + path);
    std::vector<double> xs, vs;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("malformed density row: " + line);
        xs.push_back(std::stod(line.substr(0, comma)));
        vs.push_back(std::stod(line.substr(comma + 1)));
    }
    if (xs.size() < 8)
        throw std::invalid_argument("density file has fewer than 8 cells");
    const double h = xs[1] - xs[0];
    if (!(h > 0.0))
        throw std::invalid_argument("density file x values must increase");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double step = xs[i + 1] - xs[i];
        if (std::abs(step - h) > 1e-9 * std::abs(h))
            throw std::invalid_argument(
                "density file spacing not uniform within 1e-9 relative at row " +
                std::to_string(i + 1));
    }
    const Grid grid(xs.front() - 0.5 * h, xs.back() + 0.5 * h, xs.size());
    return DensityMeasure(grid, std::move(vs));
}

void write_path_csv(const std::string& path, const MeasurePath& mp) {
    std::ostringstream os;
    os << "t,x,rho\n";
    for (std::size_t k = 0; k < mp.states.size(); ++k) {
        const auto& state = mp.states[k];
        for (std::size_t i = 0; i < state.size(); ++i)
            os << fmt17(mp.times[k]) << ',' << fmt17(state.grid().center(i)) << ','
               << fmt17(state.value(i)) << '\n';
    }
    write_file_atomic(path, os.str());
}

}  // namespace wgf
