#ifndef WGF_IO_HPP
#define WGF_IO_HPP

#include <string>

#include "wgf/density.hpp"
#include "wgf/transport.hpp"

namespace wgf {

// Atomic write: contents land in a temp file first, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

// Density CSV: header `x,rho`, one row per cell, 17 significant digits.
void write_density_csv(const std::string& path, const DensityMeasure& rho);

// Loader validates monotone x, uniform spacing within 1e-9 relative, and
// reconstructs the cell-centered grid.
DensityMeasure read_density_csv(const std::string& path);

// Path CSV, long form: header `t,x,rho`.
void write_path_csv(const std::string& path, const MeasurePath& mp);

// Full-precision formatting used by every CSV writer.
std::string fmt17(double v);

}  // namespace wgf

#endif
