#pragma once

#include <iosfwd>
#include <string>

#include "subfreq/grid.hpp"

namespace subfreq {

/// Write the interior mask of a 2D domain as a portable greymap:
/// 0 = exterior, 255 = interior. `binary` selects P5, otherwise P2.
/// Pixel row r, column c maps to lattice indices (i = r, j = c).
void write_mask_pgm(const GridDomain& domain, const std::string& path,
                    bool binary = false);

/// Read a P2 or P5 greymap as an interior mask (values > 127 are interior)
/// on the given bounding box. Shape comes from the image.
DomainPtr read_mask_pgm(const std::string& path,
                        std::vector<std::array<double, 2>> bounds);

/// Write a grid function as a greyscale PGM, min..max mapped to 0..255.
/// 2D functions dump directly; 3D functions dump the middle slice along the
/// last axis.
void write_function_pgm(const GridFunction& f, const std::string& path,
                        bool binary = false);

/// CSV dump with header "i,j[,k],x1,x2[,x3],value", one row per lattice
/// node, numbers with 17 significant digits.
void write_function_csv(const GridFunction& f, const std::string& path);

/// Format a double with 17 significant digits (round-trip exact).
std::string format_g17(double value);

} // namespace subfreq
