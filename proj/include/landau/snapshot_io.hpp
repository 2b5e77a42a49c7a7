#pragma once

#include <string>

#include "landau/grid.hpp"

namespace landau {

struct CoefficientField;

/// Binary snapshot container. Layout: magic "LNDF0001", then little-endian
/// 64-bit fields time, dim_x, n_x, l_x, n_v, l_v (floating fields as IEEE
/// doubles, counts as int64), then row-major float64 values, x-major then v.
void write_snapshot(const std::string& path, const DistributionField& f);
DistributionField read_snapshot(const std::string& path);

/// Same container with magic "LNDC0001"; values are the 10 coefficient
/// components per v cell (a_xx a_xy a_xz a_yy a_yz a_zz b_x b_y b_z c),
/// component-major.
void write_coefficients(const std::string& path, const CoefficientField& c);

}  // namespace landau
