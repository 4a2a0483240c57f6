#pragma once

#include <string>

#include "nlch/field.hpp"

namespace nlch {

// Binary field snapshot, little-endian:
//   magic "NLCHF1" | dim u32 | n u32 | L f64 | t f64 | values row-major f64
struct Snapshot {
    ScalarField field;
    double time = 0.0;
};

void write_snapshot(const std::string& path, const ScalarField& f, double t);
Snapshot read_snapshot(const std::string& path);

} // namespace nlch
