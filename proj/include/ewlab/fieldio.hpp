#ifndef EWLAB_FIELDIO_HPP
#define EWLAB_FIELDIO_HPP

#include <iosfwd>
#include <string>

#include "ewlab/lattice.hpp"

namespace ewlab {

// Raw little-endian dump for cross-implementation comparison.
// Header: d (int32), n (int32), h (float64), dt (float64),
// timeIndex (int64); payload: row-major float64 values.
struct FieldDump {
  Lattice lat;
  double dt = 0.0;
  std::int64_t time_index = 0;
  std::vector<double> values;
};

void write_field_dump(std::ostream& os, const Lattice& lat, double dt, std::int64_t time_index,
                      const std::vector<double>& values);
FieldDump read_field_dump(std::istream& is);

void write_field_dump_file(const std::string& path, const Lattice& lat, double dt,
                           std::int64_t time_index, const std::vector<double>& values);
FieldDump read_field_dump_file(const std::string& path);

}  // namespace ewlab

#endif
