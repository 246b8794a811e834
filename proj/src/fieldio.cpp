#include "ewlab/fieldio.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ewlab {

static_assert(std::endian::native == std::endian::little,
              "dump format is little-endian; big-endian hosts need byte swaps");

template <typename T>
static void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
static T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("field dump: truncated stream");
  return v;
}

void write_field_dump(std::ostream& os, const Lattice& lat, double dt, std::int64_t time_index,
                      const std::vector<double>& values) {
  if (values.size() != lat.cells()) throw std::invalid_argument("field dump: value count mismatch");
  put<std::int32_t>(os, lat.d);
  put<std::int32_t>(os, lat.n);
  put<double>(os, lat.h);
  put<double>(os, dt);
  put<std::int64_t>(os, time_index);
  os.write(reinterpret_cast<const char*>(values.data()),
           static_cast<std::streamsize>(values.size() * sizeof(double)));
}

FieldDump read_field_dump(std::istream& is) {
  FieldDump d;
  d.lat.d = get<std::int32_t>(is);
  d.lat.n = get<std::int32_t>(is);
  d.lat.h = get<double>(is);
  d.dt = get<double>(is);
  d.time_index = get<std::int64_t>(is);
  if (d.lat.d < 1 || d.lat.d > kMaxDim || d.lat.n < 1 || !(d.lat.h > 0.0))
    throw std::runtime_error("field dump: implausible header");
  d.values.resize(d.lat.cells());
  is.read(reinterpret_cast<char*>(d.values.data()),
          static_cast<std::streamsize>(d.values.size() * sizeof(double)));
  if (!is) throw std::runtime_error("field dump: truncated payload");
  return d;
}

void write_field_dump_file(const std::string& path, const Lattice& lat, double dt,
                           std::int64_t time_index, const std::vector<double>& values) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("field dump: cannot open " + path);
  write_field_dump(os, lat, dt, time_index, values);
}

FieldDump read_field_dump_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("field dump: cannot open " + path);
  return read_field_dump(is);
}

}  // namespace ewlab
