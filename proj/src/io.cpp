#include "seird/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace seird {

namespace {

constexpr int kHeaderBytes = 64;

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

}  // namespace

void write_field_snapshot(const std::string& path, const Field& f) {
  const Mesh& m = *f.mesh;
  std::ostringstream hs;
  hs << "SEIRD-FIELD v1 dim=" << m.dim() << " nx=" << m.cells()[0] << " ny=" << m.cells()[1]
     << " nz=" << m.cells()[2];
  std::string header = hs.str();
  if (static_cast<int>(header.size()) >= kHeaderBytes)
    throw InvariantViolation("snapshot header overflow");
  header.resize(kHeaderBytes - 1, ' ');
  header.push_back('\n');

  std::ofstream out(path, std::ios::binary);
  if (!out) throw SolverError("cannot open snapshot for writing: " + path);
  out.write(header.data(), kHeaderBytes);
  out.write(reinterpret_cast<const char*>(f.v.data()),
            static_cast<std::streamsize>(f.v.size() * sizeof(double)));
  if (!out) throw SolverError("short write on snapshot: " + path);
}

SnapshotData read_field_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "raster", "cannot open snapshot: " + path);
  char header[kHeaderBytes];
  in.read(header, kHeaderBytes);
  if (!in) throw ConfigError(0, "raster", "snapshot too short: " + path);

  std::istringstream hs(std::string(header, kHeaderBytes));
  std::string magic, version;
  hs >> magic >> version;
  if (magic != "SEIRD-FIELD" || version != "v1")
    throw ConfigError(0, "raster", "not a SEIRD-FIELD v1 snapshot: " + path);
  SnapshotData data;
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) continue;
    const std::string key = tok.substr(0, eq);
    const int value = std::stoi(tok.substr(eq + 1));
    if (key == "dim") data.dim = value;
    else if (key == "nx") data.cells[0] = value;
    else if (key == "ny") data.cells[1] = value;
    else if (key == "nz") data.cells[2] = value;
  }
  const long count = static_cast<long>(data.cells[0]) * data.cells[1] * data.cells[2];
  if (data.dim < 1 || data.dim > 3 || count < 1)
    throw ConfigError(0, "raster", "snapshot header has invalid extents: " + path);
  data.values.resize(count);
  in.read(reinterpret_cast<char*>(data.values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in) throw ConfigError(0, "raster", "snapshot payload truncated: " + path);
  return data;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace seird
