#include "phasenet/field_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "phasenet/errors.hpp"

namespace phasenet {

namespace {

constexpr char kMagic[8] = {'P', 'N', 'F', 'I', 'E', 'L', 'D', '1'};

template <class T>
void put(std::ofstream& f, T v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& f) {
  T v{};
  if (!f.read(reinterpret_cast<char*>(&v), sizeof v)) throw Error(Errc::Io, "truncated field header");
  return v;
}

}  // namespace

FieldDump make_dump(const DomainGrid& g, const std::vector<double>& u, int m, double epsilon) {
  if (static_cast<int>(u.size()) != g.size() * m) throw Error(Errc::DimensionMismatch, "field size does not match grid");
  FieldDump d;
  d.nx = g.nx;
  d.ny = g.ny;
  d.m = m;
  d.h = g.h;
  d.epsilon = epsilon;
  d.origin = g.origin;
  d.values.assign(static_cast<size_t>(g.nx) * g.ny * m, std::numeric_limits<double>::quiet_NaN());
  for (int c = 0; c < g.size(); ++c)
    for (int k = 0; k < m; ++k)
      d.values[(static_cast<size_t>(g.cj[c]) * g.nx + g.ci[c]) * m + k] = u[static_cast<size_t>(c) * m + k];
  return d;
}

void write_field_bin(const std::string& path, const FieldDump& d) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + path);
  f.write(kMagic, sizeof kMagic);
  put(f, d.nx);
  put(f, d.ny);
  put(f, d.h);
  put(f, d.epsilon);
  put(f, d.m);
  put(f, d.origin.x);
  put(f, d.origin.y);
  f.write(reinterpret_cast<const char*>(d.values.data()), static_cast<std::streamsize>(d.values.size() * sizeof(double)));
  if (!f) throw Error(Errc::Io, "write failed for " + path);
}

FieldDump read_field_bin(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path);
  char magic[8];
  if (!f.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
    throw Error(Errc::Io, path + " is not a field dump");
  FieldDump d;
  d.nx = get<std::int64_t>(f);
  d.ny = get<std::int64_t>(f);
  d.h = get<double>(f);
  d.epsilon = get<double>(f);
  d.m = get<std::int64_t>(f);
  d.origin.x = get<double>(f);
  d.origin.y = get<double>(f);
  if (d.nx <= 0 || d.ny <= 0 || d.m <= 0 || d.nx * d.ny * d.m > (std::int64_t{1} << 34))
    throw Error(Errc::Io, "bad field dimensions in " + path);
  d.values.resize(static_cast<size_t>(d.nx * d.ny * d.m));
  if (!f.read(reinterpret_cast<char*>(d.values.data()), static_cast<std::streamsize>(d.values.size() * sizeof(double))))
    throw Error(Errc::Io, "truncated field body in " + path);
  return d;
}

std::string field_csv(const DomainGrid& g, const std::vector<double>& u, int m) {
  std::ostringstream o;
  o << "i,j,x,y";
  for (int k = 0; k < m; ++k) o << ",u" << k;
  o << '\n';
  char buf[64];
  for (int c = 0; c < g.size(); ++c) {
    Vec2 x = g.center(c);
    std::snprintf(buf, sizeof buf, "%d,%d,%.9g,%.9g", g.ci[c], g.cj[c], x.x, x.y);
    o << buf;
    for (int k = 0; k < m; ++k) {
      std::snprintf(buf, sizeof buf, ",%.17g", u[static_cast<size_t>(c) * m + k]);
      o << buf;
    }
    o << '\n';
  }
  return o.str();
}

std::string energy_log_csv(const std::vector<EnergyLogEntry>& log) {
  std::ostringstream o;
  o << "iteration,phase,energy,residual\n";
  char buf[128];
  for (const auto& e : log) {
    std::snprintf(buf, sizeof buf, "%d,%s,%.17g,%.6e\n", e.iteration, e.phase.c_str(), e.energy, e.residual);
    o << buf;
  }
  return o.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot write " + path);
  f << text;
  if (!f) throw Error(Errc::Io, "write failed for " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot open " + path);
  std::ostringstream o;
  o << f.rdbuf();
  return o.str();
}

}  // namespace phasenet
