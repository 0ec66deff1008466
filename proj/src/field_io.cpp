#include "pmelab/field_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pmelab {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int64_t time_index(const ScalarFieldHistory& h, int slice) {
  return static_cast<int64_t>(std::llround(h.slice_times[slice] / h.mesh.dt));
}

void write_i64(std::ostream& os, int64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void write_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }
int64_t read_i64(std::istream& is) {
  int64_t v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}
double read_f64(std::istream& is) {
  double v;
  is.read(reinterpret_cast<char*>(&v), 8);
  return v;
}

void rebuild(ScalarFieldHistory& h) {
  // diagnostics are not serialized; revalidate what is
  h.grid.validate();
  h.mesh.validate();
  if (h.slices.size() != h.slice_times.size())
    throw std::runtime_error("field_io: corrupt history");
}

}  // namespace

void save_history_csv(const ScalarFieldHistory& h, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("field_io: cannot open " + path);
  os << "dim," << h.grid.dim << "\n";
  os << "points," << h.grid.points[0] << "," << h.grid.points[1] << "\n";
  os << "lo," << fmt17(h.grid.lo[0]) << "," << fmt17(h.grid.lo[1]) << "\n";
  os << "hi," << fmt17(h.grid.hi[0]) << "," << fmt17(h.grid.hi[1]) << "\n";
  os << "boundary," << (h.grid.boundary == Boundary::Periodic ? "periodic" : "dirichlet_oracle") << "\n";
  os << "m," << fmt17(h.m) << "\n";
  os << "t0," << fmt17(h.t0) << "\n";
  os << "T," << fmt17(h.mesh.T) << "\n";
  os << "dt," << fmt17(h.mesh.dt) << "\n";
  os << "steps," << h.mesh.steps << "\n";
  os << "record_stride," << h.record_stride << "\n";
  os << "u_min," << fmt17(h.u_min) << "\n";
  for (int s = 0; s < h.n_slices(); ++s) {
    os << time_index(h, s);
    for (int i = 0; i < h.slices[s].size(); ++i) os << ',' << fmt17(h.slices[s][i]);
    os << "\n";
  }
  if (!os) throw std::runtime_error("field_io: write failed for " + path);
}

ScalarFieldHistory load_history_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("field_io: cannot open " + path);
  ScalarFieldHistory h;
  std::string line;
  auto fields = [](const std::string& l) {
    std::vector<std::string> out;
    std::stringstream ss(l);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(tok);
    return out;
  };
  // 12 header lines in fixed order
  for (int k = 0; k < 12; ++k) {
    if (!std::getline(is, line)) throw std::runtime_error("field_io: truncated header");
    auto f = fields(line);
    const std::string& key = f[0];
    if (key == "dim") h.grid.dim = std::stoi(f[1]);
    else if (key == "points") h.grid.points = {std::stoi(f[1]), std::stoi(f[2])};
    else if (key == "lo") h.grid.lo = {std::stod(f[1]), std::stod(f[2])};
    else if (key == "hi") h.grid.hi = {std::stod(f[1]), std::stod(f[2])};
    else if (key == "boundary") {
      if (f[1] == "periodic") h.grid.boundary = Boundary::Periodic;
      else throw std::runtime_error("field_io: Dirichlet histories need their oracle re-attached; CSV load supports periodic only");
    } else if (key == "m") h.m = std::stod(f[1]);
    else if (key == "t0") h.t0 = std::stod(f[1]);
    else if (key == "T") h.mesh.T = std::stod(f[1]);
    else if (key == "dt") h.mesh.dt = std::stod(f[1]);
    else if (key == "steps") h.mesh.steps = std::stoi(f[1]);
    else if (key == "record_stride") h.record_stride = std::stoi(f[1]);
    else if (key == "u_min") h.u_min = std::stod(f[1]);
    else throw std::runtime_error("field_io: unexpected header key " + key);
  }
  const int size = h.grid.points[0] * h.grid.points[1];
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto f = fields(line);
    if (static_cast<int>(f.size()) != size + 1)
      throw std::runtime_error("field_io: row width mismatch");
    h.slice_times.push_back(std::stod(f[0]) * h.mesh.dt);
    ArrayXd v(size);
    for (int i = 0; i < size; ++i) v[i] = std::stod(f[i + 1]);
    h.slices.push_back(std::move(v));
  }
  rebuild(h);
  return h;
}

void save_history_binary(const ScalarFieldHistory& h, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("field_io: cannot open " + path);
  os << "PMEH1\n";
  write_i64(os, h.grid.dim);
  write_i64(os, h.grid.points[0]);
  write_i64(os, h.grid.points[1]);
  write_i64(os, h.grid.boundary == Boundary::Periodic ? 0 : 1);
  write_f64(os, h.grid.lo[0]);
  write_f64(os, h.grid.lo[1]);
  write_f64(os, h.grid.hi[0]);
  write_f64(os, h.grid.hi[1]);
  write_f64(os, h.m);
  write_f64(os, h.t0);
  write_f64(os, h.mesh.T);
  write_f64(os, h.mesh.dt);
  write_i64(os, h.mesh.steps);
  write_i64(os, h.record_stride);
  write_f64(os, h.u_min);
  write_i64(os, h.n_slices());
  for (int s = 0; s < h.n_slices(); ++s) {
    write_i64(os, time_index(h, s));
    os.write(reinterpret_cast<const char*>(h.slices[s].data()), 8 * h.slices[s].size());
  }
  if (!os) throw std::runtime_error("field_io: write failed for " + path);
}

ScalarFieldHistory load_history_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("field_io: cannot open " + path);
  char magic[6];
  is.read(magic, 6);
  if (std::string(magic, 6) != "PMEH1\n") throw std::runtime_error("field_io: bad magic");
  ScalarFieldHistory h;
  h.grid.dim = static_cast<int>(read_i64(is));
  h.grid.points[0] = static_cast<int>(read_i64(is));
  h.grid.points[1] = static_cast<int>(read_i64(is));
  const int64_t b = read_i64(is);
  if (b != 0) throw std::runtime_error("field_io: Dirichlet histories need their oracle re-attached; binary load supports periodic only");
  h.grid.boundary = Boundary::Periodic;
  h.grid.lo[0] = read_f64(is);
  h.grid.lo[1] = read_f64(is);
  h.grid.hi[0] = read_f64(is);
  h.grid.hi[1] = read_f64(is);
  h.m = read_f64(is);
  h.t0 = read_f64(is);
  h.mesh.T = read_f64(is);
  h.mesh.dt = read_f64(is);
  h.mesh.steps = static_cast<int>(read_i64(is));
  h.record_stride = static_cast<int>(read_i64(is));
  h.u_min = read_f64(is);
  const int64_t n = read_i64(is);
  const int size = h.grid.points[0] * h.grid.points[1];
  for (int64_t s = 0; s < n; ++s) {
    h.slice_times.push_back(static_cast<double>(read_i64(is)) * h.mesh.dt);
    ArrayXd v(size);
    is.read(reinterpret_cast<char*>(v.data()), 8 * size);
    h.slices.push_back(std::move(v));
  }
  if (!is) throw std::runtime_error("field_io: truncated file " + path);
  rebuild(h);
  return h;
}

}  // namespace pmelab
