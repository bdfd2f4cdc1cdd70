#include "fracvortex/snapshot.hpp"

#include "fracvortex/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace fracvortex {
namespace {

static_assert(std::endian::native == std::endian::little, "snapshot I/O assumes a little-endian host");

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("truncated snapshot");
  return value;
}

void put_field(std::ostream& out, const ComplexArray& a) {
  out.write(reinterpret_cast<const char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(Complex)));
}

void get_field(std::istream& in, ComplexArray& a) {
  in.read(reinterpret_cast<char*>(a.data()), static_cast<std::streamsize>(a.size() * sizeof(Complex)));
  if (!in) throw std::runtime_error("truncated snapshot payload");
}

}  // namespace

void write_snapshot(std::ostream& out, const SimState& st) {
  out.write("CNLS", 4);
  put<std::uint32_t>(out, snapshot_version);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(st.grid().nx()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(st.grid().ny()));
  put<double>(out, st.t);
  put<double>(out, st.epsilon);
  put<double>(out, st.g);
  put_field(out, st.u.data);
  put_field(out, st.v.data);
}

void write_snapshot(const std::string& path, const SimState& st) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open snapshot for writing", path);
  write_snapshot(out, st);
  if (!out) throw IoError("failed writing snapshot", path);
}

SimState read_snapshot(std::istream& in, const Domain& domain) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::memcmp(magic.data(), "CNLS", 4) != 0) throw std::runtime_error("not a CNLS snapshot");
  const auto version = get<std::uint32_t>(in);
  if (version != snapshot_version) throw std::runtime_error("unsupported snapshot version");
  const auto nx = get<std::uint32_t>(in);
  const auto ny = get<std::uint32_t>(in);
  const double t = get<double>(in);
  const double eps = get<double>(in);
  const double g = get<double>(in);
  SimState st(Grid(domain, static_cast<int>(nx), static_cast<int>(ny)), eps, g);
  st.t = t;
  get_field(in, st.u.data);
  get_field(in, st.v.data);
  return st;
}

SimState read_snapshot(const std::string& path, const Domain& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open snapshot", path);
  try {
    return read_snapshot(in, domain);
  } catch (const std::runtime_error& e) {
    throw IoError(e.what(), path);
  }
}

}  // namespace fracvortex
