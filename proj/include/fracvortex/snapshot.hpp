#pragma once

#include "fracvortex/cnls.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace fracvortex {

/// Binary snapshot: magic "CNLS", version u32, nx u32, ny u32, then t, epsilon,
/// g as float64 (40-byte header, little-endian), followed by u and then v as
/// interleaved (re, im) float64 pairs in x-fastest order.
inline constexpr std::uint32_t snapshot_version = 1;
inline constexpr std::size_t snapshot_header_bytes = 40;

void write_snapshot(std::ostream& out, const SimState& state);
void write_snapshot(const std::string& path, const SimState& state);

/// The domain is not stored; the caller supplies it.
SimState read_snapshot(std::istream& in, const Domain& domain);
SimState read_snapshot(const std::string& path, const Domain& domain);

}  // namespace fracvortex
