#pragma once

#include <filesystem>
#include <iosfwd>

#include "resdiff/tensor.hpp"

namespace resdiff {

// RSF1 binary tensor format, little-endian throughout:
//   bytes 0..3   magic "RSF1"
//   u32          rank
//   u32 * rank   dims
//   f64 * n      data, row-major
void write_rsf1(std::ostream& out, const Tensor& t);
Tensor read_rsf1(std::istream& in);

void save_rsf1(const std::filesystem::path& path, const Tensor& t);
Tensor load_rsf1(const std::filesystem::path& path);

} // namespace resdiff
