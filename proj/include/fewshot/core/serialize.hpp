#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include "fewshot/core/tensor.hpp"

namespace fewshot::io {

// Little-endian primitives for the binary checkpoint container.
void write_u32(std::ostream& os, std::uint32_t v);
void write_u64(std::ostream& os, std::uint64_t v);
void write_f64(std::ostream& os, double v);
void write_string(std::ostream& os, const std::string& s);
void write_tensor(std::ostream& os, const Tensor& t);

std::uint32_t read_u32(std::istream& is);
std::uint64_t read_u64(std::istream& is);
double read_f64(std::istream& is);
std::string read_string(std::istream& is);
Tensor read_tensor(std::istream& is);

/// Flat "key = value" text block, one pair per line, keys emitted sorted.
std::string format_kv(const std::map<std::string, std::string>& kv);
std::map<std::string, std::string> parse_kv(const std::string& text);

/// Shortest decimal form that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace fewshot::io
