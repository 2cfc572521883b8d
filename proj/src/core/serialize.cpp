#include "fewshot/core/serialize.hpp"

#include <cstring>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fewshot::io {

namespace {

template <typename T>
void write_raw(std::ostream& os, T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("unexpected end of stream");
  return v;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

void write_u32(std::ostream& os, std::uint32_t v) { write_raw(os, v); }
void write_u64(std::ostream& os, std::uint64_t v) { write_raw(os, v); }
void write_f64(std::ostream& os, double v) { write_raw(os, v); }

void write_string(std::ostream& os, const std::string& s) {
  write_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void write_tensor(std::ostream& os, const Tensor& t) {
  write_u32(os, static_cast<std::uint32_t>(t.ndim()));
  for (int i = 0; i < t.ndim(); ++i) write_u32(os, static_cast<std::uint32_t>(t.dim(i)));
  os.write(reinterpret_cast<const char*>(t.data()),
           static_cast<std::streamsize>(t.size() * sizeof(double)));
}

std::uint32_t read_u32(std::istream& is) { return read_raw<std::uint32_t>(is); }
std::uint64_t read_u64(std::istream& is) { return read_raw<std::uint64_t>(is); }
double read_f64(std::istream& is) { return read_raw<double>(is); }

std::string read_string(std::istream& is) {
  const std::uint32_t n = read_u32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  if (!is) throw std::runtime_error("unexpected end of stream");
  return s;
}

Tensor read_tensor(std::istream& is) {
  const std::uint32_t ndim = read_u32(is);
  if (ndim == 0 || ndim > 8) throw std::runtime_error("corrupt tensor header");
  std::vector<int> shape(ndim);
  for (auto& d : shape) d = static_cast<int>(read_u32(is));
  Tensor t(shape);
  is.read(reinterpret_cast<char*>(t.data()), static_cast<std::streamsize>(t.size() * sizeof(double)));
  if (!is) throw std::runtime_error("unexpected end of stream");
  return t;
}

std::string format_kv(const std::map<std::string, std::string>& kv) {
  std::ostringstream os;
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
  return os.str();
}

std::string format_double(double v) {
  for (int prec = 1; prec <= 17; ++prec) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    if (std::stod(os.str()) == v) return os.str();
  }
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed key-value line: " + line);
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return kv;
}

}  // namespace fewshot::io
