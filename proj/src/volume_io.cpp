#include "fissure/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

namespace fissure {
namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string met_name(ElementType t) {
  switch (t) {
    case ElementType::u8:
      return "MET_UCHAR";
    case ElementType::i16:
      return "MET_SHORT";
    case ElementType::u16:
      return "MET_USHORT";
    case ElementType::f32:
      return "MET_FLOAT";
  }
  return "MET_FLOAT";
}

ElementType from_met_name(const std::string& name) {
  if (name == "MET_UCHAR") return ElementType::u8;
  if (name == "MET_SHORT") return ElementType::i16;
  if (name == "MET_USHORT") return ElementType::u16;
  if (name == "MET_FLOAT") return ElementType::f32;
  throw InputError("unsupported ElementType " + name);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
T read_le(const unsigned char* p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    auto* b = reinterpret_cast<unsigned char*>(&value);
    std::reverse(b, b + sizeof(T));
  }
  return value;
}

std::vector<float> decode(const std::vector<unsigned char>& bytes, ElementType type,
                          std::size_t count) {
  std::vector<float> out(count);
  const unsigned char* p = bytes.data();
  const std::size_t es = element_size(type);
  for (std::size_t i = 0; i < count; ++i, p += es) {
    switch (type) {
      case ElementType::u8:
        out[i] = static_cast<float>(*p);
        break;
      case ElementType::i16:
        out[i] = static_cast<float>(read_le<std::int16_t>(p));
        break;
      case ElementType::u16:
        out[i] = static_cast<float>(read_le<std::uint16_t>(p));
        break;
      case ElementType::f32:
        out[i] = read_le<float>(p);
        break;
    }
  }
  return out;
}

std::vector<unsigned char> read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

ScalarVolume load_raw(const fs::path& path, const RawLayout& layout) {
  if (layout.dims.empty()) throw InputError("raw dims must be positive");
  if (!layout.spacing.valid()) throw InputError("raw spacing must be positive");
  const auto bytes = read_file(path);
  const std::size_t expected = layout.dims.voxels() * element_size(layout.type);
  if (bytes.size() != expected) {
    throw InputError(path.string() + ": raw size " + std::to_string(bytes.size()) +
                     " bytes, expected " + std::to_string(expected));
  }
  auto data = decode(bytes, layout.type, layout.dims.voxels());
  for (float v : data) {
    if (!std::isfinite(v)) throw InputError(path.string() + ": non-finite intensity");
  }
  return ScalarVolume(layout.dims, layout.spacing, std::move(data));
}

ScalarVolume load_mhd(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::map<std::string, std::string> header;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const auto key = trim(line.substr(0, eq));
    header[key] = trim(line.substr(eq + 1));
    if (key == "ElementDataFile") break;
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = header.find(key);
    if (it == header.end()) throw InputError(path.string() + ": missing header key " + key);
    return it->second;
  };

  if (header.count("NDims") && need("NDims") != "3") {
    throw InputError(path.string() + ": only NDims = 3 is supported");
  }
  for (const char* key : {"BinaryDataByteOrderMSB", "ElementByteOrderMSB"}) {
    auto it = header.find(key);
    if (it != header.end() && it->second != "False" && it->second != "false") {
      throw InputError(path.string() + ": big-endian data is not supported");
    }
  }
  if (auto it = header.find("CompressedData"); it != header.end() && it->second != "False") {
    throw InputError(path.string() + ": compressed MetaImage is not supported");
  }

  RawLayout layout;
  {
    std::istringstream ds(need("DimSize"));
    long long x = 0, y = 0, z = 0;
    if (!(ds >> x >> y >> z) || x <= 0 || y <= 0 || z <= 0) {
      throw InputError(path.string() + ": invalid DimSize");
    }
    layout.dims = {static_cast<std::size_t>(x), static_cast<std::size_t>(y),
                   static_cast<std::size_t>(z)};
  }
  if (header.count("ElementSpacing")) {
    std::istringstream ss(need("ElementSpacing"));
    if (!(ss >> layout.spacing.sx >> layout.spacing.sy >> layout.spacing.sz)) {
      throw InputError(path.string() + ": invalid ElementSpacing");
    }
  }
  if (!layout.spacing.valid()) throw InputError(path.string() + ": non-positive spacing");
  layout.type = from_met_name(need("ElementType"));

  fs::path data_file = need("ElementDataFile");
  if (data_file == "LOCAL") throw InputError(path.string() + ": inline data is not supported");
  if (data_file.is_relative()) data_file = path.parent_path() / data_file;
  return load_raw(data_file, layout);
}

std::pair<fs::path, fs::path> output_paths(const fs::path& path) {
  fs::path stem = path;
  if (stem.extension() == ".mhd" || stem.extension() == ".raw") stem.replace_extension();
  fs::path mhd = stem;
  mhd += ".mhd";
  fs::path raw = stem;
  raw += ".raw";
  return {mhd, raw};
}

void write_pair(const fs::path& path, const Dims& dims, const Spacing& spacing, ElementType type,
                const void* data, std::size_t bytes) {
  if (dims.empty()) throw InputError("refusing to write a volume with zero dimension");
  const auto [mhd, raw] = output_paths(path);
  if (mhd.has_parent_path()) fs::create_directories(mhd.parent_path());

  std::ofstream hdr(mhd, std::ios::binary);
  if (!hdr) throw std::runtime_error("cannot write " + mhd.string());
  hdr << "ObjectType = Image\n"
      << "NDims = 3\n"
      << "BinaryData = True\n"
      << "BinaryDataByteOrderMSB = False\n"
      << "CompressedData = False\n"
      << "ElementSpacing = " << format_double(spacing.sx) << ' ' << format_double(spacing.sy)
      << ' ' << format_double(spacing.sz) << '\n'
      << "DimSize = " << dims.nx << ' ' << dims.ny << ' ' << dims.nz << '\n'
      << "ElementType = " << met_name(type) << '\n'
      << "ElementDataFile = " << raw.filename().string() << '\n';
  if (!hdr) throw std::runtime_error("failed writing " + mhd.string());

  std::ofstream out(raw, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + raw.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw std::runtime_error("failed writing " + raw.string());
}

}  // namespace

ElementType parse_element_type(const std::string& name) {
  if (name == "u8" || name == "uint8") return ElementType::u8;
  if (name == "i16" || name == "int16") return ElementType::i16;
  if (name == "u16" || name == "uint16") return ElementType::u16;
  if (name == "f32" || name == "float32") return ElementType::f32;
  throw InputError("unsupported dtype '" + name + "'");
}

std::size_t element_size(ElementType type) {
  switch (type) {
    case ElementType::u8:
      return 1;
    case ElementType::i16:
    case ElementType::u16:
      return 2;
    case ElementType::f32:
      return 4;
  }
  return 4;
}

ScalarVolume load_volume(const fs::path& path, const std::optional<RawLayout>& raw) {
  if (!fs::exists(path)) throw InputError("no such file: " + path.string());
  if (raw) return load_raw(path, *raw);
  if (path.extension() != ".mhd") {
    throw InputError(path.string() + ": expected a .mhd header (or pass raw layout flags)");
  }
  return load_mhd(path);
}

BinaryVolume load_mask(const fs::path& path, const std::optional<RawLayout>& raw) {
  const ScalarVolume v = load_volume(path, raw);
  BinaryVolume m(v.dims(), v.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) m[i] = v[i] != 0.0f ? 1 : 0;
  return m;
}

BinaryVolume threshold_mask(const ScalarVolume& v, float value) {
  BinaryVolume m(v.dims(), v.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) m[i] = v[i] > value ? 1 : 0;
  return m;
}

void write_volume(const ScalarVolume& v, const fs::path& path) {
  static_assert(std::endian::native == std::endian::little, "writer assumes little-endian host");
  write_pair(path, v.dims(), v.spacing(), ElementType::f32, v.data().data(),
             v.size() * sizeof(float));
}

void write_volume(const BinaryVolume& v, const fs::path& path) {
  std::vector<std::uint8_t> bytes(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) bytes[i] = v[i] ? 1 : 0;
  write_pair(path, v.dims(), v.spacing(), ElementType::u8, bytes.data(), bytes.size());
}

ScalarVolume apply_mask(const ScalarVolume& v, const BinaryVolume& mask, float fill) {
  require_same_grid(v, mask, "apply_mask");
  ScalarVolume out(v.dims(), v.spacing());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = mask[i] ? v[i] : fill;
  return out;
}

}  // namespace fissure
