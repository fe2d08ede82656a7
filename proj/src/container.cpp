#include "handfit/container.hpp"

#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "handfit/errors.hpp"

namespace handfit {

namespace {

constexpr const char* kMagic = "HANDFIT-CONTAINER 1";
constexpr std::int64_t kMaxElements = std::int64_t{1} << 31;

static_assert(std::endian::native == std::endian::little,
              "container I/O assumes a little-endian host");

bool valid_name(const std::string& name) {
  if (name.empty()) return false;
  for (char c : name) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  }
  return true;
}

template <class T>
void write_payload(std::ostream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <class T>
std::vector<T> read_payload(std::istream& in, std::int64_t count, const std::string& name) {
  std::vector<T> v(static_cast<std::size_t>(count));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
  if (in.gcount() != static_cast<std::streamsize>(v.size() * sizeof(T))) {
    throw ParseError(name, "truncated payload");
  }
  return v;
}

}  // namespace

const std::vector<double>& Section::f64() const {
  if (!is_f64()) throw ParseError(name, "expected dtype f64");
  return std::get<std::vector<double>>(data);
}

const std::vector<std::int32_t>& Section::i32() const {
  if (is_f64()) throw ParseError(name, "expected dtype i32");
  return std::get<std::vector<std::int32_t>>(data);
}

void write_container(std::ostream& out, const std::vector<Section>& sections) {
  out << kMagic << '\n';
  for (const Section& s : sections) {
    if (!valid_name(s.name)) throw InputError("invalid section name '" + s.name + "'");
    const std::size_t expected = static_cast<std::size_t>(s.rows * s.cols);
    std::visit(
        [&](const auto& v) {
          if (v.size() != expected) {
            throw InputError("section '" + s.name + "' payload does not match its dimensions");
          }
        },
        s.data);
    out << s.name << ' ' << s.rows << ' ' << s.cols << ' ' << (s.is_f64() ? "f64" : "i32") << '\n';
    std::visit([&](const auto& v) { write_payload(out, v); }, s.data);
  }
}

void write_container(const std::filesystem::path& path, const std::vector<Section>& sections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_container(out, sections);
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

SectionMap read_container(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) {
    throw ParseError("header", "missing magic line '" + std::string(kMagic) + "'");
  }
  SectionMap sections;
  while (std::getline(in, line)) {
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::istringstream hs(line);
    Section s;
    std::string dtype, extra;
    if (!(hs >> s.name >> s.rows >> s.cols >> dtype) || (hs >> extra)) {
      throw ParseError(s.name.empty() ? "header" : s.name,
                       "malformed section header '" + line + "'");
    }
    if (!valid_name(s.name)) throw ParseError(s.name, "invalid section name");
    if (s.rows < 0 || s.cols < 0 || s.rows * s.cols > kMaxElements) {
      throw ParseError(s.name, "invalid dimensions");
    }
    if (sections.count(s.name)) throw ParseError(s.name, "duplicate section");
    if (dtype == "f64") {
      s.data = read_payload<double>(in, s.rows * s.cols, s.name);
    } else if (dtype == "i32") {
      s.data = read_payload<std::int32_t>(in, s.rows * s.cols, s.name);
    } else {
      throw ParseError(s.name, "unknown dtype '" + dtype + "'");
    }
    sections.emplace(s.name, std::move(s));
  }
  return sections;
}

SectionMap read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return read_container(in);
}

}  // namespace handfit
