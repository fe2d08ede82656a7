#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace handfit {

/// One section of the sectioned container format.
///
/// On disk a container is the magic line "HANDFIT-CONTAINER 1", followed by
/// sections. Each section is an ASCII header line `name rows cols dtype`
/// (dtype is f64 or i32) and then rows * cols little-endian values in
/// row-major order. Sections run until end of file; names are unique.
struct Section {
  std::string name;
  std::int64_t rows = 0;
  std::int64_t cols = 0;
  std::variant<std::vector<double>, std::vector<std::int32_t>> data;

  bool is_f64() const { return std::holds_alternative<std::vector<double>>(data); }
  const std::vector<double>& f64() const;
  const std::vector<std::int32_t>& i32() const;
};

using SectionMap = std::map<std::string, Section>;

void write_container(std::ostream& out, const std::vector<Section>& sections);
void write_container(const std::filesystem::path& path, const std::vector<Section>& sections);

/// Throws ParseError naming the offending section.
SectionMap read_container(std::istream& in);
SectionMap read_container(const std::filesystem::path& path);

}  // namespace handfit
