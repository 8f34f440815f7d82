#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace sgchurn {

// Fixed-length binary membership string. Bit 0 is the leftmost (most
// significant) character of the textual form.
class NameId {
 public:
  static constexpr unsigned kMaxLength = 31;

  NameId() = default;
  NameId(std::uint32_t bits, unsigned length);

  static NameId from_string(std::string_view text);

  unsigned length() const { return length_; }
  std::uint32_t bits() const { return bits_; }
  bool bit(unsigned index) const;

  // Returns a copy extended by one bit on the right.
  NameId append(bool bit) const;

  std::string to_string() const;

  friend bool operator==(const NameId&, const NameId&) = default;
  // Lexicographic on the textual form for equal lengths.
  friend std::strong_ordering operator<=>(const NameId& a, const NameId& b);

 private:
  std::uint32_t bits_ = 0;
  std::uint8_t length_ = 0;
};

// Number of equal leading bits. Throws std::invalid_argument on unequal lengths.
unsigned common_prefix_length(const NameId& a, const NameId& b);

}  // namespace sgchurn
