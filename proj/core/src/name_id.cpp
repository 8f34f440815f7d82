#include "sgchurn/name_id.hpp"

#include <bit>
#include <stdexcept>

namespace sgchurn {

NameId::NameId(std::uint32_t bits, unsigned length) : bits_(bits), length_(static_cast<std::uint8_t>(length)) {
  if (length > kMaxLength) {
    throw std::invalid_argument("name ID longer than " + std::to_string(kMaxLength) + " bits");
  }
  if (length < 32 && (bits >> length) != 0) {
    throw std::invalid_argument("name ID bits exceed its length");
  }
}

NameId NameId::from_string(std::string_view text) {
  if (text.size() > kMaxLength) {
    throw std::invalid_argument("name ID longer than " + std::to_string(kMaxLength) + " bits");
  }
  std::uint32_t bits = 0;
  for (char c : text) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("name ID must be a binary string: '" + std::string(text) + "'");
    }
    bits = (bits << 1) | static_cast<std::uint32_t>(c == '1');
  }
  return NameId(bits, static_cast<unsigned>(text.size()));
}

bool NameId::bit(unsigned index) const {
  if (index >= length_) {
    throw std::out_of_range("name ID bit index out of range");
  }
  return ((bits_ >> (length_ - 1 - index)) & 1U) != 0;
}

NameId NameId::append(bool bit) const {
  return NameId((bits_ << 1) | static_cast<std::uint32_t>(bit), length_ + 1U);
}

std::string NameId::to_string() const {
  std::string out(length_, '0');
  for (unsigned i = 0; i < length_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

std::strong_ordering operator<=>(const NameId& a, const NameId& b) {
  if (a.length_ == b.length_) return a.bits_ <=> b.bits_;
  return a.to_string() <=> b.to_string();
}

unsigned common_prefix_length(const NameId& a, const NameId& b) {
  if (a.length() != b.length()) {
    throw std::invalid_argument("common_prefix_length: name IDs differ in length");
  }
  const std::uint32_t diff = a.bits() ^ b.bits();
  if (diff == 0) return a.length();
  return a.length() - static_cast<unsigned>(std::bit_width(diff));
}

}  // namespace sgchurn
