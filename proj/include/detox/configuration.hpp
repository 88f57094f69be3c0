#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace detox {

// Which assertions are compiled in. Bit i corresponds to assertion index i;
// the string form "101" means assertion 0 on, 1 off, 2 on.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<uint8_t> bits) : bits_(std::move(bits)) {}

  static Configuration all_enabled(size_t n) {
    return Configuration(std::vector<uint8_t>(n, 1));
  }
  static Configuration all_disabled(size_t n) {
    return Configuration(std::vector<uint8_t>(n, 0));
  }

  static Configuration from_string(const std::string& s) {
    std::vector<uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1')
        throw std::invalid_argument("configuration string must be over {0,1}, got '" +
                                    std::string(1, c) + "'");
      bits.push_back(c == '1' ? 1 : 0);
    }
    return Configuration(std::move(bits));
  }

  // k interpreted MSB-first over n bits, so ascending k enumerates
  // configuration strings in lexicographic order.
  static Configuration from_index(uint64_t k, size_t n) {
    std::vector<uint8_t> bits(n, 0);
    for (size_t i = 0; i < n; ++i)
      bits[i] = static_cast<uint8_t>((k >> (n - 1 - i)) & 1);
    return Configuration(std::move(bits));
  }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) s[i] = '1';
    return s;
  }

  size_t size() const { return bits_.size(); }
  bool enabled(size_t i) const { return bits_.at(i) != 0; }
  void set(size_t i, bool on) { bits_.at(i) = on ? 1 : 0; }

  size_t enabled_count() const {
    size_t n = 0;
    for (uint8_t b : bits_) n += b;
    return n;
  }

  const std::vector<uint8_t>& bits() const { return bits_; }

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<uint8_t> bits_;
};

}  // namespace detox
