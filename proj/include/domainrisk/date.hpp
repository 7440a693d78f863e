#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace drisk {

// Calendar day, stored as days since 1970-01-01. Cheap to copy and compare;
// subtraction yields whole days, which is the unit every feature works in.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(int serial) : serial_(serial) {}

  // Strict "YYYY-MM-DD". Rejects bad separators, short fields and
  // impossible calendar dates (2023-02-29, month 13, ...).
  static std::optional<Date> parse(std::string_view iso);

  // y/m/d must form a valid calendar date; throws std::invalid_argument otherwise.
  static Date from_ymd(int year, unsigned month, unsigned day);

  std::string to_string() const;  // "YYYY-MM-DD"

  constexpr int serial() const { return serial_; }

  friend constexpr auto operator<=>(Date, Date) = default;

  constexpr Date operator+(int days) const { return Date(serial_ + days); }
  constexpr Date operator-(int days) const { return Date(serial_ - days); }
  constexpr int operator-(Date other) const { return serial_ - other.serial_; }
  Date& operator+=(int days) { serial_ += days; return *this; }

 private:
  int serial_ = 0;
};

}  // namespace drisk
