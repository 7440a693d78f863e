#include "domainrisk/date.hpp"

#include <chrono>
#include <cstdio>
#include <stdexcept>

namespace drisk {

namespace {

constexpr bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

constexpr int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<Date> Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
  std::string_view y = iso.substr(0, 4), m = iso.substr(5, 2), d = iso.substr(8, 2);
  if (!all_digits(y) || !all_digits(m) || !all_digits(d)) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{to_int(y)},
                                  std::chrono::month{static_cast<unsigned>(to_int(m))},
                                  std::chrono::day{static_cast<unsigned>(to_int(d))}};
  if (!ymd.ok()) return std::nullopt;
  auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
  return Date(static_cast<int>(days));
}

Date Date::from_ymd(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year}, std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
  return Date(static_cast<int>(std::chrono::sys_days{ymd}.time_since_epoch().count()));
}

std::string Date::to_string() const {
  std::chrono::sys_days sd{std::chrono::days{serial_}};
  std::chrono::year_month_day ymd{sd};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace drisk
