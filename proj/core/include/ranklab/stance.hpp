#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace ranklab {

inline constexpr std::size_t kNumStances = 5;
inline constexpr std::size_t kNumGroups = 3;

// Position on the five-point ideological scale {-2,...,2}; negative is left.
// Array offsets everywhere are value + 2.
class Stance {
 public:
  // Throws ValidationError for values outside {-2,...,2}.
  explicit Stance(int value);

  static std::optional<Stance> parse(int value);
  static Stance from_index(std::size_t index);

  constexpr int value() const { return value_; }
  constexpr std::size_t index() const { return static_cast<std::size_t>(value_ + 2); }

  friend constexpr auto operator<=>(Stance, Stance) = default;

 private:
  struct Unchecked {};
  constexpr Stance(int value, Unchecked) : value_(static_cast<std::int8_t>(value)) {}

  std::int8_t value_;
};

enum class UserGroup : std::uint8_t { Left = 0, Center = 1, Right = 2 };

inline constexpr std::array<UserGroup, kNumGroups> kAllGroups = {UserGroup::Left, UserGroup::Center,
                                                                UserGroup::Right};

constexpr UserGroup group_of(Stance s) {
  if (s.value() < 0) return UserGroup::Left;
  if (s.value() == 0) return UserGroup::Center;
  return UserGroup::Right;
}

constexpr std::size_t group_index(UserGroup g) { return static_cast<std::size_t>(g); }

// "L", "C", "R".
std::string_view group_tag(UserGroup g);
std::optional<UserGroup> parse_group(std::string_view tag);

// "EL", "ML", "C", "MR", "ER".
std::string_view stance_label(Stance s);

}  // namespace ranklab
