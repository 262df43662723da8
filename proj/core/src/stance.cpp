#include "ranklab/stance.hpp"

#include "ranklab/error.hpp"

namespace ranklab {

Stance::Stance(int value) : value_(0) {
  if (value < -2 || value > 2) {
    throw ValidationError("stance must be in {-2,-1,0,1,2}, got " + std::to_string(value));
  }
  value_ = static_cast<std::int8_t>(value);
}

std::optional<Stance> Stance::parse(int value) {
  if (value < -2 || value > 2) return std::nullopt;
  return Stance(value, Unchecked{});
}

Stance Stance::from_index(std::size_t index) {
  if (index >= kNumStances) {
    throw ValidationError("stance index out of range: " + std::to_string(index));
  }
  return Stance(static_cast<int>(index) - 2, Unchecked{});
}

std::string_view group_tag(UserGroup g) {
  switch (g) {
    case UserGroup::Left:
      return "L";
    case UserGroup::Center:
      return "C";
    case UserGroup::Right:
      return "R";
  }
  return "?";
}

std::optional<UserGroup> parse_group(std::string_view tag) {
  if (tag == "L") return UserGroup::Left;
  if (tag == "C") return UserGroup::Center;
  if (tag == "R") return UserGroup::Right;
  return std::nullopt;
}

std::string_view stance_label(Stance s) {
  static constexpr std::array<std::string_view, kNumStances> kLabels = {"EL", "ML", "C", "MR", "ER"};
  return kLabels[s.index()];
}

}  // namespace ranklab
