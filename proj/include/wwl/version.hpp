#ifndef WWL_VERSION_HPP
#define WWL_VERSION_HPP

namespace wwl {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wwl

#endif  // WWL_VERSION_HPP
