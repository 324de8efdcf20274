#ifndef VASSFORGE_VERSION_HPP
#define VASSFORGE_VERSION_HPP

namespace vassforge {

inline constexpr const char* kVersion = "0.1.0";

} // namespace vassforge

#endif
