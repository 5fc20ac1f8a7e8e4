#ifndef WGF_VERSION_HPP
#define WGF_VERSION_HPP

namespace wgf {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
