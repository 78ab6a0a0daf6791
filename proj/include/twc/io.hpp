#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twc/grid.hpp"

namespace twc {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// All containers are little-endian on disk; this library targets LE hosts.
template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw IoError("unexpected end of stream");
    return v;
}

inline void write_magic(std::ostream& os, const char magic[4]) {
    os.write(magic, 4);
}

inline void expect_magic(std::istream& is, const char magic[4], const char* what) {
    char buf[4];
    is.read(buf, 4);
    if (!is || std::memcmp(buf, magic, 4) != 0)
        throw IoError(std::string("bad magic for ") + what);
}

inline void write_cplx_array(std::ostream& os, const std::vector<cplx>& a) {
    os.write(reinterpret_cast<const char*>(a.data()),
             std::streamsize(a.size() * sizeof(cplx)));
}

inline void read_cplx_array(std::istream& is, std::vector<cplx>& a) {
    is.read(reinterpret_cast<char*>(a.data()), std::streamsize(a.size() * sizeof(cplx)));
    if (!is) throw IoError("unexpected end of stream");
}

} // namespace detail

} // namespace twc
