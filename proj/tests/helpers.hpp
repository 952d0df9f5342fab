#pragma once

#include <filesystem>
#include <fstream>
#include <string>

namespace testutil {

inline std::string temp_path(const std::string& name) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "grad_tests";
    fs::create_directories(dir);
    return (dir / name).string();
}

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

}  // namespace testutil
