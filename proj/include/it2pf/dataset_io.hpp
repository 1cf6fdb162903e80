#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "it2pf/recording.hpp"

namespace it2pf {

inline constexpr int kDatasetFormatVersion = 1;

/// Dataset CSV: a metadata line "# it2pf-dataset v1 channel=<tag> dt=<s> n=<n> m=<m>",
/// a header "t,trial_id,x1..xn,v1..vn,y1..ym", then one row per tick (%.17g values).
void write_recording_csv(const Recording& rec, std::ostream& out);
Recording read_recording_csv(std::istream& in);

Recording load_recording(const std::filesystem::path& path);
void save_recording(const Recording& rec, const std::filesystem::path& path);

/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace it2pf
