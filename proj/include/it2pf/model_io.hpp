#pragma once

#include <filesystem>
#include <string>

#include "it2pf/fuzzy_core.hpp"
#include "it2pf/identification.hpp"

namespace it2pf {

inline constexpr int kModelFormatVersion = 1;

/// JSON model document. Doubles are written in shortest round-trip form, so
/// load_model(save_model(m)) reproduces every coefficient bit for bit.
std::string model_to_string(const IT2PFModel& model);
IT2PFModel model_from_string(const std::string& text);

void save_model(const IT2PFModel& model, const std::filesystem::path& path);
IT2PFModel load_model(const std::filesystem::path& path);

std::string fit_report_to_string(const FitReport& report);
FitReport fit_report_from_string(const std::string& text);

}  // namespace it2pf
