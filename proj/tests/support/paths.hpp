#pragma once

#include <string>

#ifndef FUNNELSIM_SCENARIO_DIR
#define FUNNELSIM_SCENARIO_DIR "scenarios"
#endif

inline std::string scenario_path(const std::string& name) {
    return std::string(FUNNELSIM_SCENARIO_DIR) + "/" + name;
}
