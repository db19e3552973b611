#ifndef MODELH_SRC_MANIFEST_HPP
#define MODELH_SRC_MANIFEST_HPP

#include <string>

#include <json.hpp>

#include "modelh/app/config.hpp"

#ifndef MODELH_VERSION
#define MODELH_VERSION "unknown"
#endif

namespace modelh::app::detail {

// Common head of every manifest: what ran, which code, the resolved config.
inline nlohmann::ordered_json manifest_head(const std::string& command, const RunConfig& cfg)
{
    nlohmann::ordered_json m;
    m["format"] = "modelh-manifest";
    m["command"] = command;
    m["code_version"] = MODELH_VERSION;
    nlohmann::ordered_json c = nlohmann::ordered_json::object();
    for (const auto& [k, v] : to_key_values(cfg))
        c[k] = v;
    m["config"] = c;
    return m;
}

} // namespace modelh::app::detail

#endif
