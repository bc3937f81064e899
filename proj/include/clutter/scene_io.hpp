#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

#include "clutter/sampling.hpp"

namespace clutter {

class ParseError : public Error {
public:
    using Error::Error;
};

/// A scene file: start state plus either a retrieval target or rearrangement goals.
struct Scene {
    std::string case_id;
    SceneState state;
    std::map<int, Pose2> goals;
    /// Free-form provenance note stored with the file (e.g. "hand-authored").
    std::string note;

    RempGoal goal() const { return RempGoal{goals}; }
    bool is_rearrangement() const { return !goals.empty(); }
};

enum class SceneKind { any, retrieval, rearrangement };

inline constexpr int kSceneFormatVersion = 1;

/// Validation errors name the offending field.
void validate(const Scene& scene, SceneKind kind = SceneKind::any);

nlohmann::json to_json(const Scene& scene);
/// Throws ParseError on structural problems and ValidationError on invariant violations.
Scene scene_from_json(const nlohmann::json& j, SceneKind kind = SceneKind::any);

/// JSON text with round-trip exact number formatting.
std::string dump_scene(const Scene& scene);
Scene parse_scene(const std::string& text, SceneKind kind = SceneKind::any);

Scene load_scene(const std::filesystem::path& path, SceneKind kind = SceneKind::any);
void save_scene(const Scene& scene, const std::filesystem::path& path);

nlohmann::json pose_to_json(const Pose2& p);

}  // namespace clutter
