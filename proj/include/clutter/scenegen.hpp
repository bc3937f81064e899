#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "clutter/grasp.hpp"
#include "clutter/scene_io.hpp"

namespace clutter {

class GenerationError : public Error {
public:
    using Error::Error;
};

struct RetrievalGenConfig {
    double workspace_size = 0.288;
    int min_objects = 4;
    int max_objects = 10;
    /// Start scenes must not be graspable at this threshold.
    double graspable_threshold = 0.8;
    /// Surface gap between a packed object and its nearest neighbour.
    double min_gap = 0.001;
    double max_gap = 0.012;
    int max_attempts = 10000;
    GripperModel gripper;
};

struct RearrangementGenConfig {
    double workspace_width = 0.5;
    double workspace_height = 0.4;
    double push_only_fraction = 0.25;
    /// Chance that a goal is drawn around another object's start pose.
    double goal_overlap_bias = 0.6;
    /// Cases HBFS solves in at most N actions are dropped with this probability.
    double trivial_discard_probability = 0.8;
    int max_attempts = 10000;
    /// Sample cap for the filter's motion planner (no wall-clock limit, so filtering is
    /// host independent).
    int filter_rrt_samples = 3000;
};

/// Target box or polygon at the workspace centre with 4-10 random convex objects packed
/// tightly around it; scenes graspable at the threshold are rejected.
Scene generate_retrieval_scene(std::uint64_t seed, int n_objects, const RetrievalGenConfig& cfg = {});

/// Random collision-free start and goal arrangements of n objects; goals are biased to
/// sit on other objects' start poses, and trivial cases are filtered.
Scene generate_rearrangement_scene(std::uint64_t seed, int n_objects, const RearrangementGenConfig& cfg = {});

/// Six hand-authored retrieval cases approximating hard clutter topologies: walled
/// target, tight ring, corner pocket, long corridor, L-shaped pocket, double wall.
std::vector<Scene> hard_retrieval_cases();

struct SuiteEntry {
    std::string case_id;
    std::string kind;  // "retrieval" or "rearrangement"
    std::string file;
    int n_objects = 0;
    std::string note;
};

struct Suite {
    std::filesystem::path dir;
    std::vector<SuiteEntry> cases;
};

struct SuiteSpec {
    int retrieval_cases = 20;
    int rearrangement_per_count = 5;
    int rearrangement_min_objects = 4;
    int rearrangement_max_objects = 8;
    bool hard_cases = true;
    std::uint64_t seed = 0;
};

/// Writes every case file plus manifest.json; returns the manifest.
Suite generate_suite(const std::filesystem::path& dir, const SuiteSpec& spec,
                     const RetrievalGenConfig& rcfg = {}, const RearrangementGenConfig& mcfg = {});

Suite load_suite(const std::filesystem::path& dir);
void save_manifest(const Suite& suite);

}  // namespace clutter
