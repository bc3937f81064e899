#include "clutter/scene_io.hpp"

#include <fstream>
#include <sstream>

namespace clutter {

using nlohmann::json;

namespace {

const json& field(const json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + "." + key + ": missing");
    return *it;
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ParseError(where + ": expected a number");
    return j.get<double>();
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ParseError(where + ": expected an integer");
    return j.get<int>();
}

Pose2 pose_from_json(const json& j, const std::string& where) {
    return Pose2(number(field(j, "x", where), where + ".x"), number(field(j, "y", where), where + ".y"),
                 number(field(j, "theta", where), where + ".theta"));
}

}  // namespace

json pose_to_json(const Pose2& p) { return json{{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }

void validate(const Scene& scene, SceneKind kind) {
    const SceneState& s = scene.state;
    if (!(s.workspace.width() > 0.0) || !(s.workspace.height() > 0.0)) {
        throw ValidationError("workspace: width_m and height_m must be positive");
    }
    if (kind == SceneKind::retrieval && !s.target_id) throw ValidationError("target_id: required for retrieval scenes");
    if (kind == SceneKind::rearrangement && scene.goals.empty()) {
        throw ValidationError("goals: required for rearrangement scenes");
    }
    validate_scene(s);
    if (scene.goals.empty()) return;
    SceneState goal_state = s;
    goal_state.target_id.reset();
    for (const auto& [id, pose] : scene.goals) {
        ObjectState* o = goal_state.find(id);
        if (!o) throw ValidationError("goals." + std::to_string(id) + ": unknown object id");
        o->set_pose(pose);
    }
    try {
        validate_scene(goal_state);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("goals: ") + e.what());
    }
}

json to_json(const Scene& scene) {
    const SceneState& s = scene.state;
    json objects = json::array();
    for (const ObjectState& o : s.objects) {
        json parts = json::array();
        for (const ConvexPolygon& part : o.shape().parts()) {
            json pts = json::array();
            for (const Vec2& v : part.vertices()) pts.push_back(json::array({v.x, v.y}));
            parts.push_back(std::move(pts));
        }
        objects.push_back(json{{"id", o.id()},
                               {"parts", std::move(parts)},
                               {"pose", pose_to_json(o.pose())},
                               {"movability", to_string(o.movability())},
                               {"friction_scale", o.friction_scale()}});
    }
    json j{{"format_version", kSceneFormatVersion},
           {"case_id", scene.case_id},
           {"workspace", {{"width_m", s.workspace.width()}, {"height_m", s.workspace.height()}}},
           {"objects", std::move(objects)},
           {"target_id", s.target_id ? json(*s.target_id) : json(nullptr)},
           {"rng_seed", s.rng_seed}};
    json goals = json::object();
    for (const auto& [id, pose] : scene.goals) goals[std::to_string(id)] = pose_to_json(pose);
    j["goals"] = std::move(goals);
    if (!scene.note.empty()) j["note"] = scene.note;
    return j;
}

Scene scene_from_json(const json& j, SceneKind kind) {
    Scene scene;
    const int version = integer(field(j, "format_version", "scene"), "format_version");
    if (version != kSceneFormatVersion) {
        throw ParseError("format_version: unsupported version " + std::to_string(version));
    }
    if (auto it = j.find("case_id"); it != j.end() && it->is_string()) scene.case_id = it->get<std::string>();
    if (auto it = j.find("note"); it != j.end() && it->is_string()) scene.note = it->get<std::string>();
    const json& ws = field(j, "workspace", "scene");
    scene.state.workspace = Rect::from_size(number(field(ws, "width_m", "workspace"), "workspace.width_m"),
                                            number(field(ws, "height_m", "workspace"), "workspace.height_m"));
    const json& objects = field(j, "objects", "scene");
    if (!objects.is_array()) throw ParseError("objects: expected an array");
    for (std::size_t i = 0; i < objects.size(); ++i) {
        const std::string where = "objects[" + std::to_string(i) + "]";
        const json& o = objects[i];
        const int id = integer(field(o, "id", where), where + ".id");
        const json& parts_j = field(o, "parts", where);
        if (!parts_j.is_array() || parts_j.empty()) throw ParseError(where + ".parts: expected a non-empty array");
        std::vector<ConvexPolygon> parts;
        for (std::size_t p = 0; p < parts_j.size(); ++p) {
            const std::string pw = where + ".parts[" + std::to_string(p) + "]";
            if (!parts_j[p].is_array()) throw ParseError(pw + ": expected an array of points");
            std::vector<Vec2> pts;
            for (std::size_t k = 0; k < parts_j[p].size(); ++k) {
                const json& pt = parts_j[p][k];
                const std::string kw = pw + "[" + std::to_string(k) + "]";
                if (!pt.is_array() || pt.size() != 2) throw ParseError(kw + ": expected [x, y]");
                pts.push_back({number(pt[0], kw), number(pt[1], kw)});
            }
            try {
                parts.push_back(ConvexPolygon::from_points(pts));
            } catch (const GeometryError& e) {
                throw ValidationError(pw + ": " + e.what());
            }
        }
        Movability mov = Movability::pick_or_push;
        if (auto it = o.find("movability"); it != o.end()) {
            if (!it->is_string()) throw ParseError(where + ".movability: expected a string");
            try {
                mov = movability_from_string(it->get<std::string>());
            } catch (const Error& e) {
                throw ValidationError(where + ".movability: " + e.what());
            }
        }
        double friction = 1.0;
        if (auto it = o.find("friction_scale"); it != o.end()) friction = number(*it, where + ".friction_scale");
        if (!(friction > 0.0)) throw ValidationError(where + ".friction_scale: must be positive");
        auto shape = std::make_shared<const Shape>(Shape::from_parts(std::move(parts)));
        scene.state.objects.emplace_back(id, std::move(shape), pose_from_json(field(o, "pose", where), where + ".pose"),
                                         mov, friction);
    }
    try {
        scene.state.sort_objects();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("objects: ") + e.what());
    }
    if (auto it = j.find("target_id"); it != j.end() && !it->is_null()) scene.state.target_id = integer(*it, "target_id");
    if (auto it = j.find("rng_seed"); it != j.end()) {
        if (!it->is_number_unsigned() && !it->is_number_integer()) throw ParseError("rng_seed: expected an integer");
        scene.state.rng_seed = it->get<std::uint64_t>();
    }
    if (auto it = j.find("goals"); it != j.end()) {
        if (!it->is_object()) throw ParseError("goals: expected an object keyed by id");
        for (const auto& [key, value] : it->items()) {
            int id = 0;
            try {
                std::size_t used = 0;
                id = std::stoi(key, &used);
                if (used != key.size()) throw std::invalid_argument(key);
            } catch (const std::exception&) {
                throw ParseError("goals." + key + ": key is not an object id");
            }
            scene.goals[id] = pose_from_json(value, "goals." + key);
        }
    }
    validate(scene, kind);
    return scene;
}

std::string dump_scene(const Scene& scene) { return to_json(scene).dump(2) + "\n"; }

Scene parse_scene(const std::string& text, SceneKind kind) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed scene: ") + e.what());
    }
    return scene_from_json(j, kind);
}

Scene load_scene(const std::filesystem::path& path, SceneKind kind) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scene(ss.str(), kind);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_scene(const Scene& scene, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << dump_scene(scene);
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace clutter
