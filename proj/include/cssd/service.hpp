#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace httplib {
class Server;
}

namespace cssd {

/// Scenario records persisted to one JSON file. Every mutation rewrites the
/// file through a temporary and a rename, so a crash leaves either the old
/// or the new store on disk. Writers are serialized; last write wins.
class ScenarioStore {
public:
    struct Record {
        std::string id;
        nlohmann::json scenario;  ///< canonical form (see canonical_scenario)
        std::string created_at;
        std::string updated_at;
    };

    explicit ScenarioStore(std::filesystem::path file);

    Record create(const nlohmann::json& scenario);
    std::optional<Record> get(const std::string& id) const;
    std::optional<Record> update(const std::string& id, const nlohmann::json& scenario);
    bool remove(const std::string& id);
    std::vector<Record> list() const;

    const std::filesystem::path& file() const { return file_; }

private:
    void load();
    void persist() const;

    std::filesystem::path file_;
    mutable std::mutex mutex_;
    std::map<std::string, Record> records_;
    long next_id_ = 1;
};

struct HttpResponse {
    int status = 200;
    std::string body;
};

inline constexpr std::size_t kMaxSweepRows = 100000;
inline constexpr long kMaxReplicates = 1000000;

/// HTTP facade. `handle` is the whole routing table and is usable without a
/// socket; `mount` registers it on an httplib server.
class Service {
public:
    explicit Service(ScenarioStore& store) : store_(store) {}

    HttpResponse handle(std::string_view method, std::string_view path, std::string_view body) const;
    void mount(httplib::Server& server) const;

private:
    HttpResponse scenarios(std::string_view method, std::string_view rest, std::string_view body) const;

    ScenarioStore& store_;
};

/// Validated scenario re-serialized in canonical form.
nlohmann::json canonical_scenario(const nlohmann::json& scenario);

}  // namespace cssd
