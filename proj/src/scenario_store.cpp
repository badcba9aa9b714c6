#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cssd/scenario.hpp"
#include "cssd/service.hpp"

namespace cssd {

using nlohmann::json;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json record_json(const ScenarioStore::Record& r) {
    return {{"id", r.id}, {"created_at", r.created_at}, {"updated_at", r.updated_at}, {"scenario", r.scenario}};
}

}  // namespace

json canonical_scenario(const json& scenario) {
    json doc = scenario;
    if (doc.is_object()) doc.erase("results");
    return to_json(scenario_from_json(doc));
}

ScenarioStore::ScenarioStore(std::filesystem::path file) : file_(std::move(file)) { load(); }

void ScenarioStore::load() {
    if (!std::filesystem::exists(file_)) return;
    std::ifstream in(file_, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read scenario store " + file_.string());
    const json doc = json::parse(in);
    next_id_ = doc.value("next_id", 1L);
    for (const auto& r : doc.at("records")) {
        Record rec{r.at("id").get<std::string>(), r.at("scenario"), r.at("created_at").get<std::string>(),
                   r.at("updated_at").get<std::string>()};
        records_.emplace(rec.id, std::move(rec));
    }
}

void ScenarioStore::persist() const {
    json doc{{"next_id", next_id_}, {"records", json::array()}};
    for (const auto& [id, r] : records_) doc["records"].push_back(record_json(r));

    if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
    std::filesystem::path tmp = file_;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write scenario store " + tmp.string());
        out << doc.dump(2) << '\n';
        out.flush();
        if (!out) throw std::runtime_error("short write to scenario store " + tmp.string());
    }
    std::filesystem::rename(tmp, file_);
}

ScenarioStore::Record ScenarioStore::create(const json& scenario) {
    json canonical = canonical_scenario(scenario);
    std::lock_guard lock(mutex_);
    char id[32];
    std::snprintf(id, sizeof id, "scn-%06ld", next_id_++);
    const std::string now = utc_now();
    Record rec{id, std::move(canonical), now, now};
    records_[rec.id] = rec;
    persist();
    return rec;
}

std::optional<ScenarioStore::Record> ScenarioStore::get(const std::string& id) const {
    std::lock_guard lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    return it->second;
}

std::optional<ScenarioStore::Record> ScenarioStore::update(const std::string& id, const json& scenario) {
    json canonical = canonical_scenario(scenario);
    std::lock_guard lock(mutex_);
    auto it = records_.find(id);
    if (it == records_.end()) return std::nullopt;
    it->second.scenario = std::move(canonical);
    it->second.updated_at = utc_now();
    persist();
    return it->second;
}

bool ScenarioStore::remove(const std::string& id) {
    std::lock_guard lock(mutex_);
    if (records_.erase(id) == 0) return false;
    persist();
    return true;
}

std::vector<ScenarioStore::Record> ScenarioStore::list() const {
    std::lock_guard lock(mutex_);
    std::vector<Record> out;
    for (const auto& [id, r] : records_) out.push_back(r);
    return out;
}

}  // namespace cssd
