#include "qap/run_record.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace qap {

using nlohmann::json;

std::string to_string(Heuristic h) {
  return h == Heuristic::kTabu ? "ts" : "sa";
}

std::string to_string(IterationSemantics s) {
  return s == IterationSemantics::kNeighborhoodScan ? "neighborhood_scan"
                                                    : "single_trial";
}

Heuristic heuristic_from_string(const std::string& s) {
  if (s == "ts") return Heuristic::kTabu;
  if (s == "sa") return Heuristic::kAnnealing;
  throw ValidationError("unknown heuristic '" + s + "' (expected ts or sa)");
}

std::optional<FirstHit> RunRecord::hit_for(double q) const {
  for (const FirstHit& h : first_hits)
    if (h.q == q) return h;
  return std::nullopt;
}

TargetTracker::TargetTracker(std::vector<double> targets,
                             std::optional<Cost> best_known,
                             const std::string& instance_name) {
  std::sort(targets.begin(), targets.end(), std::greater<>());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
  if (!targets.empty()) {
    if (!best_known)
      throw ValidationError(instance_name +
                            ": quality targets require a best-known cost");
    if (targets.back() < 0)
      throw ValidationError(instance_name + ": negative quality target");
  }
  targets_ = std::move(targets);
  thresholds_.reserve(targets_.size());
  for (double q : targets_)
    thresholds_.push_back(static_cast<Cost>(
        std::floor((1.0 + q) * static_cast<double>(*best_known))));
  if (!thresholds_.empty()) watermark_ = thresholds_.front();
}

void TargetTracker::record_hits(Cost best, std::uint64_t iteration,
                                std::int64_t time_ns) {
  while (next_ < thresholds_.size() && best <= thresholds_[next_]) {
    hits_.push_back({targets_[next_], iteration, time_ns});
    ++next_;
  }
  watermark_ = next_ < thresholds_.size() ? thresholds_[next_]
                                          : std::numeric_limits<Cost>::min();
}

namespace {

constexpr int kSchemaVersion = 1;

json header_json(const RunSet& set) {
  return json{{"format", "qap-runs"},
              {"version", kSchemaVersion},
              {"heuristic", to_string(set.heuristic)},
              {"instance", set.instance_name},
              {"iterations", set.iterations}};
}

json record_json(const RunRecord& r) {
  json hits = json::array();
  for (const FirstHit& h : r.first_hits)
    hits.push_back({{"q", h.q}, {"iteration", h.iteration}, {"time_ns", h.time_ns}});
  json j{{"heuristic", to_string(r.heuristic)},
         {"instance", r.instance_name},
         {"seed", r.seed},
         {"iterations", r.iterations},
         {"executed_iterations", r.executed_iterations},
         {"total_time_ns", r.total_time_ns},
         {"targets", r.targets},
         {"first_hits", std::move(hits)},
         {"final_best_cost", r.final_best_cost},
         {"iteration_semantics", to_string(r.iteration_semantics)}};
  if (r.best_known)
    j["best_known"] = *r.best_known;
  else
    j["best_known"] = nullptr;
  return j;
}

RunRecord record_from_json(const json& j) {
  RunRecord r;
  r.heuristic = heuristic_from_string(j.at("heuristic").get<std::string>());
  r.instance_name = j.at("instance").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.iterations = j.at("iterations").get<std::uint64_t>();
  r.executed_iterations = j.at("executed_iterations").get<std::uint64_t>();
  r.total_time_ns = j.at("total_time_ns").get<std::int64_t>();
  r.targets = j.at("targets").get<std::vector<double>>();
  for (const json& h : j.at("first_hits"))
    r.first_hits.push_back({h.at("q").get<double>(),
                            h.at("iteration").get<std::uint64_t>(),
                            h.at("time_ns").get<std::int64_t>()});
  r.final_best_cost = j.at("final_best_cost").get<Cost>();
  if (!j.at("best_known").is_null()) r.best_known = j.at("best_known").get<Cost>();
  const std::string sem = j.at("iteration_semantics").get<std::string>();
  if (sem == "neighborhood_scan")
    r.iteration_semantics = IterationSemantics::kNeighborhoodScan;
  else if (sem == "single_trial")
    r.iteration_semantics = IterationSemantics::kSingleTrial;
  else
    throw ValidationError("unknown iteration semantics '" + sem + "'");
  return r;
}

void check_header(const json& j) {
  if (!j.is_object() || j.value("format", "") != "qap-runs")
    throw ParseError("run log: missing qap-runs header line");
  const int version = j.value("version", -1);
  if (version != kSchemaVersion)
    throw ParseError("run log: schema version " + std::to_string(version) +
                     " unsupported (expected " + std::to_string(kSchemaVersion) + ")");
}

RunSet shell_from_header(const json& j) {
  try {
    RunSet set;
    set.heuristic = heuristic_from_string(j.at("heuristic").get<std::string>());
    set.instance_name = j.at("instance").get<std::string>();
    set.iterations = j.at("iterations").get<std::uint64_t>();
    return set;
  } catch (const json::exception& e) {
    throw ParseError(std::string("run log: bad header fields: ") + e.what());
  }
}

}  // namespace

void persist_runs(const RunSet& set, std::ostream& out) {
  out << header_json(set).dump() << "\n";
  for (const RunRecord& r : set.records) out << record_json(r).dump() << "\n";
}

void persist_runs(const RunSet& set, const std::string& path, bool append) {
  if (append && std::ifstream(path).good()) {
    {
      std::ifstream in(path);
      std::string first;
      std::getline(in, first);
      json j = json::parse(first, nullptr, false);
      check_header(j);
      const RunSet shell = shell_from_header(j);
      if (shell.heuristic != set.heuristic ||
          shell.instance_name != set.instance_name ||
          shell.iterations != set.iterations)
        throw ValidationError(path + ": run set shape differs from existing log");
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw IoError("cannot append to run log: " + path);
    for (const RunRecord& r : set.records) out << record_json(r).dump() << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write run log: " + path);
  persist_runs(set, out);
}

LoadResult load_runs(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("run log: empty file");
  json header = json::parse(line, nullptr, false);
  check_header(header);
  LoadResult result;
  result.set = shell_from_header(header);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      ++result.skipped_lines;
      continue;
    }
    try {
      RunRecord r = record_from_json(j);
      if (r.heuristic != result.set.heuristic ||
          r.instance_name != result.set.instance_name ||
          r.iterations != result.set.iterations) {
        ++result.skipped_lines;
        continue;
      }
      result.set.records.push_back(std::move(r));
    } catch (const json::exception&) {
      ++result.skipped_lines;
    } catch (const ValidationError&) {
      ++result.skipped_lines;
    }
  }
  return result;
}

LoadResult load_runs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open run log: " + path);
  return load_runs(in);
}

}  // namespace qap
