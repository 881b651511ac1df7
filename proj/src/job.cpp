#include "powersched/job.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace powersched {

void Job::validate() const {
  if (arrival < 0)
    throw std::invalid_argument("job " + std::to_string(id) + ": arrival < 0");
  if (exec < 1)
    throw std::invalid_argument("job " + std::to_string(id) + ": exec < 1");
  if (arrival + exec > deadline)
    throw std::invalid_argument("job " + std::to_string(id) +
                                ": window too small for exec");
}

void validate_job_set(std::span<const Job> jobs) {
  std::unordered_set<int> seen;
  for (const Job& j : jobs) {
    j.validate();
    if (!seen.insert(j.id).second)
      throw std::invalid_argument("duplicate job id " + std::to_string(j.id));
  }
}

Tick max_deadline(std::span<const Job> jobs) {
  Tick m = 0;
  for (const Job& j : jobs) m = std::max(m, j.deadline);
  return m;
}

std::string jobs_to_json(std::span<const Job> jobs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Job& j : jobs) {
    nlohmann::json o{{"id", j.id},
                     {"arrival", j.arrival},
                     {"deadline", j.deadline},
                     {"exec", j.exec}};
    if (j.stream != 0) o["stream"] = j.stream;
    arr.push_back(std::move(o));
  }
  return nlohmann::json{{"jobs", std::move(arr)}}.dump(2);
}

std::vector<Job> jobs_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  if (!doc.contains("jobs") || !doc["jobs"].is_array())
    throw std::invalid_argument("expected top-level \"jobs\" array");
  std::vector<Job> out;
  int next_id = 0;
  for (const auto& o : doc["jobs"]) {
    Job j;
    j.id = o.contains("id") ? o.at("id").get<int>() : next_id;
    j.arrival = o.at("arrival").get<Tick>();
    j.deadline = o.at("deadline").get<Tick>();
    j.exec = o.at("exec").get<Tick>();
    j.stream = o.value("stream", 0);
    next_id = j.id + 1;
    out.push_back(j);
  }
  validate_job_set(out);
  return out;
}

std::vector<Job> load_jobs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return jobs_from_json(buf.str());
}

void save_jobs_file(const std::string& path, std::span<const Job> jobs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << jobs_to_json(jobs) << '\n';
}

}  // namespace powersched
