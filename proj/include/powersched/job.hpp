#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace powersched {

using Tick = long long;

// One-shot job: may execute in any ticks of [arrival, deadline), preemptible
// at tick boundaries only.
struct Job {
  int id = 0;
  Tick arrival = 0;
  Tick deadline = 0;
  Tick exec = 0;
  int stream = 0;  // stream tag for multi-stream scheduling, 0 when unused

  // arrival >= 0, exec >= 1, arrival + exec <= deadline
  void validate() const;
  Tick window() const { return deadline - arrival; }
  bool urgent() const { return exec == window(); }
};

struct JobRuntime {
  Job job;
  Tick remaining = 0;
};

// Throws on duplicate ids or malformed jobs.
void validate_job_set(std::span<const Job> jobs);

Tick max_deadline(std::span<const Job> jobs);

// JSON shape: {"jobs":[{"id":..,"arrival":..,"deadline":..,"exec":..,"stream":..?}]}
std::string jobs_to_json(std::span<const Job> jobs);
std::vector<Job> jobs_from_json(const std::string& text);
std::vector<Job> load_jobs_file(const std::string& path);
void save_jobs_file(const std::string& path, std::span<const Job> jobs);

}  // namespace powersched
