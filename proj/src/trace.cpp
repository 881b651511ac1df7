#include "powersched/trace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace powersched {

const char* to_string(SegmentState s) {
  switch (s) {
    case SegmentState::Off: return "off";
    case SegmentState::Standby: return "standby";
    case SegmentState::Busy: return "busy";
  }
  throw std::logic_error("bad segment state");
}

SegmentState segment_state_from_string(const std::string& s) {
  if (s == "off") return SegmentState::Off;
  if (s == "standby") return SegmentState::Standby;
  if (s == "busy") return SegmentState::Busy;
  throw std::invalid_argument("unknown segment state \"" + s + "\"");
}

void ScheduleTrace::validate() const {
  for (size_t p = 0; p < segments.size(); ++p) {
    const auto& timeline = segments[p];
    Tick cursor = 0;
    for (const Segment& seg : timeline) {
      if (seg.start != cursor)
        throw std::invalid_argument("proc " + std::to_string(p) +
                                    ": segment gap at " +
                                    std::to_string(cursor));
      if (seg.end <= seg.start)
        throw std::invalid_argument("proc " + std::to_string(p) +
                                    ": empty segment at " +
                                    std::to_string(seg.start));
      if ((seg.state == SegmentState::Busy) != (seg.job >= 0))
        throw std::invalid_argument("proc " + std::to_string(p) +
                                    ": job id on non-busy segment (or missing)");
      cursor = seg.end;
    }
    if (cursor != horizon)
      throw std::invalid_argument("proc " + std::to_string(p) +
                                  ": timeline ends at " +
                                  std::to_string(cursor) + ", horizon " +
                                  std::to_string(horizon));
  }

  // Every off-to-on edge needs exactly one wake event and vice versa.
  std::vector<WakeEvent> expected;
  for (size_t p = 0; p < segments.size(); ++p) {
    bool was_on = false;
    for (const Segment& seg : segments[p]) {
      bool on = seg.state != SegmentState::Off;
      if (on && !was_on)
        expected.push_back({static_cast<int>(p), seg.start});
      was_on = on;
    }
  }
  auto key = [](const WakeEvent& w) { return std::pair(w.proc, w.t); };
  auto sorted = [&](std::vector<WakeEvent> v) {
    std::sort(v.begin(), v.end(),
              [&](const WakeEvent& a, const WakeEvent& b) {
                return key(a) < key(b);
              });
    return v;
  };
  auto got = sorted(wakes);
  auto want = sorted(std::move(expected));
  if (got.size() != want.size() ||
      !std::equal(got.begin(), got.end(), want.begin(),
                  [&](const WakeEvent& a, const WakeEvent& b) {
                    return key(a) == key(b);
                  }))
    throw std::invalid_argument("wake events do not match off-to-on edges");
}

void TraceBuilder::record(int proc, Tick t, SegmentState state, int job) {
  if (proc < 0) throw std::invalid_argument("negative proc index");
  if (static_cast<size_t>(proc) >= segments_.size()) {
    segments_.resize(proc + 1);
    next_tick_.resize(proc + 1, 0);
  }
  auto& timeline = segments_[proc];
  Tick& next = next_tick_[proc];
  if (t < next)
    throw std::invalid_argument("out-of-order record for proc " +
                                std::to_string(proc));
  if (t > next) {
    // Unrecorded ticks are off time.
    if (!timeline.empty() && timeline.back().state == SegmentState::Off &&
        timeline.back().end == next)
      timeline.back().end = t;
    else
      timeline.push_back({next, t, SegmentState::Off, -1});
  }
  if (!timeline.empty() && timeline.back().end == t &&
      timeline.back().state == state && timeline.back().job == job)
    timeline.back().end = t + 1;
  else
    timeline.push_back({t, t + 1, state, job});
  next = t + 1;
}

void TraceBuilder::record_wake(int proc, Tick t) {
  wakes_.push_back({proc, t});
}

ScheduleTrace TraceBuilder::finish(Tick horizon) {
  ScheduleTrace trace;
  trace.horizon = horizon;
  trace.segments = std::move(segments_);
  trace.wakes = std::move(wakes_);
  for (size_t p = 0; p < trace.segments.size(); ++p) {
    auto& timeline = trace.segments[p];
    Tick next = next_tick_[p];
    if (next > horizon)
      throw std::invalid_argument("records past horizon on proc " +
                                  std::to_string(p));
    if (next < horizon) {
      if (!timeline.empty() && timeline.back().state == SegmentState::Off &&
          timeline.back().end == next)
        timeline.back().end = horizon;
      else
        timeline.push_back({next, horizon, SegmentState::Off, -1});
    }
  }
  segments_.clear();
  next_tick_.clear();
  trace.validate();
  return trace;
}

std::string trace_to_json(const ScheduleTrace& trace) {
  nlohmann::json procs = nlohmann::json::array();
  for (const auto& timeline : trace.segments) {
    nlohmann::json segs = nlohmann::json::array();
    for (const Segment& seg : timeline) {
      nlohmann::json o{{"start", seg.start},
                       {"end", seg.end},
                       {"state", to_string(seg.state)}};
      if (seg.state == SegmentState::Busy) o["job"] = seg.job;
      segs.push_back(std::move(o));
    }
    procs.push_back(std::move(segs));
  }
  nlohmann::json wakes = nlohmann::json::array();
  for (const WakeEvent& w : trace.wakes)
    wakes.push_back({{"proc", w.proc}, {"t", w.t}});
  return nlohmann::json{{"processors", trace.processors()},
                        {"horizon", trace.horizon},
                        {"segments", std::move(procs)},
                        {"wakes", std::move(wakes)}}
      .dump(2);
}

ScheduleTrace trace_from_json(const std::string& text) {
  nlohmann::json doc = nlohmann::json::parse(text);
  ScheduleTrace trace;
  trace.horizon = doc.at("horizon").get<Tick>();
  for (const auto& timeline : doc.at("segments")) {
    std::vector<Segment> segs;
    for (const auto& o : timeline) {
      Segment seg;
      seg.start = o.at("start").get<Tick>();
      seg.end = o.at("end").get<Tick>();
      seg.state = segment_state_from_string(o.at("state").get<std::string>());
      seg.job = o.value("job", -1);
      segs.push_back(seg);
    }
    trace.segments.push_back(std::move(segs));
  }
  for (const auto& o : doc.at("wakes"))
    trace.wakes.push_back({o.at("proc").get<int>(), o.at("t").get<Tick>()});
  if (doc.contains("processors") &&
      doc.at("processors").get<int>() != trace.processors())
    throw std::invalid_argument("processor count mismatch");
  trace.validate();
  return trace;
}

void save_trace_file(const std::string& path, const ScheduleTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << trace_to_json(trace) << '\n';
}

ScheduleTrace load_trace_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return trace_from_json(buf.str());
}

}  // namespace powersched
