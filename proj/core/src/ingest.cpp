#include "cardiosync/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "cardiosync/errors.hpp"

namespace cardiosync {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& field, const fs::path& path,
                    std::size_t line_no) {
  try {
    std::size_t consumed = 0;
    const double v = std::stod(field, &consumed);
    if (consumed != field.size()) throw std::invalid_argument(field);
    if (!std::isfinite(v)) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ":" + std::to_string(line_no) +
                      ": non-finite value '" + field + "'");
    }
    return v;
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw Error(ErrorKind::ParseError,
                path.string() + ":" + std::to_string(line_no) +
                    ": cannot parse number '" + field + "'");
  }
}

// Drops sub-ulp jitter introduced by printing/parsing time stamps: 12
// significant digits is far finer than any physiological sampling clock.
double snap_rate(double rate) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", rate);
  return std::stod(buf);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) fields.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

bool header_is_two_column(const std::string& header) {
  return trim(header) == "t_seconds,value";
}

bool header_is_one_column(const std::string& header) {
  return trim(header) == "value";
}

}  // namespace

const char* to_string(Stage stage) {
  return stage == Stage::Stationary ? "stationary" : "exercise_recovery";
}

Stage stage_from_number(int stage_number) {
  switch (stage_number) {
    case 1:
    case 3:
      return Stage::Stationary;
    case 2:
    case 4:
      return Stage::ExerciseRecovery;
    default:
      throw Error(ErrorKind::InvalidInput,
                  "stage must be 1..4, got " + std::to_string(stage_number));
  }
}

Waveform load_waveform_csv(const fs::path& path, SignalLabel label,
                           std::optional<double> expected_rate_hz) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::MissingFile, path.string());
  }

  std::string header;
  if (!std::getline(in, header)) {
    throw Error(ErrorKind::ParseError, path.string() + ": empty file");
  }
  header = trim(header);

  Waveform w;
  w.label = label;

  if (header_is_one_column(header)) {
    double rate = 0.0;
    if (expected_rate_hz) {
      rate = *expected_rate_hz;
    } else {
      const fs::path sidecar = path.string() + ".rate";
      std::ifstream rate_in(sidecar);
      std::string rate_line;
      if (!rate_in || !std::getline(rate_in, rate_line)) {
        throw Error(ErrorKind::ParseError,
                    path.string() +
                        ": one-column file needs a rate (argument or '" +
                        sidecar.string() + "' sidecar)");
      }
      rate = parse_double(trim(rate_line), sidecar, 1);
    }
    if (!(rate > 0.0) || !std::isfinite(rate)) {
      throw Error(ErrorKind::InvalidConfig, "sample rate must be > 0");
    }
    w.rate_hz = rate;
    w.start_s = 0.0;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty()) continue;
      w.samples.push_back(parse_double(line, path, line_no));
    }
  } else if (header_is_two_column(header)) {
    std::vector<double> times;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      line = trim(line);
      if (line.empty()) continue;
      const auto fields = split_csv(line);
      if (fields.size() != 2) {
        throw Error(ErrorKind::ParseError,
                    path.string() + ":" + std::to_string(line_no) +
                        ": expected 2 fields, got " +
                        std::to_string(fields.size()));
      }
      times.push_back(parse_double(fields[0], path, line_no));
      w.samples.push_back(parse_double(fields[1], path, line_no));
    }
    if (times.size() < 2) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ": need at least 2 rows");
    }

    // Uniform-spacing validation against the median interval.
    std::vector<double> dts(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      dts[i] = times[i + 1] - times[i];
    }
    std::vector<double> sorted = dts;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                     sorted.end());
    const double nominal = sorted[sorted.size() / 2];
    if (!(nominal > 0.0)) {
      throw Error(ErrorKind::ParseError,
                  path.string() + ": time stamps must be increasing");
    }
    for (std::size_t i = 0; i < dts.size(); ++i) {
      if (std::abs(dts[i] - nominal) > 0.10 * nominal) {
        throw Error(ErrorKind::NonUniform,
                    path.string() + ":" + std::to_string(i + 3) +
                        ": interval " + std::to_string(dts[i]) +
                        " s deviates more than 10% from nominal " +
                        std::to_string(nominal) + " s");
      }
    }
    w.rate_hz = snap_rate(1.0 / nominal);
    w.start_s = times.front();
    if (expected_rate_hz) {
      if (std::abs(w.rate_hz - *expected_rate_hz) >
          0.01 * *expected_rate_hz) {
        throw Error(ErrorKind::RateMismatch,
                    path.string() + ": measured " + std::to_string(w.rate_hz) +
                        " Hz vs expected " +
                        std::to_string(*expected_rate_hz) + " Hz");
      }
      w.rate_hz = *expected_rate_hz;
    }
  } else {
    throw Error(ErrorKind::ParseError,
                path.string() +
                    ":1: header must be 't_seconds,value' or 'value'");
  }

  validate_waveform(w, path.string().c_str());
  return w;
}

void write_waveform_csv(const fs::path& path, const Waveform& w) {
  validate_waveform(w, "write_waveform_csv");
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::MissingFile,
                "cannot open " + path.string() + " for writing");
  }
  out << "t_seconds,value\n";
  char buf[64];
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", w.time_of(i),
                  w.samples[i]);
    out << buf;
  }
  if (!out) {
    throw Error(ErrorKind::Internal, "write failed: " + path.string());
  }
}

CohortIndex scan_cohort(const fs::path& root, const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw Error(ErrorKind::MissingFile, manifest_path.string());
  }

  std::string header;
  if (!std::getline(in, header) ||
      trim(header) != "subject,stage,repetition,resp,bvp,rppg") {
    throw Error(ErrorKind::ManifestError,
                manifest_path.string() +
                    ":1: header must be 'subject,stage,repetition,resp,bvp,rppg'");
  }

  auto check_waveform_file = [&](const fs::path& p, const std::string& entry) {
    if (!fs::exists(p)) {
      throw Error(ErrorKind::MissingFile,
                  p.string() + " (referenced by " + entry + ")");
    }
    std::ifstream f(p);
    std::string first;
    if (!f || !std::getline(f, first) ||
        (!header_is_two_column(first) && !header_is_one_column(first))) {
      throw Error(ErrorKind::ManifestError,
                  entry + ": " + p.string() + " is not a waveform CSV");
    }
  };

  CohortIndex index;
  index.root = root;
  std::set<std::tuple<std::string, int, int>> seen;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const std::string entry =
        manifest_path.string() + ":" + std::to_string(line_no);
    const auto fields = split_csv(line);
    if (fields.size() != 6) {
      throw Error(ErrorKind::ManifestError,
                  entry + ": expected 6 fields, got " +
                      std::to_string(fields.size()));
    }

    SessionRecord rec;
    rec.subject_id = fields[0];
    if (rec.subject_id.empty()) {
      throw Error(ErrorKind::ManifestError, entry + ": empty subject id");
    }
    try {
      rec.stage_number = std::stoi(fields[1]);
      rec.repetition = std::stoi(fields[2]);
    } catch (const std::exception&) {
      throw Error(ErrorKind::ManifestError,
                  entry + ": stage and repetition must be integers");
    }
    if (rec.stage_number < 1 || rec.stage_number > 4) {
      throw Error(ErrorKind::ManifestError, entry + ": stage must be 1..4");
    }
    if (fields[3].empty()) {
      throw Error(ErrorKind::ManifestError, entry + ": resp path is required");
    }
    rec.resp_path = root / fields[3];
    if (!fields[4].empty()) rec.bvp_path = root / fields[4];
    if (!fields[5].empty()) rec.rppg_path = root / fields[5];
    if (rec.bvp_path.empty() && rec.rppg_path.empty()) {
      throw Error(ErrorKind::ManifestError,
                  entry + ": need at least one pulse source (bvp or rppg)");
    }

    if (!seen.insert({rec.subject_id, rec.stage_number, rec.repetition})
             .second) {
      throw Error(ErrorKind::ManifestError,
                  entry + ": duplicate (subject, stage, repetition) = (" +
                      rec.subject_id + ", " + fields[1] + ", " + fields[2] +
                      ")");
    }

    check_waveform_file(rec.resp_path, entry);
    if (!rec.bvp_path.empty()) check_waveform_file(rec.bvp_path, entry);
    if (!rec.rppg_path.empty()) check_waveform_file(rec.rppg_path, entry);
    index.sessions.push_back(std::move(rec));
  }
  return index;
}

void write_manifest(const fs::path& manifest_path,
                    const std::vector<SessionRecord>& records) {
  std::ofstream out(manifest_path);
  if (!out) {
    throw Error(ErrorKind::MissingFile,
                "cannot open " + manifest_path.string() + " for writing");
  }
  out << "subject,stage,repetition,resp,bvp,rppg\n";
  for (const auto& rec : records) {
    out << rec.subject_id << ',' << rec.stage_number << ',' << rec.repetition
        << ',' << rec.resp_path.generic_string() << ','
        << rec.bvp_path.generic_string() << ','
        << rec.rppg_path.generic_string() << '\n';
  }
}

Session load_session(const SessionRecord& record) {
  Session session;
  session.subject_id = record.subject_id;
  session.stage = record.stage();
  session.repetition = record.repetition;
  session.resp = load_waveform_csv(record.resp_path, SignalLabel::Resp);
  if (!record.bvp_path.empty()) {
    session.bvp = load_waveform_csv(record.bvp_path, SignalLabel::Bvp);
  }
  if (!record.rppg_path.empty()) {
    session.rppg = load_waveform_csv(record.rppg_path, SignalLabel::Rppg);
  }
  if (!session.bvp && !session.rppg) {
    throw Error(ErrorKind::InvalidInput,
                "session needs at least one pulse source");
  }

  double begin = session.resp.start_s;
  double end = session.resp.end_s();
  for (const auto* w : {&session.bvp, &session.rppg}) {
    if (w->has_value()) {
      begin = std::max(begin, (*w)->start_s);
      end = std::min(end, (*w)->end_s());
    }
  }
  session.duration_s = end - begin;
  if (session.duration_s < kMinOverlapS) {
    throw Error(ErrorKind::InvalidInput,
                "session waveforms overlap for " +
                    std::to_string(session.duration_s) + " s; need >= " +
                    std::to_string(kMinOverlapS));
  }
  return session;
}

}  // namespace cardiosync
